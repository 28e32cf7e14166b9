"""
Inputs that force large summaries
=================================

Each generator hides a set ``T`` of code words in the rows and asks about
the support of a test word ``y``.  A statistic on that projection jumps
depending on whether ``y`` is in ``T``.  A summary that could tell the two
cases apart for every ``y`` would have to remember ``T``.
"""

import warnings

import numpy as np

from subfreq import gen_f0, gen_hh, gen_lpsample
from subfreq.oracle import frequency_vector, lp_sample_many

warnings.filterwarnings("ignore", message="target size")

print("distinct counts, d=8, k=3, q=4")
for case_in in (True, False):
    inst = gen_f0(8, 3, 4, 28, case_in, np.random.default_rng(0), verify=True)
    low, high = inst.thresholds
    print(f"  y in T: {case_in!s:5s}  F0={inst.statistic():4.0f}  (in >= {high:.0f}, out <= {low:.0f})")

print("\nheavy hitter witness, d=16, eps=0.25")
for case_in in (True, False):
    inst = gen_hh(16, 0.25, 0.125, 8, case_in, np.random.default_rng(1), verify=True)
    print(f"  y in T: {case_in!s:5s}  count of the all-zero pattern={inst.statistic():3.0f}  "
          f"all-ones block={inst.params['ones_count']}")

print("\nl_0.5 sampling, d=16, eps=0.25")
for case_in in (True, False):
    inst = gen_lpsample(16, 0.25, 0.05, 8, case_in, 0.5, np.random.default_rng(2), verify=True)
    f = frequency_vector(inst.dataset, inst.query)
    draws = lp_sample_many(f, 0.5, 10_000, np.random.default_rng(3))
    hit = np.isin(draws, inst.witness).mean()
    print(f"  y in T: {case_in!s:5s}  mass on heavy-support patterns={inst.statistic():.3f}  "
          f"empirical hit rate={hit:.3f}")
