"""
Answering any projection from one row sample
============================================

A uniform sample with replacement of ``t = ceil(eps^-2 ln(2/delta))`` rows
estimates every pattern frequency, for every column subset, within
``eps * n`` with probability ``1 - delta``.  The subset can be chosen after
the sample is drawn.
"""

import numpy as np

from subfreq import ColumnQuery, Dataset, build_sample, estimate_frequency, frequency_vector, sample_heavy_hitters, sample_size

rng = np.random.default_rng(1)
n, d = 5000, 12
rows = rng.integers(0, 2, size=(n, d))
# plant a frequent pattern on columns 2, 5, 7
rows[: n // 3, [2, 5, 7]] = [1, 0, 1]
a = Dataset(rows, 2)

eps, delta = 0.05, 0.01
t = sample_size(eps, delta)
s = build_sample(a, t, rng)
print(f"t = {t} rows kept out of {n}")

for cols in ([2, 5, 7], [0, 1], [2, 7, 11]):
    c = ColumnQuery.of(cols)
    f = frequency_vector(a, c)
    top = max(f.counts, key=f.counts.get)
    b = [int(ch) for ch in format(top, f"0{len(c)}b")]
    est = estimate_frequency(s, c, b)
    print(f"C={c.format():8s} pattern={b} true={f.counts[top]:5d} estimate={est:8.1f} "
          f"allowed error={eps * n:.0f}")

# heavy hitters use the threshold (phi - eps) n on the sample
print("0.2-heavy patterns on {2,5,7}:", sample_heavy_hitters(s, ColumnQuery.of([2, 5, 7]), 0.2, eps))

# repeat with fresh samples: the error stays below eps*n in nearly every trial
c, b = ColumnQuery.of([2, 5, 7]), [1, 0, 1]
truth = frequency_vector(a, c).counts[5]
errors = [abs(estimate_frequency(build_sample(a, t, np.random.default_rng(seed)), c, b) - truth)
          for seed in range(300)]
print(f"failure rate over 300 samples: {np.mean(np.array(errors) > eps * n):.3f} (target {delta})")
