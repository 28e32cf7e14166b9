"""
Trading space for accuracy with an alpha-net
============================================

Sketch only the column subsets of size at most ``d/2 - alpha d`` or at
least ``d/2 + alpha d``.  Any other query moves to a subset or superset in
the net and pays a bounded distortion.  Larger alpha means fewer stored
sketches and a larger error factor.
"""

import numpy as np

from subfreq import ColumnQuery, Dataset, build_net, build_sketchnet, frequency_vector, moment, query, tradeoff_table
from subfreq.netsketch import SketchSpec

d = 20
print("alpha  relative_space  approx_factor")
for alpha, rel, factor in tradeoff_table(d, [0.05, 0.1, 0.15, 0.25, 0.35]):
    print(f"{alpha:5.2f}  {rel:14.5f}  {factor:13.1f}")

# a small net, built for distinct counts with bottom-k sketches
rng = np.random.default_rng(3)
d = 10
a = Dataset(rng.integers(0, 2, size=(3000, d)), 2)
net = build_net(d, 0.2)
spec = SketchSpec.for_net("bottomk", len(net), eps=0.25, delta=0.05)
snet = build_sketchnet(a, net, spec, p=0, rng=rng)
print(f"\nnet holds {len(net)} of {2**d} subsets (lo={net.lo}, hi={net.hi})")

for cols in ([0, 1, 2], [0, 1, 2, 3, 4], [1, 3, 5, 7, 9, 8]):
    c = ColumnQuery.of(cols)
    est, cert = query(snet, c)
    truth = moment(frequency_vector(a, c), 0)
    print(f"C={c.format():12s} answered on {cert.used_subset.format():14s} "
          f"estimate={est:7.1f} true={truth:5.0f} guaranteed factor={cert.factor:.2f}")
