"""
Projected frequency vectors on a small matrix
=============================================

A five-row binary matrix, the projection onto its first two columns, and
the statistics of the resulting frequency vector.
"""

import numpy as np

from subfreq import ColumnQuery, Dataset, frequency_vector, heavy_hitters, lp_sample, moment, project

# the rows are patterns over the alphabet {0, 1}
a = Dataset(np.array([[1, 1, 0],
                      [0, 1, 0],
                      [0, 0, 1],
                      [1, 1, 1],
                      [1, 1, 0]]), q=2)

# columns are 0-indexed, so {0, 1} keeps the first two
c = ColumnQuery.of([0, 1])
print(project(a, c).rows)

# pattern (b0, b1) has id 2*b0 + b1
f = frequency_vector(a, c)
print("f =", f.dense())

for p in (0, 1, 2):
    print(f"F{p} =", moment(f, p))

# the pattern 11 holds 3 of 5 rows
print("heavy hitters (p=1, phi=0.5):", heavy_hitters(f, 1, 0.5))

rng = np.random.default_rng(0)
print("one l2 sample (id, probability):", lp_sample(f, 2, rng))
