"""
Tensor product features
=======================

A feature vector is built from n i.i.d. scalars by multiplying them over
every d-subset.  Subsets are laid out in colexicographic order, so the
rank of a subset does not depend on n.
"""

import numpy as np

from tensor_esd import (ModelParams, MomentModel, binomial, build_columns, colex_subsets,
                        rank_subset, sample_matrix, unrank_subset)

n, d = 5, 2
print(f"N = C({n}, {d}) = {binomial(n, d)}")
for r, row in enumerate(colex_subsets(n, d)):
    s = tuple(int(v) for v in row)
    assert rank_subset(s, n, d) == r and unrank_subset(r, n, d) == s
    print(r, s)

# one column from a fixed scalar vector
x = np.array([1.0, -2.0, 3.0, 0.5, -1.0])
col = build_columns(x[:, None], d)[:, 0]
print("column:", col)

# Rademacher entries make every feature +-1, so each column has squared norm N
params = ModelParams(8, 3, 20)
Z = sample_matrix(params, MomentModel.rademacher(), seed=0)
print("shape", Z.shape, "squared norms", np.unique(np.einsum("ij,ij->j", Z, Z)))

# features are uncorrelated with unit variance, although far from independent
Z = sample_matrix(ModelParams(6, 2, 20000), MomentModel.gaussian(), seed=1)
C = Z @ Z.T / Z.shape[1]
print("max |cov - I| =", np.abs(C - np.eye(C.shape[0])).max().round(3))
