"""
Convergence to the Marchenko-Pastur law
=======================================

For fixed d and growing n, the spectrum of the sample covariance of tensor
features approaches the Marchenko-Pastur law with ratio gamma = N/p.  The
KS distance shrinks with n, and a text histogram shows the shape.
"""

import numpy as np

from tensor_esd import (ModelParams, MomentModel, MpLaw, covariance_spectrum, histogram,
                        ks_distance, sample_matrix, spectral_moment)

law = MpLaw(1.0)
for n in (12, 16, 20, 24):
    params = ModelParams.from_gamma(n, 2, 1.0)
    ks = [ks_distance(covariance_spectrum(sample_matrix(params, MomentModel.rademacher(), s)),
                      law.cdf, law.jumps) for s in range(3)]
    print(f"n={n:3d}  N={params.N:4d}  mean KS = {np.mean(ks):.4f}")

params = ModelParams.from_gamma(24, 2, 1.0)
spec = covariance_spectrum(sample_matrix(params, MomentModel.rademacher(), 0))
h = histogram(spec, 16, (0.0, law.support_hi))
centers = 0.5 * (h.edges[1:] + h.edges[:-1])
print("\n  x      empirical  MP")
for c, emp in zip(centers, h.densities):
    mp = float(law.density(c))
    print(f"{c:5.2f}  {emp:8.3f}  {mp:6.3f}  " + "#" * int(40 * emp))

# moments against the Narayana values
for k in range(1, 5):
    print(f"moment {k}: empirical {spectral_moment(spec, k):.3f}, MP {law.moment(k):.3f}")

# gamma > 1 leaves an atom at the origin
params = ModelParams(10, 2, 15)
spec = covariance_spectrum(sample_matrix(params, MomentModel.gaussian(), 3))
law3 = MpLaw(params.gamma_n)
print(f"\ngamma = {params.gamma_n}: zero eigenvalues {np.mean(spec.eigenvalues == 0):.3f}, "
      f"atom {law3.atom_at_zero:.3f}")
