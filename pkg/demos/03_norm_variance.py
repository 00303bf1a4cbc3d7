"""
Fluctuation of the feature norm
===============================

The squared norm of a tensor feature vector concentrates at N only while d
is small against sqrt(n).  Its variance has a closed form; the ratio to N^2
is tiny for small d and becomes macroscopic once d is of order sqrt(n),
which is where the Marchenko-Pastur description can break down.
"""

import math

import numpy as np

from tensor_esd import (ModelParams, MomentModel, exact_norm_variance, mc_norm_variance,
                        variance_report)

# Monte Carlo check of the closed form (Gaussian entries, fourth moment 3)
params = ModelParams(12, 2, 1)
est = mc_norm_variance(params, MomentModel.gaussian(), 100_000, np.random.default_rng(0))
print(f"exact {exact_norm_variance(12, 2, 3):.1f}, MC {est.estimate:.1f} +- {est.stderr:.1f}")

# Rademacher features have constant norm
print("Rademacher variance:", exact_norm_variance(12, 2, 1))

# sweep d across sqrt(n) for a heavy three-point law
n, B = 144, 9.0
print(f"\nn = {n}, B = {B}, sqrt(n) = {math.isqrt(n)}")
print("  d   Var/N^2      upper       lower     lower(large d)")
for d in (1, 2, 3, 6, 12, 24, 36):
    r = variance_report(n, d, B)

    def fmt(b):
        return f"{b.ratio:10.3e}" if b.applicable else "     n/a  "
    print(f"{d:3d}  {r.exact_ratio:10.3e}  {fmt(r.upper_bound)}  {fmt(r.lower_bound)}  "
          f"{fmt(r.lower_bound_large_d)}  {'ok' if r.ok else r.violations}")
