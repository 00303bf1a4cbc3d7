"""
Marchenko-Pastur law with ratio parameter ``gamma = N / p``.

Density on ``[(1 - sqrt(gamma))^2, (1 + sqrt(gamma))^2]`` plus an atom of
mass ``1 - 1/gamma`` at the origin when ``gamma > 1``.  Integrals of the
density are computed in the angle variable ``y = c - h cos(theta)``
(``c``, ``h`` the centre and half-width of the support), which removes the
square-root endpoint behaviour and, at ``gamma = 1``, the ``1/sqrt(y)``
singularity at the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .eigensolve import check_upper_half_plane
from .errors import InvariantError, NumericError, ValidationError

__all__ = [
    "MpLaw",
    "mp_density",
    "mp_cdf",
    "mp_stieltjes",
    "mp_moment",
    "mp_continuous_mass",
    "mp_quadratic_residual",
    "adaptive_gauss_legendre",
]

MAX_MOMENT_ORDER = 12


def _check_gamma(gamma):
    gamma = float(gamma)
    if not gamma > 0 or not math.isfinite(gamma):
        raise ValidationError(f"gamma must be a positive finite number, got {gamma}")
    return gamma


@dataclass(frozen=True)
class MpLaw:
    gamma: float
    support_lo: float = field(init=False)
    support_hi: float = field(init=False)
    atom_at_zero: float = field(init=False)

    def __post_init__(self):
        g = _check_gamma(self.gamma)
        r = math.sqrt(g)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "support_lo", (1.0 - r) ** 2)
        object.__setattr__(self, "support_hi", (1.0 + r) ** 2)
        object.__setattr__(self, "atom_at_zero", max(0.0, 1.0 - 1.0 / g))

    def density(self, y):
        return mp_density(self.gamma, y)

    def cdf(self, x):
        return mp_cdf(self.gamma, x)

    def stieltjes(self, z):
        return mp_stieltjes(self.gamma, z)

    def moment(self, k):
        return mp_moment(self.gamma, k)

    @property
    def jumps(self):
        """Points where the CDF is discontinuous."""
        return (0.0,) if self.atom_at_zero > 0 else ()


def mp_density(gamma, y):
    """Continuous part of the law; zero off the support and at ``y = 0``."""
    gamma = _check_gamma(gamma)
    y = np.asarray(y, dtype=float)
    r = math.sqrt(gamma)
    lo, hi = (1.0 - r) ** 2, (1.0 + r) ** 2
    inside = (y > lo) & (y < hi) & (y > 0)
    ys = np.where(inside, y, 1.0)
    val = np.sqrt(np.maximum((hi - ys) * (ys - lo), 0.0)) / (2.0 * math.pi * gamma * ys)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _gl_rule(order):
    return np.polynomial.legendre.leggauss(order)


def adaptive_gauss_legendre(f, a, b, tol=1e-10, order=20, max_depth=50, rtol=1e-13):
    """Integrate vectorized `f` over ``[a, b]``.

    The target accuracy is ``max(tol, rtol * |I0|)`` with ``I0`` the
    single-panel estimate.  Each panel is accepted when its ``order``-point
    estimate agrees with the sum over its two halves to within the panel's
    share of that target.
    """
    if b == a:
        return 0.0
    nodes, weights = _gl_rule(order)

    def rule(lo, hi):
        half = 0.5 * (hi - lo)
        return half * float(weights @ f(lo + half * (nodes + 1.0)))

    first = rule(a, b)
    tol = max(tol, rtol * abs(first))
    total = []
    stack = [(a, b, first, 0)]
    width = b - a
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        share = tol * (hi - lo) / width
        if abs(left + right - whole) <= share:
            total.append(left + right)
        elif depth >= max_depth:
            raise NumericError("adaptive quadrature hit its depth limit",
                               interval=(lo, hi), estimate=left + right)
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return math.fsum(total)


def _angle_integrand(gamma, k=0):
    r = math.sqrt(gamma)
    lo, hi = (1.0 - r) ** 2, (1.0 + r) ** 2
    c, h = 0.5 * (lo + hi), 0.5 * (hi - lo)

    # density(y) dy with y = c - h cos(t):  h^2 sin^2(t) y^(k-1) / (2 pi gamma)
    def g(t):
        # lo + 2h sin^2(t/2) avoids the cancellation in c - h cos(t) near t = 0
        half = np.sin(0.5 * t)
        y = lo + 2.0 * h * half * half
        s = np.sin(t)
        if k == 0:
            # y = 2h sin^2(t/2) when lo = 0, so s^2 / y = 2 cos^2(t/2) / h
            base = np.where(y > 0, s * s / np.where(y > 0, y, 1.0),
                            2.0 * np.cos(0.5 * t) ** 2 / h)
            return h * h * base / (2.0 * math.pi * gamma)
        return h * h * s * s * y ** (k - 1) / (2.0 * math.pi * gamma)

    return g, c, h


def mp_continuous_mass(gamma, tol=1e-12) -> float:
    """Quadrature mass of the density over the whole support."""
    gamma = _check_gamma(gamma)
    g, _, _ = _angle_integrand(gamma)
    return adaptive_gauss_legendre(g, 0.0, math.pi, tol=tol)


def _cdf_scalar(gamma, x, tol):
    law = MpLaw(gamma)
    atom = law.atom_at_zero if x >= 0 else 0.0
    if x <= law.support_lo:
        return atom
    if x >= law.support_hi:
        return 1.0
    g, c, h = _angle_integrand(gamma)
    theta = math.acos(min(1.0, max(-1.0, (c - x) / h)))
    return min(1.0, atom + adaptive_gauss_legendre(g, 0.0, theta, tol=tol))


def mp_cdf(gamma, x, tol=1e-10):
    """CDF including the atom at zero; exactly 1 at and beyond the upper edge."""
    gamma = _check_gamma(gamma)
    if np.ndim(x) == 0:
        return _cdf_scalar(gamma, float(x), tol)
    x = np.asarray(x, dtype=float)
    return np.array([_cdf_scalar(gamma, float(v), tol) for v in x.ravel()]).reshape(x.shape)


def mp_moment(gamma, k: int, tol=1e-12) -> float:
    """``int y^k dF_gamma``; the atom only contributes to ``k = 0``."""
    gamma = _check_gamma(gamma)
    k = int(k)
    if not 0 <= k <= MAX_MOMENT_ORDER:
        raise ValidationError(f"moment order must lie in [0, {MAX_MOMENT_ORDER}], got {k}")
    if k == 0:
        return 1.0
    g, _, _ = _angle_integrand(gamma, k)
    return adaptive_gauss_legendre(g, 0.0, math.pi, tol=tol)


# ---------------------------------------------------------------------------
# Stieltjes transform
# ---------------------------------------------------------------------------

def _mp_stieltjes_scalar(gamma, z):
    z = check_upper_half_plane(z)
    a = gamma * z
    b = -(z + gamma - 1.0)
    disc = np.sqrt(complex(b * b - 4.0 * a))
    if (b.conjugate() * disc).real < 0:
        disc = -disc
    q = -0.5 * (b + disc)
    roots = (q / a, 1.0 / q)
    neg = [m for m in roots if m.imag < 0]
    if not neg:
        raise InvariantError("no root of the MP quadratic lies in the lower half-plane",
                             gamma=gamma, z=z, roots=roots)
    if len(neg) == 2:
        # the transform of a measure on [0, inf) also has Im(z m) <= 0
        neg.sort(key=lambda m: (z * m).imag)
    return complex(neg[0])


def mp_stieltjes(gamma, z):
    """``int dF_gamma(t) / (z - t)`` as the root of
    ``gamma z m^2 - (z + gamma - 1) m + 1 = 0`` with ``Im m < 0``.

    Accepts a scalar or an array of points in the upper half-plane.
    """
    gamma = _check_gamma(gamma)
    if np.ndim(z) == 0:
        return _mp_stieltjes_scalar(gamma, z)
    z = np.asarray(z, dtype=complex)
    return np.array([_mp_stieltjes_scalar(gamma, v) for v in z.ravel()]).reshape(z.shape)


def mp_quadratic_residual(gamma, z, m) -> float:
    """``|gamma z m^2 - m (z + gamma - 1) + 1|``."""
    return abs(gamma * z * m * m - m * (z + gamma - 1.0) + 1.0)
