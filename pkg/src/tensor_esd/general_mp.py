"""
Limiting spectra for anisotropic populations.

For a population covariance with spectral distribution ``H`` (finitely many
atoms here) and ratio ``gamma``, the limiting Stieltjes transform solves

    m = sum_i w_i / (z - t_i (1 - gamma + gamma z m)).

`solve_ie` finds that fixed point by damped iteration on the companion
transform; `stieltjes_inversion`
walks a real grid at height ``eta`` with warm starts and turns the solutions
into a density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolve import check_upper_half_plane
from .errors import ConvergenceError, DomainError, InvariantError, NumericError, ValidationError

__all__ = [
    "DiscreteMeasure",
    "FixpointResult",
    "InversionResult",
    "ie_map",
    "solve_ie",
    "stieltjes_inversion",
    "density_from_stieltjes",
    "esd_of_population",
    "fixpoint_cdf",
    "zero_atom",
    "IM_FLOOR",
    "ETA_FLOOR",
]

IM_FLOOR = 0.5
ETA_FLOOR = 1e-4
SINGULAR_DENOMINATOR = 1e-14


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure on ``[0, inf)``."""

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.atoms, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if a.shape != w.shape or a.ndim != 1 or a.size == 0:
            raise ValidationError("atoms and weights must be nonempty vectors of equal length")
        if np.any(a < 0):
            raise ValidationError("atoms must be nonnegative")
        if np.any(w <= 0):
            raise ValidationError("weights must be positive")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {math.fsum(w)!r}, not 1")
        a.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "atoms", a)
        object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, t=1.0):
        return cls([t], [1.0])


@dataclass(frozen=True)
class FixpointResult:
    m: complex
    iterations: int
    residual: float


def ie_map(H: DiscreteMeasure, gamma: float, z, m) -> complex:
    """One application of the right-hand side of the fixed-point equation."""
    z = check_upper_half_plane(z)
    shift = 1.0 - gamma + gamma * z * complex(m)
    den = z - H.atoms * shift
    if np.min(np.abs(den)) < SINGULAR_DENOMINATOR:
        raise NumericError("fixed-point map hit a singular denominator",
                           z=z, m=complex(m), min_denominator=float(np.min(np.abs(den))))
    terms = H.weights / den
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def _companion_map(H: DiscreteMeasure, gamma: float, z: complex, w: complex) -> complex:
    # w -> 1 / (z - gamma sum_i w_i t_i / (1 - t_i w)) maps Im w < 0 into itself
    terms = H.weights * H.atoms / (1.0 - H.atoms * w)
    s = complex(math.fsum(terms.real), math.fsum(terms.imag))
    return 1.0 / (z - gamma * s)


def solve_ie(H: DiscreteMeasure, gamma: float, z, *, tol=1e-12, max_iter=10_000,
             damping=0.5, m0=None, im_floor=IM_FLOOR) -> FixpointResult:
    """Solve the fixed-point equation at `z` by damped iteration.

    The iteration runs on the companion transform ``w = gamma m + (1 - gamma)/z``,
    for which the equation reads ``w = 1 / (z - gamma int t dH(t) / (1 - t w))``.
    That map sends the lower half-plane into a bounded part of itself, so
    the iterates cannot drift to one of the spurious roots the equation in
    ``m`` has when ``gamma > 1``.  The result is mapped back to ``m``, and the
    reported residual is that of the original equation.

    Parameters
    ----------
    m0 : complex, optional
        Starting value of ``m``; defaults to ``1 / z``.
    im_floor : float
        Smallest accepted ``Im z``.  The default keeps the iteration
        comfortably contractive; inversion near the real axis lowers it
        and relies on warm starts.

    Raises
    ------
    ConvergenceError
        If successive iterates still differ by ``>= tol`` after `max_iter`.
    InvariantError
        If the converged value does not have ``Im m < 0``.
    """
    z = check_upper_half_plane(z)
    gamma = float(gamma)
    if not gamma > 0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    if z.imag < im_floor:
        raise DomainError(f"Im z = {z.imag} below the solver floor {im_floor}")
    if not 0 < damping <= 1:
        raise ValidationError("damping must lie in (0, 1]")
    m = 1.0 / z if m0 is None else complex(m0)
    w = gamma * m + (1.0 - gamma) / z
    if not w.imag < 0:
        w = 1.0 / z
    step = math.inf
    for it in range(1, max_iter + 1):
        new = (1.0 - damping) * w + damping * _companion_map(H, gamma, z, w)
        step = abs(new - w)
        w = new
        if step < tol:
            break
    else:
        raise ConvergenceError(f"fixed-point iteration did not converge at z = {z}",
                               z=z, iterations=max_iter, last_step=step, m=w)
    m = (w - (1.0 - gamma) / z) / gamma
    residual = abs(m - ie_map(H, gamma, z, m))
    if not m.imag < 0:
        raise InvariantError(f"converged value {m} is not in the lower half-plane",
                             z=z, m=m, residual=residual)
    return FixpointResult(m, it, residual)


@dataclass(frozen=True)
class InversionResult:
    x: np.ndarray
    m: np.ndarray
    density: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    converged: np.ndarray
    clamped: int
    atom: float = 0.0


def stieltjes_inversion(H: DiscreteMeasure, gamma: float, x_grid, eta: float = 1e-3, *,
                        tol=1e-12, max_iter=10_000, damping=0.5, eta_floor=ETA_FLOOR,
                        raise_on_failure=True) -> InversionResult:
    """Solve at ``x + i eta`` along `x_grid` and return ``-Im(m) / pi``.

    The limit law's atom at the origin (mass `zero_atom`) would show up as
    the Lorentzian ``a eta / (pi (x^2 + eta^2))``; it is subtracted, so
    ``density`` approximates the continuous part only.  Each grid point
    starts from its left neighbour's solution.  Negative
    density values (roundoff) are clamped to zero and counted in
    ``clamped``.  With ``raise_on_failure=False`` unconverged points are
    recorded (``converged=False``, NaN values) instead of raising; the next
    point then restarts from ``1 / z``.
    """
    eta = float(eta)
    if not eta >= eta_floor:
        raise ValidationError(f"eta = {eta} is below the floor {eta_floor}")
    x = np.asarray(x_grid, dtype=float).ravel()
    ms = np.full(x.size, np.nan + 1j * np.nan)
    its = np.zeros(x.size, dtype=int)
    res = np.full(x.size, np.nan)
    ok = np.zeros(x.size, dtype=bool)
    prev = None
    for i, xi in enumerate(x):
        z = complex(xi, eta)
        try:
            r = solve_ie(H, gamma, z, tol=tol, max_iter=max_iter, damping=damping,
                         m0=prev, im_floor=0.0)
        except NumericError as exc:
            if raise_on_failure:
                exc.diagnostics.setdefault("grid_index", i)
                exc.diagnostics.setdefault("x", float(xi))
                raise
            prev = None
            continue
        ms[i], its[i], res[i], ok[i] = r.m, r.iterations, r.residual, True
        prev = r.m
    atom = zero_atom(H, gamma)
    dens = -ms.imag / math.pi - atom * eta / (math.pi * (x * x + eta * eta))
    neg = ok & (dens < 0)
    dens = np.where(neg, 0.0, dens)
    return InversionResult(x, ms, dens, its, res, ok, int(np.count_nonzero(neg)), atom)


def density_from_stieltjes(H: DiscreteMeasure, gamma: float, x_grid, eta: float = 1e-3,
                           **kwargs) -> np.ndarray:
    """Density of the limiting law on `x_grid`; see `stieltjes_inversion`."""
    return stieltjes_inversion(H, gamma, x_grid, eta, **kwargs).density


def esd_of_population(t_eigs) -> DiscreteMeasure:
    """Spectral distribution of a population covariance, duplicates merged."""
    t = np.asarray(t_eigs, dtype=float).ravel()
    if t.size == 0:
        raise ValidationError("empty population spectrum")
    if np.any(t < 0):
        raise ValidationError("population eigenvalues must be nonnegative")
    atoms, counts = np.unique(t, return_counts=True)
    return DiscreteMeasure(atoms, counts / t.size)


def zero_atom(H: DiscreteMeasure, gamma: float) -> float:
    """Mass of the limit law at the origin, ``max(0, 1 - 1/gamma, H({0}))``."""
    return max(0.0, 1.0 - 1.0 / float(gamma), float(H.weights[H.atoms == 0].sum()))


def fixpoint_cdf(H: DiscreteMeasure, gamma: float, x_grid, eta: float = 1e-3, **kwargs):
    """CDF of the limiting law on a sorted grid starting left of the support.

    The density from `stieltjes_inversion` is integrated by the trapezoid
    rule, and the mass at the origin, ``max(1 - 1/gamma, H({0}))``, is added
    for ``x >= 0``.  Returns a callable that interpolates
    linearly between grid points and is clipped to ``[0, 1]``.
    """
    x = np.asarray(x_grid, dtype=float)
    if np.any(np.diff(x) <= 0):
        raise ValidationError("grid must be strictly increasing")
    dens = density_from_stieltjes(H, gamma, x, eta, **kwargs)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(x))])
    atom = zero_atom(H, gamma)

    def cdf(t):
        t = np.asarray(t, dtype=float)
        val = np.interp(t, x, cum, left=0.0, right=cum[-1])
        val = val + np.where(t >= 0, atom, 0.0)
        val = np.clip(val, 0.0, 1.0)
        return float(val) if val.ndim == 0 else val

    cdf.continuous_mass = float(cum[-1])
    cdf.atom = atom
    return cdf
