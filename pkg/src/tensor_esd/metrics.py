"""
Distances and summaries between empirical spectra and reference laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigensolve import EmpiricalSpectrum
from .errors import ValidationError

__all__ = ["Histogram", "ks_distance", "spectral_moment", "histogram", "MAX_MOMENT_ORDER"]

MAX_MOMENT_ORDER = 12


def _eigs(spec):
    if isinstance(spec, EmpiricalSpectrum):
        return spec.eigenvalues
    return EmpiricalSpectrum(spec).eigenvalues


def ks_distance(spec, cdf, jumps=()) -> float:
    """Kolmogorov-Smirnov distance between an ESD and a reference CDF.

    The supremum of ``|F_emp - cdf|`` is taken over the distinct eigenvalues,
    comparing ``cdf(lam)`` with both the empirical value at ``lam`` and its
    left limit.  For a continuous reference this is exact.  A reference with
    atoms should list them in `jumps`; both one-sided values of the reference
    are then compared with the (constant) empirical CDF there as well.

    Parameters
    ----------
    spec : EmpiricalSpectrum or array_like
    cdf : callable
        Vectorized reference CDF.
    jumps : sequence of float
        Discontinuities of the reference.
    """
    ev = _eigs(spec)
    N = ev.size
    pts, idx = np.unique(ev, return_index=True)
    # idx[i] eigenvalues lie strictly below pts[i]
    upper = np.searchsorted(ev, pts, side="right") / N
    lower = idx / N
    ref = np.asarray(cdf(pts), dtype=float)
    # left limits are compared with left limits, so a reference that jumps at
    # an eigenvalue is not penalized for the jump itself
    ref_left = np.asarray(cdf(np.nextafter(pts, -math.inf)), dtype=float)
    dist = max(float(np.max(np.abs(upper - ref))), float(np.max(np.abs(lower - ref_left))))
    for x in jumps:
        x = float(x)
        emp = np.searchsorted(ev, x, side="right") / N
        emp_left = np.searchsorted(ev, x, side="left") / N
        right = float(cdf(x))
        left = float(cdf(np.nextafter(x, -math.inf)))
        dist = max(dist, abs(emp - right), abs(emp_left - left))
    return min(1.0, dist)


def spectral_moment(spec, k: int) -> float:
    """``(1/N) sum lam^k`` with compensated summation."""
    k = int(k)
    if not 0 <= k <= MAX_MOMENT_ORDER:
        raise ValidationError(f"moment order must lie in [0, {MAX_MOMENT_ORDER}], got {k}")
    ev = _eigs(spec)
    if k == 0:
        return 1.0
    return math.fsum(ev ** k) / ev.size


@dataclass(frozen=True)
class Histogram:
    """Uniform-width histogram of a spectrum.

    ``densities`` are counts divided by ``N * width`` so they integrate to one
    when every eigenvalue falls inside the range.
    """

    edges: np.ndarray
    counts: np.ndarray
    densities: np.ndarray

    @property
    def N(self) -> int:
        return int(self.counts.sum())


def histogram(spec, bins: int, range=None) -> Histogram:
    """Bin a spectrum into `bins` equal cells.

    The default range is ``[min, max]`` widened by 1% of its length on each
    side (by 0.5 when all eigenvalues coincide).  Cells are left-closed and
    right-open except the last, which is closed.  Eigenvalues outside an
    explicit range are dropped.
    """
    bins = int(bins)
    if bins < 1:
        raise ValidationError(f"bins must be at least 1, got {bins}")
    ev = _eigs(spec)
    if range is None:
        lo, hi = float(ev[0]), float(ev[-1])
        pad = 0.01 * (hi - lo) if hi > lo else 0.5
        lo, hi = lo - pad, hi + pad
    else:
        lo, hi = map(float, range)
        if not hi > lo:
            raise ValidationError(f"empty histogram range [{lo}, {hi}]")
    edges = np.linspace(lo, hi, bins + 1)
    inside = ev[(ev >= lo) & (ev <= hi)]
    cell = np.searchsorted(edges, inside, side="right") - 1
    cell = np.minimum(cell, bins - 1)
    counts = np.bincount(cell, minlength=bins).astype(np.int64)
    densities = counts / (ev.size * np.diff(edges))
    return Histogram(edges, counts, densities)
