"""
Symmetric eigenvalues, sample covariances and their spectral transforms.

The eigenvalue routine is self-contained: Householder reduction to
tridiagonal form followed by implicit-shift QL on the tridiagonal.  Only
eigenvalues are produced.  Resolvent traces go through the eigenvalues;
`shifted_solve` gives a second, independent route used by the tests and by
the identity checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, NumericError, ValidationError

__all__ = [
    "EmpiricalSpectrum",
    "covariance",
    "tridiagonalize",
    "tridiagonal_eigenvalues",
    "sym_eigenvalues",
    "covariance_spectrum",
    "esd_cdf",
    "stieltjes_of_spectrum",
    "shifted_solve",
    "resolvent_trace",
    "check_upper_half_plane",
]

PSD_TOL = 1e-8


def check_upper_half_plane(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"z = {z} is not finite")
    if not z.imag > 0:
        raise DomainError(f"z = {z} is not in the upper half-plane")
    return z


@dataclass(frozen=True)
class EmpiricalSpectrum:
    """Ascending eigenvalues of an ``N x N`` symmetric matrix."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float).ravel()
        if ev.size == 0:
            raise ValidationError("empty spectrum")
        if np.any(np.diff(ev) < 0):
            ev = np.sort(ev)
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def N(self) -> int:
        return self.eigenvalues.size

    def cdf(self, x):
        return esd_cdf(self, x)

    def stieltjes(self, z) -> complex:
        return stieltjes_of_spectrum(self, z)

    def __len__(self):
        return self.N


def covariance(Z, p=None) -> np.ndarray:
    """``Z Z^T / p``, symmetrized as ``(M + M^T) / 2``."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise ValidationError("Z must be a matrix")
    p = Z.shape[1] if p is None else p
    if p < 1:
        raise ValidationError("p must be at least 1")
    M = (Z @ Z.T) / p
    return 0.5 * (M + M.T)


def tridiagonalize(A):
    """Householder reduction of symmetric `A` to tridiagonal form.

    Returns
    -------
    diag : ndarray, shape (N,)
    off : ndarray, shape (N - 1,)
        Sub-diagonal; ``off[i]`` couples ``diag[i]`` and ``diag[i + 1]``.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    for k in range(n - 2):
        x = A[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        if x[0] > 0:
            alpha = -alpha
        v = x.copy()
        v[0] -= alpha
        vmax = np.max(np.abs(v))
        if vmax == 0.0:
            continue
        v /= vmax
        vnorm2 = v @ v
        beta = 2.0 / vnorm2
        S = A[k + 1:, k + 1:]
        w = beta * (S @ v)
        w -= (0.5 * beta * (v @ w)) * v
        S -= np.outer(v, w) + np.outer(w, v)
        A[k + 1, k] = A[k, k + 1] = alpha
        A[k + 2:, k] = 0.0
        A[k, k + 2:] = 0.0
    return np.diag(A).copy(), np.diag(A, -1).copy()


def tridiagonal_eigenvalues(diag, off, max_sweeps=None):
    """Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.

    Raises
    ------
    ConvergenceError
        If more than ``30 * N`` QL sweeps are needed in total.
    """
    d = [float(v) for v in diag]
    n = len(d)
    e = [float(v) for v in off] + [0.0]
    if len(e) != n:
        raise ValidationError("off-diagonal must have length N - 1")
    max_sweeps = 30 * n if max_sweeps is None else max_sweeps
    eps = np.finfo(float).eps
    # absolute deflation floor: relative tests alone stall on denormal-scale blocks
    anorm = max((abs(a) for a in d), default=0.0) + 2.0 * max((abs(b) for b in e), default=0.0)
    floor = eps * eps * anorm
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise ConvergenceError(
                    f"QL iteration did not converge within {max_sweeps} sweeps",
                    sweeps=sweeps, block_start=l, block_end=m,
                    residual_coupling=abs(e[l]))
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.array(d))


def sym_eigenvalues(A, tol: float = 1e-10) -> np.ndarray:
    """All eigenvalues of symmetric `A`, ascending.

    Checks the trace and Frobenius identities on the way out:
    ``|sum(lam) - tr A| <= tol * N * ||A||`` and
    ``|sum(lam^2) - ||A||_F^2| <= tol * N * ||A||^2`` with ``||A||`` the
    largest absolute entry times ``N`` (a cheap upper bound on the 2-norm).
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * max(scale, 1e-300):
        raise ValidationError("matrix is not symmetric")
    if scale == 0.0:
        return np.zeros(n)
    if n == 1:
        return A[0].copy()
    diag, off = tridiagonalize(0.5 * (A + A.T))
    lam = tridiagonal_eigenvalues(diag, off)

    norm = scale * n
    tr_err = abs(math.fsum(lam) - math.fsum(np.diag(A)))
    fro_err = abs(math.fsum(lam * lam) - math.fsum((A * A).ravel()))
    if tr_err > tol * n * norm or fro_err > tol * n * norm**2:
        raise NumericError("eigenvalues fail the trace/Frobenius check",
                           trace_error=tr_err, frobenius_error=fro_err)
    return lam


def covariance_spectrum(Z, p=None, tol: float = PSD_TOL) -> EmpiricalSpectrum:
    """Spectrum of ``Z Z^T / p``.

    Eigenvalues with ``|lam| <= tol * max(1, lam_max)`` are snapped to exactly
    zero so rank-deficient covariances carry a clean atom at the origin.

    Raises
    ------
    NumericError
        If an eigenvalue falls below ``-tol * max(1, lam_max)``.
    """
    lam = sym_eigenvalues(covariance(Z, p))
    scale = tol * max(1.0, float(lam[-1]))
    if lam[0] < -scale:
        raise NumericError("covariance is not positive semidefinite",
                           min_eigenvalue=float(lam[0]), threshold=-scale)
    lam = np.where(np.abs(lam) <= scale, 0.0, lam)
    return EmpiricalSpectrum(lam)


def esd_cdf(spec: EmpiricalSpectrum, x):
    """Fraction of eigenvalues ``<= x`` (right-continuous)."""
    ev = spec.eigenvalues
    out = np.searchsorted(ev, np.asarray(x, dtype=float), side="right") / ev.size
    return float(out) if np.ndim(out) == 0 else out


def stieltjes_of_spectrum(spec, z) -> complex:
    """``(1/N) sum_j 1 / (z - lam_j)`` with compensated summation."""
    z = check_upper_half_plane(z)
    ev = spec.eigenvalues if isinstance(spec, EmpiricalSpectrum) else np.asarray(spec, float)
    terms = 1.0 / (z - ev)
    N = ev.size
    return complex(math.fsum(terms.real) / N, math.fsum(terms.imag) / N)


def shifted_solve(A, z, b, rtol: float = 1e-10) -> np.ndarray:
    """Solve ``(z I - A) x = b`` by LU with partial pivoting.

    The residual is checked against ``rtol * (||zI - A|| ||x|| + ||b||)``
    (infinity norms); a larger residual raises `NumericError`.
    """
    z = check_upper_half_plane(z)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape[0] != A.shape[0]:
        raise ValidationError(f"shape mismatch: A {A.shape}, b {b.shape}")
    M = z * np.eye(A.shape[0]) - A
    x = np.linalg.solve(M, b)
    res = np.max(np.abs(M @ x - b), initial=0.0)
    scale = np.max(np.sum(np.abs(M), axis=1)) * np.max(np.abs(x), initial=0.0) \
        + np.max(np.abs(b), initial=0.0)
    if res > rtol * scale:
        raise NumericError("shifted solve residual too large", residual=float(res),
                           scale=float(scale), z=z)
    return x


def resolvent_trace(A, z, method: str = "eig") -> complex:
    """Normalized resolvent trace ``(1/N) tr((z I - A)^{-1})``.

    ``method='eig'`` goes through `sym_eigenvalues`; ``method='solve'``
    performs ``N`` shifted solves against the basis vectors and is meant as an
    independent check.
    """
    z = check_upper_half_plane(z)
    A = np.asarray(A, dtype=float)
    N = A.shape[0]
    if method == "eig":
        return stieltjes_of_spectrum(sym_eigenvalues(A), z)
    if method == "solve":
        X = shifted_solve(A, z, np.eye(N, dtype=complex))
        d = np.diag(X)
        return complex(math.fsum(d.real) / N, math.fsum(d.imag) / N)
    raise ValidationError(f"unknown method {method!r}")
