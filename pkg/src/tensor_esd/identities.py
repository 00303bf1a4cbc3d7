"""
Numerical checks of the resolvent algebra behind the convergence argument.

Every check returns an `IdentityReport`.  Identities report the modulus of
the difference of their two sides; inequalities additionally carry
``BoundCheck(lhs, rhs, holds)``.  Column numbers ``j`` are 1-based.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .eigensolve import (check_upper_half_plane, covariance, shifted_solve,
                         stieltjes_of_spectrum, sym_eigenvalues)
from .errors import DomainError, ValidationError
from .tensor_model import ModelParams, MomentModel, sample_matrix

__all__ = [
    "BoundCheck",
    "IdentityReport",
    "leave_one_out",
    "quadratic_form",
    "check_trace_identity",
    "check_sherman_morrison",
    "check_rank_one_rearrangement",
    "check_resolvent_diff_bound",
    "check_small_quadratic_form",
    "check_truncated_expansion",
    "random_instance",
    "identity_suite",
    "RESIDUAL_THRESHOLD",
]

RESIDUAL_THRESHOLD = 1e-8


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class IdentityReport:
    name: str
    residual: float
    bound_checked: BoundCheck | None = None
    digest: dict = field(default_factory=dict)
    parts: dict = field(default_factory=dict)
    skipped: bool = False

    def __post_init__(self):
        if not self.residual >= 0:
            raise ValidationError(f"residual must be nonnegative, got {self.residual}")

    def to_dict(self):
        return asdict(self)


def _column(Z, j):
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise ValidationError("Z must be a matrix")
    if not 1 <= j <= Z.shape[1]:
        raise ValidationError(f"column {j} outside 1..{Z.shape[1]}")
    return Z, Z[:, j - 1]


def leave_one_out(Z, j, p=None):
    """``S - Z_j Z_j^T / p``: the covariance with column `j` removed."""
    Z, zj = _column(Z, j)
    p = Z.shape[1] if p is None else p
    return covariance(Z, p) - np.outer(zj, zj) / p


def quadratic_form(Z, j, z, p=None) -> complex:
    """``(1/p) Z_j^T R_j Z_j`` with ``R_j = (z I - S + Z_j Z_j^T / p)^{-1}``."""
    z = check_upper_half_plane(z)
    Z, zj = _column(Z, j)
    p = Z.shape[1] if p is None else p
    return complex(zj @ shifted_solve(leave_one_out(Z, j, p), z, zj)) / p


def check_trace_identity(Z, p=None, z=1j, digest=None) -> IdentityReport:
    """``-1 + z m(z) = -p/N + (1/N) sum_j 1 / (1 - x_j)``.

    The left side uses the eigenvalues of ``S``; the right side uses one
    shifted solve per column.
    """
    z = check_upper_half_plane(z)
    Z = np.asarray(Z, dtype=float)
    N, cols = Z.shape
    p = cols if p is None else p
    m = stieltjes_of_spectrum(sym_eigenvalues(covariance(Z, p)), z)
    lhs = -1.0 + z * m
    terms = [1.0 / (1.0 - quadratic_form(Z, j, z, p)) for j in range(1, cols + 1)]
    rhs = -p / N + complex(math.fsum(t.real for t in terms),
                           math.fsum(t.imag for t in terms)) / N
    return IdentityReport("trace_identity", abs(lhs - rhs), digest=dict(digest or {}),
                          parts={"lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag]})


def check_sherman_morrison(A, u, v, digest=None, max_cond=1e10) -> IdentityReport:
    """Max-entry gap between ``(A + u v^T)^{-1}`` and the rank-one update formula.

    Ill-conditioned inputs give ``skipped=True`` with zero residual.
    """
    A = np.asarray(A)
    u = np.asarray(u).ravel()
    v = np.asarray(v).ravel()
    if A.ndim != 2 or A.shape[0] != A.shape[1] or u.shape[0] != A.shape[0] \
            or v.shape[0] != A.shape[0]:
        raise ValidationError("shape mismatch in Sherman-Morrison check")
    B = A + np.outer(u, v)
    if np.linalg.cond(A) > max_cond or np.linalg.cond(B) > max_cond:
        return IdentityReport("sherman_morrison", 0.0, digest=dict(digest or {}), skipped=True)
    Ainv = np.linalg.inv(A)
    lhs = np.linalg.inv(B)
    rhs = Ainv - np.outer(Ainv @ u, v @ Ainv) / (1.0 + v @ Ainv @ u)
    return IdentityReport("sherman_morrison", float(np.max(np.abs(lhs - rhs))),
                          digest=dict(digest or {}))


def check_rank_one_rearrangement(Z, j, z, p=None, digest=None) -> IdentityReport:
    """Two consequences of removing column `j` from the resolvent.

    scalar: ``1 / (1 - x_j) = 1 + (1/p) Z_j^T (zI - S)^{-1} Z_j``
    vector: ``(zI - S)^{-1} Z_j = R_j Z_j / (1 - x_j)``  (max-norm gap)
    """
    z = check_upper_half_plane(z)
    Z, zj = _column(Z, j)
    p = Z.shape[1] if p is None else p
    S = covariance(Z, p)
    Gz = shifted_solve(S, z, zj)
    Rz = shifted_solve(S - np.outer(zj, zj) / p, z, zj)
    x = complex(zj @ Rz) / p
    scalar = abs(1.0 / (1.0 - x) - (1.0 + complex(zj @ Gz) / p))
    vector = float(np.max(np.abs(Gz - Rz / (1.0 - x)), initial=0.0))
    return IdentityReport("rank_one_rearrangement", max(scalar, vector),
                          digest=dict(digest or {}),
                          parts={"scalar": scalar, "vector": vector})


def check_resolvent_diff_bound(Z, j, z, p=None, digest=None) -> IdentityReport:
    """``|tr (zI - S)^{-1} - tr R_j| <= 1 / Im z``.

    Both traces come from eigenvalues.  The residual is that of the exact
    rank-one formula ``tr G - tr R_j = u^T G^2 u / (1 + u^T G u)`` with
    ``u = Z_j / sqrt(p)``, evaluated with shifted solves.
    """
    z = check_upper_half_plane(z)
    Z, zj = _column(Z, j)
    p = Z.shape[1] if p is None else p
    S = covariance(Z, p)
    S_j = S - np.outer(zj, zj) / p
    N = S.shape[0]
    diff = N * (stieltjes_of_spectrum(sym_eigenvalues(S), z)
                - stieltjes_of_spectrum(sym_eigenvalues(S_j), z))
    Gu = shifted_solve(S, z, zj)
    formula = complex(Gu @ Gu) / p / (1.0 + complex(zj @ Gu) / p)
    lhs, rhs = abs(diff), 1.0 / z.imag
    return IdentityReport("resolvent_diff_bound", abs(diff - formula),
                          BoundCheck(lhs, rhs, lhs <= rhs), digest=dict(digest or {}))


def check_small_quadratic_form(Z, j, z, p=None, digest=None) -> IdentityReport:
    """``|x_j| <= 1/2`` whenever ``||Z_j||^2 <= 2N`` and ``Im z >= 4 N/p``.

    Outside that regime the report is marked ``skipped``.
    """
    z = check_upper_half_plane(z)
    Z, zj = _column(Z, j)
    N = Z.shape[0]
    p = Z.shape[1] if p is None else p
    if zj @ zj > 2 * N or z.imag < 4.0 * N / p:
        return IdentityReport("small_quadratic_form", 0.0, digest=dict(digest or {}),
                              skipped=True)
    x = abs(quadratic_form(Z, j, z, p))
    return IdentityReport("small_quadratic_form", 0.0, BoundCheck(x, 0.5, x <= 0.5),
                          digest=dict(digest or {}))


def check_truncated_expansion(x, M: int, digest=None, require_small=True) -> IdentityReport:
    """``1/(1-x) = 1 + x + ... + x^M + x^(M+1)/(1-x)`` and its tail bound.

    With ``|x| <= 1/2`` the remainder obeys ``|x^(M+1)/(1-x)| <= 2 * 2^-M``.
    """
    x = complex(x)
    M = int(M)
    if M < 0:
        raise ValidationError("truncation order must be nonnegative")
    if require_small and abs(x) > 0.5:
        raise DomainError(f"|x| = {abs(x)} exceeds 1/2")
    if x == 1:
        raise DomainError("x = 1 is a pole")
    powers = [x**k for k in range(M + 1)]
    partial = complex(math.fsum(v.real for v in powers), math.fsum(v.imag for v in powers))
    rem = x ** (M + 1) / (1.0 - x)
    residual = abs(1.0 / (1.0 - x) - (partial + rem))
    bound = None
    if abs(x) <= 0.5:
        rhs = 2.0 * 2.0**-M
        bound = BoundCheck(abs(rem), rhs, abs(rem) <= rhs)
    return IdentityReport("truncated_expansion", residual, bound, digest=dict(digest or {}))


# ---------------------------------------------------------------------------
# randomized suite
# ---------------------------------------------------------------------------

DISTRIBUTIONS = ("rademacher", "gaussian", "threepoint:3")


def random_instance(seed, n, d, p, dist="rademacher"):
    """Tensor data matrix for ``(n, d, p)`` and its reproduction digest."""
    params = ModelParams(n, d, p)
    Z = sample_matrix(params, MomentModel.parse(dist), seed)
    return Z, {"seed": seed, "n": n, "d": d, "p": p, "N": params.N, "dist": dist}


def identity_suite(count=200, seed=0, im_floor=1.0, im_span=4.0, re_range=(-2.0, 6.0),
                   n_range=(4, 8), d_range=(1, 3), p_range=(4, 16)):
    """Run every check on `count` randomized instances.

    Instance ``k`` is fully determined by ``(seed, k)``; its digest records
    everything needed to rebuild it with `random_instance`.
    """
    if not im_floor > 0:
        raise DomainError(f"imaginary floor must be positive, got {im_floor}")
    reports = []
    for k in range(count):
        rng = np.random.default_rng([seed, k])
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        d = int(rng.integers(d_range[0], min(d_range[1], n) + 1))
        p = int(rng.integers(p_range[0], p_range[1] + 1))
        dist = DISTRIBUTIONS[int(rng.integers(len(DISTRIBUTIONS)))]
        z = complex(rng.uniform(*re_range), rng.uniform(im_floor, im_floor + im_span))
        j = int(rng.integers(1, p + 1))
        Z, digest = random_instance([seed, k], n, d, p, dist)
        digest.update(instance=k, z=[z.real, z.imag], j=j)

        reports.append(check_trace_identity(Z, p, z, digest))
        reports.append(check_rank_one_rearrangement(Z, j, z, p, digest))
        reports.append(check_resolvent_diff_bound(Z, j, z, p, digest))

        N = Z.shape[0]
        u = Z[:, j - 1] / math.sqrt(p)
        A = z * np.eye(N) - leave_one_out(Z, j, p)
        reports.append(check_sherman_morrison(A, u, u, digest))
        Q = rng.uniform(-1.0, 1.0, size=(N, N)) + 5.0 * np.eye(N)
        reports.append(check_sherman_morrison(Q, rng.uniform(-1, 1, N),
                                              rng.uniform(-1, 1, N), digest))

        x = quadratic_form(Z, j, z, p)
        M = int(rng.integers(0, 12))
        reports.append(check_truncated_expansion(x, M, digest, require_small=False))
        reports.append(check_small_quadratic_form(Z, j, z, p, digest))
    return reports
