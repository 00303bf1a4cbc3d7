"""
Random tensor product model.

A column of the model is indexed by the d-subsets of ``{1, ..., n}``; the
entry at subset ``{i_1 < ... < i_d}`` is the product ``x_{i_1} ... x_{i_d}``
of i.i.d. symmetric, unit-variance scalars.  Subsets are laid out in
colexicographic order (the combinatorial number system), which makes the
ordering prefix-closed: the d-subsets of ``{1, ..., m}`` occupy the first
``C(m, d)`` slots for every ``m``.  `build_columns` exploits this to share
partial products between consecutive tensor orders.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

import numpy as np

from .errors import BinomialOverflowError, ResourceError, ValidationError

__all__ = [
    "UINT64_MAX",
    "DEFAULT_MAX_ENTRIES",
    "binomial",
    "rank_subset",
    "unrank_subset",
    "colex_subsets",
    "MomentModel",
    "ModelParams",
    "sample_x_vector",
    "build_column",
    "build_columns",
    "peak_level_size",
    "column_streams",
    "sample_matrix",
    "apply_population_sqrt",
    "max_entries",
]

UINT64_MAX = 2**64 - 1
DEFAULT_MAX_ENTRIES = 2**26


# ---------------------------------------------------------------------------
# subset indexing
# ---------------------------------------------------------------------------

def binomial(n: int, d: int) -> int:
    """Exact ``C(n, d)``, refusing values beyond the unsigned 64-bit range.

    Evaluated multiplicatively: after step ``k`` the accumulator holds
    ``C(n - dd + k, k)`` so every division is exact and no intermediate
    exceeds ``n`` times the final value.
    """
    n, d = int(n), int(d)
    if n < 0 or d < 0 or d > n:
        raise ValidationError(f"binomial requires 0 <= d <= n, got n={n}, d={d}")
    dd = min(d, n - d)
    r = 1
    for k in range(1, dd + 1):
        r = r * (n - dd + k) // k
        if r > UINT64_MAX:
            raise BinomialOverflowError(f"C({n}, {d}) overflows uint64")
    return r


def _check_nd(n, d):
    if n < 1 or d < 1 or d > n:
        raise ValidationError(f"need 1 <= d <= n, got n={n}, d={d}")


def rank_subset(s, n: int, d: int) -> int:
    """Colex rank of the strictly increasing 1-based tuple `s`.

    ``rank = sum_j C(s_j - 1, j)`` for ``j = 1..d``.
    """
    _check_nd(n, d)
    s = tuple(int(v) for v in s)
    if len(s) != d:
        raise ValidationError(f"subset {s} does not have {d} members")
    prev = 0
    r = 0
    for j, v in enumerate(s, start=1):
        if v <= prev or v > n:
            raise ValidationError(f"subset {s} is not strictly increasing within [1, {n}]")
        prev = v
        r += binomial(v - 1, j) if v - 1 >= j else 0
    return r


def unrank_subset(r: int, n: int, d: int) -> tuple:
    """Inverse of `rank_subset`: greedy largest-binomial decoding."""
    _check_nd(n, d)
    r = int(r)
    total = binomial(n, d)
    if not 0 <= r < total:
        raise ValidationError(f"rank {r} outside [0, {total})")
    out = []
    upper = n
    for j in range(d, 0, -1):
        # largest c with C(c, j) <= r, then member = c + 1
        c = upper - 1
        while c >= j and binomial(c, j) > r:
            c -= 1
        if c < j:
            c = j - 1
            cj = 0
        else:
            cj = binomial(c, j)
        out.append(c + 1)
        r -= cj
        upper = c
    return tuple(reversed(out))


def colex_subsets(n: int, d: int):
    """All d-subsets of ``{1..n}`` in colex order, as an ``(N, d)`` int array."""
    _check_nd(n, d)
    N = binomial(n, d)
    # level k holds the k-subsets of {1..n} in colex order
    level = np.zeros((1, 0), dtype=np.int64)
    for k in range(1, d + 1):
        blocks = []
        for m in range(k, n + 1):
            head = level[: binomial(m - 1, k - 1)]
            tail = np.full((head.shape[0], 1), m, dtype=np.int64)
            blocks.append(np.hstack([head, tail]))
        level = np.vstack(blocks)
    assert level.shape[0] == N
    return level


# ---------------------------------------------------------------------------
# scalar laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MomentModel:
    """Symmetric unit-variance scalar law for the entries ``x_i``.

    Parameters
    ----------
    kind : {'rademacher', 'gaussian', 'threepoint'}
    B : float
        Fourth moment of the three-point law ``x = +-sqrt(B)`` w.p. ``1/(2B)``
        each and 0 otherwise.  Ignored for the other kinds.
    """

    kind: str
    B: float = 1.0

    def __post_init__(self):
        if self.kind not in ("rademacher", "gaussian", "threepoint"):
            raise ValidationError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "threepoint" and not self.B >= 1.0:
            raise ValidationError(f"three-point law needs B >= 1, got {self.B}")

    @classmethod
    def rademacher(cls):
        return cls("rademacher")

    @classmethod
    def gaussian(cls):
        return cls("gaussian")

    @classmethod
    def three_point(cls, B):
        return cls("threepoint", float(B))

    @classmethod
    def parse(cls, text: str) -> "MomentModel":
        """Parse ``'rademacher'``, ``'gaussian'`` or ``'threepoint:B'``."""
        text = text.strip().lower()
        if text.startswith("threepoint"):
            _, _, b = text.partition(":")
            if not b:
                raise ValidationError("threepoint needs a fourth moment, e.g. threepoint:4")
            try:
                return cls.three_point(float(b))
            except ValueError as exc:
                raise ValidationError(f"bad fourth moment in {text!r}") from exc
        if text in ("rademacher", "gaussian"):
            return cls(text)
        raise ValidationError(f"unknown distribution {text!r}")

    def __str__(self):
        if self.kind == "threepoint":
            return f"threepoint:{self.B:g}"
        return self.kind

    def even_moment_exact(self, k: int) -> Fraction:
        """``E[x^(2k)]`` as an exact rational."""
        k = int(k)
        if k < 0:
            raise ValidationError("moment order must be nonnegative")
        if self.kind == "rademacher" or k == 0:
            return Fraction(1)
        if self.kind == "gaussian":
            out = 1
            for j in range(1, 2 * k, 2):
                out *= j
            return Fraction(out)
        return Fraction(self.B) ** (k - 1)

    def even_moment(self, k: int) -> float:
        return float(self.even_moment_exact(k))

    def moment(self, g: int) -> Fraction:
        """``E[x^g]`` for any integer ``g >= 0``; odd orders vanish by symmetry."""
        if g % 2:
            return Fraction(0)
        return self.even_moment_exact(g // 2)

    @property
    def fourth_moment(self) -> float:
        return self.even_moment(2)

    def moment_constant(self, K: int = 8) -> float:
        """Smallest ``C`` with ``E[x^(2k)] <= (C k)^k`` for ``k <= K``."""
        return max(self.even_moment(k) ** (1.0 / k) / k for k in range(1, K + 1))

    def sample(self, size, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "rademacher":
            return rng.choice(np.array([-1.0, 1.0]), size=size)
        if self.kind == "gaussian":
            return rng.standard_normal(size)
        u = rng.random(size)
        sign = rng.choice(np.array([-1.0, 1.0]), size=size)
        return np.where(u < 1.0 / self.B, sqrt(self.B), 0.0) * sign


# ---------------------------------------------------------------------------
# model parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelParams:
    """One experiment instance ``(n, d, p)`` with ``N = C(n, d)``."""

    n: int
    d: int
    p: int
    N: int = field(init=False)
    gamma_n: float = field(init=False)

    def __post_init__(self):
        for name in ("n", "d", "p"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v}")
        _check_nd(self.n, self.d)
        N = binomial(self.n, self.d)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "gamma_n", N / self.p)

    @classmethod
    def from_gamma(cls, n: int, d: int, gamma: float) -> "ModelParams":
        """Resolve ``p = round(N / gamma)`` (at least 1)."""
        if not gamma > 0:
            raise ValidationError(f"gamma must be positive, got {gamma}")
        N = binomial(n, d)
        return cls(n, d, max(1, int(round(N / gamma))))


def max_entries() -> int:
    """Cap on ``N * p``; ``RTP_MAX_ENTRIES`` overrides the default ``2**26``."""
    env = os.environ.get("RTP_MAX_ENTRIES")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"RTP_MAX_ENTRIES is not an integer: {env!r}") from exc
    return DEFAULT_MAX_ENTRIES


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def sample_x_vector(model: MomentModel, n: int, rng: np.random.Generator) -> np.ndarray:
    return model.sample(int(n), rng)


def build_columns(X, d: int) -> np.ndarray:
    """Tensor columns for every column of ``X`` (shape ``(n, p)`` -> ``(N, p)``).

    Level ``k`` (products over k-subsets, colex order) is assembled from
    level ``k - 1`` as ``concat_m x_m * level_{k-1}[:C(m-1, k-1)]``, so the
    total work is ``sum_{k<=d} C(n, k)`` multiplications per column.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValidationError("X must be two-dimensional (n, p)")
    n = X.shape[0]
    _check_nd(n, d)
    binomial(n, d)
    width = peak_level_size(n, d)
    if width * X.shape[1] > max_entries():
        raise ResourceError(f"intermediate level of {width} x {X.shape[1]} entries "
                            f"exceeds cap {max_entries()}")
    level = np.ones((1, X.shape[1]))
    for k in range(1, d + 1):
        blocks = [X[m - 1] * level[: binomial(m - 1, k - 1)] for m in range(k, n + 1)]
        level = np.concatenate(blocks, axis=0)
    return level


def peak_level_size(n: int, d: int) -> int:
    """Largest intermediate level ``max_{k <= d} C(n, k)`` built by `build_columns`."""
    return math.comb(n, min(d, n // 2))


def build_column(x, d: int) -> np.ndarray:
    """Single tensor column of length ``C(n, d)`` from a length-n vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValidationError("x must be a vector")
    return build_columns(x[:, None], d)[:, 0]


def column_streams(seed, p: int):
    """Independent generators for columns ``0..p-1``, keyed on ``(seed, j)``."""
    entropy = seed if isinstance(seed, (int, np.integer)) else [int(s) for s in seed]
    return [np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(j,)))
            for j in range(p)]


def sample_matrix(params: ModelParams, model: MomentModel, seed, *, cap=None) -> np.ndarray:
    """Draw an ``N x p`` data matrix with i.i.d. tensor columns.

    Column ``j`` uses a generator derived from ``(seed, j)`` only, so any
    subset of columns can be regenerated independently of the others.

    Raises
    ------
    ResourceError
        If ``N * p`` exceeds `cap` (default: `max_entries`).
    """
    cap = max_entries() if cap is None else cap
    if params.N * params.p > cap:
        raise ResourceError(
            f"N*p = {params.N}*{params.p} = {params.N * params.p} exceeds cap {cap}"
        )
    X = np.empty((params.n, params.p))
    for j, rng in enumerate(column_streams(seed, params.p)):
        X[:, j] = sample_x_vector(model, params.n, rng)
    return build_columns(X, params.d)


def apply_population_sqrt(Z, t_sqrt_eigs, basis=None) -> np.ndarray:
    """Return ``T^{1/2} Z`` with ``T^{1/2} = basis.T @ diag(t_sqrt_eigs) @ basis``.

    ``basis=None`` (or ``"diagonal"``) means the identity basis.
    """
    Z = np.asarray(Z, dtype=float)
    s = np.asarray(t_sqrt_eigs, dtype=float)
    if Z.ndim != 2 or s.ndim != 1 or s.shape[0] != Z.shape[0]:
        raise ValidationError(
            f"dimension mismatch: Z {Z.shape}, population square root {s.shape}")
    if np.any(s < 0):
        raise ValidationError("population square-root eigenvalues must be nonnegative")
    if basis is None or (isinstance(basis, str) and basis == "diagonal"):
        return s[:, None] * Z
    Q = np.asarray(basis, dtype=float)
    if Q.shape != (Z.shape[0], Z.shape[0]):
        raise ValidationError(f"basis shape {Q.shape} does not match N = {Z.shape[0]}")
    if not np.allclose(Q @ Q.T, np.eye(Q.shape[0]), atol=1e-10):
        raise ValidationError("basis is not orthogonal")
    return Q.T @ (s[:, None] * (Q @ Z))
