"""
Exact moment combinatorics for the tensor model.

Covers the variance of the squared column norm together with its upper and
lower bounds, the averaged multi-order moment ``c(m, n, (d_j))`` and its
bound, shared degrees of paired subset tuples, and mixed tensor moments.
Exact quantities are accumulated in rational arithmetic and converted to
float once; bounds involving exponentials are evaluated relative to ``N^2``
in log space.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ResourceError, ValidationError
from .tensor_model import ModelParams, MomentModel, build_columns

__all__ = [
    "Bound",
    "VarianceReport",
    "MonteCarloEstimate",
    "MomentBound",
    "SharedDegreeProfile",
    "exact_norm_variance",
    "exact_norm_variance_ratio",
    "variance_upper_bound",
    "variance_lower_bound",
    "variance_lower_bound_large_d",
    "variance_report",
    "mc_norm_variance",
    "shared_degrees",
    "tensor_moment",
    "tensor_moment_exact",
    "shared_degree_moment_bound",
    "c_moment",
    "c_moment_exact",
    "c_moment_bound",
    "C_MOMENT_BUDGET",
]

C_MOMENT_BUDGET = 10**7


def _check(n, d, B):
    if not (1 <= d <= n):
        raise ValidationError(f"need 1 <= d <= n, got n={n}, d={d}")
    if not B >= 1:
        raise ValidationError(f"fourth moment must be >= 1, got {B}")


# ---------------------------------------------------------------------------
# variance of the squared norm
# ---------------------------------------------------------------------------

def _variance_over_N(n, d, B) -> Fraction:
    Bf = Fraction(B)
    return sum(
        ((Bf**k - 1) * math.comb(d, k) * math.comb(n - d, d - k)
         for k in range(1, d + 1) if n - d >= d - k),
        Fraction(0),
    )


def exact_norm_variance(n: int, d: int, B: float) -> float:
    """``Var(||Z_0||^2) = C(n,d) sum_k (B^k - 1) C(d,k) C(n-d,d-k)``.

    `B` is the fourth moment of the entries.  Terms with ``n - d < d - k``
    vanish.  Computed exactly and rounded once; ``inf`` when the value lies
    beyond double range (`exact_norm_variance_ratio` stays finite there).
    """
    _check(n, d, B)
    try:
        return float(math.comb(n, d) * _variance_over_N(n, d, B))
    except OverflowError:
        return math.inf


def exact_norm_variance_ratio(n: int, d: int, B: float) -> float:
    """``Var(||Z_0||^2) / N^2``, safe for ``N^2`` beyond double range."""
    _check(n, d, B)
    return float(_variance_over_N(n, d, B) / math.comb(n, d))


@dataclass(frozen=True)
class Bound:
    """A variance bound expressed relative to ``N^2``.

    ``value`` is the absolute bound ``ratio * N^2`` (``inf`` if it overflows);
    ``applicable`` says whether the hypotheses behind the bound hold.
    """

    ratio: float
    applicable: bool
    log_N2: float

    @property
    def value(self) -> float:
        if self.ratio == 0.0:
            return 0.0
        try:
            return math.exp(math.log(self.ratio) + self.log_N2)
        except OverflowError:
            return math.inf


def _log_N2(n, d):
    return 2.0 * (math.lgamma(n + 1) - math.lgamma(d + 1) - math.lgamma(n - d + 1))


def variance_upper_bound(n: int, d: int, B: float) -> Bound:
    """``2 N^2 B (d^2/n) exp(-(d-1)^2/(n-1))``.

    Applicable when ``d <= n/2`` and ``B <= (n - 2d + 2)/(d - 1)^2``
    (no moment restriction for ``d = 1``).
    """
    _check(n, d, B)
    decay = math.exp(-((d - 1) ** 2) / (n - 1)) if n > 1 else 1.0
    ratio = 2.0 * B * d * d * decay / n
    ok = d == 1 or (2 * d <= n and B <= (n - 2 * d + 2) / (d - 1) ** 2)
    return Bound(ratio, bool(ok), _log_N2(n, d))


def variance_lower_bound(n: int, d: int, B: float) -> Bound:
    """``N^2 (B - 1) (d^2/n) exp(-2 (d-1)^2 / (n - d + 1))``, for ``d <= n/5``, ``B > 1``."""
    _check(n, d, B)
    ratio = (B - 1.0) * d * d * math.exp(-2.0 * (d - 1) ** 2 / (n - d + 1)) / n
    return Bound(ratio, bool(5 * d <= n and B > 1), _log_N2(n, d))


def variance_lower_bound_large_d(n: int, d: int, B: float) -> Bound:
    """Lower bound in the regime ``sqrt(2n) <= d <= n/8``::

        N^2 (1 - B^(-d^2/n)) / 8 * (B / (8 e^4))^(d^2/n)
    """
    _check(n, d, B)
    r = d * d / n
    if B == 1:
        ratio = 0.0
    else:
        log_ratio = math.log(-math.expm1(-r * math.log(B))) - math.log(8.0) \
            + r * (math.log(B) - math.log(8.0) - 4.0)
        ratio = math.exp(log_ratio)
    ok = 2 * n <= d * d and 8 * d <= n
    return Bound(ratio, bool(ok), _log_N2(n, d))


@dataclass(frozen=True)
class VarianceReport:
    n: int
    d: int
    B: float
    exact: float
    exact_ratio: float
    upper_bound: Bound
    lower_bound: Bound
    lower_bound_large_d: Bound
    violations: tuple = field(default=())

    @property
    def ok(self) -> bool:
        return not self.violations


def variance_report(n: int, d: int, B: float) -> VarianceReport:
    """Exact variance with every bound, and the list of violated applicable bounds.

    Comparisons are done on ratios to ``N^2`` with a relative slack of
    ``1e-12`` because the ``d = 1`` lower bound is attained with equality.
    """
    exact_ratio = exact_norm_variance_ratio(n, d, B)
    exact = exact_norm_variance(n, d, B)
    up = variance_upper_bound(n, d, B)
    lo = variance_lower_bound(n, d, B)
    lo2 = variance_lower_bound_large_d(n, d, B)
    slack = 1e-12 * max(exact_ratio, 1e-300)
    bad = []
    if up.applicable and exact_ratio > up.ratio + slack:
        bad.append("upper")
    if lo.applicable and exact_ratio < lo.ratio - slack:
        bad.append("lower")
    if lo2.applicable and exact_ratio < lo2.ratio - slack:
        bad.append("lower_large_d")
    return VarianceReport(n, d, float(B), exact, exact_ratio, up, lo, lo2, tuple(bad))


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    stderr: float
    trials: int


def mc_norm_variance(params: ModelParams, model: MomentModel, trials: int,
                     rng: np.random.Generator, chunk: int = 8192) -> MonteCarloEstimate:
    """Sample variance of ``||Z_0||^2`` over independent columns.

    The standard error uses the plug-in fourth central moment:
    ``Var(s^2) ~ (mu_4 - s^4 (T - 3)/(T - 1)) / T``.
    """
    trials = int(trials)
    if trials < 1000:
        raise ValidationError("Monte Carlo variance needs at least 1000 trials")
    norms = np.empty(trials)
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        X = model.sample((params.n, k), rng)
        Z = build_columns(X, params.d)
        norms[done:done + k] = np.einsum("ij,ij->j", Z, Z)
        done += k
    mean = math.fsum(norms) / trials
    dev = norms - mean
    s2 = math.fsum(dev * dev) / (trials - 1)
    mu4 = math.fsum(dev**4) / trials
    var_s2 = max(0.0, (mu4 - s2 * s2 * (trials - 3) / (trials - 1)) / trials)
    return MonteCarloEstimate(s2, math.sqrt(var_s2), trials)


# ---------------------------------------------------------------------------
# shared degrees and tensor moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharedDegreeProfile:
    degrees: tuple

    @property
    def total(self) -> int:
        return sum(self.degrees)


def _as_sets(subsets):
    out = []
    for s in subsets:
        t = tuple(int(v) for v in s)
        if len(set(t)) != len(t) or any(v < 1 for v in t):
            raise ValidationError(f"{s} is not a subset of positive integers")
        out.append(frozenset(t))
    return out


def shared_degrees(subsets) -> SharedDegreeProfile:
    """Shared degrees of ``2m`` subsets paired as (1,2), (3,4), ...

    Entry ``v`` counts the members of subset ``v`` that occur in some subset
    outside the pair containing ``v``.
    """
    sets = _as_sets(subsets)
    if len(sets) % 2 or not sets:
        raise ValidationError("shared degrees need a positive even number of subsets")
    if len({len(s) for s in sets}) != 1:
        raise ValidationError("shared degrees assume subsets of equal size")
    degs = []
    for v, s in enumerate(sets):
        pair = {v, v ^ 1}
        others = set().union(*(sets[w] for w in range(len(sets)) if w not in pair))
        degs.append(len(s & others))
    return SharedDegreeProfile(tuple(degs))


def _exponents(subsets):
    counts = Counter()
    for s in _as_sets(subsets):
        counts.update(s)
    return counts


def tensor_moment_exact(model: MomentModel, subsets) -> Fraction:
    """``E[prod_v prod_{r in S_v} x_r]`` exactly; zero if any exponent is odd."""
    subsets = list(subsets)
    if not subsets:
        raise ValidationError("need at least one subset")
    if sum(len(s) for s in subsets) > 64:
        raise ValidationError("total subset size exceeds 64")
    out = Fraction(1)
    for g in _exponents(subsets).values():
        if g % 2:
            return Fraction(0)
        out *= model.even_moment_exact(g // 2)
    return out


def tensor_moment(model: MomentModel, subsets) -> float:
    return float(tensor_moment_exact(model, subsets))


def shared_degree_moment_bound(model: MomentModel, subsets) -> float:
    """``E[x^(2m)] ** (sum(shdeg) / 2)`` for a tuple of ``2m`` subsets."""
    prof = shared_degrees(subsets)
    m = len(prof.degrees) // 2
    return model.even_moment(m) ** (0.5 * prof.total)


def _splits(sizes, total):
    """Ways to draw `total` items from classes of the given sizes, per class."""
    if not sizes:
        if total == 0:
            yield ()
        return
    head, rest = sizes[0], sizes[1:]
    for k in range(min(head, total) + 1):
        for tail in _splits(rest, total - k):
            yield (k,) + tail


def c_moment_exact(m: int, n: int, d_list, model: MomentModel,
                   budget: int = C_MOMENT_BUDGET) -> Fraction:
    """Average of ``E[Z_{d_1,i_1}^2 ... Z_{d_m,i_m}^2]`` over all index tuples.

    A partial tuple is summarized by how many variables have been chosen
    ``c`` times, for each ``c``; the moment depends on nothing else because
    the variables are exchangeable.  Adding a ``d``-subset means picking
    ``k_c`` of its members among the variables with count ``c``, which can
    happen in ``prod_c C(size_c, k_c)`` ways.  The sum is exact and equals
    the full enumeration over ``prod_j C(n, d_j)`` tuples.
    """
    d_list = [int(v) for v in d_list]
    if len(d_list) != m or m < 1:
        raise ValidationError(f"d_list must have length m = {m}")
    if any(not 1 <= dj <= n for dj in d_list):
        raise ValidationError("each d_j must lie in [1, n]")
    total = math.prod(math.comb(n, dj) for dj in d_list)
    if total > budget:
        raise ResourceError(f"{total} index tuples exceed the enumeration budget {budget}")

    # state: sorted ((count, number of variables with that count), ...)
    states = Counter({((0, n),): 1})
    for dj in d_list:
        nxt = Counter()
        for state, mult in states.items():
            counts = [c for c, _ in state]
            sizes = [k for _, k in state]
            for pick in _splits(sizes, dj):
                ways = math.prod(math.comb(sz, k) for sz, k in zip(sizes, pick))
                new = Counter()
                for c, sz, k in zip(counts, sizes, pick):
                    new[c] += sz - k
                    new[c + 1] += k
                key = tuple(sorted((c, k) for c, k in new.items() if k))
                nxt[key] += mult * ways
        states = nxt

    acc = Fraction(0)
    for state, mult in states.items():
        term = Fraction(mult)
        for c, k in state:
            if c:
                term *= model.even_moment_exact(c) ** k
        acc += term
    return acc / total


def c_moment(m: int, n: int, d_list, model: MomentModel,
             budget: int = C_MOMENT_BUDGET) -> float:
    return float(c_moment_exact(m, n, d_list, model, budget))


@dataclass(frozen=True)
class MomentBound:
    bound: float
    applicable: bool


def c_moment_bound(m: int, n: int, d_list, C: float) -> MomentBound:
    """``1 + exp(u) u`` with ``u = 2 C^2 e^2 s^2 / n`` and ``s = sum(d_j)``.

    Applicable when ``s <= sqrt(n) / (3 C e)``.
    """
    if len(d_list) != m:
        raise ValidationError(f"d_list must have length m = {m}")
    if C < 1:
        raise ValidationError("moment constant must be at least 1")
    s = sum(int(v) for v in d_list)
    u = 2.0 * C * C * math.e**2 * s * s / n
    return MomentBound(1.0 + math.exp(u) * u, s <= math.sqrt(n) / (3.0 * C * math.e))
