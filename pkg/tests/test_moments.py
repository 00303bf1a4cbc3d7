import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tensor_esd.errors import ResourceError, ValidationError
from tensor_esd.moments import (c_moment, c_moment_bound, c_moment_exact,
                                exact_norm_variance, exact_norm_variance_ratio,
                                mc_norm_variance, shared_degree_moment_bound, shared_degrees,
                                tensor_moment, tensor_moment_exact, variance_lower_bound,
                                variance_lower_bound_large_d, variance_report,
                                variance_upper_bound)
from tensor_esd.tensor_model import ModelParams, MomentModel, binomial

from oracles import c_moment_oracle, moment_fn, symbolic_variance

MODELS = {"rademacher": MomentModel.rademacher(), "gaussian": MomentModel.gaussian(),
          "threepoint:3": MomentModel.three_point(3)}


def test_variance_examples():
    assert exact_norm_variance(4, 2, 3) == 96
    for n, d in [(5, 2), (9, 3), (40, 1)]:
        assert exact_norm_variance(n, d, 1) == 0
    # d = 1: Var(sum x_i^2) = n (B - 1)
    assert exact_norm_variance(17, 1, 9) == 17 * 8


def test_variance_matches_symbolic_expansion():
    for B, kind in [(1, "rademacher"), (3, "gaussian"), (3, "threepoint")]:
        moment = moment_fn(kind, B)
        for n in range(1, 11):
            for d in range(1, min(3, n) + 1):
                exact = symbolic_variance(n, d, moment)
                assert exact_norm_variance(n, d, B) == float(exact)
                assert exact_norm_variance_ratio(n, d, B) == \
                    pytest.approx(float(exact / binomial(n, d) ** 2), rel=1e-15)


def test_variance_ratio_far_beyond_double_range():
    r = exact_norm_variance_ratio(600, 300, 2.0)
    assert math.isfinite(r) and r > 0
    assert exact_norm_variance(600, 300, 2.0) == math.inf


def test_upper_bound_examples():
    up = variance_upper_bound(4, 2, 3)
    assert up.value == pytest.approx(2 * 36 * 3 * (4 / 4) * math.exp(-1 / 3))
    assert up.value >= 96
    assert not up.applicable
    assert not variance_upper_bound(10, 4, 3).applicable
    for n in range(2, 65):
        b = variance_upper_bound(n, 1, 3)
        assert b.applicable and b.value == pytest.approx(2 * n * n * 3 / n)
        assert b.value >= exact_norm_variance(n, 1, 3)


def test_lower_bound_examples():
    lo = variance_lower_bound(20, 2, 3)
    assert lo.applicable and lo.value <= exact_norm_variance(20, 2, 3)
    assert variance_lower_bound(20, 2, 1).value == 0
    assert not variance_lower_bound(25, 6, 3).applicable
    big = variance_lower_bound_large_d(128, 16, 9)
    assert big.applicable and big.ratio <= exact_norm_variance_ratio(128, 16, 9)
    assert not variance_lower_bound_large_d(32, 8, 9).applicable
    assert variance_lower_bound_large_d(128, 16, 1).ratio == 0


def test_bound_sandwich_sweep():
    checked = 0
    for B in (1, 2, 3, 9):
        for n in (2, 4, 8, 12, 16, 24, 32, 48, 64, 96, 128):
            for d in range(1, n + 1):
                rep = variance_report(n, d, B)
                assert rep.ok, (n, d, B, rep.violations)
                checked += sum(b.applicable for b in
                               (rep.upper_bound, rep.lower_bound, rep.lower_bound_large_d))
    assert checked > 200


def test_v1_scaling_band():
    vals = [exact_norm_variance_ratio(n, 2, 3) * n / 4 for n in (16, 32, 64, 128)]
    assert max(vals) / min(vals) < 2.0


def test_monte_carlo_examples():
    rng = np.random.default_rng(0)
    est = mc_norm_variance(ModelParams(5, 2, 1), MomentModel.rademacher(), 1000, rng)
    assert est.estimate == 0 and est.stderr == 0
    est = mc_norm_variance(ModelParams(4, 2, 1), MomentModel.gaussian(), 10**5, rng)
    assert abs(est.estimate - 96) < 3 * est.stderr
    est = mc_norm_variance(ModelParams(10, 2, 1), MomentModel.three_point(4), 10**5, rng)
    assert abs(est.estimate - exact_norm_variance(10, 2, 4)) < 3 * est.stderr
    with pytest.raises(ValidationError):
        mc_norm_variance(ModelParams(4, 2, 1), MomentModel.gaussian(), 999, rng)


def test_shared_degree_examples():
    assert shared_degrees([(1, 2), (3, 4), (5, 6), (7, 8)]).degrees == (0, 0, 0, 0)
    assert shared_degrees([(1, 2), (1, 2), (2, 3), (2, 3)]).degrees == (1, 1, 1, 1)
    assert shared_degrees([(1, 2), (2, 3)]).degrees == (0, 0)
    with pytest.raises(ValidationError):
        shared_degrees([(1, 2), (2, 3), (3, 4)])
    with pytest.raises(ValidationError):
        shared_degrees([(1, 2), (3,)])


def test_tensor_moment_examples():
    g = MomentModel.gaussian()
    assert tensor_moment(g, [(1, 2), (1, 2)]) == 1
    assert tensor_moment(g, [(1, 2), (2, 3)]) == 0
    assert tensor_moment(g, [(1, 2), (1, 2), (1, 3), (1, 3)]) == 3
    assert tensor_moment_exact(MomentModel.three_point(5), [(1,), (1,), (1,), (1,)]) == 5
    with pytest.raises(ValidationError):
        tensor_moment(g, [])
    with pytest.raises(ValidationError):
        tensor_moment(g, [(1, 1)])


def test_c_moment_examples():
    g, r = MomentModel.gaussian(), MomentModel.rademacher()
    assert c_moment_exact(2, 3, (1, 1), g) == Fraction(5, 3)
    assert c_moment(2, 3, (1, 1), r) == 1
    for n, d in [(5, 2), (8, 3)]:
        assert c_moment(1, n, (d,), g) == 1
    with pytest.raises(ValidationError):
        c_moment(2, 3, (1,), g)
    with pytest.raises(ValidationError):
        c_moment(1, 3, (4,), g)
    with pytest.raises(ResourceError):
        c_moment(3, 30, (3, 3, 3), g)


def test_c_moment_matches_enumeration_oracle():
    for kind, model in MODELS.items():
        moment = moment_fn(kind.split(":")[0], 3)
        for m in (1, 2):
            for n in range(1, 9):
                for dl in itertools.product(range(1, min(3, n) + 1), repeat=m):
                    assert c_moment_exact(m, n, dl, model) == \
                        c_moment_oracle(m, n, dl, moment), (kind, m, n, dl)


def test_c_moment_three_factors_small():
    model = MomentModel.three_point(4)
    moment = moment_fn("threepoint", 4)
    for dl in [(1, 1, 1), (1, 2, 2), (2, 2, 2)]:
        assert c_moment_exact(3, 5, dl, model) == c_moment_oracle(3, 5, dl, moment)


def test_c_moment_bound_examples():
    b = c_moment_bound(1, 10**6, (1,), 1.0)
    assert b.applicable and 1 < b.bound < 1.001
    assert c_moment(1, 50, (1,), MomentModel.gaussian()) <= b.bound
    b = c_moment_bound(2, 400, (1, 1), 1.0)
    assert b.applicable
    g = MomentModel.gaussian()
    assert g.moment_constant() <= 1.0
    assert c_moment(2, 400, (1, 1), g) <= b.bound
    assert not c_moment_bound(3, 4, (1, 1, 1), 2.0).applicable
    with pytest.raises(ValidationError):
        c_moment_bound(2, 4, (1,), 1.0)
    with pytest.raises(ValidationError):
        c_moment_bound(1, 4, (1,), 0.5)


def test_c_moment_never_exceeds_applicable_bound():
    for model in MODELS.values():
        C = model.moment_constant()
        for n in (70, 100, 200, 400):
            for dl in [(1,), (2,), (1, 1)]:
                b = c_moment_bound(len(dl), n, dl, C)
                if b.applicable:
                    assert c_moment(len(dl), n, dl, model) <= b.bound


@st.composite
def paired_tuples(draw):
    n = draw(st.integers(2, 8))
    d = draw(st.integers(1, min(3, n)))
    m = draw(st.integers(1, 3))
    subset = st.lists(st.integers(1, n), min_size=d, max_size=d, unique=True).map(
        lambda s: tuple(sorted(s)))
    out = []
    for _ in range(m):
        a = draw(subset)
        b = a if draw(st.booleans()) else draw(subset)
        out += [a, b]
    return out


@given(paired_tuples())
def test_shared_degree_moment_bound_property(subsets):
    g = MomentModel.gaussian()
    val = tensor_moment(g, subsets)
    assert 0 <= val <= shared_degree_moment_bound(g, subsets) * (1 + 1e-12)


def test_shared_degree_bound_on_thousand_tuples():
    g = MomentModel.gaussian()
    rng = np.random.default_rng(7)
    nonzero = 0
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        d = int(rng.integers(1, min(3, n) + 1))
        m = int(rng.integers(1, 4))
        subsets = []
        for _ in range(m):
            a = tuple(sorted(rng.choice(n, d, replace=False) + 1))
            b = a if rng.random() < 0.5 else tuple(sorted(rng.choice(n, d, replace=False) + 1))
            subsets += [a, b]
        val = tensor_moment(g, subsets)
        nonzero += val > 0
        assert 0 <= val <= shared_degree_moment_bound(g, subsets) * (1 + 1e-12)
    assert nonzero > 100
