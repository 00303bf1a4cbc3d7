import numpy as np
import pytest
from hypothesis import given, strategies as st

from tensor_esd.errors import DomainError, ValidationError
from tensor_esd.identities import (RESIDUAL_THRESHOLD, check_rank_one_rearrangement,
                                   check_resolvent_diff_bound, check_sherman_morrison,
                                   check_small_quadratic_form, check_trace_identity,
                                   check_truncated_expansion, identity_suite, leave_one_out,
                                   quadratic_form, random_instance)


def _instance(seed=0, n=6, d=2, p=10, dist="rademacher"):
    return random_instance(seed, n, d, p, dist)[0]


def test_trace_identity_examples():
    Z = _instance(p=10)
    assert check_trace_identity(Z, 10, 3j).residual < 1e-10
    Z1 = _instance(seed=3, p=1)
    assert check_trace_identity(Z1, 1, 1 + 2j).residual < 1e-12
    rep = check_trace_identity(np.zeros((5, 3)), 3, 1j)
    assert rep.residual == 0


def test_sherman_morrison_examples():
    assert check_sherman_morrison([[2.0]], [1.0], [1.0]).residual < 1e-15
    rng = np.random.default_rng(0)
    A = rng.uniform(-1, 1, (15, 15)) + 5 * np.eye(15)
    assert check_sherman_morrison(A, np.zeros(15), rng.uniform(-1, 1, 15)).residual < 1e-12
    rep = check_sherman_morrison(A, rng.uniform(-1, 1, 15), rng.uniform(-1, 1, 15))
    assert rep.residual < 1e-9 and not rep.skipped
    assert check_sherman_morrison(np.ones((3, 3)), np.ones(3), np.ones(3)).skipped
    with pytest.raises(ValidationError):
        check_sherman_morrison(A, np.ones(3), np.ones(15))


def test_rank_one_rearrangement_examples():
    Z = _instance(p=8, dist="gaussian")
    rep = check_rank_one_rearrangement(Z, 3, 2j)
    assert rep.parts["scalar"] < 1e-10 and rep.parts["vector"] < 1e-10
    Z0 = Z.copy()
    Z0[:, 1] = 0
    rep = check_rank_one_rearrangement(Z0, 2, 2j)
    assert rep.residual == 0
    single = _instance(seed=4, p=1)
    assert check_rank_one_rearrangement(single, 1, 1 + 1j).residual < 1e-12
    with pytest.raises(ValidationError):
        check_rank_one_rearrangement(Z, 9, 2j)
    with pytest.raises(ValidationError):
        check_rank_one_rearrangement(Z, 0, 2j)


def test_resolvent_diff_bound_examples():
    Z = _instance(seed=2, p=12, dist="threepoint:3")
    rep = check_resolvent_diff_bound(Z, 5, 0.5 + 1j)
    assert rep.bound_checked.holds and rep.residual < 1e-10
    Z[:, 4] = 0
    rep = check_resolvent_diff_bound(Z, 5, 0.5 + 1j)
    assert rep.bound_checked.lhs < 1e-12
    rep = check_resolvent_diff_bound(_instance(seed=5, p=12), 1, 100j)
    assert rep.bound_checked.lhs <= 0.01


def test_small_quadratic_form():
    Z = _instance(seed=1, n=5, d=1, p=20)
    rep = check_small_quadratic_form(Z, 2, 1 + 1j)
    assert not rep.skipped and rep.bound_checked.holds
    assert check_small_quadratic_form(Z, 2, 1 + 0.1j).skipped


def test_truncated_expansion_examples():
    rep = check_truncated_expansion(0, 4)
    assert rep.residual == 0
    rep = check_truncated_expansion(0.5, 10)
    assert rep.residual < 1e-14 and rep.bound_checked.lhs <= 2 * 2**-10
    assert check_truncated_expansion(0.3j, 5).residual < 1e-14
    with pytest.raises(DomainError):
        check_truncated_expansion(0.9, 3)
    assert check_truncated_expansion(0.9, 3, require_small=False).bound_checked is None
    with pytest.raises(ValidationError):
        check_truncated_expansion(0.1, -1)


@given(st.complex_numbers(max_magnitude=0.5), st.integers(0, 30))
def test_truncated_expansion_property(x, M):
    rep = check_truncated_expansion(x, M)
    assert rep.residual < 1e-12
    assert rep.bound_checked.holds


@given(st.integers(0, 10**6), st.integers(2, 7), st.integers(1, 3), st.integers(2, 12),
       st.sampled_from(["rademacher", "gaussian", "threepoint:4"]),
       st.floats(-3, 8), st.floats(1, 5))
def test_identities_property(seed, n, d, p, dist, re, im):
    d = min(d, n)
    Z, _ = random_instance(seed, n, d, p, dist)
    z = complex(re, im)
    j = 1 + seed % p
    assert check_trace_identity(Z, p, z).residual < RESIDUAL_THRESHOLD
    assert check_rank_one_rearrangement(Z, j, z).residual < RESIDUAL_THRESHOLD
    rep = check_resolvent_diff_bound(Z, j, z)
    assert rep.residual < RESIDUAL_THRESHOLD and rep.bound_checked.holds
    x = quadratic_form(Z, j, z)
    S = leave_one_out(Z, j)
    assert np.allclose(S, S.T)
    assert np.isfinite(x)


def test_report_validation_and_dict():
    rep = check_truncated_expansion(0.25, 2, digest={"seed": 1})
    d = rep.to_dict()
    assert d["name"] == "truncated_expansion" and d["digest"] == {"seed": 1}
    from tensor_esd.identities import IdentityReport
    with pytest.raises(ValidationError):
        IdentityReport("x", -1.0)


def test_suite_reproducible_and_digests():
    a = identity_suite(5, seed=3)
    b = identity_suite(5, seed=3)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]
    rep = a[0]
    dg = rep.digest
    Z, _ = random_instance(dg["seed"], dg["n"], dg["d"], dg["p"], dg["dist"])
    again = check_trace_identity(Z, dg["p"], complex(*dg["z"]))
    assert again.residual == rep.residual
    with pytest.raises(DomainError):
        identity_suite(1, im_floor=0.0)
