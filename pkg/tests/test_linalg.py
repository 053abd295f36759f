import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opsign.errors import AsymmetricInput, NonFinite, NonSquare, NumericallySingular, ShapeMismatch
from opsign.linalg import (
    DEFAULT_TOL,
    Tolerances,
    as_dense,
    invert,
    is_nn_leaf,
    is_pd_leaf,
    multiply,
    subtract,
    sym_eig_min,
    sym_eigvals,
    transpose,
)

seeds = st.integers(0, 2 ** 32 - 1)


def test_eig_min_identity():
    assert sym_eig_min(np.eye(3)) == pytest.approx(1.0, abs=1e-14)


def test_eig_min_closed_form_2x2():
    # roots of x^2 - 6x + 7
    assert sym_eig_min([[4.0, 1.0], [1.0, 2.0]]) == pytest.approx(3 - np.sqrt(2), abs=1e-12)


def test_eig_min_rank_one():
    assert abs(sym_eig_min([[1.0, 1.0], [1.0, 1.0]])) < 1e-14


def test_eig_min_errors():
    with pytest.raises(NonSquare):
        sym_eig_min(np.ones((2, 3)))
    with pytest.raises(AsymmetricInput):
        sym_eig_min([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(NonFinite):
        as_dense([[np.nan]])


def test_small_asymmetry_is_symmetrized():
    m = np.array([[2.0, 1.0 + 1e-12], [1.0, 2.0]])
    assert sym_eig_min(m) == pytest.approx(1.0, abs=1e-11)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 12))
def test_jacobi_matches_lapack(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d))
    m = a + a.T
    got = sym_eigvals(m)
    want = np.linalg.eigvalsh(m)
    assert np.max(np.abs(got - want)) <= 1e-10 * max(1.0, np.max(np.abs(m)))


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 10), st.floats(0.01, 10.0))
def test_gram_plus_shift_bounded_below(seed, d, c):
    a = np.random.default_rng(seed).standard_normal((d, d))
    m = a.T @ a + c * np.eye(d)
    assert sym_eig_min(m) >= c - 1e-9 * np.max(np.abs(m))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 10))
def test_eig_min_permutation_invariant(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d))
    m = a + a.T
    p = rng.permutation(d)
    lam, lam_p = sym_eig_min(m), sym_eig_min(m[np.ix_(p, p)])
    assert abs(lam - lam_p) <= 1e-9 * max(1.0, abs(lam), np.max(np.abs(m)))


def test_invert_example_leading_block():
    want = np.array([[2 / 7, -1 / 7], [-1 / 7, 4 / 7]])
    np.testing.assert_allclose(invert([[4.0, 1.0], [1.0, 2.0]]), want, atol=1e-15)


def test_invert_identity_and_singular():
    np.testing.assert_array_equal(invert(np.eye(4)), np.eye(4))
    with pytest.raises(NumericallySingular) as exc:
        invert([[1.0, 1.0], [1.0, 1.0]], unit="B_11")
    assert exc.value.ratio < 1e-15 and "B_11" in str(exc.value)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 12))
def test_invert_residual_when_gate_passes(seed, d):
    m = np.random.default_rng(seed).standard_normal((d, d))
    try:
        inv = invert(m)
    except NumericallySingular:
        return
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] / s[0] < 1e-6:
        return  # residual bound is for well-conditioned inputs
    assert np.max(np.abs(m @ inv - np.eye(d))) <= 1e-8


def test_shape_algebra():
    m = np.array([[4.0, 1.0], [1.0, 2.0]])
    np.testing.assert_array_equal(multiply(np.eye(2), m), m)
    a = np.arange(6.0).reshape(2, 3)
    assert transpose(a).shape == (3, 2) and transpose(a)[2, 1] == a[1, 2]
    np.testing.assert_array_equal(subtract(a, a), np.zeros((2, 3)))
    e = np.diag([1.0, 0.0])
    inv = np.array([[2 / 7, -1 / 7], [-1 / 7, 4 / 7]])
    np.testing.assert_allclose(multiply(multiply(e, inv), e), [[2 / 7, 0], [0, 0]], atol=1e-16)
    with pytest.raises(ShapeMismatch):
        multiply(a, a)


def test_pd_leaf():
    assert is_pd_leaf([[26 / 7, 1.0], [1.0, 2.0]]).verdict
    assert not is_pd_leaf(np.zeros((2, 2))).verdict
    check = is_pd_leaf([[1.0, 2.0], [2.0, 1.0]])
    assert not check.verdict and check.lambda_min == pytest.approx(-1.0, abs=1e-12)


def test_nn_leaf():
    check = is_nn_leaf([[1.0, 1.0], [1.0, 1.0]])
    assert check.verdict and abs(check.lambda_min) < 1e-14
    assert not is_nn_leaf([[-1.0]]).verdict
    assert is_nn_leaf([[2.0, 1.0], [1.0, 2.0]]).verdict


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 6), st.floats(-1.0, 1.0))
def test_pd_leaf_implies_nn_leaf(seed, d, shift):
    a = np.random.default_rng(seed).standard_normal((d, d))
    m = a + a.T + shift * np.eye(d)
    if is_pd_leaf(m).verdict:
        assert is_nn_leaf(m).verdict


def test_tolerances_validation():
    assert DEFAULT_TOL == Tolerances(1e-8, 1e-9, 1e-10, 1e-9)
    with pytest.raises(ValueError):
        Tolerances(pd_eps=0.0)
    assert DEFAULT_TOL.with_overrides(nn_tol=1e-6).nn_tol == 1e-6
