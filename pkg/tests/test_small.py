import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opsign.blocks import assemble, block_identity, flatten, scalar_blocks
from opsign.errors import NotBidiagonal
from opsign.extremum import example_l2_hessian
from opsign.linalg import scale_of, sym_eig_min
from opsign.oracle import random_bidiagonal, random_self_adjoint
from opsign.schur_first import Verdict, apply_chain, check_pd
from opsign.schur_second import NNVerdict, check_nn
from opsign.small import (
    _TEN,
    check_nn_3x3,
    check_pd_3x3,
    check_pd_bidiagonal,
    gen_schur_first_3,
    inverse_sub_blocks_3,
    is_bidiagonal,
)

seeds = st.integers(0, 2 ** 32 - 1)


def test_generalized_complement_value():
    b = scalar_blocks([[4, 1, 0], [1, 2, 0], [0, 0, 2]])
    np.testing.assert_allclose(gen_schur_first_3(b, 2, 1, 2), [[7 / 4]], atol=1e-15)


def test_generalized_complement_zero_coupling():
    b = scalar_blocks([[4, 0, 0], [0, 2, 3], [0, 3, 9]])
    np.testing.assert_array_equal(gen_schur_first_3(b, 2, 1, 2), [[2.0]])
    np.testing.assert_array_equal(gen_schur_first_3(b, 2, 1, 3), [[3.0]])


def test_pd_3x3_identity_margins():
    cert = check_pd_3x3(block_identity([1, 2, 1]))
    assert cert.verdict is Verdict.POSITIVE_DEFINITE and cert.leaf_count == 10
    assert all(leaf.lambda_min == pytest.approx(1.0) for leaf in cert.leaves())


def test_pd_3x3_l2_example():
    assert check_pd_3x3(example_l2_hessian(4)).verdict is Verdict.POSITIVE_DEFINITE


@settings(max_examples=60, deadline=None)
@given(seeds, st.lists(st.integers(1, 3), min_size=3, max_size=3))
def test_ten_checks_match_general_chains(seed, dims):
    # each explicit formula is the same matrix as the chain it stands for
    b = random_self_adjoint(3, dims, 0.3, seed, kind="spectral")
    explicit = check_pd_3x3(b)
    for leaf, (_, chain) in zip(explicit.leaves(), _TEN):
        want = sym_eig_min(flatten(apply_chain(b, chain)))
        assert leaf.lambda_min == pytest.approx(want, abs=1e-8 * scale_of(flatten(b)))


@settings(max_examples=100, deadline=None)
@given(seeds, st.lists(st.integers(1, 4), min_size=3, max_size=3), st.floats(-0.5, 0.5))
def test_pd_3x3_equivalent_to_general(seed, dims, shift):
    b = random_self_adjoint(3, dims, shift, seed, kind="spectral")
    lam = sym_eig_min(flatten(b))
    if abs(lam) <= 1e-8 * scale_of(flatten(b)):
        return
    assert check_pd_3x3(b).verdict is check_pd(b).verdict
    assert (check_pd_3x3(b).verdict is Verdict.POSITIVE_DEFINITE) == (lam > 0)


def test_inverse_sub_blocks_examples():
    b = scalar_blocks([[1, 0, 0], [0, 2, 1], [0, 1, 2]])
    for form in ("left", "right"):
        got = inverse_sub_blocks_3(b, form=form).assemble()
        np.testing.assert_allclose(got, [[2 / 3, -1 / 3], [-1 / 3, 2 / 3]], atol=1e-15)
    d = scalar_blocks([[1, 0, 0], [0, 4, 0], [0, 0, 5]])
    m = inverse_sub_blocks_3(d)
    assert m.b22[0, 0] == pytest.approx(0.25) and m.b23[0, 0] == 0.0


@settings(max_examples=80, deadline=None)
@given(seeds, st.lists(st.integers(1, 4), min_size=3, max_size=3), st.sampled_from(["left", "right"]))
def test_inverse_sub_blocks_reconstruct(seed, dims, form):
    b = random_self_adjoint(3, dims, 0.3, seed, kind="spectral")
    lower = flatten(b)[dims[0]:, dims[0]:]
    inv = inverse_sub_blocks_3(b, form=form).assemble()
    assert np.max(np.abs(lower @ inv - np.eye(lower.shape[0]))) <= 1e-8 * scale_of(lower)


def test_nn_3x3_examples():
    assert check_nn_3x3(block_identity([2, 1, 1])).verdict is NNVerdict.NONNEGATIVE
    cert = check_nn_3x3(scalar_blocks([[2, 1, 0], [1, 2, 1], [0, 1, 2]]))
    assert cert.verdict is NNVerdict.NONNEGATIVE
    np.testing.assert_allclose([s.lambda_min for s in cert.stages], [2, 3 / 2, 4 / 3], atol=1e-14)
    ones = check_nn_3x3(scalar_blocks(np.ones((3, 3))))
    assert ones.verdict is NNVerdict.PRECONDITION_FAILED and ones.failure == 1


@settings(max_examples=100, deadline=None)
@given(seeds, st.lists(st.integers(1, 4), min_size=3, max_size=3), st.floats(-0.5, 0.5))
def test_nn_3x3_equivalent_to_general(seed, dims, shift):
    b = random_self_adjoint(3, dims, shift, seed, kind="spectral")
    a, g = check_nn_3x3(b), check_nn(b)
    assert a.verdict is g.verdict
    for s, t in zip(a.stages, g.stages):
        assert s.lambda_min == pytest.approx(t.lambda_min, abs=1e-8 * scale_of(flatten(b)))


def test_bidiagonal_detection():
    assert is_bidiagonal(example_l2_hessian(4))
    assert is_bidiagonal(block_identity([1, 2, 3, 1]))
    m = np.random.default_rng(3).standard_normal((3, 3))
    assert not is_bidiagonal(assemble(m + m.T, [1, 1, 1]))
    with pytest.raises(NotBidiagonal):
        check_pd_bidiagonal(assemble(m + m.T, [1, 1, 1]))


def test_bidiagonal_counts():
    cert = check_pd_bidiagonal(block_identity([1, 1, 1, 1]))
    assert cert.verdict is Verdict.POSITIVE_DEFINITE and cert.leaf_count == 8
    assert check_pd_bidiagonal(example_l2_hessian(4)).leaf_count == 5
    bad = check_pd_bidiagonal(scalar_blocks([[1, 2], [2, 1]]))
    assert bad.verdict is Verdict.NOT_POSITIVE_DEFINITE
    assert min(leaf.lambda_min for leaf in bad.leaves()) == pytest.approx(-3.0)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(2, 7))
def test_bidiagonal_equivalent_to_general(seed, n):
    b = random_bidiagonal(n, None, seed)
    lam = sym_eig_min(flatten(b))
    if abs(lam) <= 1e-8 * scale_of(flatten(b)):
        return
    cert = check_pd_bidiagonal(b)
    assert cert.verdict is check_pd(b).verdict
    assert cert.leaf_count == (2 * n if n % 2 == 0 else 2 * n - 1)
