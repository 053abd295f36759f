import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opsign.blocks import assemble, block_identity, flatten, make_block_matrix, scalar_blocks
from opsign.errors import NotPositiveDefinite
from opsign.linalg import scale_of, sym_eig_min
from opsign.oracle import random_self_adjoint
from opsign.schur_first import Verdict, check_pd
from opsign.schur_second import NNVerdict, check_nn, check_nn_2x2, energy_identity_residual, schur_second

seeds = st.integers(0, 2 ** 32 - 1)


def test_rank_one_elimination():
    np.testing.assert_array_equal(flatten(schur_second(scalar_blocks([[1, 1], [1, 1]]))), [[0.0]])


def test_zero_coupling_elimination():
    b = make_block_matrix([1, 2], [[np.eye(1), np.zeros((1, 2))],
                                   [np.zeros((2, 1)), np.diag([5.0, 6.0])]])
    np.testing.assert_array_equal(flatten(schur_second(b)), np.diag([5.0, 6.0]))


@pytest.mark.parametrize("grid, verdict", [
    ([[1, 1], [1, 1]], NNVerdict.NONNEGATIVE),
    ([[1, 2], [2, 1]], NNVerdict.NOT_NONNEGATIVE),
    ([[1, 0], [0, 1]], NNVerdict.NONNEGATIVE),
])
def test_nn_2x2_examples(grid, verdict):
    cert = check_nn_2x2(scalar_blocks(grid))
    assert cert.verdict is verdict


def test_nn_2x2_complement_value():
    cert = check_nn_2x2(scalar_blocks([[1, 2], [2, 1]]))
    assert cert.stages[1].lambda_min == pytest.approx(-3.0)


@settings(max_examples=80, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4), st.floats(-0.5, 0.5))
def test_nn_2x2_orderings_agree(seed, d1, d2, shift):
    b = random_self_adjoint(2, [d1, d2], shift, seed, kind="spectral")
    lam = sym_eig_min(flatten(b))
    if abs(lam) <= 1e-8 * scale_of(flatten(b)):
        return
    a = check_nn_2x2(b, ordering="eliminate_first")
    c = check_nn_2x2(b, ordering="eliminate_second")
    if NNVerdict.PRECONDITION_FAILED in (a.verdict, c.verdict):
        return
    assert a.verdict is c.verdict


def test_energy_identity_examples():
    b = scalar_blocks([[4, 1], [1, 2]])
    assert energy_identity_residual(b, ([1.0], [1.0])) <= 1e-14
    ident = block_identity([2, 3])
    assert energy_identity_residual(ident, (np.ones(2), np.arange(3.0))) == 0.0
    with pytest.raises(NotPositiveDefinite):
        energy_identity_residual(scalar_blocks([[-1, 0], [0, 1]]), ([1.0], [1.0]))


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_energy_identity_random(seed, d1, d2):
    rng = np.random.default_rng(seed)
    b = random_self_adjoint(2, [d1, d2], float(rng.uniform(-0.5, 0.5)), seed, kind="spectral")
    if not sym_eig_min(b.blocks[0][0]) > 1e-3:
        return
    h = (rng.standard_normal(d1), rng.standard_normal(d2))
    hn = float(np.concatenate(h) @ np.concatenate(h))
    scale = max(1.0, float(np.linalg.norm(flatten(b), 2))) * hn
    assert energy_identity_residual(b, h) <= 1e-9 * scale


def test_check_nn_examples():
    assert check_nn(block_identity([1, 2, 3])).verdict is NNVerdict.NONNEGATIVE
    cert = check_nn(scalar_blocks([[2, 1, 0], [1, 2, 1], [0, 1, 2]]))
    assert cert.verdict is NNVerdict.NONNEGATIVE
    np.testing.assert_allclose([s.lambda_min for s in cert.stages], [2, 3 / 2, 4 / 3], atol=1e-14)
    assert cert.check_count == 3 and cert.gate_count == 2
    ones = check_nn(scalar_blocks(np.ones((3, 3))))
    assert ones.verdict is NNVerdict.PRECONDITION_FAILED and ones.failure == 1


def test_negative_corner_is_conclusive():
    cert = check_nn(scalar_blocks([[-1, 0], [0, 1]]))
    assert cert.verdict is NNVerdict.NOT_NONNEGATIVE and cert.failure == 0


@settings(max_examples=150, deadline=None)
@given(seeds, st.integers(1, 6), st.floats(-0.5, 0.5))
def test_oracle_equivalence_when_gates_pass(seed, n, shift):
    b = random_self_adjoint(n, None, shift, seed, kind="spectral")
    cert = check_nn(b)
    if cert.verdict is NNVerdict.PRECONDITION_FAILED:
        return
    lam = sym_eig_min(flatten(b))
    scale = scale_of(flatten(b))
    if abs(lam) <= 10 * 1e-9 * scale:
        return
    assert (cert.verdict is NNVerdict.NONNEGATIVE) == (lam >= -1e-9 * scale)


@settings(max_examples=80, deadline=None)
@given(seeds, st.integers(1, 6), st.floats(-0.5, 0.5))
def test_pd_implies_nn(seed, n, shift):
    b = random_self_adjoint(n, None, shift, seed, kind="spectral")
    if check_pd(b).verdict is Verdict.POSITIVE_DEFINITE:
        assert check_nn(b).verdict is NNVerdict.NONNEGATIVE


def _gauss_eliminate(m, k):
    # plain scalar Gaussian elimination of the first k rows/columns
    m = m.copy()
    for p in range(k):
        m[p + 1:, p + 1:] -= np.outer(m[p + 1:, p], m[p, p + 1:]) / m[p, p]
    return m[k:, k:]


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 6))
def test_elimination_equals_gaussian(seed, n):
    b = random_self_adjoint(n, None, 0.5, seed)
    cur, m = b, flatten(b)
    for k in range(1, n):
        cur = schur_second(cur)
        want = _gauss_eliminate(m, sum(b.dims[:k]))
        assert np.max(np.abs(flatten(cur) - want)) <= 1e-8 * scale_of(m)


def test_certificate_serialization():
    cert = check_nn(scalar_blocks([[2, 1], [1, 2]]))
    doc = cert.to_dict()
    assert doc["verdict"] == "Nonnegative" and len(doc["stages"]) == 2
    assert "stage 1" in cert.render()
    b = assemble(np.diag([1.0, -1.0, 1.0]), [1, 1, 1])
    assert check_nn(b).failure == 1
