"""Closed-form criteria for three blocks and for bidiagonal block matrices.

All indices in this module are 1-based, matching the labels printed in
certificates. For three blocks the generalized complements are::

    Δ^i_jk  = B_ik - B_ij B_jj^-1 B_jk      (first kind; i == k is the usual one)
    Δ^ik_j  = B_ik - B_ij B_jj^-1 B_jk      (second kind, Example-style naming)

The two families have the same formula; they differ only in which index
is written as the superscript.
"""

from typing import NamedTuple

import numpy as np

from .blocks import flatten
from .errors import NoConvergence, NotBidiagonal, NotSelfAdjoint, NumericallySingular, ShapeMismatch
from .linalg import DEFAULT_TOL, invert, is_nn_leaf, is_pd_leaf, max_norm, singular_ratio
from .schur_first import CertNode, SignCertificate, Verdict
from .schur_second import NNCertificate, NNVerdict, Stage

_SUP = {1: "¹", 2: "²", 3: "³"}
_SUB = {1: "₁", 2: "₂", 3: "₃"}


def _blk(b, i, j):
    return b.blocks[i - 1][j - 1]


def _need3(b):
    if b.n != 3:
        raise ShapeMismatch(f"expected a 3-block matrix, got {b.n} blocks")


def gen_schur_first_3(b, i, j, k, tol=DEFAULT_TOL):
    """``Δ^i_jk = B_ik - B_ij B_jj^-1 B_jk`` for a 3-block matrix.

    For ``i != k`` the leading term is ``B_ik``, the off-diagonal block of
    the complement obtained by eliminating coordinate ``j``.
    """
    _need3(b)
    inv = invert(_blk(b, j, j), tol, unit=f"B_{j}{j}")
    return _blk(b, i, k) - _blk(b, i, j) @ inv @ _blk(b, j, k)


def gen_schur_second_3(b, i, k, j, tol=DEFAULT_TOL):
    """``Δ^ik_j``: the same complement with ``ik`` written as the superscript."""
    return gen_schur_first_3(b, i, j, k, tol)


class InverseSubBlocks(NamedTuple):
    b22: np.ndarray
    b23: np.ndarray
    b32: np.ndarray
    b33: np.ndarray

    def assemble(self):
        return np.block([[self.b22, self.b23], [self.b32, self.b33]])


def inverse_sub_blocks_3(b, tol=DEFAULT_TOL, form="left"):
    """Blocks of the inverse of the trailing ``2 x 2`` sub-grid ``(B_ij)_{i,j=2,3}``.

    Built from ``B_22^-1``, ``B_33^-1`` and the complements ``Δ²₃₂`` and
    ``Δ³₂₃``. Each block has two equivalent expressions; ``form`` picks
    ``"left"`` (the first written) or ``"right"``.
    """
    _need3(b)
    b22, b23, b32, b33 = _blk(b, 2, 2), _blk(b, 2, 3), _blk(b, 3, 2), _blk(b, 3, 3)
    i22 = invert(b22, tol, unit="B_22")
    i33 = invert(b33, tol, unit="B_33")
    d3_23 = b33 - b32 @ i22 @ b23
    d2_32 = b22 - b23 @ i33 @ b32
    id3_23 = invert(d3_23, tol, unit="Δ³₂₃")
    id2_32 = invert(d2_32, tol, unit="Δ²₃₂")
    e2, e3 = np.eye(b.dims[1]), np.eye(b.dims[2])
    if form == "left":
        m22 = i22 @ (e2 + b23 @ id3_23 @ b32 @ i22)
        m33 = i33 @ (e3 + b32 @ id2_32 @ b23 @ i33)
        m23 = -id2_32 @ b23 @ i33
        m32 = -id3_23 @ b32 @ i22
    elif form == "right":
        m22 = (e2 + i22 @ b23 @ id3_23 @ b32) @ i22
        m33 = (e3 + i33 @ b32 @ id2_32 @ b23) @ i33
        m23 = -i22 @ b23 @ id3_23
        m32 = -i33 @ b32 @ id2_32
    else:
        raise ValueError(f"unknown form {form!r}")
    return InverseSubBlocks(m22, m23, m32, m33)


# the ten checks, in the same depth-first order as the general recursion
_TEN = (
    ("B₁₁", ((1, 1),)),
    ("B₂₂", ((2, 2), (1, 1))),
    ("B₃₃", ((2, 2), (2, 2))),
    ("Δ³₂₃", ((2, 2), (2, 1))),
    ("Δ²₃₂", ((2, 2), (1, 2))),
    ("Δ²₁₂", ((2, 1), (1, 1))),
    ("Δ³₁₃", ((2, 1), (2, 2))),
    ("Δ³²₁₃₂ = Δ³₁₃ - Δ³₁₂(Δ²₁₂)⁻¹Δ²₁₃", ((2, 1), (2, 1))),
    ("Δ²³₁₂₃ = Δ²₁₂ - Δ²₁₃(Δ³₁₃)⁻¹Δ³₁₂", ((2, 1), (1, 2))),
    ("B₁₁ - Σ B₁ᵢ Bᵢⱼ⁻ Bⱼ₁", ((1, 2),)),
)


def _ten_matrices(b, tol):
    """Yield ``(index, matrix or exception)`` for the ten checks."""
    g = lambda i, j, k: gen_schur_first_3(b, i, j, k, tol)  # noqa: E731
    yield 0, lambda: _blk(b, 1, 1)
    yield 1, lambda: _blk(b, 2, 2)
    yield 2, lambda: _blk(b, 3, 3)
    yield 3, lambda: g(3, 2, 3)
    yield 4, lambda: g(2, 3, 2)
    yield 5, lambda: g(2, 1, 2)
    yield 6, lambda: g(3, 1, 3)

    def second_order_32():
        d313 = g(3, 1, 3)
        return d313 - g(3, 1, 2) @ invert(g(2, 1, 2), tol, unit="Δ²₁₂") @ g(2, 1, 3)

    def second_order_23():
        d212 = g(2, 1, 2)
        return d212 - g(2, 1, 3) @ invert(g(3, 1, 3), tol, unit="Δ³₁₃") @ g(3, 1, 2)

    def last():
        m = inverse_sub_blocks_3(b, tol)
        b12, b13, b21, b31 = _blk(b, 1, 2), _blk(b, 1, 3), _blk(b, 2, 1), _blk(b, 3, 1)
        total = b12 @ m.b22 @ b21 + b12 @ m.b23 @ b31 + b13 @ m.b32 @ b21 + b13 @ m.b33 @ b31
        return _blk(b, 1, 1) - total

    yield 7, second_order_32
    yield 8, second_order_23
    yield 9, last


def check_pd_3x3(b, tol=DEFAULT_TOL):
    """The ten explicit positive definiteness checks for three blocks.

    Every check whose inverses exist is evaluated. A failed inverse makes
    the verdict ``NotPositiveDefinite`` and is named in the failing node.
    """
    _need3(b)
    if not b.self_adjoint:
        raise NotSelfAdjoint("check_pd_3x3 needs a self-adjoint block matrix")
    root = CertNode("B", 3, b.dims)
    failure = None
    undecided = False
    for idx, make in _ten_matrices(b, tol):
        label, chain = _TEN[idx]
        node = CertNode(label, 1, (), chain)
        root.children.append(node)
        try:
            m = make()
        except NumericallySingular as exc:
            node.verdict = False
            node.note = f"{exc.unit} is numerically singular (s_min/s_max = {exc.ratio:.3e})"
            failure = failure or f"{label}: {node.note}"
            continue
        m = 0.5 * (m + m.T)
        node.dims = (m.shape[0],)
        try:
            node.verdict, node.lambda_min = is_pd_leaf(m, tol)
        except NoConvergence as exc:
            node.note, node.lambda_min, undecided = str(exc), float("nan"), True
            continue
        if not node.verdict:
            failure = failure or label
    root.verdict = failure is None and not undecided
    if failure is not None:
        verdict = Verdict.NOT_POSITIVE_DEFINITE
    elif undecided:
        verdict, root.verdict = Verdict.INDETERMINATE, None
    else:
        verdict = Verdict.POSITIVE_DEFINITE
    return SignCertificate(verdict, root, len(root.children), failure, method="explicit 3x3 (ten checks)")


def check_nn_3x3(b, tol=DEFAULT_TOL):
    """Nonnegativity for three blocks via ``B11``, ``Δ²²₁`` and the stage-3 complement.

    Gates: ``B11`` and ``Δ²²₁`` invertible. The stage records match the
    ones produced by the general sequential elimination.
    """
    _need3(b)
    if not b.self_adjoint:
        raise NotSelfAdjoint("check_nn_3x3 needs a self-adjoint block matrix")
    cert = NNCertificate(NNVerdict.NONNEGATIVE, method="explicit 3x3 (three checks)")

    def stage(k, label, order, m, gate):
        s = Stage(k, label, order)
        cert.stages.append(s)
        m = 0.5 * (m + m.T)
        s.check_ok, s.lambda_min = is_nn_leaf(m, tol)
        if not s.check_ok:
            cert.verdict, cert.failure = NNVerdict.NOT_NONNEGATIVE, k
            return False
        if gate:
            s.gate_ratio = singular_ratio(m)
            s.gate_ok = s.gate_ratio >= tol.inv_tol
            if not s.gate_ok:
                s.note = "not boundedly invertible; the criterion does not apply"
                cert.verdict, cert.failure = NNVerdict.PRECONDITION_FAILED, k
                return False
        return True

    try:
        if not stage(0, "B₁₁", 3, _blk(b, 1, 1), True):
            return cert
        d22 = gen_schur_second_3(b, 2, 2, 1, tol)
        if not stage(1, "Δ²²₁", 2, d22, True):
            return cert
        d33 = gen_schur_second_3(b, 3, 3, 1, tol)
        d32 = gen_schur_second_3(b, 3, 2, 1, tol)
        d23 = gen_schur_second_3(b, 2, 3, 1, tol)
        last = d33 - d32 @ invert(d22, tol, unit="Δ²²₁") @ d23
        stage(2, "Δ³³₁ - Δ³²₁(Δ²²₁)⁻¹Δ²³₁", 1, last, False)
    except NumericallySingular as exc:
        cert.verdict, cert.failure = NNVerdict.PRECONDITION_FAILED, len(cert.stages) - 1
        cert.stages[-1].note = str(exc)
    except NoConvergence as exc:
        cert.verdict, cert.failure = NNVerdict.INDETERMINATE, len(cert.stages) - 1
        cert.stages[-1].note = str(exc)
    return cert


def is_bidiagonal(b, tol=DEFAULT_TOL):
    """True when only blocks ``(i, i)`` and ``(i, n+1-i)`` are nonzero."""
    n = b.n
    scale = max(1.0, max_norm(flatten(b)))
    for i in range(n):
        for j in range(n):
            if j == i or j == n - 1 - i:
                continue
            if max_norm(b.blocks[i][j]) > tol.sym_tol * scale:
                return False
    return True


def check_pd_bidiagonal(b, tol=DEFAULT_TOL):
    """Positive definiteness of a bidiagonal block matrix.

    Checks ``B_ii >> 0`` for every ``i`` and
    ``B_ii - B_i,n+1-i B_n+1-i,n+1-i^-1 B_n+1-i,i >> 0`` for every ``i`` off
    the centre, giving ``2n`` checks for even ``n`` and ``2n - 1`` for odd.
    """
    if not b.self_adjoint:
        raise NotSelfAdjoint("check_pd_bidiagonal needs a self-adjoint block matrix")
    if not is_bidiagonal(b, tol):
        raise NotBidiagonal("matrix has nonzero blocks off the main and anti-diagonals")
    n = b.n
    root = CertNode("B", n, b.dims)
    failure = None
    undecided = False

    def leaf(label, make):
        nonlocal failure, undecided
        node = CertNode(label, 1, ())
        root.children.append(node)
        try:
            m = make()
        except NumericallySingular as exc:
            node.verdict = False
            node.note = f"{exc.unit} is numerically singular (s_min/s_max = {exc.ratio:.3e})"
            failure = failure or f"{label}: {node.note}"
            return
        m = 0.5 * (m + m.T)
        node.dims = (m.shape[0],)
        try:
            node.verdict, node.lambda_min = is_pd_leaf(m, tol)
        except NoConvergence as exc:
            node.note, node.lambda_min, undecided = str(exc), float("nan"), True
            return
        if not node.verdict:
            failure = failure or label

    for i in range(1, n + 1):
        leaf(f"B_{i}{i}", lambda i=i: _blk(b, i, i))
    for i in range(1, n + 1):
        j = n + 1 - i
        if j == i:
            continue
        leaf(
            f"B_{i}{i} - B_{i}{j} B_{j}{j}^-1 B_{j}{i}",
            lambda i=i, j=j: _blk(b, i, i)
            - _blk(b, i, j) @ invert(_blk(b, j, j), tol, unit=f"B_{j}{j}") @ _blk(b, j, i),
        )
    if failure is not None:
        verdict, root.verdict = Verdict.NOT_POSITIVE_DEFINITE, False
    elif undecided:
        verdict = Verdict.INDETERMINATE
    else:
        verdict, root.verdict = Verdict.POSITIVE_DEFINITE, True
    return SignCertificate(verdict, root, len(root.children), failure, method="bidiagonal")
