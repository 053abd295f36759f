"""Bisection Schur operators and the recursive positive definiteness test.

A block matrix of order ``n >= 2`` is cut after ``n // 2`` blocks into
units ``B^11, B^12, B^21, B^22``. The four first-kind operators are::

    D11(B) = B^11                          D22(B) = B^22
    D12(B) = B^11 - B^12 (B^22)^-1 B^21    D21(B) = B^22 - B^21 (B^11)^-1 B^12

(``Dij`` is written ``Δ^i_j`` in operator notation: keep unit ``i``, eliminate unit
``j``). ``B >> 0`` iff every chain of these operators that ends on a
single block yields a positive definite block. A chain is stored in
application order, so ``((2, 2), (1, 2))`` means ``D12(D22(B))``.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .blocks import assemble, flatten, partition_first
from .errors import NoConvergence, NotSelfAdjoint, NumericallySingular, OrderTooSmall
from .linalg import DEFAULT_TOL, invert, is_pd_leaf

Step = Tuple[int, int]
Chain = Tuple[Step, ...]

CANONICAL_STEPS: Tuple[Step, ...] = ((1, 1), (2, 2), (2, 1), (1, 2))

_SUP = {1: "¹", 2: "²", 3: "³"}
_SUB = {1: "₁", 2: "₂", 3: "₃"}


def chain_label(chain):
    """Compact label such as ``"D12.D22"`` (leftmost operator applied last)."""
    return ".".join(f"D{i}{j}" for i, j in reversed(chain))


def chain_notation(chain, arg="B"):
    """Operator-notation label such as ``"Δ¹₂Δ²₂(B)"``."""
    if not chain:
        return arg
    ops = "".join(f"Δ{_SUP[i]}{_SUB[j]}" for i, j in reversed(chain))
    return f"{ops}({arg})"


def parse_chain_label(label):
    if not label:
        return ()
    steps = []
    for tok in reversed(label.split(".")):
        if len(tok) != 3 or tok[0] != "D" or tok[1] not in "12" or tok[2] not in "12":
            raise ValueError(f"bad chain label {label!r}")
        steps.append((int(tok[1]), int(tok[2])))
    return tuple(steps)


class Verdict(str, Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    NOT_POSITIVE_DEFINITE = "NotPositiveDefinite"
    INDETERMINATE = "Indeterminate"


@dataclass
class CertNode:
    """One check in a sign certificate.

    ``verdict`` is ``True``/``False`` for decided nodes and ``None`` when a
    numeric failure (non-convergence) left the node undecided.
    """

    label: str
    order: int
    dims: Tuple[int, ...]
    chain: Optional[Chain] = None
    lambda_min: Optional[float] = None
    verdict: Optional[bool] = None
    note: Optional[str] = None
    children: List["CertNode"] = field(default_factory=list)

    @property
    def is_leaf(self):
        return self.lambda_min is not None or (not self.children and self.order == 1)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_dict(self):
        d = {
            "chain": chain_label(self.chain) if self.chain is not None else None,
            "label": self.label,
            "order": self.order,
            "lambda_min": self.lambda_min,
            "verdict": self.verdict,
        }
        if self.note:
            d["note"] = self.note
        if self.children:
            d["children"] = [c.to_dict() for c in self.children]
        return d


@dataclass
class SignCertificate:
    verdict: Verdict
    root: CertNode
    leaf_count: int
    failure: Optional[str] = None
    method: str = "first-kind recursion"

    def leaves(self):
        return [n for n in self.root.walk() if n.is_leaf]

    @property
    def ok(self):
        return self.verdict is Verdict.POSITIVE_DEFINITE

    def to_dict(self):
        return {
            "method": self.method,
            "verdict": self.verdict.value,
            "leaf_count": self.leaf_count,
            "failure": self.failure,
            "root": self.root.to_dict(),
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def render(self):
        lines = [f"{self.verdict.value}  [{self.method}, {self.leaf_count} leaf checks]"]

        def visit(node, depth):
            pad = "  " * depth
            if node.lambda_min is not None:
                mark = {True: "ok", False: "FAIL", None: "??"}[node.verdict]
                lines.append(f"{pad}{node.label} >> 0   order {node.order}   "
                             f"lambda_min = {node.lambda_min:.12g}   {mark}")
            else:
                lines.append(f"{pad}{node.label}   order {node.order}")
            if node.note:
                lines.append(f"{pad}  ! {node.note}")
            for c in node.children:
                visit(c, depth + 1)

        visit(self.root, 1)
        if self.failure:
            lines.append(f"first failure: {self.failure}")
        return "\n".join(lines)


def schur_first(b, i, j, tol=DEFAULT_TOL):
    """Apply the first-kind operator ``Δ^i_j`` to ``b``.

    The result is re-blocked with the dims of the kept unit and, when
    ``b`` is self-adjoint, re-symmetrized.

    Raises
    ------
    OrderTooSmall
        ``b`` has a single block.
    NumericallySingular
        the eliminated diagonal unit fails the invertibility gate.
    """
    p = partition_first(b)
    if (i, j) == (1, 1):
        return p.B11
    if (i, j) == (2, 2):
        return p.B22
    if (i, j) == (1, 2):
        inv = invert(flatten(p.B22), tol, unit="B^22")
        s = flatten(p.B11) - p.B12 @ inv @ p.B21
        dims = p.dims1
    elif (i, j) == (2, 1):
        inv = invert(flatten(p.B11), tol, unit="B^11")
        s = flatten(p.B22) - p.B21 @ inv @ p.B12
        dims = p.dims2
    else:
        raise ValueError(f"unknown Schur operator index ({i}, {j})")
    if b.self_adjoint:
        s = 0.5 * (s + s.T)
    return assemble(s, dims, tol)


def apply_chain(b, chain, tol=DEFAULT_TOL):
    for i, j in chain:
        b = schur_first(b, i, j, tol)
    return b


class _Run:
    def __init__(self, tol, full_tree):
        self.tol = tol
        self.full_tree = full_tree
        self.stopped = False
        self.leaf_count = 0
        self.failure = None
        self.undecided = False

    def fail(self, chain, what):
        if self.failure is None:
            self.failure = what
        if not self.full_tree:
            self.stopped = True

    def node(self, b, chain):
        label = chain_notation(chain)
        if b.n == 1:
            self.leaf_count += 1
            node = CertNode(label, 1, b.dims, chain)
            try:
                node.verdict, node.lambda_min = is_pd_leaf(b.blocks[0][0], self.tol)
            except NoConvergence as exc:
                node.note = str(exc)
                node.lambda_min = float("nan")
                self.undecided = True
                return node
            if not node.verdict:
                self.fail(chain, label)
            return node

        node = CertNode(label, b.n, b.dims, chain)
        for step in CANONICAL_STEPS:
            if self.stopped:
                break
            try:
                child_b = schur_first(b, *step, self.tol)
            except NumericallySingular as exc:
                # a diagonal unit that is not boundedly invertible cannot be >> 0
                node.note = (f"unit {exc.unit[2:]} of {label} is numerically singular "
                             f"(s_min/s_max = {exc.ratio:.3e})")
                node.verdict = False
                self.fail(chain, f"{chain_notation(chain + (step,))}: {node.note}")
                continue
            node.children.append(self.node(child_b, chain + (step,)))
        if node.verdict is not False:
            decided = [c.verdict for c in node.children]
            if False in decided:
                node.verdict = False
            elif None in decided:
                node.verdict = None
            else:
                node.verdict = True
        return node


def check_pd(b, tol=DEFAULT_TOL, mode="early_exit"):
    """Certify ``b >> 0`` through the first-kind Schur recursion.

    Parameters
    ----------
    b
        Self-adjoint block matrix.
    mode
        ``"early_exit"`` stops at the first violated check; ``"full_tree"``
        evaluates every check whose inverses exist.

    Returns
    -------
    SignCertificate
        Numeric trouble inside the recursion is recorded on the nodes and
        never raised.
    """
    if mode not in ("early_exit", "full_tree"):
        raise ValueError(f"unknown mode {mode!r}")
    if not b.self_adjoint:
        raise NotSelfAdjoint("check_pd needs a self-adjoint block matrix")
    run = _Run(tol, mode == "full_tree")
    root = run.node(b, ())
    if run.failure is not None:
        verdict = Verdict.NOT_POSITIVE_DEFINITE
    elif run.undecided:
        verdict = Verdict.INDETERMINATE
    else:
        verdict = Verdict.POSITIVE_DEFINITE
    return SignCertificate(verdict, root, run.leaf_count, run.failure)


def recursion_depth(n):
    """Number of bisection levels: ``k`` for ``n = 2**k``, else ``k + 1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (n - 1).bit_length()


@lru_cache(maxsize=None)
def _count_recursive(n):
    if n == 1:
        return 1
    m = n // 2
    if n % 2 == 0:
        return 4 * _count_recursive(m)
    return 2 * (_count_recursive(m) + _count_recursive(m + 1))


def count_closed_form(n):
    k = n.bit_length() - 1
    return 2 ** k * (3 * n - 2 ** (k + 1))


def count_inequalities(n):
    """Number of leaf checks ``V_n`` of the full first-kind recursion."""
    if n < 1:
        raise ValueError("n must be >= 1")
    closed = count_closed_form(n)
    recursive = _count_recursive(n)
    if closed != recursive:
        raise ArithmeticError(f"count mismatch at n={n}: closed form {closed}, recursion {recursive}")
    return closed


def enumerate_chains(n):
    """Chains of the full tree for ``n`` blocks, in canonical depth-first order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []

    def walk(order, chain):
        if order == 1:
            out.append(chain)
            return
        half = order // 2
        sizes = {(1, 1): half, (2, 2): order - half, (2, 1): order - half, (1, 2): half}
        for step in CANONICAL_STEPS:
            walk(sizes[step], chain + (step,))

    walk(n, ())
    return out


def exchange_identity_residual(b, tol=DEFAULT_TOL):
    """Residual of ``B^21 (B^11)^-1 Δ¹₂ = Δ²₁ (B^22)^-1 B^21``.

    Returns ``(residual, scale)`` in the max-norm; ``scale`` is the size of
    the terms being compared, so ``residual / scale`` is a relative error.
    """
    if b.n < 2:
        raise OrderTooSmall("needs at least 2 blocks")
    p = partition_first(b)
    b11, b22, b12, b21 = flatten(p.B11), flatten(p.B22), p.B12, p.B21
    inv11 = invert(b11, tol, unit="B^11")
    inv22 = invert(b22, tol, unit="B^22")
    d12 = b11 - b12 @ inv22 @ b21
    d21 = b22 - b21 @ inv11 @ b12
    lhs = b21 @ inv11 @ d12
    rhs = d21 @ inv22 @ b21
    terms = (b21, b21 @ inv11 @ b12 @ inv22 @ b21, lhs, rhs)
    scale = max(1.0, max(float(np.max(np.abs(t))) for t in terms))
    return float(np.max(np.abs(lhs - rhs))), scale
