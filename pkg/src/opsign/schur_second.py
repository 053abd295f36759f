"""Sequential elimination and the nonnegativity test.

The second-kind split peels off the first block coordinate. Elimination
``E(B) = B~22 - B~21 B11^-1 B~12`` (operator notation ``Δ̃²₁``) leaves a block
matrix of order ``n - 1``. When the corners of ``B, E(B), E(E(B)), ...``
are all boundedly invertible, ``B >= 0`` iff each corner is ``>= 0`` and the
last single block ``E^(n-1)(B)`` is ``>= 0``.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .blocks import assemble, flatten, partition_second
from .errors import NoConvergence, NotPositiveDefinite, NotSelfAdjoint, NumericallySingular, ShapeMismatch
from .linalg import DEFAULT_TOL, invert, is_nn_leaf, is_pd_leaf, singular_ratio


class NNVerdict(str, Enum):
    NONNEGATIVE = "Nonnegative"
    NOT_NONNEGATIVE = "NotNonnegative"
    PRECONDITION_FAILED = "PreconditionFailed"
    INDETERMINATE = "Indeterminate"


@dataclass
class Stage:
    """Record for one corner: its nonnegativity check and invertibility gate.

    ``gate_ok`` is ``None`` for the final stage, which has no gate.
    """

    index: int
    label: str
    order: int
    lambda_min: Optional[float] = None
    check_ok: Optional[bool] = None
    gate_ratio: Optional[float] = None
    gate_ok: Optional[bool] = None
    note: Optional[str] = None

    def to_dict(self):
        d = {
            "stage": self.index,
            "label": self.label,
            "order": self.order,
            "lambda_min": self.lambda_min,
            "check": self.check_ok,
            "gate_ratio": self.gate_ratio,
            "gate": self.gate_ok,
        }
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class NNCertificate:
    verdict: NNVerdict
    stages: List[Stage] = field(default_factory=list)
    failure: Optional[int] = None
    method: str = "sequential elimination"

    @property
    def ok(self):
        return self.verdict is NNVerdict.NONNEGATIVE

    @property
    def gate_count(self):
        return sum(s.gate_ok is not None for s in self.stages)

    @property
    def check_count(self):
        return sum(s.check_ok is not None for s in self.stages)

    def to_dict(self):
        return {
            "method": self.method,
            "verdict": self.verdict.value,
            "failure": self.failure,
            "stages": [s.to_dict() for s in self.stages],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def render(self):
        lines = [f"{self.verdict.value}  [{self.method}, {self.check_count} checks, "
                 f"{self.gate_count} invertibility gates]"]
        for s in self.stages:
            parts = [f"  stage {s.index}: {s.label} >= 0"]
            if s.lambda_min is not None:
                parts.append(f"lambda_min = {s.lambda_min:.12g} {'ok' if s.check_ok else 'FAIL'}")
            if s.gate_ok is not None:
                parts.append(f"invertible: {'yes' if s.gate_ok else 'NO'} "
                             f"(s_min/s_max = {s.gate_ratio:.3e})")
            lines.append("   ".join(parts))
            if s.note:
                lines.append(f"    ! {s.note}")
        return "\n".join(lines)


def stage_label(k, n):
    """Operator-notation label of the ``k``-th corner check for ``n`` blocks."""
    power = "" if k == 0 else ("Δ̃²₁" if k == 1 else f"(Δ̃²₁)^{k}")
    if k == n - 1:
        return f"{power}(B)" if power else "B"
    return f"Δ̃¹₁{power}(B)"


def schur_second(b, tol=DEFAULT_TOL):
    """Eliminate the first block coordinate: ``B~22 - B~21 B11^-1 B~12``.

    Raises
    ------
    NumericallySingular
        ``B11`` fails the invertibility gate.
    """
    p = partition_second(b)
    inv = invert(b.blocks[0][0], tol, unit="B_11")
    s = flatten(p.B22) - p.B21 @ inv @ p.B12
    if b.self_adjoint:
        s = 0.5 * (s + s.T)
    return assemble(s, p.dims2, tol)


def _units_2x2(b):
    if b.n != 2:
        raise ShapeMismatch(f"expected a 2-block matrix, got {b.n} blocks")
    return b.blocks[0][0], b.blocks[0][1], b.blocks[1][0], b.blocks[1][1]


def check_nn_2x2(b, tol=DEFAULT_TOL, ordering="eliminate_first"):
    """Nonnegativity of a 2-block matrix from one diagonal block and its complement.

    ``eliminate_first`` checks ``B11 >= 0`` and ``B22 - B21 B11^-1 B12 >= 0``;
    ``eliminate_second`` checks ``B22 >= 0`` and ``B11 - B12 B22^-1 B21 >= 0``.
    The eliminated block must pass the invertibility gate, otherwise the
    verdict is ``PreconditionFailed``.
    """
    if not b.self_adjoint:
        raise NotSelfAdjoint("check_nn_2x2 needs a self-adjoint block matrix")
    b11, b12, b21, b22 = _units_2x2(b)
    if ordering == "eliminate_first":
        piv, other, left, right = b11, b22, b21, b12
        names = ("B11", "Δ²₁(B) = B22 - B21 B11^-1 B12")
    elif ordering == "eliminate_second":
        piv, other, left, right = b22, b11, b12, b21
        names = ("B22", "Δ¹₂(B) = B11 - B12 B22^-1 B21")
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    first = Stage(0, names[0], 2)
    cert = NNCertificate(NNVerdict.NONNEGATIVE, [first], method=f"2x2 criterion ({ordering})")
    first.check_ok, first.lambda_min = is_nn_leaf(piv, tol)
    if not first.check_ok:
        cert.verdict, cert.failure = NNVerdict.NOT_NONNEGATIVE, 0
        return cert
    first.gate_ratio = singular_ratio(piv)
    first.gate_ok = first.gate_ratio >= tol.inv_tol
    if not first.gate_ok:
        cert.verdict, cert.failure = NNVerdict.PRECONDITION_FAILED, 0
        return cert
    comp = other - left @ invert(piv, tol) @ right
    comp = 0.5 * (comp + comp.T)
    second = Stage(1, names[1], 1)
    second.check_ok, second.lambda_min = is_nn_leaf(comp, tol)
    cert.stages.append(second)
    if not second.check_ok:
        cert.verdict, cert.failure = NNVerdict.NOT_NONNEGATIVE, 1
    return cert


def energy_identity_residual(b, h, tol=DEFAULT_TOL):
    """Residual of ``<Bh,h> = |B11^½ h1 + B11^-½ B12 h2|² + <Δ h2, h2>``.

    ``Δ = B22 - B21 B11^-1 B12`` and ``B11^½`` is the PSD square root from an
    eigen-decomposition. ``B11`` must be positive definite.
    """
    b11, b12, b21, b22 = _units_2x2(b)
    if not is_pd_leaf(b11, tol).verdict:
        raise NotPositiveDefinite("B11 must be positive definite for the energy identity")
    h1, h2 = (np.asarray(x, dtype=float).reshape(-1) for x in h)
    if h1.size != b.dims[0] or h2.size != b.dims[1]:
        raise ShapeMismatch("h does not conform to the block dims")
    w, v = np.linalg.eigh(0.5 * (b11 + b11.T))
    root = (v * np.sqrt(w)) @ v.T
    inv_root = (v / np.sqrt(w)) @ v.T
    comp = b22 - b21 @ invert(b11, tol) @ b12
    u = root @ h1 + inv_root @ (b12 @ h2)
    full = np.concatenate([h1, h2])
    lhs = float(full @ (flatten(b) @ full))
    rhs = float(u @ u) + float(h2 @ (comp @ h2))
    return abs(lhs - rhs)


def check_nn(b, tol=DEFAULT_TOL):
    """Certify ``B >= 0`` by sequential elimination of block coordinates.

    At stage ``k < n - 1`` the corner of ``E^k(B)`` is checked for
    nonnegativity and then gated for invertibility before the next
    elimination; the last stage checks the single remaining block.

    A negative corner ends the run with ``NotNonnegative``: it is a corner
    of a Schur complement taken over invertible pivots, so ``B`` cannot be
    nonnegative. A failed gate ends it with ``PreconditionFailed``: the
    criterion does not apply, which says nothing about the sign of ``B``.
    """
    if not b.self_adjoint:
        raise NotSelfAdjoint("check_nn needs a self-adjoint block matrix")
    n = b.n
    cert = NNCertificate(NNVerdict.NONNEGATIVE)
    cur = b
    for k in range(n):
        last = k == n - 1
        corner = cur.blocks[0][0]
        stage = Stage(k, stage_label(k, n), n - k)
        cert.stages.append(stage)
        try:
            stage.check_ok, stage.lambda_min = is_nn_leaf(corner, tol)
        except NoConvergence as exc:
            stage.note = str(exc)
            cert.verdict, cert.failure = NNVerdict.INDETERMINATE, k
            return cert
        if not stage.check_ok:
            cert.verdict, cert.failure = NNVerdict.NOT_NONNEGATIVE, k
            return cert
        if last:
            break
        stage.gate_ratio = singular_ratio(corner)
        stage.gate_ok = stage.gate_ratio >= tol.inv_tol
        if not stage.gate_ok:
            stage.note = "corner is not boundedly invertible; the criterion does not apply"
            cert.verdict, cert.failure = NNVerdict.PRECONDITION_FAILED, k
            return cert
        try:
            cur = schur_second(cur, tol)
        except NumericallySingular as exc:
            stage.gate_ok, stage.note = False, str(exc)
            cert.verdict, cert.failure = NNVerdict.PRECONDITION_FAILED, k
            return cert
    return cert
