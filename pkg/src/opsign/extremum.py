"""Second-order extremum tests for functionals of several vector variables.

A :class:`ProductFunctional` maps ``n`` coordinate blocks to a real number.
Gradients and Hessians come from central differences; the Hessian is then
handed to the sign criteria.
"""

import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from .blocks import BlockMatrix, assemble, make_block_matrix, split_vector
from .errors import NonFiniteEvaluation, NotSelfAdjoint, NumericallySingular, ShapeMismatch
from .linalg import DEFAULT_TOL, invert, is_pd_leaf
from .schur_first import SignCertificate, Verdict, check_pd
from .schur_second import NNCertificate, NNVerdict, check_nn
from .small import check_nn_3x3, check_pd_3x3

DEFAULT_GRAD_TOL = 1e-6


@dataclass(frozen=True)
class ProductFunctional:
    """Real functional on ``R^dims[0] x ... x R^dims[n-1]``.

    ``func`` receives a list of ``n`` 1-D arrays. It must be deterministic
    and safe to call concurrently.
    """

    dims: Tuple[int, ...]
    func: Callable[[List[np.ndarray]], float]
    name: str = "Φ"

    def __call__(self, point):
        return float(self.func(point))

    def at_flat(self, v):
        value = float(self.func(split_vector(v, self.dims)))
        if not np.isfinite(value):
            raise NonFiniteEvaluation(f"{self.name} returned {value} at the perturbed point")
        return value


def _flat_point(phi, y):
    if y is None:
        return np.zeros(sum(phi.dims))
    if len(y) != len(phi.dims):
        raise ShapeMismatch(f"expected {len(phi.dims)} coordinate blocks, got {len(y)}")
    parts = [np.asarray(b, dtype=float).reshape(-1) for b in y]
    for i, (p, d) in enumerate(zip(parts, phi.dims)):
        if p.size != d:
            raise ShapeMismatch(f"coordinate {i + 1} has length {p.size}, expected {d}")
    return np.concatenate(parts)


def default_step(y_flat):
    return 1e-3 * max(1.0, float(np.linalg.norm(y_flat)))


def gradient_fd(phi, y=None, step=None):
    """Central-difference gradient, returned as ``n`` coordinate blocks."""
    x = _flat_point(phi, y)
    s = default_step(x) if step is None else float(step)
    if not s > 0:
        raise ValueError("step must be positive")
    g = np.empty(x.size)
    for k in range(x.size):
        e = np.zeros(x.size)
        e[k] = s
        g[k] = (phi.at_flat(x + e) - phi.at_flat(x - e)) / (2 * s)
    return split_vector(g, phi.dims)


def hessian_fd(phi, y=None, step=None, tol=DEFAULT_TOL):
    """Central second differences assembled as a block Hessian.

    Diagonal entries use ``(f(x+se) - 2f(x) + f(x-se)) / s²`` and mixed
    entries the four-point stencil. The stencil is symmetric in the two
    coordinates, so the result is symmetric up to roundoff; it is
    symmetrized explicitly anyway.
    """
    x = _flat_point(phi, y)
    s = default_step(x) if step is None else float(step)
    if not s > 0:
        raise ValueError("step must be positive")
    d = x.size
    f0 = phi.at_flat(x)
    eye = np.eye(d) * s
    plus = [phi.at_flat(x + eye[k]) for k in range(d)]
    minus = [phi.at_flat(x - eye[k]) for k in range(d)]
    h = np.empty((d, d))
    for i in range(d):
        h[i, i] = (plus[i] - 2 * f0 + minus[i]) / (s * s)
        for j in range(i + 1, d):
            fpp = phi.at_flat(x + eye[i] + eye[j])
            fpm = phi.at_flat(x + eye[i] - eye[j])
            fmp = phi.at_flat(x - eye[i] + eye[j])
            fmm = phi.at_flat(x - eye[i] - eye[j])
            h[i, j] = h[j, i] = (fpp - fpm - fmp + fmm) / (4 * s * s)
    h = 0.5 * (h + h.T)
    return assemble(h, phi.dims, tol)


class Classification(str, Enum):
    STRONG_LOCAL_MIN = "StrongLocalMin"
    STRONG_LOCAL_MAX = "StrongLocalMax"
    NOT_A_MIN = "NotAMin"
    NOT_A_MAX = "NotAMax"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class ExtremumReport:
    gradient_norms: Optional[List[float]]
    hessian: Optional[BlockMatrix]
    classification: Classification
    reason: str = ""
    violations: Tuple[str, ...] = ()
    pd_certificate: Optional[SignCertificate] = None
    nd_certificate: Optional[SignCertificate] = None
    nn_certificate: Optional[NNCertificate] = None
    np_certificate: Optional[NNCertificate] = None

    def to_dict(self):
        def cert(c):
            return None if c is None else c.to_dict()

        return {
            "classification": self.classification.value,
            "reason": self.reason,
            "violations": list(self.violations),
            "gradient_norms": self.gradient_norms,
            "dims": None if self.hessian is None else list(self.hessian.dims),
            "certificates": {
                "hessian_pd": cert(self.pd_certificate),
                "neg_hessian_pd": cert(self.nd_certificate),
                "hessian_nn": cert(self.nn_certificate),
                "neg_hessian_nn": cert(self.np_certificate),
            },
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def render(self):
        lines = [f"classification: {self.classification.value}"]
        if self.reason:
            lines.append(f"reason: {self.reason}")
        if self.gradient_norms is not None:
            norms = ", ".join(f"{g:.3e}" for g in self.gradient_norms)
            lines.append(f"gradient block norms: [{norms}]")
        else:
            lines.append("gradient check skipped (Hessian given directly)")
        for title, c in (("Hessian >> 0", self.pd_certificate),
                         ("-Hessian >> 0", self.nd_certificate),
                         ("Hessian >= 0", self.nn_certificate),
                         ("-Hessian >= 0", self.np_certificate)):
            if c is not None:
                lines.append(f"--- {title}: " + c.render())
        return "\n".join(lines)


def classify_hessian(hess, tol=DEFAULT_TOL, gradient_norms=None, grad_tol=DEFAULT_GRAD_TOL):
    """Classify a critical point from its block Hessian.

    Sufficient conditions first (``H >> 0`` or ``-H >> 0``), then the
    necessary ones (``H >= 0`` and ``-H >= 0`` under their invertibility
    hypotheses). Without gradient norms the point is taken to be critical.
    """
    if not hess.self_adjoint:
        raise NotSelfAdjoint("the Hessian must be symmetric")
    report = ExtremumReport(gradient_norms, hess, Classification.INCONCLUSIVE)
    if gradient_norms is not None and max(gradient_norms) > grad_tol:
        report.reason = f"NotCritical: largest gradient block norm {max(gradient_norms):.3e} > {grad_tol:.1e}"
        return report
    neg = -hess
    report.pd_certificate = check_pd(hess, tol)
    if report.pd_certificate.verdict is Verdict.POSITIVE_DEFINITE:
        report.classification = Classification.STRONG_LOCAL_MIN
        report.reason = "Hessian is positive definite"
        return report
    report.nd_certificate = check_pd(neg, tol)
    if report.nd_certificate.verdict is Verdict.POSITIVE_DEFINITE:
        report.classification = Classification.STRONG_LOCAL_MAX
        report.reason = "Hessian is negative definite"
        return report
    report.nn_certificate = check_nn(hess, tol)
    report.np_certificate = check_nn(neg, tol)
    violations = []
    if report.nn_certificate.verdict is NNVerdict.NOT_NONNEGATIVE:
        violations.append(Classification.NOT_A_MIN.value)
    if report.np_certificate.verdict is NNVerdict.NOT_NONNEGATIVE:
        violations.append(Classification.NOT_A_MAX.value)
    report.violations = tuple(violations)
    if violations:
        report.classification = Classification(violations[0])
        report.reason = "second-order necessary condition violated: " + ", ".join(violations)
    else:
        gates = [c for c in (report.nn_certificate, report.np_certificate)
                 if c.verdict is NNVerdict.PRECONDITION_FAILED]
        report.reason = ("necessary criterion inapplicable (invertibility gate failed)" if gates
                         else "Hessian is semidefinite but not definite")
    return report


def classify_critical_point(phi, y=None, tol=DEFAULT_TOL, step=None, grad_tol=DEFAULT_GRAD_TOL):
    """Gradient check plus :func:`classify_hessian` on the FD Hessian.

    Numeric failures are folded into an ``Inconclusive`` report.
    """
    try:
        grad = gradient_fd(phi, y, step)
        norms = [float(np.linalg.norm(g)) for g in grad]
        hess = hessian_fd(phi, y, step, tol)
    except (NonFiniteEvaluation, NotSelfAdjoint) as exc:
        return ExtremumReport(None, None, Classification.INCONCLUSIVE, reason=str(exc))
    return classify_hessian(hess, tol, norms, grad_tol)


def check_sufficient_2var(hess, tol=DEFAULT_TOL):
    """The four conditions ``H11, H22, Δ¹₂, Δ²₁ >> 0`` for two variables."""
    if hess.n != 2:
        raise ShapeMismatch("expected a 2-block Hessian")
    if not hess.self_adjoint:
        raise NotSelfAdjoint("the Hessian must be symmetric")
    h11, h12 = hess.blocks[0]
    h21, h22 = hess.blocks[1]
    if not (is_pd_leaf(h11, tol).verdict and is_pd_leaf(h22, tol).verdict):
        return False
    try:
        d12 = h11 - h12 @ invert(h22, tol) @ h21
        d21 = h22 - h21 @ invert(h11, tol) @ h12
    except NumericallySingular:
        return False
    return is_pd_leaf(0.5 * (d12 + d12.T), tol).verdict and is_pd_leaf(0.5 * (d21 + d21.T), tol).verdict


def check_sufficient_3var(hess, tol=DEFAULT_TOL):
    """Ten explicit conditions for three variables."""
    return check_pd_3x3(hess, tol).verdict is Verdict.POSITIVE_DEFINITE


def check_necessary_3var(hess, tol=DEFAULT_TOL):
    """Three nonnegativity conditions for a local minimum in three variables."""
    cert = check_nn_3x3(hess, tol)
    general = check_nn(hess, tol)
    if cert.verdict is not general.verdict:
        raise AssertionError(f"explicit 3x3 path gave {cert.verdict.value}, "
                             f"elimination gave {general.verdict.value}")
    return cert


# -- the l2 example ------------------------------------------------------------

def _l2_value(point):
    x, y, z = point
    return (x @ x + y @ y + z @ z
            + x[0] ** 2 + z[0] ** 2 + x[0] * x[1] + y[0] * y[1] + z[0] * z[1] + x[0] * z[0])


def example_l2_functional(n_trunc):
    """The three-variable quadratic on truncated ``l2`` with x-z coupling.

    Every coupling term involves only the first two components, so the
    truncation to ``n_trunc >= 2`` components is exact.
    """
    if n_trunc < 2:
        raise ValueError("truncation dimension must be at least 2")
    return ProductFunctional((n_trunc,) * 3, _l2_value, name="l2 example")


def example_l2_gradient(point):
    """Closed-form gradient blocks of the l2 example."""
    x, y, z = (np.asarray(p, dtype=float) for p in point)
    gx, gy, gz = 2 * x, 2 * y, 2 * z
    gx[0] += 2 * x[0] + x[1] + z[0]
    gx[1] += x[0]
    gy[0] += y[1]
    gy[1] += y[0]
    gz[0] += 2 * z[0] + z[1] + x[0]
    gz[1] += z[0]
    return [gx, gy, gz]


def example_l2_hessian(n_trunc):
    """Exact block Hessian of the l2 example (it is constant)."""
    if n_trunc < 2:
        raise ValueError("truncation dimension must be at least 2")
    hxx = 2 * np.eye(n_trunc)
    hxx[:2, :2] = [[4, 1], [1, 2]]
    hyy = 2 * np.eye(n_trunc)
    hyy[:2, :2] = [[2, 1], [1, 2]]
    hxz = np.zeros((n_trunc, n_trunc))
    hxz[0, 0] = 1.0
    zero = np.zeros((n_trunc, n_trunc))
    blocks = [[hxx, zero, hxz], [zero, hyy, zero], [hxz.T, zero, hxx.copy()]]
    return make_block_matrix((n_trunc,) * 3, blocks)
