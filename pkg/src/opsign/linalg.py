"""Dense real linear algebra used by the sign criteria.

Matrices are plain 2-D float64 NumPy arrays. The smallest eigenvalue is
computed with a cyclic Jacobi iteration written out here, so that the
eigenvalue oracle does not share code with the LU-based inversions that
drive the Schur recursions.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import (
    AsymmetricInput,
    NoConvergence,
    NonFinite,
    NonSquare,
    NumericallySingular,
    ShapeMismatch,
)

MAX_SWEEPS = 100


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds for symmetry, definiteness and invertibility.

    Attributes
    ----------
    sym_tol
        Largest admitted relative asymmetry ``max|M - M.T| / max|M|``.
    pd_eps
        Positive definiteness margin, relative to ``max(1, max|M|)``.
    inv_tol
        Smallest admitted ratio of extreme singular values.
    nn_tol
        Nonnegativity slack, relative to ``max(1, max|M|)``.
    """

    sym_tol: float = 1e-8
    pd_eps: float = 1e-9
    inv_tol: float = 1e-10
    nn_tol: float = 1e-9

    def __post_init__(self):
        for name in ("sym_tol", "pd_eps", "inv_tol", "nn_tol"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")

    def with_overrides(self, **kw):
        return replace(self, **kw)


DEFAULT_TOL = Tolerances()


class LeafCheck(NamedTuple):
    verdict: bool
    lambda_min: float


def as_dense(a, copy=False):
    """Validate ``a`` as a finite 2-D real matrix and return it as float64."""
    m = np.array(a, dtype=float, copy=copy) if copy else np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite("matrix contains NaN or Inf entries")
    return m


def max_norm(m):
    m = np.asarray(m)
    return float(np.max(np.abs(m))) if m.size else 0.0


def scale_of(m):
    """The reference magnitude ``max(1, max|M|)`` used by every margin."""
    return max(1.0, max_norm(m))


def asymmetry(m):
    """Relative asymmetry ``max|M - M.T| / max|M|`` (zero for the zero matrix)."""
    m = np.asarray(m, dtype=float)
    norm = max_norm(m)
    if norm == 0.0:
        return 0.0
    return max_norm(m - m.T) / norm


def symmetrized(m, tol=DEFAULT_TOL):
    m = as_dense(m)
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {m.shape}")
    asym = asymmetry(m)
    if asym > tol.sym_tol:
        raise AsymmetricInput(f"relative asymmetry {asym:.3e} exceeds sym_tol={tol.sym_tol:.1e}")
    return 0.5 * (m + m.T)


def _jacobi_eigenvalues(a):
    """Eigenvalues of a symmetric matrix by row-cyclic Jacobi rotations.

    ``a`` is overwritten. Sweeps stop once the off-diagonal Frobenius norm
    drops below ``1e-12 * max|a|``; by Weyl's inequality the diagonal then
    approximates the spectrum to that accuracy.
    """
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy()
    target = 1e-12 * max_norm(a)
    iu = np.triu_indices(n, 1)
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(2.0 * np.sum(a[iu] ** 2))
        if off <= target:
            return a.diagonal().copy()
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-150 * abs(diff):
                    t = apq / diff  # theta**2 would overflow
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cp = a[:, p].copy()
                cq = a[:, q]
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :]
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    raise NoConvergence(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")


def sym_eigvals(m, tol=DEFAULT_TOL):
    """All eigenvalues (ascending) of the symmetrized matrix."""
    s = symmetrized(m, tol)
    if s.shape[0] == 0:
        return np.empty(0)
    return np.sort(_jacobi_eigenvalues(s.copy()))


def sym_eig_min(m, tol=DEFAULT_TOL):
    """Smallest eigenvalue of ``(M + M.T) / 2``.

    Raises
    ------
    NonSquare, AsymmetricInput, NoConvergence
    """
    return float(sym_eigvals(m, tol)[0])


def singular_ratio(m):
    """``s_min / s_max`` of a square matrix; 0 for the zero matrix."""
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0.0
    return float(s[-1] / s[0])


def invert(m, tol=DEFAULT_TOL, unit=None):
    """Inverse of a square matrix behind a singular-value gate.

    The gate rejects ``m`` when ``s_min < inv_tol * s_max``. The inverse
    itself comes from LU with partial pivoting.
    """
    m = as_dense(m)
    if m.shape[0] != m.shape[1]:
        raise NonSquare(f"expected a square matrix, got shape {m.shape}")
    ratio = singular_ratio(m)
    if ratio < tol.inv_tol:
        raise NumericallySingular(ratio, unit)
    return np.linalg.solve(m, np.eye(m.shape[0]))


def multiply(a, b):
    a, b = as_dense(a), as_dense(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def add(a, b):
    a, b = as_dense(a), as_dense(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot add {a.shape} and {b.shape}")
    return a + b


def subtract(a, b):
    a, b = as_dense(a), as_dense(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot subtract {b.shape} from {a.shape}")
    return a - b


def transpose(a):
    return as_dense(a).T.copy()


def is_pd_leaf(m, tol=DEFAULT_TOL):
    """Decide ``M >> 0`` as ``lambda_min > pd_eps * max(1, max|M|)``."""
    lam = sym_eig_min(m, tol)
    return LeafCheck(lam > tol.pd_eps * scale_of(m), lam)


def is_nn_leaf(m, tol=DEFAULT_TOL):
    """Decide ``M >= 0`` as ``lambda_min >= -nn_tol * max(1, max|M|)``."""
    lam = sym_eig_min(m, tol)
    return LeafCheck(lam >= -tol.nn_tol * scale_of(m), lam)
