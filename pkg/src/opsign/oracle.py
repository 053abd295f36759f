"""Seeded instance generators and the eigenvalue-oracle comparison.

Every generator draws from ``numpy.random.Generator(PCG64(seed))`` and
nothing else, so a seed fixes the instance exactly.
"""

import csv
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .blocks import assemble, flatten, make_block_matrix
from .linalg import DEFAULT_TOL, scale_of, sym_eig_min
from .schur_first import Verdict, check_pd
from .schur_second import NNVerdict, check_nn

SWEEP_COLUMNS = ("seed", "n", "lambda_min", "pd_verdict", "oracle_verdict", "agree",
                 "nn_verdict", "nn_agree")


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _orthogonal(rng, d):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_self_adjoint(n, dims=None, spectrum_shift=1.0, seed=0, kind="gram"):
    """Random self-adjoint block matrix with controllable smallest eigenvalue.

    ``kind="gram"`` builds ``A.T A / d + shift * I`` (so ``lambda_min >= shift``);
    ``kind="spectral"`` builds ``Q diag(shift + u) Q.T`` where ``u`` holds
    ``0``, ``2`` and uniform draws from ``[0, 2]``, so ``lambda_min == shift``
    exactly (up to roundoff) and ``lambda_max == shift + 2`` when the total
    dimension exceeds one.
    """
    rng = _rng(seed)
    if dims is None:
        dims = rng.integers(1, 5, size=n)
    dims = [int(d) for d in dims]
    if len(dims) != n:
        raise ValueError("len(dims) must equal n")
    d = sum(dims)
    if kind == "gram":
        a = rng.standard_normal((d, d))
        m = a.T @ a / d + spectrum_shift * np.eye(d)
    elif kind == "spectral":
        u = rng.uniform(0.0, 2.0, size=d)
        u[0] = 0.0
        if d > 1:
            u[1] = 2.0
        q = _orthogonal(rng, d)
        m = (q * (spectrum_shift + u)) @ q.T
    else:
        raise ValueError(f"unknown kind {kind!r}")
    m = 0.5 * (m + m.T)
    return assemble(m, dims)


def random_bidiagonal(n, dims=None, seed=0, pd_probability=0.8):
    """Random self-adjoint matrix with blocks only at ``(i, i)`` and ``(i, n+1-i)``.

    Each mirrored pair (and the centre block for odd ``n``) is an
    independent spectral draw, positive definite with probability
    ``pd_probability`` and indefinite otherwise.
    """
    rng = _rng(seed)
    if dims is None:
        dims = rng.integers(1, 5, size=n)
    dims = [int(d) for d in dims]
    blocks = [[np.zeros((di, dj)) for dj in dims] for di in dims]
    for i in range((n + 1) // 2):
        j = n - 1 - i
        idx = [i] if i == j else [i, j]
        size = sum(dims[k] for k in idx)
        u = rng.uniform(0.2, 2.0, size=size)
        if rng.uniform() >= pd_probability:
            u[rng.integers(size)] = -rng.uniform(0.2, 1.0)
        q = _orthogonal(rng, size)
        m = (q * u) @ q.T
        m = 0.5 * (m + m.T)
        off = np.concatenate([[0], np.cumsum([dims[k] for k in idx])]).astype(int)
        for a, ka in enumerate(idx):
            for c, kc in enumerate(idx):
                blocks[ka][kc] = m[off[a]:off[a + 1], off[c]:off[c + 1]]
    return make_block_matrix(dims, blocks)


def standard_instance(seed, n_max=6, max_dim=4, n=None):
    """One member of the standard corpus.

    ``n`` and the block dims are drawn uniformly; the spectrum is the
    spectral construction with a shift drawn from ``[-0.5, 0.5]``.
    """
    rng = _rng(seed)
    if n is None:
        n = int(rng.integers(1, n_max + 1))
    dims = [int(d) for d in rng.integers(1, max_dim + 1, size=n)]
    shift = float(rng.uniform(-0.5, 0.5))
    sub_seed = int(rng.integers(0, 2 ** 63))
    return random_self_adjoint(n, dims, shift, sub_seed, kind="spectral")


@dataclass
class OracleComparison:
    lambda_min: float
    scale: float
    pd_verdict: Verdict
    oracle_pd: bool
    pd_agree: Optional[bool]
    nn_verdict: NNVerdict
    oracle_nn: bool
    nn_agree: Union[bool, str, None]

    @property
    def disagreement(self):
        return self.pd_agree is False or self.nn_agree is False


def compare_with_oracle(b, tol=DEFAULT_TOL):
    """Run both criteria and the eigenvalue oracle on ``b``.

    ``pd_agree`` / ``nn_agree`` are ``None`` when ``lambda_min`` sits within
    ten times the relevant margin of zero (the boundary cases are skipped);
    ``nn_agree`` is ``"gates_failed"`` when the nonnegativity criterion does
    not apply.
    """
    flat = flatten(b)
    lam = sym_eig_min(flat, tol)
    scale = scale_of(flat)
    pd_cert = check_pd(b, tol)
    nn_cert = check_nn(b, tol)
    oracle_pd = lam > 0
    oracle_nn = lam >= 0
    if abs(lam) <= 10 * tol.pd_eps * scale:
        pd_agree = None
    else:
        pd_agree = (pd_cert.verdict is Verdict.POSITIVE_DEFINITE) == oracle_pd
    if nn_cert.verdict is NNVerdict.PRECONDITION_FAILED:
        nn_agree = "gates_failed"
    elif abs(lam) <= 10 * tol.nn_tol * scale:
        nn_agree = None
    else:
        nn_agree = (nn_cert.verdict is NNVerdict.NONNEGATIVE) == oracle_nn
    return OracleComparison(lam, scale, pd_cert.verdict, oracle_pd, pd_agree,
                            nn_cert.verdict, oracle_nn, nn_agree)


def sweep(seeds, n_max=6, max_dim=4, tol=DEFAULT_TOL):
    """Compare criteria with the oracle over ``standard_instance(seed)``.

    Returns a list of row dicts keyed by :data:`SWEEP_COLUMNS`.
    """
    rows = []
    for seed in seeds:
        b = standard_instance(seed, n_max, max_dim)
        c = compare_with_oracle(b, tol)
        rows.append({
            "seed": seed,
            "n": b.n,
            "lambda_min": repr(c.lambda_min),
            "pd_verdict": c.pd_verdict.value,
            "oracle_verdict": "PositiveDefinite" if c.oracle_pd else "NotPositiveDefinite",
            "agree": "skipped" if c.pd_agree is None else str(c.pd_agree).lower(),
            "nn_verdict": c.nn_verdict.value,
            "nn_agree": ("skipped" if c.nn_agree is None
                         else c.nn_agree if isinstance(c.nn_agree, str)
                         else str(c.nn_agree).lower()),
        })
    return rows


def write_sweep_csv(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def count_disagreements(rows):
    return sum(r["agree"] == "false" or r["nn_agree"] == "false" for r in rows)
