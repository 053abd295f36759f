"""Block operator matrices over a product of truncated spaces.

A :class:`BlockMatrix` is an ``n x n`` grid of dense blocks where block
``(i, j)`` maps coordinate space ``j`` into coordinate space ``i`` and has
shape ``dims[i] x dims[j]``. Indices are 0-based in code; the certificate
labels use the usual 1-based notation.
"""

import json
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import NonFinite, OpSignError, OrderTooSmall, ShapeMismatch
from .linalg import DEFAULT_TOL, asymmetry, as_dense, max_norm


class FormatError(OpSignError, ValueError):
    """The block-matrix JSON document is malformed."""


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    dims: Tuple[int, ...]
    blocks: Tuple[Tuple[np.ndarray, ...], ...]
    self_adjoint: bool

    @property
    def n(self):
        return len(self.dims)

    @property
    def size(self):
        return sum(self.dims)

    def block(self, i, j):
        return self.blocks[i][j]

    def offsets(self):
        return np.concatenate([[0], np.cumsum(self.dims)]).astype(int)

    def sub(self, rows, cols=None):
        """Logical sub-grid on the given block index ranges (no copies)."""
        rows = tuple(rows)
        cols = rows if cols is None else tuple(cols)
        if rows != cols:
            raise ValueError("sub() produces square block grids only; use flatten for rectangles")
        blocks = tuple(tuple(self.blocks[i][j] for j in cols) for i in rows)
        return BlockMatrix(tuple(self.dims[i] for i in rows), blocks, self.self_adjoint)

    def __neg__(self):
        blocks = tuple(tuple(_frozen(-b) for b in row) for row in self.blocks)
        return BlockMatrix(self.dims, blocks, self.self_adjoint)

    def __repr__(self):
        return f"BlockMatrix(dims={list(self.dims)}, self_adjoint={self.self_adjoint})"


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def make_block_matrix(dims, blocks, tol=DEFAULT_TOL):
    """Validate ``blocks`` against ``dims`` and build an immutable matrix.

    ``blocks[i][j]`` may be any array-like of shape ``dims[i] x dims[j]``;
    a flat sequence of the right length is reshaped row-major.
    """
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise ShapeMismatch("at least one block is required")
    if any(d <= 0 for d in dims):
        raise ShapeMismatch(f"block dimensions must be positive, got {list(dims)}")
    n = len(dims)
    if len(blocks) != n or any(len(row) != n for row in blocks):
        raise ShapeMismatch(f"expected a {n}x{n} grid of blocks")
    grid = []
    for i, row in enumerate(blocks):
        out = []
        for j, b in enumerate(row):
            a = np.asarray(b, dtype=float)
            want = (dims[i], dims[j])
            if a.ndim == 1 and a.size == want[0] * want[1]:
                a = a.reshape(want)
            elif a.ndim == 0 and want == (1, 1):
                a = a.reshape(want)
            if a.shape != want:
                raise ShapeMismatch(f"block ({i + 1},{j + 1}) has shape {a.shape}, expected {want}")
            if not np.all(np.isfinite(a)):
                raise NonFinite(f"block ({i + 1},{j + 1}) contains NaN or Inf")
            out.append(_frozen(a))
        grid.append(tuple(out))
    grid = tuple(grid)
    flat = np.block([list(r) for r in grid])
    return BlockMatrix(dims, grid, asymmetry(flat) <= tol.sym_tol)


def flatten(b):
    return np.block([list(row) for row in b.blocks])


def assemble(m, dims, tol=DEFAULT_TOL):
    """Cut a dense matrix into blocks; inverse of :func:`flatten`."""
    m = as_dense(m)
    dims = tuple(int(d) for d in dims)
    total = sum(dims)
    if m.shape != (total, total):
        raise ShapeMismatch(f"matrix of shape {m.shape} does not match dims {list(dims)}")
    off = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    blocks = [
        [m[off[i]:off[i + 1], off[j]:off[j + 1]] for j in range(len(dims))]
        for i in range(len(dims))
    ]
    return make_block_matrix(dims, blocks, tol)


def block_identity(dims):
    dims = tuple(dims)
    blocks = [
        [np.eye(di) if i == j else np.zeros((di, dj)) for j, dj in enumerate(dims)]
        for i, di in enumerate(dims)
    ]
    return make_block_matrix(dims, blocks)


def scalar_blocks(m, tol=DEFAULT_TOL):
    """Block matrix with ``1 x 1`` blocks from a dense square matrix."""
    m = as_dense(m)
    return assemble(m, [1] * m.shape[0], tol)


def scale_of_blocks(b):
    return max(1.0, max(max_norm(x) for row in b.blocks for x in row))


@dataclass(frozen=True)
class BlockPartition:
    """Two-by-two view of a block matrix split after ``split_index`` blocks."""

    source: BlockMatrix
    split_index: int

    @property
    def first(self):
        return range(0, self.split_index)

    @property
    def second(self):
        return range(self.split_index, self.source.n)

    @property
    def B11(self):
        return self.source.sub(self.first)

    @property
    def B22(self):
        return self.source.sub(self.second)

    def dense(self, i, j):
        """Flattened unit ``(i, j)`` with ``i, j`` in ``{1, 2}``."""
        rng = {1: self.first, 2: self.second}
        return np.block([[self.source.blocks[r][c] for c in rng[j]] for r in rng[i]])

    @property
    def B12(self):
        return self.dense(1, 2)

    @property
    def B21(self):
        return self.dense(2, 1)

    @property
    def dims1(self):
        return self.source.dims[: self.split_index]

    @property
    def dims2(self):
        return self.source.dims[self.split_index:]


def partition_first(b):
    """Bisection at ``n // 2``: the leading unit has ``n // 2`` blocks."""
    if b.n < 2:
        raise OrderTooSmall("partition needs at least 2 blocks")
    return BlockPartition(b, b.n // 2)


def partition_second(b):
    """Split off the first block coordinate."""
    if b.n < 2:
        raise OrderTooSmall("partition needs at least 2 blocks")
    return BlockPartition(b, 1)


def _flat_vector(b, h):
    if len(h) != b.n:
        raise ShapeMismatch(f"expected {b.n} coordinate blocks, got {len(h)}")
    parts = []
    for i, (hi, d) in enumerate(zip(h, b.dims)):
        v = np.asarray(hi, dtype=float).reshape(-1)
        if v.size != d:
            raise ShapeMismatch(f"coordinate {i + 1} has length {v.size}, expected {d}")
        parts.append(v)
    return np.concatenate(parts)


def quadratic_form(b, h):
    """``<B h, h>`` for ``h`` given as ``n`` coordinate blocks."""
    v = _flat_vector(b, h)
    return float(v @ (flatten(b) @ v))


def split_vector(v, dims):
    off = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    return [np.asarray(v[off[i]:off[i + 1]], dtype=float) for i in range(len(dims))]


# -- JSON file format --------------------------------------------------------

def to_document(b):
    return {
        "dims": list(b.dims),
        "blocks": [[[float(x) for x in blk.reshape(-1)] for blk in row] for row in b.blocks],
    }


def dumps(b):
    return json.dumps(to_document(b))


def from_document(doc, tol=DEFAULT_TOL):
    if not isinstance(doc, dict) or "dims" not in doc or "blocks" not in doc:
        raise FormatError('document must be an object with "dims" and "blocks"')
    dims = doc["dims"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise FormatError('"dims" must be a list of integers')
    blocks = doc["blocks"]
    if not isinstance(blocks, list) or not all(isinstance(r, list) for r in blocks):
        raise FormatError('"blocks" must be a list of lists')
    for i, row in enumerate(blocks):
        for j, blk in enumerate(row):
            if not isinstance(blk, list) or not all(
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in blk
            ):
                raise FormatError(f"block ({i + 1},{j + 1}) must be a flat list of numbers")
            if i < len(dims) and j < len(dims) and len(blk) != dims[i] * dims[j]:
                raise FormatError(
                    f"block ({i + 1},{j + 1}) has {len(blk)} entries, expected {dims[i] * dims[j]}"
                )
    try:
        return make_block_matrix(dims, blocks, tol)
    except (ShapeMismatch, NonFinite) as exc:
        raise FormatError(str(exc)) from exc


def loads(text, tol=DEFAULT_TOL):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return from_document(doc, tol)


def load(path, tol=DEFAULT_TOL):
    with open(path) as fh:
        return loads(fh.read(), tol)


def dump(b, path):
    with open(path, "w") as fh:
        fh.write(dumps(b))
        fh.write("\n")
