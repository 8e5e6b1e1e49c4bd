"""Exact dense linear algebra over GF(p).

Matrices are immutable wrappers around ``int64`` numpy arrays holding
canonical residues.  Block positions are 1-based throughout, so block
``(1, 5)`` of a seven-stripe matrix is the one in the first stripe row and
fifth stripe column.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .field import FieldElem, FieldMismatchError, inv_mod, is_prime

MAX_MODULUS = 2**31


class DimensionError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


def _as_int(c) -> int:
    return c.value if isinstance(c, FieldElem) else int(c)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Mat:
    """A dense matrix over GF(p)."""

    __slots__ = ("a", "p")

    def __init__(self, data, p: int):
        if not is_prime(p) or p >= MAX_MODULUS:
            raise ValueError(f"modulus must be a prime below 2**31, got {p}")
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-d array, got shape {arr.shape}")
        self.a = _freeze(arr % p)
        self.p = p

    @classmethod
    def _wrap(cls, arr: np.ndarray, p: int) -> Mat:
        # arr must already be reduced; skips the copy and the prime check
        m = object.__new__(cls)
        m.a = _freeze(arr)
        m.p = p
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> Mat:
        return cls._wrap(np.zeros((rows, cols), dtype=np.int64), p)

    @classmethod
    def identity(cls, n: int, p: int) -> Mat:
        return cls._wrap(np.eye(n, dtype=np.int64), p)

    @classmethod
    def scalar(cls, n: int, c, p: int) -> Mat:
        return cls._wrap(np.eye(n, dtype=np.int64) * (_as_int(c) % p), p)

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def T(self) -> Mat:
        return Mat._wrap(self.a.T.copy(), self.p)

    def is_zero(self) -> bool:
        return not self.a.any()

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def __getitem__(self, idx):
        return int(self.a[idx])

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return self.p == other.p and self.a.shape == other.a.shape and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.p, self.a.shape, self.a.tobytes()))

    def __repr__(self):
        return f"Mat({self.a.tolist()}, p={self.p})"

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __add__(self, other):
        return mat_add(self, other)

    def __sub__(self, other):
        return mat_sub(self, other)

    def __neg__(self):
        return Mat._wrap((-self.a) % self.p, self.p)

    def __mul__(self, c):
        if isinstance(c, Mat):
            return NotImplemented
        return mat_scale(c, self)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Mat:
        return mat_pow(self, k)


def _same_field(A: Mat, B: Mat) -> None:
    if A.p != B.p:
        raise FieldMismatchError(f"GF({A.p}) vs GF({B.p})")


def _matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    k = a.shape[1]
    bound = (p - 1) ** 2 * max(k, 1)
    if bound < 2**52:
        # exact in double precision; BLAS is far faster than integer matmul
        prod = a.astype(np.float64) @ b.astype(np.float64)
        return np.rint(prod).astype(np.int64) % p
    if bound < 2**63:
        return (a @ b) % p
    return ((a.astype(object) @ b.astype(object)) % p).astype(np.int64)


def mat_mul(A: Mat, B: Mat) -> Mat:
    _same_field(A, B)
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    return Mat._wrap(_matmul(A.a, B.a, A.p), A.p)


def mat_add(A: Mat, B: Mat) -> Mat:
    _same_field(A, B)
    if A.shape != B.shape:
        raise DimensionError(f"cannot add {A.shape} and {B.shape}")
    return Mat._wrap((A.a + B.a) % A.p, A.p)


def mat_sub(A: Mat, B: Mat) -> Mat:
    _same_field(A, B)
    if A.shape != B.shape:
        raise DimensionError(f"cannot subtract {B.shape} from {A.shape}")
    return Mat._wrap((A.a - B.a) % A.p, A.p)


def mat_scale(c, A: Mat) -> Mat:
    if isinstance(c, FieldElem) and c.p != A.p:
        raise FieldMismatchError(f"GF({c.p}) scalar vs GF({A.p}) matrix")
    return Mat._wrap((A.a * (_as_int(c) % A.p)) % A.p, A.p)


def mat_pow(A: Mat, k: int) -> Mat:
    if not A.is_square:
        raise DimensionError("power of a non-square matrix")
    if k < 0:
        return mat_pow(mat_inverse(A), -k)
    result = Mat.identity(A.rows, A.p)
    base = A
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def _rref_array(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduce ``m`` (modified in place) to RREF; return it with pivot columns."""
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    gf2 = p == 2
    if gf2:
        m = m.astype(np.uint8)
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        if not gf2:
            lead = int(m[r, c])
            if lead != 1:
                m[r, c:] = (m[r, c:] * inv_mod(lead, p)) % p
        hits = np.flatnonzero(m[:, c])
        hits = hits[hits != r]
        if hits.size:
            if gf2:
                m[hits, c:] ^= m[r, c:]
            else:
                m[hits, c:] = (m[hits, c:] - np.outer(m[hits, c], m[r, c:])) % p
        pivots.append(c)
        r += 1
    if gf2:
        m = m.astype(np.int64)
    return m, pivots


def rref(A: Mat) -> tuple[Mat, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns of ``A``."""
    m, pivots = _rref_array(A.a.copy(), A.p)
    return Mat._wrap(m, A.p), len(pivots), pivots


def rank(A: Mat) -> int:
    return len(_rref_array(A.a.copy(), A.p)[1])


def _kernel_rows(m: np.ndarray, p: int) -> np.ndarray:
    """Kernel basis of ``m`` as the rows of a ``(k, cols)`` array."""
    cols = m.shape[1]
    r, pivots = _rref_array(m.copy(), p)
    is_pivot = np.zeros(cols, dtype=bool)
    is_pivot[pivots] = True
    free = np.flatnonzero(~is_pivot)
    basis = np.zeros((free.size, cols), dtype=np.int64)
    basis[np.arange(free.size), free] = 1
    if pivots:
        basis[:, pivots] = (-r[: len(pivots)][:, free].T) % p
    return basis


def kernel_basis(A: Mat) -> list[Mat]:
    """Basis of ``{v : A v = 0}`` as a list of column vectors."""
    return [Mat._wrap(v.reshape(-1, 1).copy(), A.p) for v in _kernel_rows(A.a, A.p)]


def mat_inverse(A: Mat) -> Mat:
    if not A.is_square:
        raise DimensionError(f"cannot invert a {A.shape} matrix")
    n = A.rows
    aug = np.hstack([A.a, np.eye(n, dtype=np.int64)])
    r, pivots = _rref_array(aug, A.p)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise SingularMatrixError("matrix is singular")
    return Mat._wrap(r[:, n:].copy(), A.p)


def is_invertible(A: Mat) -> bool:
    return A.is_square and rank(A) == A.rows


def is_nilpotent_with_index(A: Mat, k: int) -> bool:
    """True iff ``A**k`` is the zero matrix."""
    if not A.is_square:
        raise DimensionError("nilpotency of a non-square matrix")
    return mat_pow(A, k).is_zero()


def _inverse_table(values: np.ndarray, p: int) -> np.ndarray:
    out = np.zeros_like(values)
    for v in np.unique(values):
        if v:
            out[values == v] = inv_mod(int(v), p)
    return out


def batch_invertible(stack: np.ndarray, p: int) -> np.ndarray:
    """Which members of a ``(N, n, n)`` stack are invertible over GF(p)."""
    m = np.array(stack, dtype=np.int64) % p
    N, n, n2 = m.shape
    if n != n2:
        raise DimensionError("batch_invertible needs square matrices")
    ok = np.ones(N, dtype=bool)
    idx = np.arange(N)
    for c in range(n):
        nz = m[:, c:, c] != 0
        ok &= nz.any(axis=1)
        piv = c + nz.argmax(axis=1)
        prow = m[idx, piv].copy()
        m[idx, piv] = m[:, c]
        lead = prow[:, c]
        if p != 2:
            prow = (prow * _inverse_table(lead, p)[:, None]) % p
        below = m[:, c + 1:, c]
        m[:, c + 1:] = (m[:, c + 1:] - below[:, :, None] * prow[:, None, :]) % p
    return ok


@dataclass(frozen=True)
class BlockLayout:
    """Stripe heights and widths dividing a matrix into blocks."""

    row_stripes: tuple[int, ...]
    col_stripes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "row_stripes", tuple(int(s) for s in self.row_stripes))
        object.__setattr__(self, "col_stripes", tuple(int(s) for s in self.col_stripes))
        if any(s < 0 for s in self.row_stripes + self.col_stripes):
            raise DimensionError("stripe sizes must be non-negative")

    @classmethod
    def square(cls, stripes: Sequence[int]) -> BlockLayout:
        return cls(tuple(stripes), tuple(stripes))

    @property
    def rows(self) -> int:
        return sum(self.row_stripes)

    @property
    def cols(self) -> int:
        return sum(self.col_stripes)

    def row_slice(self, i: int) -> slice:
        start = sum(self.row_stripes[: i - 1])
        return slice(start, start + self.row_stripes[i - 1])

    def col_slice(self, j: int) -> slice:
        start = sum(self.col_stripes[: j - 1])
        return slice(start, start + self.col_stripes[j - 1])

    def block_shape(self, i: int, j: int) -> tuple[int, int]:
        return self.row_stripes[i - 1], self.col_stripes[j - 1]

    def sub(self, stripes: Iterable[int]) -> BlockLayout:
        """Layout of the square submatrix formed by the given (1-based) stripes."""
        s = list(stripes)
        return BlockLayout(tuple(self.row_stripes[i - 1] for i in s), tuple(self.col_stripes[i - 1] for i in s))


def _check_index(layout: BlockLayout, i: int, j: int) -> None:
    if not (1 <= i <= len(layout.row_stripes) and 1 <= j <= len(layout.col_stripes)):
        raise IndexError(f"block ({i}, {j}) outside a {len(layout.row_stripes)}x{len(layout.col_stripes)} layout")


def assemble_blocks(layout: BlockLayout, blocks: Mapping[tuple[int, int], Mat], p: int) -> Mat:
    """Matrix with the given blocks; blocks not supplied are zero."""
    out = np.zeros((layout.rows, layout.cols), dtype=np.int64)
    for (i, j), blk in blocks.items():
        _check_index(layout, i, j)
        if blk.p != p:
            raise FieldMismatchError(f"block ({i}, {j}) is over GF({blk.p}), expected GF({p})")
        if blk.shape != layout.block_shape(i, j):
            raise DimensionError(f"block ({i}, {j}) has shape {blk.shape}, layout wants {layout.block_shape(i, j)}")
        out[layout.row_slice(i), layout.col_slice(j)] = blk.a
    return Mat._wrap(out, p)


def extract_block(A: Mat, layout: BlockLayout, i: int, j: int) -> Mat:
    if A.shape != (layout.rows, layout.cols):
        raise DimensionError(f"matrix {A.shape} does not fit layout {(layout.rows, layout.cols)}")
    _check_index(layout, i, j)
    return Mat._wrap(A.a[layout.row_slice(i), layout.col_slice(j)].copy(), A.p)


def block_diag(blocks: Sequence[Mat]) -> Mat:
    p = blocks[0].p
    layout = BlockLayout([b.rows for b in blocks], [b.cols for b in blocks])
    return assemble_blocks(layout, {(k + 1, k + 1): b for k, b in enumerate(blocks)}, p)


def format_matrix(A: Mat) -> str:
    """Text form: header ``rows cols p`` then one line of entries per row."""
    lines = [f"{A.rows} {A.cols} {A.p}"]
    lines += [" ".join(str(int(x)) for x in row) for row in A.a]
    return "\n".join(lines) + "\n"


class MatrixFormatError(ValueError):
    pass


def parse_matrix(text: str) -> Mat:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise MatrixFormatError("empty matrix text")
    header = lines[0].split()
    if len(header) != 3:
        raise MatrixFormatError(f"header must be 'rows cols p', got {lines[0]!r}")
    try:
        rows, cols, p = (int(t) for t in header)
    except ValueError:
        raise MatrixFormatError(f"non-integer header {lines[0]!r}") from None
    if rows < 0 or cols < 0:
        raise MatrixFormatError("negative dimensions")
    if not is_prime(p):
        raise MatrixFormatError(f"modulus {p} is not prime")
    body = lines[1:]
    if len(body) != rows:
        raise MatrixFormatError(f"expected {rows} rows, found {len(body)}")
    data = []
    for k, ln in enumerate(body, start=2):
        try:
            row = [int(t) for t in ln.split()]
        except ValueError:
            raise MatrixFormatError(f"line {k}: non-integer entry") from None
        if len(row) != cols:
            raise MatrixFormatError(f"line {k}: expected {cols} entries, found {len(row)}")
        bad = [x for x in row if not 0 <= x < p]
        if bad:
            raise MatrixFormatError(f"line {k}: entry {bad[0]} outside [0, {p})")
        data.append(row)
    return Mat(np.array(data, dtype=np.int64).reshape(rows, cols), p)
