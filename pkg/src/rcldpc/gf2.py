"""Sparse binary matrices over GF(2) and the alist interchange format.

Elimination work happens on Python ints used as bitsets (bit ``j`` of a row
integer is column ``j``); matrices here stay below a few thousand rows, where
big-int XOR is faster than anything array-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, IndexOutOfRange, ParseError, SingularMatrix

__all__ = [
    "BitMatrix",
    "rank",
    "invert",
    "multiply",
    "to_alist",
    "from_alist",
]


@dataclass(frozen=True)
class BitMatrix:
    """Immutable sparse GF(2) matrix holding both row and column adjacency.

    Only ``row_support`` is passed in; ``col_support`` is derived so the two
    views can never disagree.
    """

    n_rows: int
    n_cols: int
    row_support: tuple[tuple[int, ...], ...]
    col_support: tuple[tuple[int, ...], ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.n_rows < 0 or self.n_cols < 0:
            raise DimensionMismatch("matrix dimensions must be non-negative")
        rows = tuple(tuple(int(c) for c in r) for r in self.row_support)
        if len(rows) != self.n_rows:
            raise DimensionMismatch(f"expected {self.n_rows} rows, got {len(rows)}")
        cols: list[list[int]] = [[] for _ in range(self.n_cols)]
        for i, r in enumerate(rows):
            prev = -1
            for c in r:
                if c <= prev:
                    raise ValueError(f"row {i}: column indices must be strictly increasing")
                if c >= self.n_cols:
                    raise ValueError(f"row {i}: column {c} out of range")
                cols[c].append(i)
                prev = c
        object.__setattr__(self, "row_support", rows)
        object.__setattr__(self, "col_support", tuple(tuple(c) for c in cols))

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, n_rows: int, n_cols: int, rows: Iterable[Iterable[int]]) -> "BitMatrix":
        """Build from per-row column sets (any order, duplicates rejected)."""
        out = []
        for i, r in enumerate(rows):
            s = sorted(int(c) for c in r)
            if len(set(s)) != len(s):
                raise ValueError(f"row {i}: duplicate entry")
            if s and s[0] < 0:
                raise ValueError(f"row {i}: negative column index")
            out.append(tuple(s))
        return cls(n_rows, n_cols, tuple(out))

    @classmethod
    def from_entries(cls, n_rows: int, n_cols: int, entries: Iterable[tuple[int, int]]) -> "BitMatrix":
        rows: list[list[int]] = [[] for _ in range(n_rows)]
        for i, j in entries:
            if not (0 <= i < n_rows):
                raise ValueError(f"row {i} out of range")
            rows[i].append(j)
        return cls.from_rows(n_rows, n_cols, rows)

    @classmethod
    def from_dense(cls, a) -> "BitMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise DimensionMismatch("dense input must be 2-D")
        a = a.astype(np.int64) % 2
        rows = tuple(tuple(np.flatnonzero(r).tolist()) for r in a)
        return cls(a.shape[0], a.shape[1], rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, tuple((i,) for i in range(n)))

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BitMatrix":
        return cls(n_rows, n_cols, tuple(() for _ in range(n_rows)))

    @classmethod
    def from_row_ints(cls, ints: Sequence[int], n_cols: int) -> "BitMatrix":
        rows = []
        for v in ints:
            cols = []
            while v:
                low = v & -v
                cols.append(low.bit_length() - 1)
                v ^= low
            rows.append(tuple(cols))
        return cls(len(ints), n_cols, tuple(rows))

    # -- views -------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.row_support)

    def row_weights(self) -> np.ndarray:
        return np.array([len(r) for r in self.row_support], dtype=np.int64)

    def column_weights(self) -> np.ndarray:
        return np.array([len(c) for c in self.col_support], dtype=np.int64)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return int(j in self.row_support[i])

    def entries(self) -> tuple[np.ndarray, np.ndarray]:
        """Row and column index arrays of the nonzeros, row-major order."""
        rows = np.repeat(np.arange(self.n_rows), self.row_weights())
        cols = np.fromiter((c for r in self.row_support for c in r), dtype=np.int64, count=self.nnz)
        return rows, cols

    def to_dense(self, dtype=np.uint8) -> np.ndarray:
        a = np.zeros(self.shape, dtype=dtype)
        rows, cols = self.entries()
        a[rows, cols] = 1
        return a

    def to_csr(self) -> sp.csr_matrix:
        rows, cols = self.entries()
        data = np.ones(len(rows), dtype=np.int32)
        return sp.csr_matrix((data, (rows, cols)), shape=self.shape)

    def row_ints(self) -> list[int]:
        out = []
        for r in self.row_support:
            v = 0
            for c in r:
                v |= 1 << c
            out.append(v)
        return out

    def transpose(self) -> "BitMatrix":
        return BitMatrix(self.n_cols, self.n_rows, self.col_support)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def select_columns(self, cols: Sequence[int]) -> "BitMatrix":
        """Sub-matrix of the given columns, renumbered in the order given."""
        pos = {int(c): k for k, c in enumerate(cols)}
        rows = [[pos[c] for c in r if c in pos] for r in self.row_support]
        return BitMatrix.from_rows(self.n_rows, len(pos), rows)

    def select_rows(self, rows: Sequence[int]) -> "BitMatrix":
        return BitMatrix(len(rows), self.n_cols, tuple(self.row_support[int(i)] for i in rows))

    def check_consistency(self) -> bool:
        """Rebuild the column view from the rows and compare."""
        cols: list[list[int]] = [[] for _ in range(self.n_cols)]
        for i, r in enumerate(self.row_support):
            for c in r:
                cols[c].append(i)
        return tuple(tuple(c) for c in cols) == self.col_support

    def __repr__(self) -> str:
        return f"BitMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


def rank(m: BitMatrix) -> int:
    """GF(2) rank by Gaussian elimination. ``m`` is not modified."""
    return len(pivot_columns(m)[0])


def invert(m: BitMatrix) -> BitMatrix:
    """GF(2) inverse by Gauss-Jordan on ``[m | I]``."""
    if m.n_rows != m.n_cols:
        raise DimensionMismatch(f"cannot invert a {m.n_rows}x{m.n_cols} matrix")
    n = m.n_rows
    rows = [v | (1 << (n + i)) for i, v in enumerate(m.row_ints())]
    for col in range(n):
        bit = 1 << col
        piv = next((k for k in range(col, n) if rows[k] & bit), None)
        if piv is None:
            raise SingularMatrix(f"matrix is singular (rank < {n})")
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col]
        for k in range(n):
            if k != col and rows[k] & bit:
                rows[k] ^= p
    return BitMatrix.from_row_ints([v >> n for v in rows], n)


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """GF(2) product ``a @ b``."""
    if a.n_cols != b.n_rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    b_rows = b.row_ints()
    out = []
    for r in a.row_support:
        v = 0
        for c in r:
            v ^= b_rows[c]
        out.append(v)
    return BitMatrix.from_row_ints(out, b.n_cols)


def pivot_columns(m: BitMatrix) -> tuple[list[int], list[int]]:
    """Row-by-row elimination against a growing basis.

    Returns ``(pivots, independent_rows)``: the leading column assigned to
    each independent row, and the original indices of those rows (a maximal
    independent subset, earliest rows preferred).
    """
    basis: dict[int, int] = {}
    pivots: list[int] = []
    used: list[int] = []
    for origin, v in enumerate(m.row_ints()):
        while v:
            low = (v & -v).bit_length() - 1
            b = basis.get(low)
            if b is None:
                basis[low] = v
                pivots.append(low)
                used.append(origin)
                break
            v ^= b
    return pivots, used


# -- alist -----------------------------------------------------------------


def to_alist(m: BitMatrix) -> str:
    """Serialize to MacKay alist text (1-based, zero-padded index lists)."""
    cw = m.column_weights()
    rw = m.row_weights()
    max_c = int(cw.max()) if m.n_cols else 0
    max_r = int(rw.max()) if m.n_rows else 0
    lines = [
        f"{m.n_cols} {m.n_rows}",
        f"{max_c} {max_r}",
        " ".join(str(int(w)) for w in cw),
        " ".join(str(int(w)) for w in rw),
    ]
    for col in m.col_support:
        idx = [i + 1 for i in col] + [0] * (max_c - len(col))
        lines.append(" ".join(map(str, idx)))
    for row in m.row_support:
        idx = [j + 1 for j in row] + [0] * (max_r - len(row))
        lines.append(" ".join(map(str, idx)))
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(t) for t in line.split()]
    except ValueError:
        raise ParseError(f"non-integer token in {line.strip()!r}", lineno) from None


def from_alist(text: str) -> BitMatrix:
    """Parse MacKay alist text.

    Every index line must carry exactly the declared maximum degree of
    entries (zero padded); the column and row lists must describe the same
    matrix.
    """
    raw = text.splitlines()
    lines = [(k + 1, ln) for k, ln in enumerate(raw) if ln.strip()]
    if len(lines) < 4:
        raise ParseError("truncated header", len(raw) or 1)
    it = iter(lines)

    def take(expect: int | None, what: str) -> tuple[int, list[int]]:
        try:
            lineno, ln = next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file reading {what}", len(raw)) from None
        vals = _ints(ln, lineno)
        if expect is not None and len(vals) != expect:
            raise ParseError(f"{what}: expected {expect} values, found {len(vals)}", lineno)
        return lineno, vals

    ln1, (n_cols, n_rows) = take(2, "dimensions")
    if n_cols < 0 or n_rows < 0:
        raise ParseError("negative dimensions", ln1)
    ln2, (max_c, max_r) = take(2, "maximum degrees")
    ln3, cw = take(n_cols, "column degrees")
    ln4, rw = take(n_rows, "row degrees")
    if cw and max(cw) != max_c or rw and max(rw) != max_r:
        raise ParseError("declared maximum degree does not match degree lists", ln2)
    if min(cw, default=0) < 0 or min(rw, default=0) < 0:
        raise ParseError("negative degree", ln3)

    col_sets: list[list[int]] = []
    for j in range(n_cols):
        lineno, vals = take(max_c, f"column {j + 1} index list")
        col_sets.append(_support(vals, cw[j], n_rows, lineno))
    rows: list[list[int]] = []
    for i in range(n_rows):
        lineno, vals = take(max_r, f"row {i + 1} index list")
        rows.append(_support(vals, rw[i], n_cols, lineno))
    extra = next(it, None)
    if extra is not None:
        raise ParseError("trailing content after row lists", extra[0])

    m = BitMatrix(n_rows, n_cols, tuple(tuple(r) for r in rows))
    if tuple(tuple(c) for c in col_sets) != m.col_support:
        raise ParseError("column lists disagree with row lists", ln3)
    return m


def _support(vals: list[int], degree: int, bound: int, lineno: int) -> list[int]:
    head, pad = vals[:degree], vals[degree:]
    if any(v != 0 for v in pad):
        raise ParseError("nonzero entry in padding region", lineno)
    for v in head:
        if v == 0:
            raise ParseError("fewer entries than the declared degree", lineno)
        if not (1 <= v <= bound):
            raise IndexOutOfRange(f"index {v} outside 1..{bound}", lineno)
    idx = sorted(v - 1 for v in head)
    if len(set(idx)) != len(idx):
        raise ParseError("duplicate entry", lineno)
    return idx
