"""Systematic encoding, puncturing and syndromes.

Two encoders produce the same codewords:

* the generator path multiplies by ``G = [I | (B^-1 A)^T]`` and is the
  correctness reference;
* the accumulator path runs the parity accumulators stage by stage
  (forward substitution over the triangular parity part) and is the one
  simulations use.

Codeword arrays are ``uint8`` with shape ``(n,)`` or ``(frames, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, LengthMismatch
from .gf2 import BitMatrix, invert, multiply, pivot_columns

__all__ = [
    "EncodeStage",
    "LinearCode",
    "accumulate",
    "build_generator",
    "encode",
    "puncture",
    "syndrome",
    "systematic_form",
]


@dataclass(frozen=True)
class EncodeStage:
    """One accumulator: check ``rows`` determine parity ``cols``.

    ``lag`` is None for ``1/(1+D)`` and ``chi`` for ``1/(1+D+D^chi)``. The
    sub-matrix ``H[rows, cols]`` must be exactly that accumulator's pattern
    and every other column touched by ``rows`` must be known beforehand.
    """

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    lag: int | None = None

    def pattern(self) -> BitMatrix:
        size = len(self.cols)
        out = []
        for t in range(size):
            r = {t}
            if t >= 1:
                r.add(t - 1)
            if self.lag is not None and t >= self.lag:
                r.add(t - self.lag)
            out.append(r)
        return BitMatrix.from_rows(size, size, out)


def accumulate(x: np.ndarray, lag: int | None = None) -> np.ndarray:
    """Run the accumulator over the last axis of ``x``.

    ``p_t = x_t ^ p_{t-1}`` (running XOR), plus ``^ p_{t-lag}`` when a lag
    is given.
    """
    x = np.asarray(x, dtype=np.uint8) & 1
    if lag is None:
        return np.bitwise_xor.accumulate(x, axis=-1)
    p = np.empty_like(x)
    for t in range(x.shape[-1]):
        v = x[..., t].copy()
        if t >= 1:
            v ^= p[..., t - 1]
        if t >= lag:
            v ^= p[..., t - lag]
        p[..., t] = v
    return p


@dataclass(eq=False)
class LinearCode:
    """A binary systematic code: columns ``0..k-1`` carry the information bits.

    ``col_fading`` gives each column's nominal fading block (punctured columns
    included); ``blocks`` is the number of fading blocks it is organised for.
    """

    h: BitMatrix
    k: int
    puncture_cols: tuple[int, ...] = ()
    col_fading: np.ndarray | None = None
    blocks: int = 1
    stages: tuple[EncodeStage, ...] = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.h.n_cols
        if not (0 < self.k < n):
            raise DimensionMismatch(f"k={self.k} must lie strictly between 0 and n={n}")
        self.puncture_cols = tuple(sorted(int(c) for c in self.puncture_cols))
        if any(c < self.k or c >= n for c in self.puncture_cols):
            raise DimensionMismatch("punctured columns must be parity columns")
        if self.col_fading is None:
            self.col_fading = _contiguous_blocks(n, self.blocks)
        self.col_fading = np.asarray(self.col_fading, dtype=np.int64)
        if self.col_fading.shape != (n,):
            raise LengthMismatch("col_fading must have one entry per column")
        for st in self.stages:
            sub = self.h.select_rows(st.rows).select_columns(st.cols)
            if sub != st.pattern():
                raise DimensionMismatch(f"stage over rows {st.rows[0]}.. does not match its accumulator pattern")

    @property
    def n_pre(self) -> int:
        return self.h.n_cols

    @property
    def m(self) -> int:
        return self.h.n_rows

    @property
    def n_tx(self) -> int:
        return self.n_pre - len(self.puncture_cols)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k, self.n_tx)

    @cached_property
    def transmitted_cols(self) -> np.ndarray:
        mask = np.ones(self.n_pre, dtype=bool)
        mask[list(self.puncture_cols)] = False
        return np.flatnonzero(mask)

    @property
    def symbol_blocks(self) -> np.ndarray:
        """Fading block of each transmitted position (column order)."""
        return self.col_fading[self.transmitted_cols]

    def transmit_order(self) -> np.ndarray:
        """Interleaver over transmitted positions that groups them by fading block.

        Sending positions in this order and applying the contiguous rule
        ``f = ceil(F t / n_tx)`` reproduces :attr:`symbol_blocks`.
        """
        return np.argsort(self.symbol_blocks, kind="stable")

    @cached_property
    def generator(self) -> BitMatrix:
        return build_generator(self.h, self.k)

    @cached_property
    def _parity_dense(self) -> np.ndarray:
        g = self.generator.to_dense(np.float32)
        return np.ascontiguousarray(g[:, self.k :])

    @cached_property
    def _stage_rows(self) -> list:
        return [self.h.select_rows(st.rows).to_csr() for st in self.stages]

    @cached_property
    def h_csr(self):
        return self.h.to_csr()


def _contiguous_blocks(n: int, blocks: int) -> np.ndarray:
    t = np.arange(1, n + 1)
    return (blocks * t + n - 1) // n - 1


def build_generator(h: BitMatrix, k: int) -> BitMatrix:
    """``G = [I | (B^-1 A)^T]`` for ``H = [A | B]`` with ``A`` the first ``k`` columns."""
    n = h.n_cols
    if h.n_rows != n - k:
        raise DimensionMismatch(f"H is {h.n_rows}x{n}; a systematic generator needs {n - k} rows")
    a = h.select_columns(range(k))
    b = h.select_columns(range(k, n))
    p = multiply(invert(b), a).transpose()  # k x (n-k)
    g = BitMatrix(k, n, tuple((j,) + tuple(k + i for i in p.row_support[j]) for j in range(k)))
    if multiply(g, h.transpose()).nnz:
        raise AssertionError("generator is not orthogonal to H")
    return g


def _as_frames(u: np.ndarray, length: int, what: str) -> tuple[np.ndarray, bool]:
    u = np.asarray(u)
    single = u.ndim == 1
    u2 = u.reshape(1, -1) if single else u
    if u2.ndim != 2 or u2.shape[1] != length:
        raise LengthMismatch(f"{what} must have length {length}, got shape {u.shape}")
    return u2.astype(np.uint8) & 1, single


def encode(code: LinearCode, u, method: str = "auto") -> np.ndarray:
    """Systematic codeword(s) for information bits ``u``.

    ``method`` is ``"accumulator"``, ``"generator"`` or ``"auto"`` (the
    accumulator whenever the code carries encode stages).
    """
    u2, single = _as_frames(u, code.k, "information word")
    if method == "auto":
        method = "accumulator" if code.stages else "generator"
    if method == "generator":
        par = (u2.astype(np.float32) @ code._parity_dense).astype(np.int64) & 1
        c = np.concatenate([u2, par.astype(np.uint8)], axis=1)
    elif method == "accumulator":
        if not code.stages:
            raise ValueError("code has no accumulator stages; use the generator path")
        c = np.zeros((u2.shape[0], code.n_pre), dtype=np.uint8)
        c[:, : code.k] = u2
        for st, rows in zip(code.stages, code._stage_rows):
            x = (rows @ c.T.astype(np.int32)).T & 1
            c[:, list(st.cols)] = accumulate(x, st.lag)
    else:
        raise ValueError(f"unknown encode method {method!r}")
    return c[0] if single else c


def puncture(code: LinearCode, c) -> np.ndarray:
    """Drop the punctured columns; column order of the rest is kept."""
    c = np.asarray(c)
    if c.shape[-1] != code.n_pre:
        raise LengthMismatch(f"codeword must have length {code.n_pre}, got {c.shape[-1]}")
    if not code.puncture_cols:
        return c.copy()
    return c[..., code.transmitted_cols]


def syndrome(h: BitMatrix, c) -> np.ndarray:
    """``H c^T`` over GF(2); frame-major for 2-D input."""
    c = np.asarray(c)
    if c.shape[-1] != h.n_cols:
        raise LengthMismatch(f"word length {c.shape[-1]} does not match H with {h.n_cols} columns")
    csr = h.to_csr()
    s = (csr @ (c.T.astype(np.int32) & 1)) & 1
    return s.T.astype(np.uint8)


def systematic_form(h: BitMatrix) -> tuple[BitMatrix, np.ndarray, int]:
    """Reorder columns (and drop dependent rows) so that ``H = [A | B]`` with ``B`` invertible.

    Returns ``(h_sys, col_order, k)`` where ``h_sys = h[rows][:, col_order]``.
    """
    pivots, rows = pivot_columns(h)
    piv = set(pivots)
    info = [c for c in range(h.n_cols) if c not in piv]
    order = np.array(info + sorted(pivots), dtype=np.int64)
    h_sys = h.select_rows(rows).select_columns(order)
    return h_sys, order, len(info)
