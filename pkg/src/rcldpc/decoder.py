"""Flooding-schedule log-domain sum-product decoding.

Messages live on edges; edges are numbered row-major (grouped by check), so
the check-node tanh products are segment sums of ``log|tanh|`` plus a sign
parity, computed with ``np.add.reduceat``. A zero-valued tanh is floored at
a tiny magnitude, so an edge's own contribution can be subtracted without
dividing by zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import LengthMismatch
from .gf2 import BitMatrix

__all__ = ["DecodeResult", "SpaDecoder", "spa_decode"]

# v2c messages are clamped here before tanh
MSG_CLAMP = 50.0
# channel LLRs (including +-inf from a noiseless channel) are clamped here
LLR_CLAMP = 1e6
_TANH_LIMIT = 1.0 - 1e-15
_TINY = 1e-300


@dataclass
class DecodeResult:
    bits: np.ndarray
    iterations: int
    converged: bool
    posterior: np.ndarray | None = None


@dataclass
class BatchResult:
    bits: np.ndarray  # (frames, n) uint8
    iterations: np.ndarray  # (frames,)
    converged: np.ndarray  # (frames,) bool
    posterior: np.ndarray  # (frames, n)


class SpaDecoder:
    """Reusable decoder for one parity-check matrix."""

    def __init__(self, h: BitMatrix, max_iter: int = 20):
        self.h = h
        self.max_iter = int(max_iter)
        self.m, self.n = h.shape
        rows, cols = h.entries()
        E = len(rows)
        self.n_edges = E
        self.edge_var = cols
        dc = h.row_weights()
        busy = np.flatnonzero(dc)
        starts = np.concatenate(([0], np.cumsum(dc)[:-1]))
        self.seg_start = starts[busy]
        seg_of_row = np.full(self.m, -1, dtype=np.int64)
        seg_of_row[busy] = np.arange(len(busy))
        self.edge_seg = seg_of_row[rows]
        # (n x E) incidence: sums edge messages into their variables
        self.gather = sp.csr_matrix((np.ones(E), (cols, np.arange(E))), shape=(self.n, E))
        self.csr = h.to_csr()

    def _unsatisfied(self, bits: np.ndarray) -> np.ndarray:
        s = (self.csr @ bits.T.astype(np.int32)) & 1
        return s.any(axis=0)

    def _var_sums(self, c2v: np.ndarray) -> np.ndarray:
        return (self.gather @ c2v.T).T

    def _round(self, ch: np.ndarray, c2v: np.ndarray) -> np.ndarray:
        """One flooding iteration; updates ``c2v`` in place and returns the posterior."""
        v2c = (ch + self._var_sums(c2v))[:, self.edge_var] - c2v
        t = np.tanh(0.5 * np.clip(v2c, -MSG_CLAMP, MSG_CLAMP))
        la = np.log(np.maximum(np.abs(t), _TINY))
        neg = t < 0
        total = np.add.reduceat(la, self.seg_start, axis=1)
        parity = np.add.reduceat(neg.astype(np.int8), self.seg_start, axis=1) & 1
        mag = np.minimum(np.exp(total[:, self.edge_seg] - la), _TANH_LIMIT)
        sign = 1.0 - 2.0 * (parity[:, self.edge_seg] ^ neg)
        c2v[:] = 2.0 * np.arctanh(mag * sign)
        return ch + self._var_sums(c2v)

    def decode_batch(self, llr: np.ndarray) -> BatchResult:
        """Decode ``(frames, n)`` channel LLRs; stops each frame at a zero syndrome.

        A frame counts as converged only when its syndrome is zero and no
        bit is left with a zero a-posteriori LLR (an undecided erasure).
        """
        llr = np.asarray(llr, dtype=np.float64)
        if llr.ndim != 2 or llr.shape[1] != self.n:
            raise LengthMismatch(f"LLR block must be (frames, {self.n}), got {llr.shape}")
        llr = np.clip(llr, -LLR_CLAMP, LLR_CLAMP)
        B = llr.shape[0]
        post = llr.copy()
        bits = (llr < 0).astype(np.uint8)
        iters = np.zeros(B, dtype=np.int64)
        done = ~self._unsatisfied(bits) & (llr != 0).all(axis=1)
        active = np.flatnonzero(~done)
        ch = llr[active]
        c2v = np.zeros((len(active), self.n_edges))
        for it in range(1, self.max_iter + 1):
            if len(active) == 0:
                break
            p = self._round(ch, c2v)
            hard = (p < 0).astype(np.uint8)
            ok = ~self._unsatisfied(hard) & (p != 0).all(axis=1)
            post[active] = p
            bits[active] = hard
            iters[active] = it
            if ok.any():
                done[active[ok]] = True
                keep = ~ok
                active, ch, c2v = active[keep], ch[keep], c2v[keep]
        return BatchResult(bits, iters, done, post)

    def decode(self, llr) -> DecodeResult:
        llr = np.asarray(llr, dtype=np.float64)
        if llr.shape != (self.n,):
            raise LengthMismatch(f"LLR vector must have length {self.n}, got {llr.shape}")
        res = self.decode_batch(llr[None, :])
        return DecodeResult(res.bits[0], int(res.iterations[0]), bool(res.converged[0]), res.posterior[0])


def spa_decode(h: BitMatrix, llr_in, max_iter: int = 20) -> DecodeResult:
    """Decode one frame. ``iterations == 0`` means the channel decisions were already a codeword."""
    llr_in = np.asarray(llr_in, dtype=np.float64)
    if llr_in.shape != (h.n_cols,):
        raise LengthMismatch(f"LLR vector must have length {h.n_cols}, got {llr_in.shape}")
    return SpaDecoder(h, max_iter).decode(llr_in)
