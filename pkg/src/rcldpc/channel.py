"""BPSK over real Rayleigh block/fast fading with AWGN, perfect-CSI LLRs.

Conventions: unit symbol energy, ``E_s = R * E_b`` with ``R`` the transmitted
rate, noise variance ``N0 / 2`` per real dimension, ``E[h^2] = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch

__all__ = [
    "ChannelSpec",
    "FadingRealization",
    "rayleigh",
    "modulate",
    "sample_fading",
    "block_index",
    "transmit",
    "llr",
]


@dataclass(frozen=True)
class ChannelSpec:
    """One SNR point. ``blocks=None`` means fast fading (one coefficient per symbol).

    ``eb_n0_db=inf`` gives a noiseless channel, ``-inf`` a channel that
    erases everything.
    """

    eb_n0_db: float
    rate: float
    blocks: int | None = None

    @property
    def fast(self) -> bool:
        return self.blocks is None

    @property
    def n0(self) -> float:
        if self.eb_n0_db == math.inf:
            return 0.0
        if self.eb_n0_db == -math.inf:
            return math.inf
        return 1.0 / (float(self.rate) * 10.0 ** (self.eb_n0_db / 10.0))

    @property
    def sigma(self) -> float:
        return math.sqrt(self.n0 / 2.0)


@dataclass(frozen=True)
class FadingRealization:
    h: np.ndarray


def rayleigh(rng: np.random.Generator, size) -> np.ndarray:
    """Rayleigh magnitudes with ``E[h^2] = 1``: ``|x + iy|``, ``x, y ~ N(0, 1/2)``."""
    xy = rng.standard_normal(np.append(np.atleast_1d(size), 2)) * math.sqrt(0.5)
    return np.hypot(xy[..., 0], xy[..., 1])


def modulate(c) -> np.ndarray:
    """BPSK: bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


def sample_fading(spec: ChannelSpec, rng: np.random.Generator, n_tx: int | None = None) -> FadingRealization:
    """``spec.blocks`` coefficients, or ``n_tx`` of them for fast fading."""
    if spec.fast:
        if n_tx is None:
            raise ValueError("fast fading needs the number of transmitted symbols")
        return FadingRealization(rayleigh(rng, n_tx))
    return FadingRealization(rayleigh(rng, spec.blocks))


def block_index(n_tx: int, blocks: int) -> np.ndarray:
    """Contiguous block of each position: ``f = ceil(F t / N)`` (returned 0-based)."""
    t = np.arange(1, n_tx + 1)
    return (blocks * t + n_tx - 1) // n_tx - 1


def _gains(fading: FadingRealization, n_tx: int, symbol_blocks) -> np.ndarray:
    h = np.asarray(fading.h, dtype=np.float64)
    if symbol_blocks is None:
        if len(h) == n_tx:
            return h
        return h[block_index(n_tx, len(h))]
    symbol_blocks = np.asarray(symbol_blocks)
    if len(symbol_blocks) != n_tx:
        raise LengthMismatch(f"block map has {len(symbol_blocks)} entries for {n_tx} symbols")
    return h[symbol_blocks]


def transmit(s, fading: FadingRealization, spec: ChannelSpec, rng: np.random.Generator, symbol_blocks=None) -> np.ndarray:
    """``r_t = h_f(t) s_t + n_t``.

    Without ``symbol_blocks`` the contiguous rule maps positions to blocks;
    with it, position ``t`` uses coefficient ``symbol_blocks[t]``.
    """
    s = np.asarray(s, dtype=np.float64)
    n_tx = s.shape[-1]
    if spec.fast and len(fading.h) != n_tx:
        raise LengthMismatch(f"fast fading needs {n_tx} coefficients, got {len(fading.h)}")
    g = _gains(fading, n_tx, symbol_blocks)
    noise = rng.standard_normal(s.shape) * spec.sigma if spec.n0 > 0 else 0.0
    return g * s + noise


def llr(r, fading: FadingRealization, spec: ChannelSpec, puncture_cols=(), n_pre: int | None = None, symbol_blocks=None) -> np.ndarray:
    """Channel LLRs ``log P(0)/P(1) = 4 h r / N0`` in pre-puncturing column order.

    Punctured columns get 0. ``n_pre`` defaults to ``len(r) + len(puncture_cols)``.
    """
    r = np.asarray(r, dtype=np.float64)
    n_tx = r.shape[-1]
    g = _gains(fading, n_tx, symbol_blocks)
    n0 = spec.n0
    if n0 == math.inf:
        vals = np.zeros_like(r)
    elif n0 == 0:
        vals = np.sign(g * r) * np.inf
        vals[np.isnan(vals)] = 0.0
    else:
        vals = 4.0 * g * r / n0
    punct = sorted(int(c) for c in puncture_cols)
    if n_pre is None:
        n_pre = n_tx + len(punct)
    if n_pre - len(punct) != n_tx:
        raise LengthMismatch(f"{n_tx} received symbols do not fill {n_pre} columns minus {len(punct)} punctured")
    if not punct:
        return vals
    out = np.zeros(r.shape[:-1] + (n_pre,), dtype=np.float64)
    mask = np.ones(n_pre, dtype=bool)
    mask[punct] = False
    out[..., mask] = vals
    return out
