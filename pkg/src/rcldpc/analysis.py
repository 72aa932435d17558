"""Outage limits, FER Monte-Carlo sweeps and diversity-order fits.

Every simulated frame draws its randomness from its own generator seeded by
``(master_seed, point_index, frame_index)``, so the counters of a sweep do not
depend on how frames are split across chunks or worker processes. The stop
rule is applied frame by frame in index order.
"""

from __future__ import annotations

import csv
import io
import math
import multiprocessing as mp
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .channel import ChannelSpec, llr, modulate, rayleigh, sample_fading, transmit
from .codec import LinearCode, encode, puncture
from .decoder import SpaDecoder
from .errors import InsufficientData

__all__ = [
    "FerPoint",
    "OutagePoint",
    "mutual_info_gaussian",
    "outage_probability",
    "outage_single_block",
    "fer_sweep",
    "diversity_slope",
    "snr_at_fer",
    "FER_CSV_COLUMNS",
    "OUTAGE_CSV_COLUMNS",
]

FER_CSV_COLUMNS = ("eb_n0_db", "frames", "frame_errors", "fer", "bit_errors", "ber", "avg_iterations")
OUTAGE_CSV_COLUMNS = ("eb_n0_db", "samples", "outages", "p_out")

# chunk sizes grow along this ladder so easy points do not pay for tiny batches
_CHUNK_LADDER = (250, 500, 1000, 2000, 4000)
_DECODE_BATCH = 512


@dataclass
class FerPoint:
    eb_n0_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    avg_iterations: float
    info_bits: int = 1

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.info_bits) if self.frames else 0.0

    def csv_row(self) -> list:
        return [
            repr(float(self.eb_n0_db)),
            self.frames,
            self.frame_errors,
            repr(self.fer),
            self.bit_errors,
            repr(self.ber),
            repr(float(self.avg_iterations)),
        ]


@dataclass
class OutagePoint:
    eb_n0_db: float
    samples: int
    outages: int

    @property
    def estimate(self) -> float:
        return self.outages / self.samples

    def csv_row(self) -> list:
        return [repr(float(self.eb_n0_db)), self.samples, self.outages, repr(self.estimate)]


# -- outage --------------------------------------------------------------------


def mutual_info_gaussian(h, rate: float, eb_n0_db: float) -> np.ndarray | float:
    """Gaussian-input mutual information averaged over the fading blocks (last axis of ``h``)."""
    h = np.asarray(h, dtype=np.float64)
    snr = 10.0 ** (eb_n0_db / 10.0)
    per_block = 0.5 * np.log2(1.0 + 2.0 * rate * snr * h**2)
    out = per_block.mean(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def outage_probability(F: int, rate: float, eb_n0_db: float, n_samples: int, seed: int = 0, chunk: int = 1_000_000) -> OutagePoint:
    """Monte-Carlo ``P(I_G < R)`` over ``F`` independent Rayleigh blocks."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    outages = 0
    left = n_samples
    while left:
        c = min(chunk, left)
        h = rayleigh(rng, (c, F))
        outages += int(np.count_nonzero(mutual_info_gaussian(h, rate, eb_n0_db) < rate))
        left -= c
    return OutagePoint(float(eb_n0_db), int(n_samples), outages)


def outage_single_block(rate: float, eb_n0_db: float) -> float:
    """Closed form for ``F = 1``: ``h^2 ~ Exp(1)`` so ``P = 1 - exp(-(2^{2R} - 1) / (2 R Eb/N0))``."""
    snr = 10.0 ** (eb_n0_db / 10.0)
    if rate <= 0:
        return 0.0
    return -math.expm1(-(2.0 ** (2.0 * rate) - 1.0) / (2.0 * rate * snr))


# -- FER simulation ------------------------------------------------------------


def _block_map(code: LinearCode, spec: ChannelSpec):
    if spec.fast:
        return None
    if spec.blocks == code.blocks:
        return code.symbol_blocks
    return None  # contiguous rule over the transmitted column order


def simulate_frames(code: LinearCode, spec: ChannelSpec, decoder: SpaDecoder, master_seed: int, point: int, start: int, stop: int):
    """Per-frame outcomes for frames ``start..stop-1`` of one SNR point.

    Returns ``(frame_error, bit_errors, iterations)`` arrays.
    """
    count = stop - start
    rngs = [np.random.default_rng([master_seed, point, f]) for f in range(start, stop)]
    u = np.stack([g.integers(0, 2, code.k, dtype=np.uint8) for g in rngs]) if count else np.zeros((0, code.k), np.uint8)
    tx = puncture(code, encode(code, u))
    s = modulate(tx)
    blocks = _block_map(code, spec)
    L = np.empty((count, code.n_pre))
    for i, g in enumerate(rngs):
        fad = sample_fading(spec, g, code.n_tx)
        r = transmit(s[i], fad, spec, g, blocks)
        L[i] = llr(r, fad, spec, code.puncture_cols, code.n_pre, blocks)
    fe = np.zeros(count, dtype=bool)
    be = np.zeros(count, dtype=np.int64)
    it = np.zeros(count, dtype=np.int64)
    for lo in range(0, count, _DECODE_BATCH):
        hi = min(lo + _DECODE_BATCH, count)
        res = decoder.decode_batch(L[lo:hi])
        wrong = res.bits[:, : code.k] != u[lo:hi]
        be[lo:hi] = wrong.sum(axis=1)
        fe[lo:hi] = wrong.any(axis=1)
        it[lo:hi] = res.iterations
    return fe, be, it


_WORKER: dict = {}


def _init_worker(code: LinearCode, max_iter: int, master_seed: int) -> None:
    _WORKER["code"] = code
    _WORKER["decoder"] = SpaDecoder(code.h, max_iter)
    _WORKER["seed"] = master_seed


def _work(task):
    point, spec, start, stop = task
    return simulate_frames(_WORKER["code"], spec, _WORKER["decoder"], _WORKER["seed"], point, start, stop)


def _chunks(max_frames: int):
    start, i = 0, 0
    while start < max_frames:
        size = _CHUNK_LADDER[min(i, len(_CHUNK_LADDER) - 1)]
        stop = min(start + size, max_frames)
        yield start, stop
        start, i = stop, i + 1


def fer_sweep(
    code: LinearCode,
    specs: Sequence[ChannelSpec],
    min_frame_errors: int = 100,
    max_frames: int = 1_000_000,
    max_iter: int = 20,
    master_seed: int = 0,
    workers: int = 1,
    on_point: Callable[[FerPoint], None] | None = None,
) -> list[FerPoint]:
    """Simulate encode, puncture, fade, decode at every SNR point.

    Each point stops at the frame where ``min_frame_errors`` is reached, or
    after ``max_frames``. Counters are identical for any ``workers``.
    """
    points = []
    pool = None
    if workers > 1:
        pool = mp.get_context("fork").Pool(workers, _init_worker, (code, max_iter, master_seed))
    else:
        _init_worker(code, max_iter, master_seed)
    try:
        for idx, spec in enumerate(specs):
            pt = _sweep_point(idx, spec, code, min_frame_errors, max_frames, workers, pool)
            points.append(pt)
            if on_point is not None:
                on_point(pt)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return points


def _sweep_point(idx, spec, code, min_errors, max_frames, workers, pool) -> FerPoint:
    frames = errors = bit_errors = iter_sum = 0
    chunks = _chunks(max_frames)
    finished = False
    while not finished:
        wave = [(idx, spec, a, b) for a, b in _take(chunks, max(workers, 1))]
        if not wave:
            break
        results = pool.map(_work, wave) if pool is not None else [_work(t) for t in wave]
        for fe, be, it in results:
            cum = errors + np.cumsum(fe)
            hit = np.flatnonzero(cum >= min_errors)
            take = int(hit[0]) + 1 if len(hit) else len(fe)
            frames += take
            errors += int(fe[:take].sum())
            bit_errors += int(be[:take].sum())
            iter_sum += int(it[:take].sum())
            if len(hit) or frames >= max_frames:
                finished = True
                break
    avg = iter_sum / frames if frames else 0.0
    return FerPoint(float(spec.eb_n0_db), frames, errors, bit_errors, avg, code.k)


def _take(it, n):
    out = []
    for _ in range(n):
        nxt = next(it, None)
        if nxt is None:
            break
        out.append(nxt)
    return out


# -- curve analysis ------------------------------------------------------------


def diversity_slope(points: Iterable[FerPoint], top: int = 3) -> float:
    """Diversity estimate: decades of FER lost per 10 dB over the ``top`` highest-SNR points with errors."""
    pts = sorted((p for p in points if _rate_of(p) > 0), key=lambda p: p.eb_n0_db)
    if len(pts) < 2:
        raise InsufficientData("need at least two points with nonzero error rate")
    pts = pts[-top:] if top else pts
    x = np.array([p.eb_n0_db for p in pts]) / 10.0
    y = np.log10([_rate_of(p) for p in pts])
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)


def _rate_of(p) -> float:
    return p.fer if isinstance(p, FerPoint) else p.estimate


def snr_at_fer(points: Iterable, target: float) -> float:
    """SNR (dB) where a curve crosses ``target``, by log-linear interpolation."""
    pts = sorted(((p.eb_n0_db, _rate_of(p)) for p in points), key=lambda t: t[0])
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 >= target >= y1 and y1 > 0:
            if y0 == y1:
                return float(x0)
            w = (math.log10(y0) - math.log10(target)) / (math.log10(y0) - math.log10(y1))
            return float(x0 + w * (x1 - x0))
    raise InsufficientData(f"curve does not bracket FER {target:g}")


# -- CSV ---------------------------------------------------------------------------


def fer_csv(points: Iterable[FerPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FER_CSV_COLUMNS)
    for p in points:
        w.writerow(p.csv_row())
    return buf.getvalue()


def outage_csv(points: Iterable[OutagePoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(OUTAGE_CSV_COLUMNS)
    for p in points:
        w.writerow(p.csv_row())
    return buf.getvalue()


def read_fer_csv(text: str) -> list[FerPoint]:
    rows = list(csv.DictReader(io.StringIO(text)))
    return [
        FerPoint(float(r["eb_n0_db"]), int(r["frames"]), int(r["frame_errors"]), int(r["bit_errors"]), float(r["avg_iterations"]))
        for r in rows
    ]
