"""Fixed parity-check layouts for RA, IRA and IRAA Root-Check codes.

A :class:`Scaffold` is the parity-check matrix before edge growth: identity
and accumulator blocks are placed, the systematic sub-blocks that PEG will
fill are marked free, and every systematic column carries an indicator over
check rows saying where its free edges may go.

Block sides, with ``n`` the pre-puncturing length:

=============  ========  ==============================================
kind           side      layout (row blocks x column blocks)
=============  ========  ==============================================
IRA_RC_half    n/4       2 x [u1 u2 p1 p2]
IRAA_RC_half   n/6       4 x [u1 u2 p1 p2 b1 b2], p punctured
IRA_RC_third   n/9       6 x [u1 u2 u3 P1 P2 P3], P blocks 2 sides wide
IRAA_RC_third  n/15      12 x [u1 u2 u3 P1 P2 P3 B1 B2 B3], P punctured
=============  ========  ==============================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .codec import EncodeStage
from .errors import BadDimensions, UnsupportedFamily
from .gf2 import BitMatrix

FAST = "fast"

RA = "RA"
IRA_RC_HALF = "IRA_RC_half"
IRA_RC_THIRD = "IRA_RC_third"
IRAA_RC_HALF = "IRAA_RC_half"
IRAA_RC_THIRD = "IRAA_RC_third"
PEG_BASELINE = "PEG_baseline"

KINDS = (RA, IRA_RC_HALF, IRA_RC_THIRD, IRAA_RC_HALF, IRAA_RC_THIRD, PEG_BASELINE)
ROOT_CHECK_KINDS = (IRA_RC_HALF, IRA_RC_THIRD, IRAA_RC_HALF, IRAA_RC_THIRD)

# pre-puncturing length must be a multiple of this
_DIVISOR = {IRA_RC_HALF: 4, IRAA_RC_HALF: 6, IRA_RC_THIRD: 9, IRAA_RC_THIRD: 15}
# nominal block-fading count of each Root-Check layout
_LAYOUT_F = {IRA_RC_HALF: 2, IRAA_RC_HALF: 2, IRA_RC_THIRD: 3, IRAA_RC_THIRD: 3}

_SCAFFOLD_TAG = 0x5CAF


@dataclass(frozen=True)
class CodeFamily:
    """What to build.

    ``n`` is the pre-puncturing length; ``f`` is 2, 3 or ``"fast"``.
    ``degrees`` overrides the systematic column weights (one value for all
    systematic columns, or one per column). ``repetitions`` only applies to
    RA.
    """

    kind: str
    n: int
    f: int | str = 2
    seed: int = 0
    degrees: tuple[int, ...] | None = None
    repetitions: int = 3
    min_displacement: int = 1

    def __post_init__(self):
        if self.degrees is not None:
            object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        self.validate()

    @property
    def fast(self) -> bool:
        return self.f == FAST

    @property
    def layout_blocks(self) -> int:
        """Fading-block count the column layout is organised around."""
        if self.kind in _LAYOUT_F:
            return _LAYOUT_F[self.kind]
        if self.fast:
            return 2 if self.kind == PEG_BASELINE else 1
        return int(self.f)

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise UnsupportedFamily(f"unknown code family {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not (self.f == FAST or (isinstance(self.f, (int, np.integer)) and not isinstance(self.f, bool) and self.f >= 1)):
            raise BadDimensions(f"f must be a positive block count or {FAST!r}, got {self.f!r}")
        if self.n < 1:
            raise BadDimensions("n must be positive")
        if self.kind in _LAYOUT_F:
            F = _LAYOUT_F[self.kind]
            if not self.fast and self.f != F:
                raise BadDimensions(f"{self.kind} is laid out for F={F} (or fast fading), got f={self.f}")
            d = _DIVISOR[self.kind]
            if self.n % d:
                raise BadDimensions(f"{self.kind} requires n divisible by {d}, got n={self.n}")
        elif self.kind == RA:
            if self.repetitions < 1:
                raise BadDimensions("RA repetitions must be >= 1")
            if self.n % (self.repetitions + 1):
                raise BadDimensions(
                    f"RA with q={self.repetitions} requires n divisible by {self.repetitions + 1}, got n={self.n}"
                )
        else:
            F = self.layout_blocks
            if F not in (2, 3):
                raise BadDimensions(f"PEG_baseline supports F=2, F=3 or fast fading, got f={self.f}")
            twin = IRA_RC_HALF if F == 2 else IRA_RC_THIRD
            if self.n % _DIVISOR[twin]:
                raise BadDimensions(
                    f"PEG_baseline with F={F} mirrors {twin} and requires n divisible by {_DIVISOR[twin]}, got n={self.n}"
                )
        if self.min_displacement < 1:
            raise BadDimensions("min_displacement must be >= 1")

    @property
    def nominal_rate(self) -> Fraction:
        """Transmitted rate ``k / n_tx``."""
        if self.kind in (IRA_RC_HALF, IRAA_RC_HALF):
            return Fraction(1, 2)
        if self.kind in (IRA_RC_THIRD, IRAA_RC_THIRD):
            return Fraction(1, 3)
        if self.kind == RA:
            return Fraction(1, self.repetitions + 1)
        return Fraction(1, self.layout_blocks)


@dataclass
class Scaffold:
    family: CodeFamily
    h: BitMatrix
    block_size: int
    row_blocks: list[tuple[int, int]]
    col_blocks: list[tuple[int, int]]
    col_labels: list[str]
    free_mask: np.ndarray
    # target column weight inside each free block; None = no per-block cap
    block_weights: dict[tuple[int, int], int | None]
    indicators: list[np.ndarray]
    col_indicator: np.ndarray
    degree_targets: np.ndarray
    col_block_fading: list[int]
    puncture_blocks: tuple[int, ...]
    stages: tuple[EncodeStage, ...]
    k: int
    blocks: int
    extra: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.h.n_cols

    @property
    def m(self) -> int:
        return self.h.n_rows

    def col_block_of(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int64)
        for b, (lo, hi) in enumerate(self.col_blocks):
            out[lo:hi] = b
        return out

    def row_block_of(self) -> np.ndarray:
        out = np.empty(self.m, dtype=np.int64)
        for b, (lo, hi) in enumerate(self.row_blocks):
            out[lo:hi] = b
        return out

    def col_fading(self) -> np.ndarray:
        cb = self.col_block_of()
        return np.asarray(self.col_block_fading, dtype=np.int64)[cb]

    def puncture_cols(self) -> tuple[int, ...]:
        out: list[int] = []
        for b in sorted(self.puncture_blocks):
            lo, hi = self.col_blocks[b]
            out.extend(range(lo, hi))
        return tuple(out)

    def check(self) -> None:
        """Assert the structural invariants; raises AssertionError."""
        rb, cb = self.row_block_of(), self.col_block_of()
        rows, cols = self.h.entries()
        assert not self.free_mask[rb[rows], cb[cols]].any(), "fixed entry inside a free block"
        assert all(len(z) == self.m for z in self.indicators)
        fixed = self.h.column_weights()
        assert (self.degree_targets >= fixed).all(), "degree target below fixed weight"
        free_cols = np.flatnonzero(self.degree_targets > fixed)
        assert (self.col_indicator[free_cols] >= 0).all(), "free column without indicator"
        assert all(b >= self.family_systematic_blocks() for b in self.puncture_blocks)

    def family_systematic_blocks(self) -> int:
        """Number of leading column blocks that hold systematic bits."""
        return sum(1 for lab in self.col_labels if lab.startswith("u") or lab == "all")

    def permitted_rows(self, col: int) -> np.ndarray:
        """Rows a free edge of ``col`` may use (indicator AND free mask)."""
        z = self.indicators[self.col_indicator[col]].astype(bool)
        cbi = self.col_block_of()[col]
        ok = self.free_mask[self.row_block_of(), cbi]
        return np.flatnonzero(z & ok)


# -- fixed building blocks ----------------------------------------------------


def build_dual_diagonal(m: int) -> BitMatrix:
    """``m x m`` lower bidiagonal matrix: the parity part of a 1/(1+D) accumulator."""
    if m < 1:
        raise BadDimensions("dual-diagonal size must be >= 1")
    return BitMatrix(m, m, tuple((i,) if i == 0 else (i - 1, i) for i in range(m)))


def build_hp_third(chi: int) -> BitMatrix:
    """``2chi x 2chi`` parity part of the 1/(1+D+D^chi) accumulator.

    Row ``t`` encodes ``p_t = x_t + p_{t-1} + p_{t-chi}``. The top ``chi`` rows
    form the first accumulator region, the bottom ``chi`` rows the second.
    """
    if chi < 2:
        raise BadDimensions("chi must be >= 2")
    rows = []
    for t in range(2 * chi):
        r = {t}
        if t >= 1:
            r.add(t - 1)
        if t >= chi:
            r.add(t - chi)
        rows.append(r)
    return BitMatrix.from_rows(2 * chi, 2 * chi, rows)


def random_permutation(size: int, rng: np.random.Generator, min_displacement: int = 1, attempts: int = 200) -> np.ndarray:
    """Seeded permutation ``perm`` with ``|perm[j+1] - perm[j]| >= min_displacement``.

    ``min_displacement == 1`` is an unconstrained uniform permutation.
    """
    if min_displacement <= 1:
        return rng.permutation(size)
    for _ in range(attempts):
        free = list(range(size))
        perm = np.empty(size, dtype=np.int64)
        prev = None
        ok = True
        for j in range(size):
            if prev is None:
                cand = free
            else:
                cand = [x for x in free if abs(x - prev) >= min_displacement]
            if not cand:
                ok = False
                break
            pick = cand[int(rng.integers(len(cand)))]
            free.remove(pick)
            perm[j] = pick
            prev = pick
        if ok:
            return perm
    raise BadDimensions(f"could not draw a size-{size} permutation with displacement >= {min_displacement}")


def permutation_matrix(perm: np.ndarray) -> BitMatrix:
    """Column ``j`` has its single one in row ``perm[j]``."""
    size = len(perm)
    return BitMatrix.from_entries(size, size, ((int(perm[j]), j) for j in range(size)))


# -- layouts ------------------------------------------------------------------


class _Layout:
    """Mutable helper collecting block placements for one scaffold."""

    def __init__(self, row_sides: list[int], col_sides: list[int], col_labels: list[str]):
        self.row_blocks = _spans(row_sides)
        self.col_blocks = _spans(col_sides)
        self.col_labels = col_labels
        self.entries: list[tuple[int, int]] = []
        self.free_mask = np.zeros((len(row_sides), len(col_sides)), dtype=bool)
        self.block_weights: dict[tuple[int, int], int | None] = {}

    def place(self, rb: int | list[int], cb: int, mat: BitMatrix) -> None:
        """Place ``mat`` at column block ``cb`` over the concatenation of row blocks ``rb``."""
        rbs = [rb] if isinstance(rb, int) else rb
        rows = [r for b in rbs for r in range(*self.row_blocks[b])]
        c0, c1 = self.col_blocks[cb]
        if mat.n_rows != len(rows) or mat.n_cols != c1 - c0:
            raise BadDimensions(f"block {mat.shape} does not fit rows {len(rows)} x cols {c1 - c0}")
        for i, r in enumerate(mat.row_support):
            self.entries.extend((rows[i], c0 + c) for c in r)

    def free(self, rb: int, cb: int, weight: int | None) -> None:
        self.free_mask[rb, cb] = True
        self.block_weights[(rb, cb)] = weight

    def rows_of(self, rbs: list[int]) -> tuple[int, ...]:
        return tuple(r for b in rbs for r in range(*self.row_blocks[b]))

    def cols_of(self, cb: int) -> tuple[int, ...]:
        return tuple(range(*self.col_blocks[cb]))

    def indicator(self, rbs: list[int], m: int) -> np.ndarray:
        z = np.zeros(m, dtype=np.uint8)
        for b in rbs:
            z[slice(*self.row_blocks[b])] = 1
        return z

    def matrix(self) -> BitMatrix:
        m = self.row_blocks[-1][1]
        n = self.col_blocks[-1][1]
        return BitMatrix.from_entries(m, n, self.entries)


def _spans(sides: list[int]) -> list[tuple[int, int]]:
    out, at = [], 0
    for s in sides:
        out.append((at, at + s))
        at += s
    return out


def _half_top(L: _Layout, beta: int) -> None:
    """Root-Check rate-1/2 block rows over [u1 u2 p1 p2]."""
    eye, hp = BitMatrix.identity(beta), build_dual_diagonal(beta)
    L.place(0, 0, eye)
    L.place(1, 1, eye)
    L.place(0, 3, hp)
    L.place(1, 2, hp)
    L.free(1, 0, 2)
    L.free(0, 1, 2)


# (row block of the first accumulator region, row block of the second) per
# parity column block, for the rate-1/3 Root-Check layout
_THIRD_PARITY_ROWS = ((2, 4), (5, 0), (1, 3))
_THIRD_IDENTITY = ((0, 1), (2, 3), (4, 5))
_THIRD_FREE = ((2, 4), (0, 5), (1, 3))


def _third_top(L: _Layout, chi: int, parity_cb0: int, row_offset: int = 0) -> list[EncodeStage]:
    hp = build_hp_third(chi)
    hp1, hp2 = hp.select_rows(range(chi)), hp.select_rows(range(chi, 2 * chi))
    stages = []
    for i, (ra, rb) in enumerate(_THIRD_PARITY_ROWS):
        cb = parity_cb0 + i
        L.place(row_offset + ra, cb, hp1)
        L.place(row_offset + rb, cb, hp2)
        stages.append(EncodeStage(L.rows_of([row_offset + ra, row_offset + rb]), L.cols_of(cb), chi))
    return stages


def make_scaffold(family: CodeFamily) -> Scaffold:
    """Fixed layout, free blocks, indicators and degree targets for ``family``."""
    family.validate()
    rng = np.random.default_rng([family.seed, _SCAFFOLD_TAG])
    builder = {
        IRA_RC_HALF: _ira_half,
        IRAA_RC_HALF: _iraa_half,
        IRA_RC_THIRD: _ira_third,
        IRAA_RC_THIRD: _iraa_third,
        RA: _ra,
        PEG_BASELINE: _baseline,
    }[family.kind]
    sc = builder(family, rng)
    if family.degrees is not None and family.kind != PEG_BASELINE:
        _apply_degree_override(sc, family.degrees)
    sc.check()
    return sc


def _ira_half(family: CodeFamily, rng) -> Scaffold:
    beta = family.n // 4
    L = _Layout([beta] * 2, [beta] * 4, ["u1", "u2", "p1", "p2"])
    _half_top(L, beta)
    h = L.matrix()
    ind = [L.indicator([1], h.n_rows), L.indicator([0], h.n_rows)]
    stages = (
        EncodeStage(L.rows_of([0]), L.cols_of(3), None),
        EncodeStage(L.rows_of([1]), L.cols_of(2), None),
    )
    return _finish(family, L, h, beta, ind, [0, 1, 0, 1], (), stages, k=2 * beta, systematic_weight=3)


def _iraa_half(family: CodeFamily, rng) -> Scaffold:
    beta = family.n // 6
    L = _Layout([beta] * 4, [beta] * 6, ["u1", "u2", "p1", "p2", "b1", "b2"])
    _half_top(L, beta)
    perm = random_permutation(2 * beta, rng, family.min_displacement)
    L.place([2, 3], 2, _perm_part(perm, 2 * beta, 0, beta))
    L.place([2, 3], 3, _perm_part(perm, 2 * beta, beta, 2 * beta))
    hp = build_dual_diagonal(beta)
    L.place(2, 5, hp)
    L.place(3, 4, hp)
    h = L.matrix()
    ind = [L.indicator([1], h.n_rows), L.indicator([0], h.n_rows)]
    stages = (
        EncodeStage(L.rows_of([0]), L.cols_of(3), None),
        EncodeStage(L.rows_of([1]), L.cols_of(2), None),
        EncodeStage(L.rows_of([2]), L.cols_of(5), None),
        EncodeStage(L.rows_of([3]), L.cols_of(4), None),
    )
    sc = _finish(family, L, h, beta, ind, [0, 1, 0, 1, 0, 1], (2, 3), stages, k=2 * beta, systematic_weight=3)
    sc.extra["interleaver"] = perm.tolist()
    return sc


def _perm_part(perm: np.ndarray, size: int, lo: int, hi: int) -> BitMatrix:
    """Columns ``lo:hi`` of the permutation matrix of ``perm`` (rows span all of it)."""
    return BitMatrix.from_entries(size, hi - lo, ((int(perm[j]), j - lo) for j in range(lo, hi)))


def _ira_third(family: CodeFamily, rng) -> Scaffold:
    chi = family.n // 9
    L = _Layout([chi] * 6, [chi] * 3 + [2 * chi] * 3, ["u1", "u2", "u3", "P1", "P2", "P3"])
    eye = BitMatrix.identity(chi)
    for cb, rbs in enumerate(_THIRD_IDENTITY):
        for rb in rbs:
            L.place(rb, cb, eye)
    for cb, rbs in enumerate(_THIRD_FREE):
        for rb in rbs:
            L.free(rb, cb, 1)
    stages = tuple(_third_top(L, chi, 3))
    h = L.matrix()
    ind = [L.indicator(list(rbs), h.n_rows) for rbs in _THIRD_FREE]
    return _finish(family, L, h, chi, ind, [0, 1, 2, 0, 1, 2], (), stages, k=3 * chi, systematic_weight=4)


def _iraa_third(family: CodeFamily, rng) -> Scaffold:
    chi = family.n // 15
    L = _Layout(
        [chi] * 12,
        [chi] * 3 + [2 * chi] * 6,
        ["u1", "u2", "u3", "P1", "P2", "P3", "B1", "B2", "B3"],
    )
    eye = BitMatrix.identity(chi)
    for cb, rbs in enumerate(_THIRD_IDENTITY):
        for rb in rbs:
            L.place(rb, cb, eye)
    for cb, rbs in enumerate(_THIRD_FREE):
        for rb in rbs:
            L.free(rb, cb, 1)
    stages = _third_top(L, chi, 3)
    perm = random_permutation(6 * chi, rng, family.min_displacement)
    bottom = list(range(6, 12))
    for i in range(3):
        L.place(bottom, 3 + i, _perm_part(perm, 6 * chi, 2 * chi * i, 2 * chi * (i + 1)))
    # second stage: a plain 1/(1+D) chain per B block over its own pair of row blocks
    dd = build_dual_diagonal(2 * chi)
    for i in range(3):
        rbs = [6 + 2 * i, 7 + 2 * i]
        L.place(rbs, 6 + i, dd)
        stages.append(EncodeStage(L.rows_of(rbs), L.cols_of(6 + i), None))
    h = L.matrix()
    ind = [L.indicator(list(rbs), h.n_rows) for rbs in _THIRD_FREE]
    fading = [0, 1, 2, 0, 1, 2, 0, 1, 2]
    sc = _finish(family, L, h, chi, ind, fading, (3, 4, 5), tuple(stages), k=3 * chi, systematic_weight=4)
    sc.extra["interleaver"] = perm.tolist()
    return sc


def _ra(family: CodeFamily, rng) -> Scaffold:
    q = family.repetitions
    k = family.n // (q + 1)
    m = q * k
    L = _Layout([m], [k, m], ["u", "p"])
    perm = random_permutation(m, rng, family.min_displacement)
    # repeated copy r = j*q + i of information bit j lands on row perm[r]
    hu = BitMatrix.from_entries(m, k, ((int(perm[j * q + i]), j) for j in range(k) for i in range(q)))
    L.place(0, 0, hu)
    L.place(0, 1, build_dual_diagonal(m))
    h = L.matrix()
    stages = (EncodeStage(L.rows_of([0]), L.cols_of(1), None),)
    F = family.layout_blocks
    sc = Scaffold(
        family=family,
        h=h,
        block_size=k,
        row_blocks=L.row_blocks,
        col_blocks=L.col_blocks,
        col_labels=L.col_labels,
        free_mask=L.free_mask,
        block_weights={},
        indicators=[],
        col_indicator=np.full(h.n_cols, -1, dtype=np.int64),
        degree_targets=h.column_weights(),
        col_block_fading=[0, 0],
        puncture_blocks=(),
        stages=stages,
        k=k,
        blocks=F,
    )
    sc.extra["interleaver"] = perm.tolist()
    return sc


def _baseline(family: CodeFamily, rng) -> Scaffold:
    """Unstructured PEG code mirroring the column-weight profile of the IRA twin."""
    F = family.layout_blocks
    twin_kind = IRA_RC_HALF if F == 2 else IRA_RC_THIRD
    twin = make_scaffold(CodeFamily(twin_kind, family.n, FAST, family.seed, degrees=family.degrees))
    targets = np.sort(twin.degree_targets)
    n, m = family.n, twin.m
    L = _Layout([m], [n], ["all"])
    L.free(0, 0, None)
    h = BitMatrix.zeros(m, n)
    return Scaffold(
        family=family,
        h=h,
        block_size=m,
        row_blocks=L.row_blocks,
        col_blocks=L.col_blocks,
        col_labels=L.col_labels,
        free_mask=L.free_mask,
        block_weights=dict(L.block_weights),
        indicators=[np.ones(m, dtype=np.uint8)],
        col_indicator=np.zeros(n, dtype=np.int64),
        degree_targets=targets,
        col_block_fading=[0],
        puncture_blocks=(),
        stages=(),
        k=n - m,
        blocks=F,
    )


def _finish(family, L, h, side, indicators, fading, puncture, stages, k, systematic_weight) -> Scaffold:
    targets = h.column_weights()
    col_ind = np.full(h.n_cols, -1, dtype=np.int64)
    for b in range(len(indicators)):
        lo, hi = L.col_blocks[b]
        targets[lo:hi] = systematic_weight
        col_ind[lo:hi] = b
    return Scaffold(
        family=family,
        h=h,
        block_size=side,
        row_blocks=L.row_blocks,
        col_blocks=L.col_blocks,
        col_labels=L.col_labels,
        free_mask=L.free_mask,
        block_weights=dict(L.block_weights),
        indicators=indicators,
        col_indicator=col_ind,
        degree_targets=targets,
        col_block_fading=list(fading),
        puncture_blocks=tuple(puncture),
        stages=tuple(stages),
        k=k,
        blocks=_LAYOUT_F[family.kind],
    )


def _apply_degree_override(sc: Scaffold, degrees: tuple[int, ...]) -> None:
    if len(degrees) not in (1, sc.k):
        raise BadDimensions(f"degree override needs 1 or k={sc.k} values, got {len(degrees)}")
    if sc.family.kind == RA:
        raise UnsupportedFamily("RA column weights are fixed by the repetition factor")
    want = np.array(degrees * sc.k if len(degrees) == 1 else degrees, dtype=np.int64)
    fixed = sc.h.column_weights()[: sc.k]
    if (want < fixed).any():
        j = int(np.flatnonzero(want < fixed)[0])
        raise BadDimensions(f"systematic column {j} needs degree >= {fixed[j]}, got {want[j]}")
    for j in range(sc.k):
        if want[j] - fixed[j] > len(sc.permitted_rows(j)):
            raise BadDimensions(f"systematic column {j}: degree {want[j]} exceeds available check rows")
    sc.degree_targets[: sc.k] = want
    for key in sc.block_weights:
        sc.block_weights[key] = None


def indicator_vectors(family: CodeFamily) -> list[np.ndarray]:
    """One 0/1 vector over check rows per fading block (Root-Check families only)."""
    if family.kind not in ROOT_CHECK_KINDS:
        raise UnsupportedFamily(f"{family.kind} has no Root-Check indicator vectors")
    return [z.copy() for z in make_scaffold(family).indicators]
