"""Edge growth on a scaffold, girth measurement and Root-Check verification."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .codec import LinearCode, _contiguous_blocks, systematic_form
from .errors import NoCandidateCheck
from .gf2 import BitMatrix
from .scaffold import PEG_BASELINE, RA, CodeFamily, Scaffold, make_scaffold

__all__ = ["peg_place", "construct", "girth", "verify_root_check", "RootCheckReport"]

_PEG_TAG = 0x9E6
_ORDER_TAG = 0x0DE5


def peg_place(scaffold: Scaffold, rng_seed: int | None = None, random_first_edge: bool = False) -> LinearCode:
    """Fill the free blocks of ``scaffold`` by progressive edge growth.

    Columns with free capacity are processed in ascending order. Each edge
    goes to a lowest-weight permitted check among those farthest from the
    column in the current graph (or unreachable from it); ties are broken
    uniformly at random. A column with no edges at all takes a random
    lowest-weight permitted check.

    ``random_first_edge=True`` also places the first free edge of columns
    that already carry fixed edges at random, which can close 4-cycles
    through the identity blocks.
    """
    seed = scaffold.family.seed if rng_seed is None else rng_seed
    rng = np.random.default_rng([seed, _PEG_TAG])
    h0 = scaffold.h
    m, n = h0.shape
    var_adj = [list(c) for c in h0.col_support]
    chk_adj = [list(r) for r in h0.row_support]
    row_w = [len(r) for r in chk_adj]
    fixed = h0.column_weights()
    rb_of = scaffold.row_block_of()
    cb_of = scaffold.col_block_of()
    permitted_cache: dict[tuple[int, int], np.ndarray] = {}

    for j in range(n):
        need = int(scaffold.degree_targets[j] - fixed[j])
        if need <= 0:
            continue
        key = (int(scaffold.col_indicator[j]), int(cb_of[j]))
        if key not in permitted_cache:
            permitted_cache[key] = scaffold.permitted_rows(j)
        permitted = permitted_cache[key]
        used = {}
        for e in range(need):
            adj = set(var_adj[j])
            cands = [
                int(r)
                for r in permitted
                if r not in adj and _block_open(scaffold, rb_of[r], cb_of[j], used)
            ]
            if not cands:
                raise NoCandidateCheck(f"column {j}: no permitted check row left for edge {e + 1} of {need}")
            if not var_adj[j] or (random_first_edge and e == 0):
                pool = cands
            else:
                pool = _farthest(j, cands, var_adj, chk_adj, m)
            wmin = min(row_w[r] for r in pool)
            lightest = [r for r in pool if row_w[r] == wmin]
            r = lightest[int(rng.integers(len(lightest)))] if len(lightest) > 1 else lightest[0]
            assert scaffold.free_mask[rb_of[r], cb_of[j]], "edge placed outside a free block"
            var_adj[j].append(r)
            chk_adj[r].append(j)
            row_w[r] += 1
            used[int(rb_of[r])] = used.get(int(rb_of[r]), 0) + 1

    h = BitMatrix.from_rows(m, n, chk_adj)
    return _wrap(scaffold, h, seed)


def _block_open(sc: Scaffold, rb: int, cb: int, used: dict) -> bool:
    cap = sc.block_weights.get((int(rb), int(cb)))
    return cap is None or used.get(int(rb), 0) < cap


def _farthest(j: int, cands: list[int], var_adj, chk_adj, m: int) -> list[int]:
    """Candidate checks reached last by a breadth-first tree from variable ``j``.

    If the tree stops growing before every candidate is reached, the
    unreached candidates are returned instead.
    """
    seen_chk = bytearray(m)
    is_cand = bytearray(m)
    for c in cands:
        is_cand[c] = 1
    seen_var = {j}
    frontier = list(var_adj[j])
    for c in frontier:
        seen_chk[c] = 1
    remaining = len(cands)
    while True:
        new = []
        for c in frontier:
            for v in chk_adj[c]:
                if v in seen_var:
                    continue
                seen_var.add(v)
                for c2 in var_adj[v]:
                    if not seen_chk[c2]:
                        seen_chk[c2] = 1
                        new.append(c2)
        if not new:
            return [c for c in cands if not seen_chk[c]]
        hit = [c for c in new if is_cand[c]]
        remaining -= len(hit)
        if remaining == 0:
            return hit
        frontier = new


def _wrap(sc: Scaffold, h: BitMatrix, seed: int) -> LinearCode:
    fam = sc.family
    meta = {
        "family": fam.kind,
        "n": fam.n,
        "f": fam.f,
        "seed": int(seed),
        "block_size": sc.block_size,
        "col_blocks": [[lo, hi, lab] for (lo, hi), lab in zip(sc.col_blocks, sc.col_labels)],
        "row_blocks": [list(b) for b in sc.row_blocks],
        "free_blocks": [list(map(int, ij)) for ij in np.argwhere(sc.free_mask)],
        "puncture_blocks": [sc.col_labels[b] for b in sc.puncture_blocks],
    }
    if fam.degrees is not None:
        meta["degrees"] = list(fam.degrees)
    if fam.kind == PEG_BASELINE:
        h_sys, order, k = systematic_form(h)
        # random transmit order: each column lands in a uniformly random block
        labels = _contiguous_blocks(h.n_cols, sc.blocks)
        perm = np.random.default_rng([seed, _ORDER_TAG]).permutation(h.n_cols)
        meta["column_order"] = order.tolist()
        return LinearCode(h_sys, k, (), labels[perm], sc.blocks, (), meta)
    if fam.kind == RA:
        return LinearCode(h, sc.k, (), None, sc.blocks, sc.stages, meta)
    return LinearCode(h, sc.k, sc.puncture_cols(), sc.col_fading(), sc.blocks, sc.stages, meta)


def construct(family: CodeFamily, rng_seed: int | None = None) -> LinearCode:
    """Scaffold plus edge growth in one call."""
    return peg_place(make_scaffold(family), rng_seed)


def girth(h: BitMatrix) -> float:
    """Length of the shortest cycle of the Tanner graph (``math.inf`` for a forest)."""
    m, n = h.shape
    # nodes: variables 0..n-1, checks n..n+m-1
    adj = [[n + r for r in col] for col in h.col_support] + [list(row) for row in h.row_support]
    dist = [-1] * (n + m)
    parent = [-1] * (n + m)
    best = math.inf
    for root in range(n):
        if not adj[root]:
            continue
        touched = [root]
        dist[root] = 0
        q = deque([root])
        while q:
            x = q.popleft()
            dx = dist[x]
            if 2 * dx + 1 >= best:
                break
            for y in adj[x]:
                if y == parent[x]:
                    continue
                if dist[y] < 0:
                    dist[y] = dx + 1
                    parent[y] = x
                    touched.append(y)
                    q.append(y)
                else:
                    best = min(best, dx + dist[y] + 1)
        for x in touched:
            dist[x] = -1
            parent[x] = -1
        if best == 4:
            break
    return best


@dataclass
class RootCheckReport:
    passed: bool
    column_ok: np.ndarray
    checked: int

    @property
    def failing(self) -> list[int]:
        return np.flatnonzero(~self.column_ok).tolist()

    def summary(self) -> str:
        verdict = "pass" if self.passed else "fail"
        return f"root-check {verdict}: {int(self.column_ok.sum())}/{self.checked} systematic columns have a root check"


def verify_root_check(code: LinearCode, respect_puncturing: bool = True) -> RootCheckReport:
    """Does every systematic column own a check whose other (transmitted) bits sit on other fadings?"""
    fading = code.col_fading
    sent = np.ones(code.n_pre, dtype=bool)
    if respect_puncturing:
        sent[list(code.puncture_cols)] = False
    ok = np.zeros(code.k, dtype=bool)
    for j in range(code.k):
        f = fading[j]
        for r in code.h.col_support[j]:
            if all(c == j or not sent[c] or fading[c] != f for c in code.h.row_support[r]):
                ok[j] = True
                break
    return RootCheckReport(bool(ok.all()), ok, code.k)
