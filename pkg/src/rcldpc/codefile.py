"""Code files: H as alist plus a JSON sidecar carrying everything else.

The sidecar sits next to the alist with a ``.json`` suffix and records the
family, seed, information length, puncture pattern, per-column fading map
and accumulator stages, so a saved code encodes and simulates exactly like
the freshly built one.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .codec import EncodeStage, LinearCode, systematic_form
from .errors import ParseError
from .gf2 import from_alist, to_alist

SIDECAR_FORMAT = "rcldpc-code/1"


def sidecar_path(alist_path) -> Path:
    return Path(alist_path).with_suffix(".json")


def _ranges(seq) -> list[list[int]]:
    """Compress a sequence of ints into ``[start, stop)`` runs of consecutive values."""
    out: list[list[int]] = []
    for v in map(int, seq):
        if out and out[-1][1] == v:
            out[-1][1] = v + 1
        else:
            out.append([v, v + 1])
    return out


def _expand(runs) -> tuple[int, ...]:
    return tuple(v for a, b in runs for v in range(int(a), int(b)))


def sidecar(code: LinearCode) -> dict:
    return {
        "format": SIDECAR_FORMAT,
        "meta": code.meta,
        "k": code.k,
        "n_pre": code.n_pre,
        "n_tx": code.n_tx,
        "m": code.m,
        "rate": str(code.rate),
        "blocks": code.blocks,
        "puncture_cols": _ranges(code.puncture_cols),
        "col_fading": [int(f) for f in code.col_fading],
        "stages": [{"rows": _ranges(st.rows), "cols": _ranges(st.cols), "lag": st.lag} for st in code.stages],
    }


def save_code(code: LinearCode, path) -> tuple[Path, Path]:
    path = Path(path)
    text = to_alist(code.h)
    path.write_text(text)
    side = sidecar_path(path)
    side.write_text(json.dumps(sidecar(code), indent=1, sort_keys=True) + "\n")
    return path, side


def alist_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_code(path) -> LinearCode:
    """Read an alist (and its sidecar if present).

    Without a sidecar the matrix is brought to systematic form by column
    reordering and treated as a single-block code.
    """
    path = Path(path)
    h = from_alist(path.read_text())
    side = sidecar_path(path)
    if not side.exists():
        h_sys, order, k = systematic_form(h)
        return LinearCode(h_sys, k, meta={"family": "external", "column_order": order.tolist()})
    try:
        d = json.loads(side.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"sidecar {side.name}: {exc.msg}", exc.lineno) from None
    if d.get("format") != SIDECAR_FORMAT:
        raise ParseError(f"sidecar {side.name}: unknown format {d.get('format')!r}")
    if d["n_pre"] != h.n_cols or d["m"] != h.n_rows:
        raise ParseError(f"sidecar {side.name} describes a {d['m']}x{d['n_pre']} code, alist holds {h.n_rows}x{h.n_cols}")
    stages = tuple(EncodeStage(_expand(s["rows"]), _expand(s["cols"]), s["lag"]) for s in d["stages"])
    try:
        return LinearCode(
            h,
            int(d["k"]),
            _expand(d["puncture_cols"]),
            np.asarray(d["col_fading"], dtype=np.int64),
            int(d["blocks"]),
            stages,
            dict(d.get("meta", {})),
        )
    except ValueError as exc:
        raise ParseError(f"sidecar {side.name} does not match the alist: {exc}") from None
