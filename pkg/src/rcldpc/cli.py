"""Command-line front end: ``rcldpc construct|analyze|fer|outage|export``.

Settings come from an optional JSON config file; command-line flags override
it. Exit codes: 0 success, 1 invalid input, 2 I/O failure, 3 internal
invariant breach.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import platform
import sys
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import FER_CSV_COLUMNS, OUTAGE_CSV_COLUMNS, fer_sweep, outage_probability
from .channel import ChannelSpec
from .codec import LinearCode
from .codefile import load_code, save_code, sidecar_path
from .construction import construct, girth, verify_root_check
from .errors import ConfigError, NoCandidateCheck, RcldpcError
from .gf2 import rank, to_alist
from .scaffold import FAST, IRA_RC_THIRD, IRAA_RC_THIRD, KINDS, CodeFamily

WORKERS_ENV = "RCLDPC_WORKERS"

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


@dataclass
class RunConfig:
    family: str | None = None
    n: int | None = None
    f: int | str | None = None
    seed: int = 0
    degrees: list[int] | None = None
    repetitions: int = 3
    puncture: bool = True
    snr: list[float] = field(default_factory=list)
    min_frame_errors: int = 100
    max_frames: int = 1_000_000
    max_iter: int = 20
    workers: int | None = None
    master_seed: int = 0
    rate: float | None = None
    samples: int = 1_000_000
    code: str | None = None
    out: str | None = None
    manifest: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        return cls(**d)

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return int(self.workers)
        env = os.environ.get(WORKERS_ENV)
        if env is None:
            return 1
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None

    def family_spec(self) -> CodeFamily:
        if self.family is None or self.n is None:
            raise ConfigError("a code family needs both 'family' and 'n' (or pass a code file)")
        f = _parse_f(self.f) if self.f is not None else (3 if self.family in (IRA_RC_THIRD, IRAA_RC_THIRD) else 2)
        return CodeFamily(self.family, int(self.n), f, int(self.seed), self.degrees, int(self.repetitions))

    def check_sweep(self) -> None:
        if not self.snr:
            raise ConfigError("snr list is empty; give at least one Eb/N0 value in dB")
        if any(not math.isfinite(s) for s in self.snr):
            raise ConfigError("snr values must be finite")
        if self.min_frame_errors < 1 or self.max_frames < 1:
            raise ConfigError("min_frame_errors and max_frames must be >= 1")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be >= 1")
        if self.resolved_workers() < 1:
            raise ConfigError("workers must be >= 1")


def _parse_f(f):
    if isinstance(f, str):
        if f == FAST:
            return FAST
        try:
            return int(f)
        except ValueError:
            raise ConfigError(f"f must be an integer block count or {FAST!r}, got {f!r}") from None
    return f


# -- helpers --------------------------------------------------------------------


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _unpunctured(code: LinearCode) -> LinearCode:
    meta = dict(code.meta, punctured=False)
    return LinearCode(code.h, code.k, (), code.col_fading, code.blocks, code.stages, meta)


def _obtain_code(cfg: RunConfig) -> tuple[LinearCode, str]:
    """Code from ``cfg.code`` if given, else built from the family settings."""
    if cfg.code:
        path = Path(cfg.code)
        if not path.exists():
            raise FileNotFoundError(f"code file not found: {path}")
        code, source = load_code(path), str(path)
    else:
        code, source = construct(cfg.family_spec()), "inline"
    if not cfg.puncture and code.puncture_cols:
        code = _unpunctured(code)
    return code, source


def _channel_blocks(cfg: RunConfig, code: LinearCode) -> int | None:
    f = _parse_f(cfg.f) if cfg.f is not None else code.meta.get("f", code.blocks)
    if f == FAST:
        return None
    f = int(f)
    if f < 1:
        raise ConfigError("f must be >= 1")
    return f


def _degree_histogram(weights) -> str:
    hist = Counter(int(w) for w in weights)
    return " ".join(f"{d}:{hist[d]}" for d in sorted(hist))


def _report(code: LinearCode, out) -> None:
    h = code.h
    g = girth(h)
    print(f"family: {code.meta.get('family', 'external')}", file=out)
    print(f"size: {h.n_rows} x {h.n_cols}  k={code.k}  n_tx={code.n_tx}  rate={code.rate}", file=out)
    print(f"rank: {rank(h)}", file=out)
    print(f"girth: {'inf' if g == math.inf else int(g)}", file=out)
    print(verify_root_check(code).summary(), file=out)
    print(f"column degrees: {_degree_histogram(h.column_weights())}", file=out)
    print(f"row degrees: {_degree_histogram(h.row_weights())}", file=out)
    for lo, hi, label in code.meta.get("col_blocks", []):
        print(f"block {label}: columns {lo}..{hi - 1}", file=out)
    if code.puncture_cols:
        blocks = code.meta.get("puncture_blocks") or []
        extra = f" ({', '.join(blocks)})" if blocks else ""
        print(f"punctured: {len(code.puncture_cols)} columns{extra}", file=out)
    else:
        print("punctured: none", file=out)


def _write_manifest(path: Path, command: str, cfg: RunConfig, extra: dict) -> None:
    doc = {
        "command": command,
        "config": dataclasses.asdict(cfg),
        "seeds": {"construction": cfg.seed, "master": cfg.master_seed},
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "software": {"rcldpc": __version__, "python": platform.python_version(), "numpy": np.__version__},
    }
    doc.update(extra)
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _manifest_path(cfg: RunConfig, out: Path) -> Path:
    return Path(cfg.manifest) if cfg.manifest else out.with_suffix(".manifest.json")


# -- subcommands ----------------------------------------------------------------


def cmd_construct(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    fam = cfg.family_spec()
    if not cfg.out:
        raise ConfigError("construct needs an output path (--out)")
    code = construct(fam)
    if not cfg.puncture and code.puncture_cols:
        code = _unpunctured(code)
    alist, side = save_code(code, cfg.out)
    _report(code, out)
    print(f"wrote {alist} and {side}", file=out)
    return EXIT_OK


def cmd_export(cfg: RunConfig, what: str = "h", out=None) -> int:
    out = out or sys.stdout
    if not cfg.out:
        raise ConfigError("export needs an output path (--out)")
    code, _ = _obtain_code(cfg)
    dest = Path(cfg.out)
    if what == "h":
        save_code(code, dest)
    elif what == "g":
        dest.write_text(to_alist(code.generator))
    elif what == "dense":
        rows = code.h.to_dense()
        dest.write_text("".join("".join("01"[b] for b in row) + "\n" for row in rows))
    else:
        raise ConfigError(f"unknown export format {what!r}; use h, g or dense")
    print(f"wrote {dest}", file=out)
    return EXIT_OK


def cmd_analyze(path: str, out=None) -> int:
    out = out or sys.stdout
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"code file not found: {p}")
    code = load_code(p)
    if not sidecar_path(p).exists():
        print("no sidecar found; columns reordered to systematic form", file=out)
    _report(code, out)
    return EXIT_OK


def cmd_fer(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    cfg.check_sweep()
    if not cfg.out:
        raise ConfigError("fer needs a CSV output path (--out)")
    code, source = _obtain_code(cfg)
    blocks = _channel_blocks(cfg, code)
    rate = float(code.rate)
    specs = [ChannelSpec(float(s), rate, blocks) for s in cfg.snr]
    csv_path = Path(cfg.out)
    with csv_path.open("w", newline="") as fh:
        fh.write(",".join(FER_CSV_COLUMNS) + "\n")
        fh.flush()

        def flush(pt):
            fh.write(",".join(str(v) for v in pt.csv_row()) + "\n")
            fh.flush()
            print(f"Eb/N0 {pt.eb_n0_db:g} dB: FER {pt.fer:.4g} ({pt.frame_errors}/{pt.frames})", file=out)

        fer_sweep(
            code,
            specs,
            min_frame_errors=cfg.min_frame_errors,
            max_frames=cfg.max_frames,
            max_iter=cfg.max_iter,
            master_seed=cfg.master_seed,
            workers=cfg.resolved_workers(),
            on_point=flush,
        )
    _write_manifest(
        _manifest_path(cfg, csv_path),
        "fer",
        cfg,
        {
            "code": {"source": source, "alist_sha256": _sha256_text(to_alist(code.h)), "meta": code.meta},
            "channel": {"blocks": "fast" if blocks is None else blocks, "rate": str(code.rate)},
            "stop_rule": {"min_frame_errors": cfg.min_frame_errors, "max_frames": cfg.max_frames},
            "decoder": {"algorithm": "sum-product, flooding", "max_iter": cfg.max_iter},
            "outputs": {"csv": str(csv_path), "csv_sha256": _sha256_file(csv_path)},
        },
    )
    return EXIT_OK


def cmd_outage(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    if not cfg.snr:
        raise ConfigError("snr list is empty; give at least one Eb/N0 value in dB")
    if not cfg.out:
        raise ConfigError("outage needs a CSV output path (--out)")
    if cfg.f is None:
        raise ConfigError("outage needs the number of fading blocks (--f)")
    f = _parse_f(cfg.f)
    if f == FAST or int(f) < 1:
        raise ConfigError("outage needs a finite block count f >= 1")
    if cfg.rate is None or not (0 < cfg.rate):
        raise ConfigError("outage needs a positive rate (--rate)")
    if cfg.samples < 1:
        raise ConfigError("samples must be >= 1")
    csv_path = Path(cfg.out)
    with csv_path.open("w", newline="") as fh:
        fh.write(",".join(OUTAGE_CSV_COLUMNS) + "\n")
        for i, s in enumerate(cfg.snr):
            pt = outage_probability(int(f), float(cfg.rate), float(s), int(cfg.samples), seed=[cfg.master_seed, i])
            fh.write(",".join(str(v) for v in pt.csv_row()) + "\n")
            fh.flush()
            print(f"Eb/N0 {pt.eb_n0_db:g} dB: P_out {pt.estimate:.4g}", file=out)
    _write_manifest(
        _manifest_path(cfg, csv_path),
        "outage",
        cfg,
        {"outputs": {"csv": str(csv_path), "csv_sha256": _sha256_file(csv_path)}},
    )
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_family(p):
    p.add_argument("--family", choices=KINDS)
    p.add_argument("--n", type=int, help="pre-puncturing code length")
    p.add_argument("--f", help="fading blocks (integer) or 'fast'")
    p.add_argument("--seed", type=int, help="construction seed")
    p.add_argument("--degrees", type=int, nargs="+", help="systematic column degree(s)")
    p.add_argument("--repetitions", type=int, help="RA repetition factor")
    p.add_argument("--no-puncture", dest="puncture", action="store_const", const=False, help="transmit punctured parity too")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="rcldpc", description="Root-Check LDPC construction and block-fading simulation")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--out", help="output path")

    p = sub.add_parser("construct", help="build a code and write alist + sidecar")
    common(p)
    _add_family(p)

    p = sub.add_parser("export", help="write H (alist), G (alist) or H as dense text")
    common(p)
    _add_family(p)
    p.add_argument("--code", help="existing alist to convert instead of building")
    p.add_argument("--format", dest="what", choices=("h", "g", "dense"), default="h")

    p = sub.add_parser("analyze", help="report girth, rank and Root-Check status of a code file")
    p.add_argument("code_file")

    p = sub.add_parser("fer", help="Monte-Carlo FER sweep")
    common(p)
    _add_family(p)
    p.add_argument("--code", help="alist code file (sidecar read if present)")
    p.add_argument("--snr", type=float, nargs="+", help="Eb/N0 points in dB")
    p.add_argument("--min-frame-errors", type=int)
    p.add_argument("--max-frames", type=int)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--workers", type=int, help=f"worker processes (default from {WORKERS_ENV}, else 1)")
    p.add_argument("--master-seed", type=int)
    p.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")

    p = sub.add_parser("outage", help="Monte-Carlo Gaussian-input outage probability")
    common(p)
    p.add_argument("--f", help="fading blocks")
    p.add_argument("--rate", type=float)
    p.add_argument("--snr", type=float, nargs="+")
    p.add_argument("--samples", type=int)
    p.add_argument("--master-seed", type=int)
    p.add_argument("--manifest")
    return ap


_NOT_CONFIG = {"command", "config", "code_file", "what"}


def _load_config(args) -> RunConfig:
    base: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            base = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(base, dict):
            raise ConfigError(f"{path}: top level must be an object")
    for key, value in vars(args).items():
        if key not in _NOT_CONFIG and value is not None:
            base[key] = value
    return RunConfig.from_dict(base)


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.command == "analyze":
            return cmd_analyze(args.code_file)
        cfg = _load_config(args)
        if args.command == "construct":
            return cmd_construct(cfg)
        if args.command == "export":
            return cmd_export(cfg, args.what)
        if args.command == "fer":
            return cmd_fer(cfg)
        return cmd_outage(cfg)
    except (NoCandidateCheck, AssertionError) as exc:
        print(f"error: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (RcldpcError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
