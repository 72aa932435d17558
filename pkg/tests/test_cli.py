import json

import numpy as np
import pytest

import rcldpc.cli as cli
from rcldpc.analysis import outage_single_block, read_fer_csv
from rcldpc.codec import encode
from rcldpc.codefile import load_code, save_code, sidecar_path
from rcldpc.construction import construct
from rcldpc.errors import ParseError
from rcldpc.scaffold import CodeFamily


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


# -- code files --------------------------------------------------------------------


def test_save_load_round_trip(tmp_path):
    code = construct(CodeFamily("IRAA_RC_third", 45, 3, seed=1))
    save_code(code, tmp_path / "c.alist")
    back = load_code(tmp_path / "c.alist")
    assert back.h == code.h and back.k == code.k
    assert back.puncture_cols == code.puncture_cols
    assert np.array_equal(back.col_fading, code.col_fading)
    assert back.stages == code.stages
    u = np.random.default_rng(0).integers(0, 2, (5, code.k)).astype(np.uint8)
    assert np.array_equal(encode(back, u), encode(code, u))


def test_load_without_sidecar(tmp_path):
    code = construct(CodeFamily("IRA_RC_half", 40, 2, seed=1))
    save_code(code, tmp_path / "c.alist")
    sidecar_path(tmp_path / "c.alist").unlink()
    back = load_code(tmp_path / "c.alist")
    assert back.k == code.k and back.meta["family"] == "external"


def test_sidecar_mismatch(tmp_path):
    save_code(construct(CodeFamily("IRA_RC_half", 40, 2, seed=1)), tmp_path / "a.alist")
    save_code(construct(CodeFamily("IRA_RC_half", 48, 2, seed=1)), tmp_path / "b.alist")
    sidecar_path(tmp_path / "b.alist").replace(sidecar_path(tmp_path / "a.alist"))
    with pytest.raises(ParseError):
        load_code(tmp_path / "a.alist")


# -- construct / analyze ---------------------------------------------------------------


def test_construct_report_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.alist", tmp_path / "b.alist"
    rc, out, _ = run(capsys, "construct", "--family", "IRA_RC_half", "--n", "1200", "--seed", "7", "--out", str(a))
    assert rc == 0
    assert "rank: 600" in out and "girth:" in out and "root-check pass" in out and "column degrees:" in out
    assert a.read_text().splitlines()[0].split() == ["1200", "600"]
    run(capsys, "construct", "--family", "IRA_RC_half", "--n", "1200", "--seed", "7", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_construct_invalid_n(tmp_path, capsys):
    rc, _, err = run(capsys, "construct", "--family", "IRA_RC_half", "--n", "1202", "--out", str(tmp_path / "x"))
    assert rc == 1
    assert "divisible by 4" in err


def test_bad_flag_is_validation_error(capsys):
    rc, _, err = run(capsys, "construct", "--family", "nope")
    assert rc == 1 and "error" in err


def test_analyze_third(tmp_path, capsys):
    p = tmp_path / "t.alist"
    run(capsys, "construct", "--family", "IRA_RC_third", "--n", "900", "--seed", "1", "--out", str(p))
    rc, out, _ = run(capsys, "analyze", str(p))
    assert rc == 0
    assert "girth:" in out and "root-check pass" in out and "block P3" in out


def test_analyze_baseline_reports_fail_with_zero_exit(tmp_path, capsys):
    p = tmp_path / "b.alist"
    run(capsys, "construct", "--family", "PEG_baseline", "--n", "400", "--out", str(p))
    rc, out, _ = run(capsys, "analyze", str(p))
    assert rc == 0 and "root-check fail" in out


def test_analyze_tampered_alist(tmp_path, capsys):
    p = tmp_path / "c.alist"
    run(capsys, "construct", "--family", "IRA_RC_half", "--n", "40", "--out", str(p))
    lines = p.read_text().splitlines()
    first = lines[4].split()
    first[1] = first[0]  # duplicate an entry in column 1
    lines[4] = " ".join(first)
    p.write_text("\n".join(lines) + "\n")
    rc, _, err = run(capsys, "analyze", str(p))
    assert rc == 1 and "line 5" in err


def test_analyze_missing_file(tmp_path, capsys):
    rc, _, err = run(capsys, "analyze", str(tmp_path / "none.alist"))
    assert rc == 2 and "not found" in err


def test_export_formats(tmp_path, capsys):
    for fmt in ("h", "g", "dense"):
        dest = tmp_path / f"x.{fmt}"
        rc, _, _ = run(capsys, "export", "--family", "IRA_RC_half", "--n", "40", "--format", fmt, "--out", str(dest))
        assert rc == 0 and dest.exists()
    assert len((tmp_path / "x.dense").read_text().splitlines()) == 20


# -- fer / outage ------------------------------------------------------------------


def fer_args(out, *extra):
    return ["fer", "--family", "IRA_RC_half", "--n", "36", "--snr", "2", "7", "12", "--min-frame-errors", "20",
            "--max-frames", "2000", "--out", str(out), *extra]


def test_fer_smoke(tmp_path, capsys):
    out = tmp_path / "r.csv"
    rc, _, _ = run(capsys, *fer_args(out))
    assert rc == 0
    pts = read_fer_csv(out.read_text())
    assert len(pts) == 3
    assert pts[0].fer > pts[1].fer > pts[2].fer
    man = json.loads(out.with_suffix(".manifest.json").read_text())
    assert man["seeds"] == {"construction": 0, "master": 0}
    assert man["stop_rule"] == {"min_frame_errors": 20, "max_frames": 2000}
    assert len(man["code"]["alist_sha256"]) == 64 and "created" in man


def test_fer_workers_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(capsys, *fer_args(a, "--workers", "1"))
    run(capsys, *fer_args(b, "--workers", "4"))
    assert a.read_bytes() == b.read_bytes()


def test_fer_env_workers(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    assert cli.RunConfig().resolved_workers() == 2
    monkeypatch.setenv(cli.WORKERS_ENV, "x")
    rc, _, err = run(capsys, *fer_args(tmp_path / "a.csv"))
    assert rc == 1 and cli.WORKERS_ENV in err


def test_fer_from_code_file_and_missing(tmp_path, capsys):
    p = tmp_path / "c.alist"
    run(capsys, "construct", "--family", "IRA_RC_half", "--n", "36", "--out", str(p))
    rc, _, _ = run(capsys, "fer", "--code", str(p), "--snr", "6", "--max-frames", "200", "--out", str(tmp_path / "r.csv"))
    assert rc == 0
    rc, _, _ = run(capsys, "fer", "--code", str(tmp_path / "gone.alist"), "--snr", "6", "--out", str(tmp_path / "r.csv"))
    assert rc == 2


def test_fer_partial_csv_on_interrupt(tmp_path, capsys, monkeypatch):
    real = cli.fer_sweep

    def dies_after_first(code, specs, **kw):
        real(code, specs[:1], **kw)
        raise KeyboardInterrupt

    monkeypatch.setattr(cli, "fer_sweep", dies_after_first)
    out = tmp_path / "p.csv"
    with pytest.raises(KeyboardInterrupt):
        cli.main(fer_args(out))
    assert len(out.read_text().splitlines()) == 2


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"family": "IRA_RC_half", "n": 36, "snr": [3.0], "max_frames": 100, "seed": 4}))
    out = tmp_path / "r.csv"
    rc, _, _ = run(capsys, "fer", "--config", str(cfg), "--seed", "5", "--out", str(out))
    assert rc == 0
    man = json.loads(out.with_suffix(".manifest.json").read_text())
    assert man["config"]["seed"] == 5 and man["config"]["snr"] == [3.0]
    cfg.write_text(json.dumps({"family": "IRA_RC_half", "n": 36, "bogus": 1}))
    rc, _, err = run(capsys, "fer", "--config", str(cfg), "--out", str(out))
    assert rc == 1 and "bogus" in err


def test_outage_command(tmp_path, capsys):
    out = tmp_path / "o.csv"
    rc, _, _ = run(capsys, "outage", "--f", "1", "--rate", "0.5", "--snr", "10", "-100", "--samples", "200000", "--out", str(out))
    assert rc == 0
    rows = out.read_text().splitlines()
    assert rows[0] == "eb_n0_db,samples,outages,p_out"
    p10 = float(rows[1].split(",")[3])
    assert p10 == pytest.approx(outage_single_block(0.5, 10.0), rel=0.05)
    assert float(rows[2].split(",")[3]) == 1.0
    first = out.read_bytes()
    run(capsys, "outage", "--f", "1", "--rate", "0.5", "--snr", "10", "-100", "--samples", "200000", "--out", str(out))
    assert out.read_bytes() == first
    rc, _, _ = run(capsys, "outage", "--rate", "0.5", "--snr", "10", "--out", str(out))
    assert rc == 1
