import json

import numpy as np
import pytest

from sblp import codes, simulator
from sblp.cli import main
from sblp.gf2 import BinaryMatrix, syndrome

SWEEP = ["sweep", "--code", "b1", "--decoder", "sb-ms,combined", "--p-list", "0.07,0.09", "--seed", "3",
         "--target-errors", "10", "--max-trials", "600", "--block-size", "100"]


def _run_sweep(tmp_path, name, *extra):
    out = tmp_path / name / "out.csv"
    assert main(SWEEP + ["--out", str(out), *extra]) == 0
    return out


def test_code_build_hgp_ring(tmp_path, capsys):
    assert main(["code", "build", "--construction", "hgp-ring", "--size", "3", "--name", "ring",
                 "--out", str(tmp_path)]) == 0
    assert "n = 18, k = 2" in capsys.readouterr().out
    manifest = json.loads((tmp_path / "ring.json").read_text())
    assert (manifest["n"], manifest["k"]) == (18, 2)
    assert codes.load_code(str(tmp_path / "ring.json")).k == 2


def test_code_build_gb(tmp_path, capsys):
    assert main(["code", "build", "--construction", "gb", "--a", "0", "--b", "0", "--ell", "3",
                 "--out", str(tmp_path)]) == 0
    assert "n = 6" in capsys.readouterr().out


def test_code_build_rejects_non_commuting_pair(tmp_path, capsys):
    codes.save_alist(codes.HAMMING_7, tmp_path / "hx.alist")
    codes.save_alist(BinaryMatrix(np.eye(3, 7, dtype=np.uint8)), tmp_path / "hz.alist")
    rc = main(["code", "build", "--hx", str(tmp_path / "hx.alist"), "--hz", str(tmp_path / "hz.alist"),
               "--out", str(tmp_path)])
    assert rc == 1
    assert "H_X row 0 and H_Z row 0" in capsys.readouterr().err


@pytest.mark.parametrize("kind, ms, lp", [("sb-ms", 0, 0), ("sb-lp", 0, 0), ("combined", 1, 0)])
def test_decode_zero_syndrome(tmp_path, capsys, kind, ms, lp):
    f = tmp_path / "s.txt"
    f.write_text("000\n")
    assert main(["decode", "--code", "steane", "--decoder", kind, "--syndrome-file", str(f)]) == 0
    out = capsys.readouterr().out
    assert "e_hat: 0000000" in out
    assert f"converged: true  ms_iterations: {ms}  lp_iterations: {lp}" in out


def test_decode_error_file_with_trace(tmp_path, capsys):
    f = tmp_path / "e.txt"
    f.write_text("0000100\n0010000\n")
    assert main(["decode", "--code", "steane", "--decoder", "sb-ms", "--error-file", str(f), "--trace",
                 "--p", "0.01"]) == 0
    out = capsys.readouterr().out
    e_hats = [line.split()[1] for line in out.splitlines() if line.startswith("e_hat")]
    code = codes.steane()
    for line, e_hat in zip(["0000100", "0010000"], e_hats):
        e = np.array([int(c) for c in line], dtype=np.uint8)
        assert np.array_equal(syndrome(np.array([int(c) for c in e_hat]), code.hz), syndrome(e, code.hz))
    assert out.count("classification: success") == 2
    assert out.count("trace:") == 2


def test_decode_errors_exit_one(tmp_path, capsys):
    f = tmp_path / "s.txt"
    f.write_text("0000\n")
    assert main(["decode", "--code", "steane", "--syndrome-file", str(f)]) == 1
    assert "length 4, expected 3" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["decode", "--code", "steane", "--decoder", "bp", "--syndrome-file", str(f)])
    assert info.value.code == 1
    assert main(["decode", "--code", "nonexistent", "--syndrome-file", str(f)]) == 1


def test_sweep_deterministic_across_runs_and_workers(tmp_path, monkeypatch):
    a = _run_sweep(tmp_path, "a")
    b = _run_sweep(tmp_path, "b")
    monkeypatch.setenv("SBLP_WORKERS", "3")
    c = _run_sweep(tmp_path, "c")
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == ",".join(simulator.CSV_COLUMNS)
    assert len(lines) == 5
    manifest = json.loads(a.with_suffix(".json").read_text())
    assert manifest["code"]["k"] == 24 and manifest["seed"] == 3
    assert not (a.parent / "out.csv.checkpoint.json").exists()


def test_sweep_stops_at_target(tmp_path):
    out = _run_sweep(tmp_path, "t")
    rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
    ms_high = next(r for r in rows if r[0] == "sb-ms" and r[1] == "0.09")
    assert int(ms_high[3]) >= 10 and int(ms_high[2]) < 600


def test_paper_config_echoes_losslessly(tmp_path, capsys):
    cfg = {"code": "b1", "decoders": ["sb-ms", "sb-lp", "combined"], "p_list": [0.04, 0.06, 0.08],
           "alpha": 0.75, "alpha1": 0.9, "ims_max": None, "ilp_max": None, "seed": 1,
           "target_errors": 10000, "max_trials": 1000000}
    path = tmp_path / "paper.json"
    path.write_text(json.dumps(cfg))
    assert main(["sweep", "--config", str(path), "--dry-run"]) == 0
    echoed = json.loads(capsys.readouterr().out)
    assert {k: echoed[k] for k in cfg} == cfg


def test_config_file_round_trip_through_manifest(tmp_path):
    out = tmp_path / "r" / "x.csv"
    cfg = {"code": "steane", "decoders": ["sb-ms"], "p_list": [0.02], "alpha": 0.75, "seed": 5,
           "target_errors": 5, "max_trials": 200, "out": str(out)}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    assert main(["sweep", "--config", str(path)]) == 0
    echoed = json.loads(out.with_suffix(".json").read_text())["config"]
    assert {k: echoed[k] for k in cfg} == cfg
    # re-running from the echoed config reproduces the same CSV
    first = out.read_bytes()
    path.write_text(json.dumps(echoed))
    assert main(["sweep", "--config", str(path)]) == 0
    assert out.read_bytes() == first


def test_bad_config_exit_one(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"codee": "b1"}')
    assert main(["sweep", "--config", str(path)]) == 1
    assert main(["sweep", "--code", "steane", "--decoder", "bp", "--out", str(tmp_path / "o.csv")]) == 1


def test_runtime_error_exit_two(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("worker died")

    monkeypatch.setattr(simulator, "run_point", boom)
    assert main(["sweep", "--code", "steane", "--out", str(tmp_path / "o.csv")]) == 2


def test_interrupted_sweep_resumes_identically(tmp_path, monkeypatch):
    full = _run_sweep(tmp_path, "full")
    real = simulator.run_point
    calls = {"n": 0}

    def flaky(*a, **k):
        calls["n"] += 1
        if calls["n"] == 3:
            raise KeyboardInterrupt
        return real(*a, **k)

    out = tmp_path / "part" / "out.csv"
    monkeypatch.setattr(simulator, "run_point", flaky)
    assert main(SWEEP + ["--out", str(out)]) == 2
    ckpt = out.parent / "out.csv.checkpoint.json"
    assert ckpt.exists()
    assert len(out.read_text().splitlines()) == 3  # header + two finished points
    monkeypatch.setattr(simulator, "run_point", real)
    assert main(SWEEP + ["--out", str(out), "--resume"]) == 0
    assert out.read_bytes() == full.read_bytes()
    assert not ckpt.exists()


def test_trace_file_written(tmp_path):
    out = tmp_path / "tr" / "t.csv"
    assert main(["sweep", "--code", "steane", "--decoder", "sb-ms", "--p", "0.05", "--max-trials", "20",
                 "--out", str(out), "--trace"]) == 0
    rows = [json.loads(line) for line in (out.parent / "t.traces.jsonl").read_text().splitlines()]
    assert len(rows) == 20 and {"trial", "unmatched", "classification"} <= set(rows[0])
