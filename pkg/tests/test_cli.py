import json
import os

import pytest

from bplab.cli import main
from bplab.records import CSV_HEADER


def _run(args):
    return main(args)


def test_missing_seed_is_config_error(capsys):
    code = _run(["plane-stats", "--event", "not-is", "--r", "2",
                 "--theta", "5", "--a", "2", "--n", "30", "--trials", "5"])
    assert code == 2


def test_unknown_command_is_config_error():
    assert _run(["no-such-command", "--seed", "1"]) == 2


def test_plane_stats_stdout_csv(capsys):
    code = _run(["plane-stats", "--event", "not-is", "--r", "2",
                 "--theta", "5", "--a", "2", "--n", "30", "--trials", "20",
                 "--seed", "4"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == CSV_HEADER
    assert len(out.splitlines()) == 2


def test_rerun_is_byte_identical(tmp_path):
    args = ["plane-stats", "--event", "not-is", "--r", "2", "--theta", "5",
            "--a", "2", "--n", "30", "--trials", "20", "--seed", "4"]
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    assert _run(args + ["--output", str(p1)]) == 0
    assert _run(args + ["--output", str(p2)]) == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_json_and_csv_agree_field_for_field(tmp_path):
    args = ["plane-stats", "--event", "is", "--r", "1", "--theta", "5",
            "--a", "2", "--n", "20", "--trials", "15", "--seed", "6"]
    csv_path = tmp_path / "out.csv"
    json_path = tmp_path / "out.json"
    assert _run(args + ["--output", str(csv_path)]) == 0
    assert _run(args + ["--output", str(json_path),
                        "--format", "json"]) == 0
    header = CSV_HEADER.split(",")
    lines = csv_path.read_text().splitlines()
    row = dict(zip(header, lines[1].split(",")))
    (obj,) = json.loads(json_path.read_text())
    for key in header:
        want = obj[key]
        got = row[key]
        if want is None:
            assert got == ""
        elif isinstance(want, float):
            assert float(got) == want
        else:
            assert got == str(want)


def test_config_file_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("event=not-is\nr=2\ntheta=5\na=2\nn=30\ntrials=20\n"
                   "seed=4\n")
    code = _run(["plane-stats", "--config", str(cfg)])
    assert code == 0
    base = capsys.readouterr().out
    code = _run(["plane-stats", "--config", str(cfg), "--seed", "9"])
    assert code == 0
    overridden = capsys.readouterr().out
    assert base != overridden
    assert ",4\n" in base or base.rstrip().endswith(",4")
    assert overridden.rstrip().endswith(",9")


def test_config_file_errors(tmp_path):
    assert _run(["plane-stats", "--config", str(tmp_path / "missing.cfg"),
                 "--seed", "1"]) == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("just-some-text\n")
    assert _run(["plane-stats", "--config", str(bad), "--seed", "1"]) == 2


def test_output_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("BPLAB_OUTPUT_DIR", str(tmp_path))
    args = ["plane-stats", "--event", "is", "--r", "1", "--theta", "5",
            "--a", "2", "--n", "10", "--trials", "5", "--seed", "2",
            "--output", "rel.csv"]
    assert _run(args) == 0
    assert (tmp_path / "rel.csv").exists()


def test_phi_curve_record_count(tmp_path):
    out = tmp_path / "phi.csv"
    code = _run(["phi-curve", "--theta", "3", "--a", "0.5,1,2", "--L", "12",
                 "--trials", "10", "--seed", "1", "--output", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 6  # two boundary brackets per a value


def test_density_and_phase_curve(tmp_path):
    out = tmp_path / "d.csv"
    code = _run(["density", "--theta", "4", "--a", "1.0", "--n", "40",
                 "--L", "8", "--trials", "10", "--plane-trials", "100",
                 "--seed", "3", "--output", str(out)])
    assert code == 0
    code = _run(["phase-curve", "--theta", "4", "--a-grid", "0.5,1.0",
                 "--n", "40", "--L", "8", "--trials", "5",
                 "--plane-trials", "100", "--seed", "3",
                 "--output", str(out)])
    assert code == 0
    assert len(out.read_text().splitlines()) == 3


def test_sandwich_check_exit_code(tmp_path):
    out = tmp_path / "s.csv"
    code = _run(["sandwich-check", "--theta", "4", "--a", "1.5", "--n", "8",
                 "--L", "4", "--count", "5", "--seed", "1",
                 "--output", str(out)])
    assert code == 0
    line = out.read_text().splitlines()[1]
    assert ",5,5," in line  # five instances, five passes


def test_hetero_run_dump(tmp_path, capsys):
    dump = tmp_path / "snap.txt"
    code = _run(["hetero-run", "--variant", "zeta-poisson", "--a", "1.0",
                 "--theta", "3", "--L", "10", "--seed", "2",
                 "--dump", str(dump)])
    assert code == 0
    text = dump.read_text()
    assert len(text.splitlines()) == 10
    assert "clusters=" in capsys.readouterr().out


def test_ac_scan_cli(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code = _run(["ac-scan", "--ell", "2", "--eps-list", "0.001",
                 "--a-grid", "0.2,3.0", "--L", "10", "--trials", "10",
                 "--seed", "1", "--output", str(out)])
    assert code == 0
    assert "crossing=" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 3


def test_rate_fit_cli(capsys):
    code = _run(["rate-fit", "--event", "not-is", "--r", "3", "--theta", "5",
                 "--a", "2", "--n-grid", "20,40,80", "--trials", "300",
                 "--seed", "1"])
    assert code == 0
    assert "exponent=" in capsys.readouterr().out


def test_validate_quick(capsys):
    assert _run(["validate", "--quick", "--seed", "1"]) == 0
    assert "validate: ok" in capsys.readouterr().out
