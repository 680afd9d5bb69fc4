import filecmp
import subprocess
import sys

import pytest

from mecsim.cli import main
from mecsim.scenario import bundled_scenario_path


def run_cli(*args):
    return main([str(a) for a in args])


def test_run_bundled_by_name(tmp_path, capsys):
    assert run_cli("run", "paper-walk", "--out", tmp_path) == 0
    assert "1 handover(s), 1/1 migration(s) completed" in capsys.readouterr().out
    assert (tmp_path / "trace.tsv").exists()


def test_run_twice_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli("run", bundled_scenario_path("paper-walk"), "--out", a)
    run_cli("run", bundled_scenario_path("paper-walk"), "--out", b)
    cmp = filecmp.dircmp(a, b)
    assert not cmp.left_only and not cmp.right_only
    _, mismatch, errors = filecmp.cmpfiles(a, b, cmp.common_files, shallow=False)
    assert mismatch == [] and errors == []


def test_seed_flag_overrides(tmp_path):
    run_cli("run", "paper-walk", "--out", tmp_path / "a", "--seed", "1")
    run_cli("run", "paper-walk", "--out", tmp_path / "b", "--seed", "2")
    assert (tmp_path / "a" / "migrations.csv").read_text() != (tmp_path / "b" / "migrations.csv").read_text()


def test_validation_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("duration_s: 10\nbase_stations: []\nmec_hosts: []\nue: {waypoints: []}\n")
    assert run_cli("run", bad, "--out", tmp_path / "o") != 0
    err = capsys.readouterr().err
    assert f"{bad}:2:" in err and "base station" in err


def test_missing_scenario(tmp_path, capsys):
    assert run_cli("run", tmp_path / "nope.yaml", "--out", tmp_path / "o") != 0


def test_bad_seed(tmp_path):
    assert run_cli("run", "paper-walk", "--out", tmp_path, "--seed", "-4") != 0


def test_summarize(tmp_path, capsys):
    run_cli("run", "paper-walk", "--out", tmp_path)
    capsys.readouterr()
    assert run_cli("summarize", tmp_path) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split() == ["label", "n", "min", "max", "mean", "p95"]
    labels = [ln.split()[0] for ln in lines[1:]]
    assert {"migration_latency", "e2e_latency", "downtime"} <= set(labels)


def test_summarize_empty_migrations(tmp_path, capsys):
    run_cli("run", "ping-pong", "--out", tmp_path)
    capsys.readouterr()
    run_cli("summarize", tmp_path)
    row = next(ln for ln in capsys.readouterr().out.splitlines() if ln.startswith("migration_latency"))
    assert row.split() == ["migration_latency", "0", "-", "-", "-", "-"]


def test_summarize_rejects_own_output(tmp_path, capsys):
    run_cli("run", "paper-walk", "--out", tmp_path)
    capsys.readouterr()
    run_cli("summarize", tmp_path)
    printed = tmp_path / "printed"
    printed.mkdir()
    (printed / "summary.csv").write_text(capsys.readouterr().out)
    assert run_cli("summarize", printed) != 0
    assert run_cli("summarize", printed / "summary.csv") != 0


def test_summarize_missing_dir(tmp_path):
    assert run_cli("summarize", tmp_path / "absent") != 0


def test_replay(tmp_path, capsys):
    run_cli("run", "paper-walk", "--out", tmp_path)
    capsys.readouterr()
    assert run_cli("replay", tmp_path / "trace.tsv") == 0
    out = capsys.readouterr().out
    assert "MeasurementTick" in out and "last at t=120.000000" in out


def test_replay_rejects_non_trace(tmp_path):
    run_cli("run", "paper-walk", "--out", tmp_path)
    assert run_cli("replay", tmp_path / "summary.csv") != 0


def test_replay_detects_clock_regression(tmp_path):
    p = tmp_path / "t.tsv"
    p.write_text("2.000000\tClientPoll\t\n1.000000\tClientPoll\t\n")
    assert run_cli("replay", p) != 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "mecsim", "run", "ping-pong", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
