import csv
import io
import json
import subprocess
import sys

import pytest

from unbiased_ea import cli, verify
from unbiased_ea.errors import ConfigParse, SchemaViolation


def write_cfg(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_zero_trials_rejected(tmp_path):
    cfg = {"cmd": "batch", "n": 10, "trials": 0, "distribution": {"kind": "point", "k": 1}}
    with pytest.raises(SchemaViolation):
        cli.run_experiment(cfg)
    assert cli.main([write_cfg(tmp_path, cfg)]) == cli.EXIT_CONFIG


def test_bad_json_and_unknown_command(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigParse):
        cli.load_config(str(bad))
    assert cli.main([str(bad)]) == cli.EXIT_CONFIG
    assert cli.main([write_cfg(tmp_path, {"cmd": "dance"})]) == cli.EXIT_CONFIG
    # library validation errors surface as configuration errors
    cfg = {"cmd": "drift", "n": 10, "distribution": {"kind": "sbm", "c": -1.0}}
    assert cli.main([write_cfg(tmp_path, cfg)]) == cli.EXIT_CONFIG


def test_drift_csv(tmp_path):
    out = tmp_path / "drift.csv"
    cfg = {"cmd": "drift", "n": 1000, "distribution": {"kind": "point", "k": 1}, "out": str(out)}
    assert cli.main([write_cfg(tmp_path, cfg)]) == 0
    rows = read_csv(out)
    assert list(rows[0]) == list(cli.DRIFT_COLUMNS)
    assert float(rows[5]["h"]) == pytest.approx(0.005, rel=1e-12)
    assert float(rows[21]["h"]) == 1000
    assert len(rows) == 501


def test_oracle_no_domination(tmp_path):
    out = tmp_path / "o.json"
    cli.run_experiment({"cmd": "oracle", "scenario": "no_domination", "n": 20, "out": str(out)})
    doc = json.loads(out.read_text())
    assert doc["E_T1"] == pytest.approx(8000, abs=1e-9)
    assert doc["E_T2"] == pytest.approx(545.45, abs=0.01)
    assert len(doc["config_hash"]) == 64 and doc["master_seed"] == 0
    assert doc["scenario"] == "no_domination" and len(doc["expected_time_by_state"]) == 21


def test_oracle_level_with_start(tmp_path):
    out = tmp_path / "o.json"
    cli.run_experiment(
        {"cmd": "oracle", "scenario": "level", "n": 4, "objective": {"kind": "onemax"},
         "distribution": {"kind": "point", "k": 1}, "start": "0000", "out": str(out)}
    )
    doc = json.loads(out.read_text())
    assert doc["expected_time_from_start"] == pytest.approx(25 / 3, abs=1e-12)


def test_oracle_unreachable_states_are_null(tmp_path):
    out = tmp_path / "o.json"
    cli.run_experiment(
        {"cmd": "oracle", "scenario": "level", "n": 4, "distribution": {"kind": "point", "k": 4},
         "start": "0000", "out": str(out)}
    )
    doc = json.loads(out.read_text())
    assert doc["expected_time_by_state"][1] is None and doc["expected_time_from_start"] == 1


def test_bound_json(tmp_path):
    out = tmp_path / "b.json"
    cli.run_experiment(
        {"cmd": "bound", "n": 1000, "distribution": {"kind": "point", "k": 1}, "master_seed": 5, "out": str(out)}
    )
    doc = json.loads(out.read_text())
    assert doc["sum_inverse_h"] == pytest.approx(3597.74, abs=0.01)
    assert doc["headline"] == pytest.approx(6907.755, abs=1e-3)
    assert doc["master_seed"] == 5
    assert {"b_r", "corrected_lower_bound", "config_hash"} <= set(doc)


def test_batch_and_run(tmp_path):
    out = tmp_path / "runs.csv"
    cfg = {"cmd": "batch", "n": 20, "trials": 5, "master_seed": 3, "distribution": {"kind": "sbm", "c": 1.0},
           "objective": {"kind": "onemax"}, "out": str(out)}
    cli.run_experiment(cfg)
    rows = read_csv(out)
    assert [r["trial"] for r in rows] == ["0", "1", "2", "3", "4"]
    assert all(int(r["evaluations"]) == int(r["iterations"]) + 1 for r in rows)

    single = tmp_path / "one.csv"
    cli.run_experiment({**cfg, "cmd": "run", "record_trace": True, "out": str(single)})
    assert read_csv(single)[0]["seed"] == "3"
    trace = read_csv(tmp_path / "one.csv.trace.csv")
    assert trace[0]["t"] == "0" and trace[-1]["potential"] == "0"


def test_start_forms(tmp_path):
    out = tmp_path / "r.csv"
    base = {"cmd": "run", "n": 6, "distribution": {"kind": "point", "k": 1}, "out": str(out)}
    cli.run_experiment({**base, "start": "111111"})
    assert read_csv(out)[0]["iterations"] == "0"
    cli.run_experiment({**base, "start": {"distance": 0}})
    assert read_csv(out)[0]["iterations"] == "0"
    with pytest.raises(SchemaViolation):
        cli.run_experiment({**base, "start": "11"})


def test_sweep_csv(tmp_path):
    out = tmp_path / "s.csv"
    cli.run_experiment(
        {"cmd": "sweep", "ns": [16, 32], "trials": 20, "master_seed": 1,
         "distributions": [{"kind": "sbm", "c": [1.0, 2.0]}, {"kind": "point", "k": 1}],
         "objective": {"kind": "onemax"}, "out": str(out)}
    )
    rows = read_csv(out)
    assert list(rows[0]) == list(cli.SWEEP_COLUMNS)
    assert [(r["n"], r["dist_kind"], r["dist_param"]) for r in rows] == [
        ("16", "sbm", "1"), ("16", "sbm", "2"), ("16", "point", "1"),
        ("32", "sbm", "1"), ("32", "sbm", "2"), ("32", "point", "1"),
    ]
    with pytest.raises(SchemaViolation):
        cli.run_experiment({"cmd": "sweep", "ns": [16], "distributions": [{"kind": "custom"}], "trials": 5})


def test_audit_json(tmp_path):
    out = tmp_path / "a.json"
    cli.run_experiment({"cmd": "audit", "n": 300, "distribution": {"kind": "point", "k": 1}, "out": str(out)})
    doc = json.loads(out.read_text())
    assert [r["d"] for r in doc["rows"]] == list(range(1, 10))


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    failing = [verify.CriterionResult(1, "stub", False)]
    monkeypatch.setattr(verify, "verify_suite", lambda level, workers=1: failing)
    out = tmp_path / "v.json"
    assert cli.main([write_cfg(tmp_path, {"cmd": "verify", "out": str(out)})]) == cli.EXIT_VERIFY
    assert json.loads(out.read_text())["passed"] is False


def test_config_hash_is_canonical():
    assert cli.config_hash({"a": 1, "b": 2}) == cli.config_hash({"b": 2, "a": 1})
    assert cli.config_hash({"a": 1}) != cli.config_hash({"a": 2})


def test_module_entry_point(tmp_path):
    cfg = write_cfg(tmp_path, {"cmd": "drift", "n": 10, "distribution": {"kind": "point", "k": 1}})
    proc = subprocess.run([sys.executable, "-m", "unbiased_ea", cfg], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "d,h_tilde,h,inv_h_cumsum"
