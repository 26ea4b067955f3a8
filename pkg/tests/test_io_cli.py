import csv
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qinference.cli import RunConfig, main
from qinference.errors import InputError
from qinference.io import dumps_operators, fmt17, load_operators, loads_operators, save_operators, to_csv
from qinference.linalg import outer
from qinference.report import AxiomReport

from .conftest import RIGHT, UP

def _checks(doc):
    return {c["check_id"]: c for c in doc["checks"]}


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (3, 3), elements=finite), arrays(np.float64, (3, 3), elements=finite))
def test_operator_json_round_trip_bit_exact(re, im):
    m = np.empty((3, 3), dtype=np.complex128)
    m.real, m.imag = re, im
    back = loads_operators(dumps_operators({"A": m}))["A"]
    assert back.real.tobytes() == m.real.tobytes() and back.imag.tobytes() == m.imag.tobytes()


def test_operator_file_errors(tmp_path):
    with pytest.raises(InputError):
        loads_operators('{"matrices": []}')
    with pytest.raises(InputError):
        loads_operators('{"dim": 2, "matrices": [{"label": "A", "re": [[1, 0, 0]], "im": [[0, 0, 0]]}]}')
    path = tmp_path / "ops.json"
    save_operators(path, {"P": np.eye(2)})
    assert list(load_operators(path)) == ["P"]


@settings(max_examples=200, deadline=None)
@given(finite)
def test_fmt17_round_trips(x):
    assert float(fmt17(x)) == x


def test_csv_format():
    text = to_csv(["a", "b", "c"], [[0.1, None, "x"], [1.0, 2, "y"]])
    assert text.splitlines() == ["a,b,c", "0.10000000000000001,,x", "1,2,y"]


def test_report_schema_and_skip():
    rep = AxiomReport("demo", seed=3)
    rep.observe("a", 1e-13, 1e-12, "anchor a")
    rep.skip("b", 1e-12, "anchor b", 4)
    rep.observe("c", float("nan"), 1e-12)
    d = _checks(json.loads(rep.to_json()))
    assert d["a"]["pass"] is True
    assert d["b"]["pass"] is None and d["b"]["skipped"] == 4
    assert d["c"]["pass"] is False
    assert not rep.passed
    assert [c.check_id for c in rep.failures()] == ["c"]
    assert rep.summary_lines()[1].startswith("[SKIP]")


def test_report_pass_iff_residual_within_tolerance():
    rep = AxiomReport("demo")
    rep.observe("x", 1e-12, 1e-12)
    assert rep.passed
    rep.observe("x", 1.0000001e-12, 1e-12)
    assert not rep.passed


def test_run_config_validation():
    with pytest.raises(InputError):
        RunConfig(dims=[1])
    with pytest.raises(InputError):
        RunConfig(trials=0)


@pytest.fixture
def ops_file(tmp_path):
    path = tmp_path / "ops.json"
    save_operators(path, {"P": np.diag([1.0, 0.0]), "R": outer(RIGHT), "U": outer(UP),
                          "mixed": np.eye(2) / 2})
    return path


def _run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_closure_single(ops_file, capsys):
    code, out, err = _run(["closure", "--in", ops_file, "--labels", "P"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["n_atoms"] == 2 and doc["n_elements"] == 4
    assert "2 atoms, 4 elements" in err


def test_cli_closure_noncommuting_is_input_error(ops_file, capsys):
    code, _, err = _run(["closure", "--in", ops_file, "--labels", "P,R"], capsys)
    assert code == 2
    assert "do not commute" in err


def test_cli_lueders_and_born(ops_file, capsys):
    code, out, _ = _run(["lueders", "--in", ops_file, "--rho", "U", "--p", "U", "--q", "R"], capsys)
    assert code == 0 and json.loads(out)["value"] == pytest.approx(0.5)
    code, out, _ = _run(["born", "--in", ops_file, "--rho", "mixed", "--p", "P"], capsys)
    assert code == 0 and json.loads(out)["value"] == pytest.approx(0.5)
    code, _, err = _run(["born", "--in", ops_file, "--rho", "mixed", "--p", "nope"], capsys)
    assert code == 2 and "not found" in err


def test_cli_lueders_null_condition(ops_file, capsys):
    code, _, err = _run(["lueders", "--in", ops_file, "--rho", "P", "--p", "P", "--q", "U"], capsys)
    assert code == 0
    save_operators(ops_file, {"rho": np.diag([0.0, 1.0]), "P": np.diag([1.0, 0.0])})
    code, _, err = _run(["lueders", "--in", ops_file, "--rho", "rho", "--p", "P", "--q", "P"], capsys)
    assert code == 2 and "error" in err


def test_cli_delta_curve(tmp_path, capsys):
    out, rep = tmp_path / "delta.csv", tmp_path / "report.json"
    code, _, err = _run(["delta-curve", "--r-steps", 101, "--convention", "b-then-a", "--out", out,
                         "--report", rep], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 101
    assert rows[-1]["r"] == "1" and abs(float(rows[-1]["delta"])) <= 1e-12
    assert json.loads(rep.read_text())["notes"]["b-then-a:reference_closed_form_r0"] == pytest.approx(-0.2071, abs=1e-4)
    assert '"command": "delta-curve"' in err


def test_cli_delta_curve_both_conventions(tmp_path, capsys):
    out = tmp_path / "delta.csv"
    code, _, err = _run(["delta-curve", "--r-steps", 5, "--convention", "both", "--out", out], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 10
    degenerate = [r for r in rows if r["convention"] == "a-then-b"]
    assert all(r["delta"] == "" and "conditioning-on-null" in r["note"] for r in degenerate)
    assert "[SKIP]" in err


def test_cli_delta_curve_oracle_column(tmp_path, capsys):
    out = tmp_path / "delta.csv"
    code, _, _ = _run(["delta-curve", "--r-steps", 3, "--oracle", 20000, "--out", out], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert rows[0]["oracle_delta"] != "" and rows[1]["oracle_delta"] == ""


def test_cli_delta_scan(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, _, err = _run(["delta-scan", "--dim", 2, "--trials", 200, "--top", 5, "--out", out], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 5
    summary = json.loads(err.strip().splitlines()[-1])
    assert summary["max_abs_delta"] == pytest.approx(abs(float(rows[0]["delta"])))


def test_cli_mc_oracle(ops_file, capsys):
    code, out, _ = _run(["mc-oracle", "--in", ops_file, "--rho", "U", "--p", "U", "--q", "R",
                         "--n", 100000, "--seed", 4], capsys)
    assert code == 0
    doc = json.loads(out)
    assert _checks(doc)["estimate_5sigma"]["pass"] is True
    assert _checks(doc)["acceptance_5sigma"]["pass"] is True
    assert doc["notes"]["run"]["trials"] == 100000


def test_cli_verify_suites_small(capsys):
    code, out, _ = _run(["verify-classical", "--tables", 5, "--n-max", 4], capsys)
    assert code == 0 and json.loads(out)["suite"] == "classical"
    code, out, _ = _run(["verify-quantum", "--dims", "3", "--trials", 20, "--frame-resolutions", 5], capsys)
    assert code == 0 and json.loads(out)["config"]["dims"] == [3]


def test_cli_failing_check_exits_one(capsys):
    code, out, _ = _run(["verify-classical", "--tables", 2, "--n-max", 3, "--tol", "1e-30"], capsys)
    assert code == 1
    assert json.loads(out)["checks"]


def test_cli_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("QINFERENCE_SEED", "17")
    code, out, _ = _run(["verify-classical", "--tables", 2, "--n-max", 3], capsys)
    assert code == 0 and json.loads(out)["seed"] == 17


def test_usage_errors_exit_two():
    for argv in (["bogus"], ["delta-curve", "--nope"], []):
        proc = subprocess.run([sys.executable, "-m", "qinference", *argv], capture_output=True)
        assert proc.returncode == 2
