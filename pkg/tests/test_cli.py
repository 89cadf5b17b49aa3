import csv
import io
import json
import math
import shutil
import subprocess
from pathlib import Path

import pytest

from zpgd.cli import main

FIXTURE = Path(__file__).resolve().parent.parent / "fixtures" / "case1.json"
CASE1 = ["--a", "0", "--c", "0.5", "--b", "1", "--d", "2", "--ua", "-0.5", "--ub", "2", "--rhoc", "1", "--rhod", "2"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_classify_case1(capsys):
    code, out, _ = run(capsys, "classify", "--ua", "-1", "--ub", "1")
    assert code == 0 and out.splitlines()[0] == "Case1"


def test_classify_case5_wall(capsys):
    code, out, _ = run(capsys, "classify", "--a", "0", "--b", "1", "--ua", "1", "--ub", "-1")
    assert code == 0 and out.splitlines()[0] == "Case5, wall (a+b)/2 = 0.5"


def test_classify_reports_discrepancies(capsys):
    code, out, _ = run(capsys, "classify", "--a", "0", "--c", "0.5", "--b", "1", "--d", "5", "--ua", "3", "--ub", "1")
    assert code == 0 and "DISCREPANCY" in out and "x* = 2" in out
    code, out, _ = run(capsys, "classify", "--d", "5", "--ua", "3", "--ub", "1", "--format", "json")
    report = json.loads(out)
    assert report["case"] == "Case2" and report["subcase"] == "Above"
    assert {(r["curve"], r["index"]) for r in report["discrepancies"]} == {("gamma_a", 1), ("gamma_c", 2), ("gamma_d", 0)}


def test_uncovered_case_exit_code(capsys):
    for cmd in ("classify", "verify", "curves"):
        code, _, err = run(capsys, cmd, "--ua", "0", "--ub", "1")
        assert code == 2 and "uncovered case" in err


def test_invalid_input_exit_code(capsys, tmp_path):
    assert run(capsys, "classify", "--c", "3")[0] == 2
    assert run(capsys, "eval", "--nx", "1")[0] == 2
    assert run(capsys, "eval", "--eps", "0.1,0.01")[0] == 2
    assert run(capsys, "eval", "--t", "-1")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"a": 0, "nonsense": 1}')
    assert run(capsys, "classify", "--config", str(bad))[0] == 2
    assert run(capsys, "classify", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_curves_rows(capsys):
    code, out, _ = run(capsys, "curves", *CASE1, "--t", "1")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["curve_name", "t", "x", "segment_kind", "is_breakpoint"]
    assert {"curve_name": "gamma_b", "t": "1", "x": "3", "segment_kind": "SqrtRight", "is_breakpoint": "false"} in table
    bp = [r for r in table if r["curve_name"] == "gamma_d" and r["is_breakpoint"] == "true"]
    assert [r["t"] for r in bp] == ["0.25"]


def test_curves_case5_terminal_constant(capsys):
    code, out, _ = run(capsys, "curves", "--a", "0", "--b", "1", "--ua", "1", "--ub", "-1", "--t", "2")
    tail = [r for r in rows(out) if r["curve_name"] == "gamma_a"][-3:]
    assert all(r["x"] == "0.5" and r["segment_kind"] == "Constant" for r in tail)


def test_eval_header_and_spot_value(capsys):
    code, out, _ = run(capsys, "eval", *CASE1, "--t", "1", "--eps", "1e-3", "--xmin", "-1", "--xmax", "1", "--nx", "5")
    assert code == 0
    assert out.splitlines()[0] == "x,t,u_eps,R_eps,u_limit,R_plateau,on_curve"
    spot = [r for r in rows(out) if r["x"] == "-0.5"][0]
    assert abs(float(spot["u_eps"]) + 0.5) <= 0.02
    assert float(spot["u_limit"]) == -0.5


def test_eval_marks_curve_points(capsys):
    code, out, _ = run(capsys, "eval", *CASE1, "--t", "1", "--xmin", "2", "--xmax", "3", "--nx", "2")
    on = [r for r in rows(out) if r["x"] == "3"][0]
    assert on["on_curve"] == "true" and on["u_limit"] == "nan"


def test_eval_static_data(capsys):
    code, out, _ = run(capsys, "eval", "--ua", "0", "--ub", "0", "--nx", "9")
    assert code == 0
    assert all(float(r["u_eps"]) == 0 and float(r["u_limit"]) == 0 for r in rows(out))


def test_eval_json_and_file_output(capsys, tmp_path):
    out_path = tmp_path / "grid.json"
    code, out, _ = run(capsys, "eval", *CASE1, "--nx", "3", "--format", "json", "--out", str(out_path))
    assert code == 0 and out == ""
    records = json.loads(out_path.read_text())
    assert len(records) == 3 and set(records[0]) == {"x", "t", "u_eps", "R_eps", "u_limit", "R_plateau", "on_curve"}


def test_output_is_deterministic(capsys):
    first = run(capsys, "eval", *CASE1, "--t", "0.5,1")[1]
    second = run(capsys, "eval", *CASE1, "--t", "0.5,1")[1]
    assert first == second


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"ua": -1.0, "ub": 1.0}))
    assert run(capsys, "classify", "--config", str(cfg))[1].startswith("Case1")
    assert run(capsys, "classify", "--config", str(cfg), "--ub", "-1")[1].startswith("Case6")


def test_io_failure_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "curves", "--out", str(tmp_path / "no" / "such" / "dir.csv"))
    assert code == 1 and "I/O" in err


def test_verify_fixture_passes(capsys):
    code, out, _ = run(capsys, "verify", "--config", str(FIXTURE))
    report = json.loads(out)
    assert code == 0
    assert set(report) == {"case", "subcase", "breakpoints", "discrepancies", "checks"}
    assert all(c["passed"] for c in report["checks"])


def test_verify_negative_control(capsys):
    code, out, err = run(capsys, "verify", "--config", str(FIXTURE), "--corrupt-curve", "gamma_d")
    assert code == 1
    failed = {c["name"] for c in json.loads(out)["checks"] if not c["passed"]}
    assert "continuity" in failed and "FAILED continuity" in err


def test_float_format():
    from zpgd.cli import fmt
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(math.nan) == "nan"
    assert fmt(True) == "true"


@pytest.mark.skipif(shutil.which("zpgd") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["zpgd", "classify", "--ua", "1", "--ub", "-2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("Case4")
