"""Acceptance criteria 1-8, each at its stated tolerance.

Every test records a one-line verdict, nominal by the conftest hook in the
terminal summary and also on stdout (visible with ``-s``).
"""
import math
import shutil
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from cases import TIMES, one_per_case, random_data, representative_data
from conftest import ACCEPTANCE_LINES
from zpgd import harness as hs
from zpgd import limit as lim
from zpgd import special_fn as sf

ROOT = Path(__file__).resolve().parent.parent


def record(n, title, ok, detail):
    line = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


def test_criterion_1_erfc_suite():
    start = time.perf_counter()
    zs = np.linspace(-6, 6, 1000)
    reflection = max(abs(sf.erfc_integral(z) + sf.erfc_integral(-z) - math.sqrt(math.pi)) for z in zs)
    worst_ratio = 0.0
    for z in np.linspace(2, 40, 1000):
        scaled = sf.erfc_scaled(z) / z  # exp(z^2) erfc(z)
        lhs = abs(z**3 * (scaled - (1 / (2 * z) - 1 / (4 * z**3))))
        worst_ratio = max(worst_ratio, lhs / (3 / (8 * z**2)))
    at10 = sf.erfc_scaled(10.0)
    series10 = 0.5 * sf.asymptotic_series(10.0)
    elapsed = time.perf_counter() - start
    ok = reflection <= 1e-12 and worst_ratio <= 1.0 and abs(at10 - 0.49754) <= 1e-4 \
        and abs(at10 - series10) <= 1e-4 and elapsed < 1.0
    assert record(1, "erfc suite", ok,
                  f"reflection {reflection:.2e} <= 1e-12, bound ratio {worst_ratio:.4f} <= 1, "
                  f"erfc_scaled(10) = {at10:.6f}, {elapsed:.2f}s < 1s")


def test_criterion_2_oracle_agreement():
    start = time.perf_counter()
    worst = {}
    for name, data in one_per_case().items():
        for check in hs.oracle_agreement(data, (0.5, 0.1), tol=1e-6):
            worst[f"{name}:{check.name}"] = check.worst
    elapsed = time.perf_counter() - start
    top = max(worst.values())
    ok = top <= 1e-6 and elapsed < 60
    assert record(2, "oracle agreement", ok,
                  f"worst |closed - quad|/(1+|quad|) = {top:.2e} <= 1e-6 over 6 data x 20x10 grid x 2 eps, "
                  f"{elapsed:.1f}s < 60s"), worst


def test_criterion_3_hopf_cole_identity():
    results = {name: hs.hopf_cole_identity(data, (0.5, 0.1)) for name, data in one_per_case().items()}
    top = max(r.worst for r in results.values())
    assert record(3, "Hopf-Cole identity", top <= 1e-10, f"worst relative {top:.2e} <= 1e-10"), results


def test_criterion_4_convergence():
    start = time.perf_counter()
    failures, worst_u, worst_plateau = [], 0.0, 0.0
    for name, data in representative_data().items():
        sol = lim.build_solution(data)
        report = hs.converge_scan(data, TIMES, margin=0.1, solution=sol)
        err_u = report.row(0.001).sup_error_u
        plateau = max(
            (row.deviation for t in TIMES for row in hs.plateau_check(data, 1e-3, t, solution=sol) if not row.skipped),
            default=0.0,
        )
        worst_u, worst_plateau = max(worst_u, err_u), max(worst_plateau, plateau)
        if err_u > 0.05 or plateau > 1e-3 or not report.monotone_flag:
            failures.append((name, err_u, plateau, [(r.sup_error_u, r.sup_error_R) for r in report.rows]))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 300
    assert record(4, "convergence to the limit", ok,
                  f"{len(representative_data())} configurations, worst sup_error_u {worst_u:.4f} <= 0.05, "
                  f"worst plateau {worst_plateau:.2e} <= 1e-3, monotone {not failures}, {elapsed:.1f}s < 300s"), failures


def test_criterion_5_delta_localization():
    worst, failures, count = 0.0, [], 0
    for name, data in representative_data().items():
        sol = lim.build_solution(data)
        for t in TIMES:
            peaks = hs.locate_delta(data, 1e-3, t, solution=sol).peaks
            expected = {cr.curve.name for cr in sol.carriers if cr.mass != 0}
            if {p.curve_name for p in peaks} != expected:
                failures.append((name, t, "missing carrier"))
            for p in peaks:
                count += 1
                worst = max(worst, p.offset)
                if p.offset > 0.05:
                    failures.append((name, t, p))
    assert record(5, "delta localization", not failures,
                  f"{count} carrier peaks, worst offset {worst:.4f} <= 0.05"), failures


def test_criterion_6_structural_invariants():
    start = time.perf_counter()
    rng = np.random.default_rng(20240601)
    worst, failures = {}, []
    for case in range(1, 7):
        for _ in range(100):
            data = random_data(case, rng)
            for r in hs.invariant_suite(data):
                if r.name == "subcase_coherence":
                    continue
                worst[r.name] = max(worst.get(r.name, 0.0), r.worst)
                if not r.passed:
                    failures.append((case, data, r))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    summary = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert record(6, "structural invariants", ok, f"600 random data, worst {summary}, {elapsed:.1f}s < 60s"), failures[:5]


def test_criterion_7_subcase_coherence():
    reps = representative_data()
    worst, failures = 0.0, []
    for name in ("Case2/At", "Case3/At", "Case4/At", "Case5/At"):
        res = hs.invariant_suite(reps[name])[-1]
        assert res.name == "subcase_coherence"
        worst = max(worst, res.worst)
        if not res.passed:
            failures.append((name, res))
    assert record(7, "subcase coherence", not failures,
                  f"carrier trajectories at pivot -/0/+ 1e-6 differ by {worst:.2e} <= 1e-4 on [0, 10]"), failures


def test_criterion_8_cli_determinism(tmp_path):
    exe = shutil.which("zpgd")
    cmd = [exe] if exe else [sys.executable, "-m", "zpgd.cli"]
    outputs, codes = [], []
    for i in range(2):
        out = tmp_path / f"report{i}.json"
        proc = subprocess.run(cmd + ["verify", "--config", str(ROOT / "fixtures" / "case1.json"), "--out", str(out)],
                              capture_output=True, text=True, cwd=ROOT)
        codes.append(proc.returncode)
        outputs.append(out.read_bytes() if out.exists() else b"")
    ok = codes == [0, 0] and outputs[0] == outputs[1] and outputs[0] != b""
    assert record(8, "CLI determinism", ok,
                  f"exit codes {codes}, reports byte-identical: {outputs[0] == outputs[1]}")
