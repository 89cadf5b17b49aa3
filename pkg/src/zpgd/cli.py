"""``zpgd`` command line: classify, curves, eval, verify.

Configuration comes from a flat JSON file (``--config``) whose keys match
the long flags; flags given on the command line win.  Exit codes: 0 on
success, 1 on runtime or verification failure, 2 on invalid or uncovered
input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import harness
from . import limit as lim
from .errors import ConfigurationError, DomainError, EvaluationAtJump, UncoveredCase, ZpgdError
from .viscous import DeltaRiemannData, initial_profiles, viscous_u_R

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

DEFAULTS = {
    "a": 0.0, "c": 0.5, "b": 1.0, "d": 2.0,
    "ua": -1.0, "ub": 2.0, "rhoc": 1.0, "rhod": 2.0,
    "eps": None, "t": None,
    "xmin": None, "xmax": None, "nx": 41, "nt": 41,
    "margin": 0.1, "format": None, "out": "-",
    "sum_tolerance": 0.0, "corrupt_curve": None,
}
FLOAT_KEYS = ("a", "c", "b", "d", "ua", "ub", "rhoc", "rhod", "xmin", "xmax", "margin", "sum_tolerance")
LIST_KEYS = ("eps", "t")
INT_KEYS = ("nx", "nt")


def fmt(v) -> str:
    """Locale-independent 17 significant digits."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


@dataclass
class RunConfig:
    data: DeltaRiemannData
    eps: Optional[list[float]]
    t: Optional[list[float]]
    xmin: Optional[float]
    xmax: Optional[float]
    nx: int
    nt: int
    margin: float
    format: Optional[str]
    out: str
    sum_tolerance: float
    corrupt_curve: Optional[str]


def _as_list(key, value):
    if value is None:
        return None
    if isinstance(value, str):
        value = [v for v in value.replace(",", " ").split() if v]
    elif not isinstance(value, (list, tuple)):
        value = [value]
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{key}: expected a list of numbers, got {value!r}") from exc
    if not out:
        raise ConfigurationError(f"{key}: empty list")
    return out


def load_config(args: argparse.Namespace) -> RunConfig:
    merged = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = sorted(set(raw) - set(DEFAULTS))
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(raw)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val

    try:
        for key in FLOAT_KEYS:
            if merged[key] is not None:
                merged[key] = float(merged[key])
        for key in INT_KEYS:
            merged[key] = int(merged[key])
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad numeric value in configuration: {exc}") from exc
    for key in LIST_KEYS:
        merged[key] = _as_list(key, merged[key])

    if merged["nx"] < 2 or merged["nt"] < 2:
        raise ConfigurationError("nx and nt must be at least 2")
    if merged["xmin"] is not None and merged["xmax"] is not None and not merged["xmin"] < merged["xmax"]:
        raise ConfigurationError("xmin must be below xmax")
    if merged["t"] is not None and any(not (t > 0 and math.isfinite(t)) for t in merged["t"]):
        raise ConfigurationError("all t values must be positive and finite")
    if merged["eps"] is not None and any(not (e > 0 and math.isfinite(e)) for e in merged["eps"]):
        raise ConfigurationError("all eps values must be positive and finite")
    if merged["format"] not in (None, "csv", "json"):
        raise ConfigurationError("format must be csv or json")
    if not merged["margin"] > 0:
        raise ConfigurationError("margin must be positive")

    data = DeltaRiemannData(
        a=merged["a"], c=merged["c"], b=merged["b"], d=merged["d"],
        u_a=merged["ua"], u_b=merged["ub"], rho_c=merged["rhoc"], rho_d=merged["rhod"],
    )
    return RunConfig(
        data=data, eps=merged["eps"], t=merged["t"], xmin=merged["xmin"], xmax=merged["xmax"],
        nx=merged["nx"], nt=merged["nt"], margin=merged["margin"], format=merged["format"],
        out=merged["out"], sum_tolerance=merged["sum_tolerance"], corrupt_curve=merged["corrupt_curve"],
    )


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _table(cfg: RunConfig, header: list[str], rows: list[list]) -> str:
    if (cfg.format or "csv") == "json":
        records = [dict(zip(header, (_jsonable(v) for v in row))) for row in rows]
        return json.dumps(records, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def _solution(cfg: RunConfig) -> lim.LimitSolution:
    sol = lim.build_solution(cfg.data, cfg.sum_tolerance)
    if cfg.corrupt_curve:
        if cfg.corrupt_curve not in sol.curves:
            raise ConfigurationError(
                f"corrupt_curve: no curve {cfg.corrupt_curve!r} in {sol.tag.label}; "
                f"available: {', '.join(sol.curves)}"
            )
        sol = lim.corrupt_curve(sol, cfg.corrupt_curve)
    return sol


def _breakpoint_records(sol: lim.LimitSolution) -> list[dict]:
    return [
        {
            "curve": bp.curve,
            "index": bp.index,
            "nominal": _jsonable(bp.nominal) if bp.nominal is not None else None,
            "recomputed": _jsonable(bp.recomputed),
            "discrepancy": _jsonable(bp.discrepancy),
        }
        for cv in sol.gamma_curves
        for bp in cv.breakpoints
    ]


# --- commands -------------------------------------------------------------


def cmd_classify(cfg: RunConfig) -> int:
    sol = _solution(cfg)
    data, tag = cfg.data, sol.tag
    if (cfg.format or "text") == "json":
        report = {
            "case": str(tag),
            "subcase": tag.subcase.value if tag.subcase else None,
            "x_star": _jsonable(sol.x_star),
            "t_star": _jsonable(sol.t_star),
            "breakpoints": _breakpoint_records(sol),
            "discrepancies": [r for r in _breakpoint_records(sol) if r["discrepancy"] > lim.BREAKPOINT_RTOL],
        }
        _emit(cfg, json.dumps(report, indent=2, allow_nan=False) + "\n")
        return EXIT_OK
    lines = []
    if tag.major is lim.Major.CASE5:
        lines.append(f"{tag}, wall (a+b)/2 = {fmt(0.5 * (data.a + data.b))}")
    else:
        lines.append(str(tag))
    if tag.subcase is not None:
        lines.append(f"subcase: {tag.subcase.value}")
    if sol.x_star is not None:
        lines.append(f"x* = {fmt(sol.x_star)}")
    if sol.t_star is not None:
        lines.append(f"t* = {fmt(sol.t_star)}")
    for cv in sol.gamma_curves:
        for bp in cv.breakpoints:
            nominal = "n/a" if bp.nominal is None else fmt(bp.nominal)
            flag = "  DISCREPANCY" if bp.discrepancy > lim.BREAKPOINT_RTOL else ""
            lines.append(
                f"breakpoint {bp.curve}[{bp.index}]: recomputed {fmt(bp.recomputed)}, nominal {nominal}{flag}"
            )
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_curves(cfg: RunConfig) -> int:
    sol = _solution(cfg)
    t_list = cfg.t or [0.5, 1.0, 2.0]
    t_max = max(t_list)
    grid = set(np.linspace(0.0, t_max, cfg.nt).tolist()) | set(t_list)
    rows = []
    for name, cv in sol.curves.items():
        bps = [tb for tb in cv.breakpoint_times() if tb <= t_max]
        times = sorted(grid | set(bps))
        for t in times:
            x = lim.curve_position(cv, t) if t > 0 else lim.initial_position(cv)
            is_bp = any(t == tb for tb in bps)
            seg = _segment_after(cv, t) if is_bp else cv.segment_at(t)
            rows.append([name, t, x, seg.kind.value, is_bp])
    _emit(cfg, _table(cfg, ["curve_name", "t", "x", "segment_kind", "is_breakpoint"], rows))
    return EXIT_OK


def _segment_after(cv: lim.Curve, t: float) -> lim.Segment:
    for seg in cv.segments:
        if t < seg.t_end:
            return seg
    return cv.segments[-1]


def _x_grid(cfg: RunConfig) -> np.ndarray:
    d = cfg.data
    span = d.d - d.a
    lo = d.a - span if cfg.xmin is None else cfg.xmin
    hi = d.d + span if cfg.xmax is None else cfg.xmax
    return np.linspace(lo, hi, cfg.nx)


def cmd_eval(cfg: RunConfig) -> int:
    eps_list = cfg.eps or [1e-3]
    if len(eps_list) != 1:
        raise ConfigurationError("eval takes exactly one eps value")
    eps = eps_list[0]
    data = cfg.data
    static = data.u_a == 0.0 and data.u_b == 0.0
    sol = None if static else _solution(cfg)
    rows = []
    for t in cfg.t or [1.0]:
        for x in _x_grid(cfg):
            x = float(x)
            u_eps, R_eps = viscous_u_R(data, eps, x, t)
            if static:
                # nothing moves: u = 0 and R keeps its initial profile
                on_curve = x in (data.c, data.d)
                u_lim = 0.0
                R_lim = math.nan if on_curve else _initial_R(data, x)
            else:
                u_lim = lim.eval_u(sol, x, t)
                R_lim = lim.limit_R(sol, x, t)
                on_curve = u_lim is lim.ON_DISCONTINUITY or math.isnan(R_lim)
                if u_lim is lim.ON_DISCONTINUITY:
                    u_lim = math.nan
            rows.append([x, t, u_eps, R_eps, u_lim, R_lim, on_curve])
    _emit(cfg, _table(cfg, ["x", "t", "u_eps", "R_eps", "u_limit", "R_plateau", "on_curve"], rows))
    return EXIT_OK


def _initial_R(data: DeltaRiemannData, x: float) -> float:
    try:
        return initial_profiles(data, x)[1]
    except EvaluationAtJump:
        # R0 is continuous at a and b, so either side will do
        return initial_profiles(data, math.nextafter(x, math.inf))[1]


def build_report(cfg: RunConfig) -> tuple[dict, bool]:
    sol = _solution(cfg)
    settings = harness.VerifySettings()
    if cfg.t:
        settings.times = tuple(cfg.t)
    if cfg.eps:
        settings.schedule = harness.EpsSchedule(tuple(cfg.eps))
    settings.margin = cfg.margin
    checks = harness.verify_all(cfg.data, settings, solution=sol)
    records = _breakpoint_records(sol)
    report = {
        "case": str(sol.tag),
        "subcase": sol.tag.subcase.value if sol.tag.subcase else None,
        "breakpoints": records,
        "discrepancies": [r for r in records if r["discrepancy"] > lim.BREAKPOINT_RTOL],
        "checks": [{k: _jsonable(v) for k, v in c.as_dict().items()} for c in checks],
    }
    return report, all(c.passed for c in checks)


def cmd_verify(cfg: RunConfig) -> int:
    report, ok = build_report(cfg)
    if (cfg.format or "json") == "csv":
        rows = [[c["name"], c["passed"], c["worst"], c["tolerance"], c["detail"]] for c in report["checks"]]
        _emit(cfg, _table(cfg, ["name", "passed", "worst", "tolerance", "detail"], rows))
    else:
        _emit(cfg, json.dumps(report, indent=2, allow_nan=False) + "\n")
    for c in report["checks"]:
        if not c["passed"]:
            print(f"FAILED {c['name']}: worst {fmt(c['worst'])} > {fmt(c['tolerance'])}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"classify": cmd_classify, "curves": cmd_curves, "eval": cmd_eval, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zpgd", description="Delta-Riemann problem for zero-pressure gas dynamics")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON configuration file")
    for key in ("a", "b", "c", "d", "ua", "ub", "rhoc", "rhod", "xmin", "xmax", "margin"):
        common.add_argument(f"--{key}", type=float)
    common.add_argument("--eps", help="viscosity value(s), comma separated")
    common.add_argument("--t", help="time value(s), comma separated")
    common.add_argument("--nx", type=int)
    common.add_argument("--nt", type=int)
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output path, '-' for stdout")
    common.add_argument("--sum-tolerance", dest="sum_tolerance", type=float,
                        help="treat |u_a + u_b| <= this as zero when classifying")
    common.add_argument("--corrupt-curve", dest="corrupt_curve", help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except UncoveredCase as exc:
        print(f"zpgd: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigurationError, DomainError) as exc:
        print(f"zpgd: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"zpgd: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ZpgdError as exc:
        print(f"zpgd: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
