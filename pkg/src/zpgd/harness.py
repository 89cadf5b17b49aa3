"""Experiments comparing the viscous solutions with their limit.

* :func:`converge_scan` measures sup-norm errors away from discontinuities
  along a decreasing schedule of viscosities.
* :func:`locate_delta` finds the steepest points of ``R_eps`` and compares
  them with the carrier curves.
* :func:`plateau_check` samples ``R_eps`` between curves.
* :func:`invariant_suite` runs the structural checks on the limit curves.
* :func:`oracle_agreement` and :func:`hopf_cole_identity` compare the closed
  forms with quadrature and with the ``-eps V_x / V`` identity.

The thresholds used by callers are acceptance choices; no convergence rate
is implied.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from . import limit as lim
from .errors import ConfigurationError, LocalizationError
from .oracle import DEFAULT_SPEC, QuadratureSpec, oracle_R, oracle_u
from .viscous import DeltaRiemannData, hopf_cole_u, viscous_R_x, viscous_u, viscous_u_R

# Differences below this are treated as ties when checking monotonicity.
MONOTONE_FLOOR = 1e-12


@dataclass(frozen=True)
class EpsSchedule:
    values: tuple[float, ...] = (0.3, 0.1, 0.03, 0.01, 0.003, 0.001)

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals or any(v <= 0 for v in vals):
            raise ConfigurationError("eps schedule must be non-empty and positive")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ConfigurationError(f"eps schedule must be strictly decreasing, got {vals}")
        object.__setattr__(self, "values", vals)


DEFAULT_SCHEDULE = EpsSchedule()


@dataclass(frozen=True)
class ConvergenceRow:
    eps: float
    sup_error_u: float
    sup_error_R: float
    probe_count: int
    excluded_near_curve: int


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    monotone_u: bool
    monotone_R: bool

    @property
    def monotone_flag(self) -> bool:
        return self.monotone_u and self.monotone_R

    def row(self, eps: float) -> ConvergenceRow:
        for r in self.rows:
            if r.eps == eps:
                return r
        raise KeyError(eps)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _non_increasing(values: Sequence[float]) -> bool:
    return all(b <= a + MONOTONE_FLOOR for a, b in zip(values, values[1:]))


def default_probe_grid(sol: lim.LimitSolution, times: Sequence[float], nx: int = 201) -> np.ndarray:
    """Uniform grid covering every curve at every probe time with a unit margin."""
    d = sol.data
    pts = [d.a, d.d]
    for t in times:
        pts.extend(lim.curve_position(cv, t) for cv in sol.curves.values())
    return np.linspace(min(pts) - 1.0, max(pts) + 1.0, nx)


def converge_scan(
    data: DeltaRiemannData,
    times: Sequence[float],
    schedule: EpsSchedule = DEFAULT_SCHEDULE,
    margin: float = 0.1,
    xs: Optional[Sequence[float]] = None,
    sum_tolerance: float = 0.0,
    solution: Optional[lim.LimitSolution] = None,
) -> ConvergenceReport:
    """Sup errors ``|u_eps - u|`` and ``|R_eps - R|`` per viscosity.

    Probes within ``margin`` of a discontinuity of ``u`` are dropped, and
    for ``R`` also those within ``margin`` of a carrier.
    """
    if not margin > 0:
        raise ConfigurationError("margin must be positive")
    sol = solution or lim.build_solution(data, sum_tolerance)
    if xs is None:
        xs = default_probe_grid(sol, times)
    probes_u, probes_R, excluded = [], [], 0
    for t in times:
        jumps = lim.discontinuity_positions(sol, t)
        carriers = [e.x for e in lim.delta_positions(sol, t)]
        for x in xs:
            x = float(x)
            near_jump = any(abs(x - p) < margin for p in jumps)
            near_carrier = any(abs(x - p) < margin for p in carriers)
            if near_jump or near_carrier:
                excluded += 1
            if not near_jump:
                probes_u.append((x, t, lim.eval_u(sol, x, t)))
            if not near_jump and not near_carrier:
                probes_R.append((x, t, lim.limit_R(sol, x, t)))
    if not probes_u or not probes_R:
        raise ConfigurationError("no probes left after excluding the neighbourhood of the curves")

    rows = []
    for eps in schedule.values:
        err_u = max(abs(viscous_u(data, eps, x, t, allow_nodes=True) - u) for x, t, u in probes_u)
        err_R = max(abs(viscous_u_R(data, eps, x, t)[1] - r) for x, t, r in probes_R)
        rows.append(ConvergenceRow(eps, err_u, err_R, len(probes_u), excluded))
    return ConvergenceReport(
        rows=tuple(rows),
        monotone_u=_non_increasing([r.sup_error_u for r in rows]),
        monotone_R=_non_increasing([r.sup_error_R for r in rows]),
    )


@dataclass(frozen=True)
class DeltaPeak:
    x_peak: float
    curve_name: str
    offset: float


@dataclass(frozen=True)
class Localization:
    peaks: tuple[DeltaPeak, ...]
    no_mass: bool = False


def locate_delta(
    data: DeltaRiemannData,
    eps: float,
    t: float,
    search_window: float = 0.25,
    n_coarse: int = 401,
    solution: Optional[lim.LimitSolution] = None,
) -> Localization:
    """Peaks of ``|rho_eps|`` near each predicted carrier position.

    The window around each prediction is cut halfway to any other carrier.
    A coarse scan picks the local maximum nearest the prediction among those
    reaching 5% of the window's maximum; a golden-section search refines it.
    """
    sol = solution or lim.build_solution(data)
    peaks = []
    others = [lim.curve_position(cr.curve, t) for cr in sol.carriers if cr.mass != 0.0]
    for carrier in sol.carriers:
        if carrier.mass == 0.0:
            continue
        predicted = lim.curve_position(carrier.curve, t)
        # stop halfway to any distinct carrier so a taller neighbour cannot mask this one
        lo, hi = predicted - search_window, predicted + search_window
        for other in others:
            gap = other - predicted
            if abs(gap) > 1e-9 * max(1.0, abs(predicted)):
                if gap > 0:
                    hi = min(hi, predicted + 0.5 * gap)
                else:
                    lo = max(lo, predicted + 0.5 * gap)
        grid = np.linspace(lo, hi, n_coarse)

        def f(x):
            return abs(viscous_R_x(data, eps, float(x), t))

        vals = np.array([f(x) for x in grid])
        top = vals.max()
        cand = [
            i for i in range(1, n_coarse - 1)
            if vals[i] >= vals[i - 1] and vals[i] >= vals[i + 1] and vals[i] >= 0.05 * top and vals[i] > 0
        ]
        if not cand:
            raise LocalizationError(
                f"no peak of |rho_eps| within {search_window} of {carrier.curve.name}({t}) = {predicted}"
            )
        i = min(cand, key=lambda k: abs(grid[k] - predicted))
        x_peak = float(grid[i])
        if vals[i] > vals[i - 1] and vals[i] > vals[i + 1]:
            res = optimize.minimize_scalar(
                lambda x: -f(x), bracket=(grid[i - 1], grid[i], grid[i + 1]),
                method="golden", options={"xtol": 1e-12},
            )
            if grid[i - 1] <= res.x <= grid[i + 1] and -res.fun >= vals[i]:
                x_peak = float(res.x)
        peaks.append(DeltaPeak(x_peak, carrier.curve.name, abs(x_peak - predicted)))
    return Localization(tuple(peaks), no_mass=not peaks)


@dataclass(frozen=True)
class PlateauRow:
    region: str
    x: float
    observed: float
    expected: float
    skipped: bool = False

    @property
    def deviation(self) -> float:
        return math.nan if self.skipped else abs(self.observed - self.expected)


def plateau_check(
    data: DeltaRiemannData, eps: float, t: float, solution: Optional[lim.LimitSolution] = None
) -> list[PlateauRow]:
    """``R_eps`` at the midpoints of the gaps between all curves at time ``t``."""
    sol = solution or lim.build_solution(data)
    named = sorted(
        ((lim.curve_position(cv, t), cv.name) for cv in sol.curves.values()),
        key=lambda p: p[0],
    )
    groups: list[tuple[float, list[str]]] = []
    for x, name in named:
        if groups and abs(x - groups[-1][0]) <= lim.POSITION_RTOL * max(1.0, abs(x)):
            groups[-1][1].append(name)
        else:
            groups.append((x, [name]))
    labels = ["=".join(names) for _, names in groups]
    pos = [x for x, _ in groups]
    min_width = 4.0 * math.sqrt(2.0 * t * eps)
    spans = [(-math.inf, "-inf", pos[0], labels[0])]
    spans += [(pos[i], labels[i], pos[i + 1], labels[i + 1]) for i in range(len(pos) - 1)]
    spans.append((pos[-1], labels[-1], math.inf, "+inf"))
    rows = []
    for lo, lo_name, hi, hi_name in spans:
        region = f"({lo_name}, {hi_name})"
        if math.isinf(lo):
            x = hi - 1.0
        elif math.isinf(hi):
            x = lo + 1.0
        else:
            x = 0.5 * (lo + hi)
            if hi - lo < min_width:
                rows.append(PlateauRow(region, x, math.nan, lim.limit_R(sol, x, t), skipped=True))
                continue
        _, R = viscous_u_R(data, eps, x, t)
        rows.append(PlateauRow(region, x, R, lim.limit_R(sol, x, t)))
    return rows


# --- structural invariants ------------------------------------------------

MOMENTUM_TIMES = (0.01, 0.1, 1.0, 10.0, 100.0)


def _probe_times(sol: lim.LimitSolution) -> list[float]:
    bps = lim.all_breakpoints(sol)
    times = set(np.geomspace(1e-3, 1e3, 61).tolist()) | set(MOMENTUM_TIMES)
    edges = [0.0, *bps]
    for lo, hi in zip(edges, edges[1:]):
        times.add(0.5 * (lo + hi))
    if bps:
        times.add(2.0 * bps[-1])
    return sorted(t for t in times if t > 0 and all(abs(t - tb) > 1e-9 * max(1.0, tb) for tb in bps))


def _scale(*xs) -> float:
    return max(1.0, *(abs(x) for x in xs))


def _check_continuity(sol):
    worst = 0.0
    for cv in sol.curves.values():
        for s1, s2 in zip(cv.segments, cv.segments[1:]):
            T = s1.t_end
            p1, p2 = s1.position(T), s2.position(T)
            worst = max(worst, abs(p1 - p2) / _scale(p1, p2))
    return CheckResult("continuity", worst <= 1e-12, worst, 1e-12, "segment junction mismatch (relative)")


def _check_ordering(sol, times):
    worst = 0.0
    for chain in sol.ordering:
        for t in times:
            xs = [lim.curve_position(sol.curves[n], t) for n in chain]
            for x1, x2 in zip(xs, xs[1:]):
                worst = max(worst, (x1 - x2) / _scale(x1, x2))
    return CheckResult("ordering", worst <= 1e-12, worst, 1e-12,
                       "; ".join(" <= ".join(c) for c in sol.ordering))


def _rh_worst(sol, curves, times):
    worst = 0.0
    for cv in curves:
        for t in times:
            if cv.is_breakpoint(t):
                continue
            res = lim.rankine_hugoniot_residual(sol, cv, t)
            if isinstance(res, lim.OneSidedResiduals):
                continue
            worst = max(worst, abs(res))
    return worst


def _check_rh(sol, times):
    curves = [cv for cv in sol.bounding_curves]
    worst = _rh_worst(sol, curves, times)
    return CheckResult("rankine_hugoniot", worst <= 1e-10, worst, 1e-10,
                       ", ".join(cv.name for cv in curves))


def _check_momentum(sol):
    target = sol.data.u_a + sol.data.u_b
    worst = max(abs(lim.momentum(sol, t) - target) for t in MOMENTUM_TIMES)
    return CheckResult("momentum", worst <= 1e-12, worst, 1e-12, f"target u_a + u_b = {target!r}")


def _check_mass(sol, times):
    target = sol.data.rho_c + sol.data.rho_d
    worst = max(abs(sum(e.mass for e in lim.delta_positions(sol, t)) - target) for t in times)
    return CheckResult("mass", worst <= 1e-12, worst, 1e-12, f"target rho_c + rho_d = {target!r}")


def _check_transport(sol, times):
    worst = _rh_worst(sol, [cr.curve for cr in sol.carriers], times)
    return CheckResult("transport", worst <= 1e-10, worst, 1e-10, "carrier speed vs local or shock velocity")


COHERENCE_STEP = 1e-6
COHERENCE_TOL = 1e-4


def _check_subcase_coherence(sol):
    data, major = sol.data, sol.tag.major
    if major is lim.Major.CASE2:
        field_name, carrier, pivot = "d", "gamma_d", sol.x_star
    elif major in (lim.Major.CASE3, lim.Major.CASE4):
        field_name, carrier, pivot = "c", "gamma_c", sol.x_star
    elif major is lim.Major.CASE5:
        field_name, carrier, pivot = "c", "gamma_c", 0.5 * (data.a + data.b)
    else:
        return CheckResult("subcase_coherence", True, 0.0, COHERENCE_TOL, "not applicable")
    variants = []
    for shift in (-COHERENCE_STEP, 0.0, COHERENCE_STEP):
        perturbed = data.replace(**{field_name: pivot + shift})
        variants.append(lim.build_solution(perturbed).curves[carrier])
    times = set(np.linspace(0.0, 10.0, 2001).tolist())
    for cv in variants:
        times.update(tb for tb in cv.breakpoint_times() if tb <= 10.0)
    worst = 0.0
    for t in sorted(times):
        xs = [lim.curve_position(cv, t) if t > 0 else lim.initial_position(cv) for cv in variants]
        worst = max(worst, max(xs) - min(xs))
    return CheckResult("subcase_coherence", worst <= COHERENCE_TOL, worst, COHERENCE_TOL,
                       f"{carrier} with {field_name} = {pivot!r} -/0/+ {COHERENCE_STEP}")


INVARIANT_NAMES = (
    "continuity", "ordering", "rankine_hugoniot", "momentum", "mass", "transport", "subcase_coherence",
)


def invariant_suite(
    data: DeltaRiemannData, solution: Optional[lim.LimitSolution] = None, sum_tolerance: float = 0.0
) -> list[CheckResult]:
    """One :class:`CheckResult` per structural invariant of the limit curves."""
    sol = solution or lim.build_solution(data, sum_tolerance)
    times = _probe_times(sol)
    return [
        _check_continuity(sol),
        _check_ordering(sol, times),
        _check_rh(sol, times),
        _check_momentum(sol),
        _check_mass(sol, times),
        _check_transport(sol, times),
        _check_subcase_coherence(sol),
    ]


# --- closed form versus quadrature -----------------------------------------


def standard_grid(data: DeltaRiemannData, nx: int = 20, nt: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """``nx`` positions reaching past ``a`` and ``d`` (all five regions) and ``nt`` times."""
    span = data.d - data.a
    xs = np.linspace(data.a - 0.5 * span, data.d + 0.5 * span, nx)
    ts = np.geomspace(0.2, 2.0, nt)
    return xs, ts


def oracle_agreement(
    data: DeltaRiemannData,
    eps_values: Sequence[float] = (0.5, 0.1),
    xs: Optional[Sequence[float]] = None,
    ts: Optional[Sequence[float]] = None,
    tol: float = 1e-6,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> list[CheckResult]:
    """Worst ``|closed - quadrature| / (1 + |quadrature|)`` for ``u`` and ``R``."""
    if xs is None or ts is None:
        gx, gt = standard_grid(data)
        xs = gx if xs is None else xs
        ts = gt if ts is None else ts
    worst_u = worst_R = 0.0
    for eps in eps_values:
        for t in ts:
            for x in xs:
                x, t = float(x), float(t)
                u, R = viscous_u_R(data, eps, x, t)
                ou = oracle_u(data, eps, x, t, spec)
                oR = oracle_R(data, eps, x, t, spec)
                worst_u = max(worst_u, abs(u - ou) / (1.0 + abs(ou)))
                worst_R = max(worst_R, abs(R - oR) / (1.0 + abs(oR)))
    detail = f"eps in {list(eps_values)}, {len(xs)}x{len(ts)} grid"
    return [
        CheckResult("oracle_u", worst_u <= tol, worst_u, tol, detail),
        CheckResult("oracle_R", worst_R <= tol, worst_R, tol, detail),
    ]


def hopf_cole_identity(
    data: DeltaRiemannData,
    eps_values: Sequence[float] = (0.5, 0.1),
    xs: Optional[Sequence[float]] = None,
    ts: Optional[Sequence[float]] = None,
    tol: float = 1e-10,
) -> CheckResult:
    """Explicit velocity formula against ``-eps V_x / V`` from the closed-form ``V``."""
    if xs is None or ts is None:
        gx, gt = standard_grid(data)
        xs = gx if xs is None else xs
        ts = gt if ts is None else ts
    worst = 0.0
    for eps in eps_values:
        for t in ts:
            for x in xs:
                u = viscous_u(data, eps, float(x), float(t), allow_nodes=True)
                w = hopf_cole_u(data, eps, float(x), float(t))
                worst = max(worst, abs(u - w) / max(abs(w), 1e-300) if abs(w) > 1e-300 else abs(u - w))
    return CheckResult("hopf_cole_identity", worst <= tol, worst, tol, "relative")


@dataclass
class VerifySettings:
    times: tuple[float, ...] = (0.5, 1.0, 2.0)
    schedule: EpsSchedule = field(default_factory=EpsSchedule)
    margin: float = 0.1
    converge_tol: float = 0.05
    plateau_tol: float = 1e-3
    localize_tol: float = 0.05
    oracle_eps: tuple[float, ...] = (0.5, 0.1)
    oracle_tol: float = 1e-6


def verify_all(
    data: DeltaRiemannData,
    settings: Optional[VerifySettings] = None,
    solution: Optional[lim.LimitSolution] = None,
    sum_tolerance: float = 0.0,
) -> list[CheckResult]:
    """Every check of the package for one datum, in a fixed order."""
    settings = settings or VerifySettings()
    sol = solution or lim.build_solution(data, sum_tolerance)
    checks = list(oracle_agreement(data, settings.oracle_eps, tol=settings.oracle_tol))
    checks.append(hopf_cole_identity(data, settings.oracle_eps))
    checks.extend(invariant_suite(data, solution=sol))

    report = converge_scan(data, settings.times, settings.schedule, settings.margin, solution=sol)
    last = report.rows[-1]
    checks.append(CheckResult(
        "converge_u", last.sup_error_u <= settings.converge_tol, last.sup_error_u, settings.converge_tol,
        f"eps = {last.eps!r}, probes = {last.probe_count}, excluded = {last.excluded_near_curve}",
    ))
    checks.append(CheckResult(
        "converge_monotone", report.monotone_flag, 0.0, 0.0,
        "sup errors: " + ", ".join(f"{r.eps!r}: u={r.sup_error_u:.3e} R={r.sup_error_R:.3e}" for r in report.rows),
    ))

    eps = settings.schedule.values[-1]
    worst_plateau = worst_offset = 0.0
    for t in settings.times:
        for row in plateau_check(data, eps, t, solution=sol):
            if not row.skipped:
                worst_plateau = max(worst_plateau, row.deviation)
        for peak in locate_delta(data, eps, t, solution=sol).peaks:
            worst_offset = max(worst_offset, peak.offset)
    checks.append(CheckResult("plateau", worst_plateau <= settings.plateau_tol, worst_plateau,
                              settings.plateau_tol, f"eps = {eps!r}"))
    checks.append(CheckResult("delta_localization", worst_offset <= settings.localize_tol, worst_offset,
                              settings.localize_tol, f"eps = {eps!r}"))
    return checks
