"""Vanishing-viscosity limit: case analysis, wave curves, velocity and density.

The limit velocity is piecewise: zero, or a rarefaction-like fan
``(x - p) / t`` anchored at ``p ∈ {a, b}`` between two bounding curves.  The
density is two point masses riding the carrier curves ``gamma_c`` and
``gamma_d``.

Every curve is a chain of segments of four shapes, all of the form
``alpha + beta * sqrt(t) + gamma * t``.  The switch times between segments
are recomputed by intersecting neighbouring segments.  Closed-form switch
times are kept alongside as ``nominal`` values, and any disagreement with
the recomputed ones is reported by :func:`breakpoint_discrepancies`.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

from .errors import DomainError, InvariantViolation, UncoveredCase
from .viscous import DeltaRiemannData

logger = logging.getLogger(__name__)

POSITION_RTOL = 1e-12
BREAKPOINT_RTOL = 1e-9


class Major(enum.IntEnum):
    CASE1 = 1
    CASE2 = 2
    CASE3 = 3
    CASE4 = 4
    CASE5 = 5
    CASE6 = 6


class Subcase(str, enum.Enum):
    BELOW = "Below"
    AT = "At"
    ABOVE = "Above"


@dataclass(frozen=True)
class CaseTag:
    major: Major
    subcase: Optional[Subcase] = None

    def __str__(self):
        return f"Case{int(self.major)}"

    @property
    def label(self) -> str:
        return str(self) if self.subcase is None else f"{self}/{self.subcase.value}"


class SegmentKind(str, enum.Enum):
    CONSTANT = "Constant"
    SQRT_RIGHT = "SqrtRight"
    SQRT_LEFT = "SqrtLeft"
    LINE = "Line"


@dataclass(frozen=True)
class Segment:
    """One formula of a curve, valid on ``[t_start, t_end]``.

    ``x0`` is the anchor (or the line's value at ``t = 0``); ``param`` is
    ``K > 0`` for the square-root shapes ``x0 ± sqrt(2 K t)`` and the slope for
    a line.
    """

    kind: SegmentKind
    x0: float
    param: float = 0.0
    t_start: float = 0.0
    t_end: float = math.inf

    def position(self, t: float) -> float:
        if self.kind is SegmentKind.CONSTANT:
            return self.x0
        if self.kind is SegmentKind.SQRT_RIGHT:
            return self.x0 + math.sqrt(2.0 * self.param * t)
        if self.kind is SegmentKind.SQRT_LEFT:
            return self.x0 - math.sqrt(2.0 * self.param * t)
        return self.x0 + self.param * t

    def speed(self, t: float) -> float:
        if self.kind is SegmentKind.CONSTANT:
            return 0.0
        if self.kind is SegmentKind.LINE:
            return self.param
        if t <= 0.0:
            return math.inf if self.kind is SegmentKind.SQRT_RIGHT else -math.inf
        v = math.sqrt(self.param / (2.0 * t))
        return v if self.kind is SegmentKind.SQRT_RIGHT else -v

    def coefficients(self) -> tuple[float, float, float]:
        """``(alpha, beta, gamma)`` with position ``alpha + beta sqrt(t) + gamma t``."""
        if self.kind is SegmentKind.CONSTANT:
            return self.x0, 0.0, 0.0
        if self.kind is SegmentKind.SQRT_RIGHT:
            return self.x0, math.sqrt(2.0 * self.param), 0.0
        if self.kind is SegmentKind.SQRT_LEFT:
            return self.x0, -math.sqrt(2.0 * self.param), 0.0
        return self.x0, 0.0, self.param


def const(x0):
    return Segment(SegmentKind.CONSTANT, x0)


def sqrt_right(x0, K):
    return Segment(SegmentKind.SQRT_RIGHT, x0, K)


def sqrt_left(x0, K):
    return Segment(SegmentKind.SQRT_LEFT, x0, K)


def line(mid, slope):
    return Segment(SegmentKind.LINE, mid, slope)


@dataclass(frozen=True)
class Breakpoint:
    curve: str
    index: int
    nominal: Optional[float]
    recomputed: float

    @property
    def discrepancy(self) -> float:
        if self.nominal is None:
            return 0.0
        return abs(self.nominal - self.recomputed) / max(abs(self.recomputed), 1e-300)


@dataclass(frozen=True)
class Curve:
    name: str
    segments: tuple[Segment, ...]
    breakpoints: tuple[Breakpoint, ...] = ()

    def segment_at(self, t: float) -> Segment:
        for seg in self.segments:
            if t <= seg.t_end:
                return seg
        return self.segments[-1]

    def breakpoint_times(self) -> list[float]:
        return [seg.t_end for seg in self.segments[:-1]]

    def is_breakpoint(self, t: float) -> bool:
        return any(abs(t - tb) <= POSITION_RTOL * max(1.0, tb) for tb in self.breakpoint_times())


@dataclass(frozen=True)
class Fan:
    """Region ``left(t) < x < right(t)`` where ``u = (x - center) / t``."""

    center: float
    left: Curve
    right: Curve


@dataclass(frozen=True)
class Carrier:
    curve: Curve
    mass: float


@dataclass(frozen=True)
class LimitSolution:
    data: DeltaRiemannData
    tag: CaseTag
    curves: dict
    fans: tuple[Fan, ...]
    carriers: tuple[Carrier, ...]
    x_star: Optional[float] = None
    t_star: Optional[float] = None
    ordering: tuple[tuple[str, ...], ...] = field(default=())

    def curve(self, name: str) -> Curve:
        return self.curves[name]

    @property
    def gamma_curves(self) -> list[Curve]:
        return [c for name, c in self.curves.items() if name.startswith("gamma")]

    @property
    def bounding_curves(self) -> list[Curve]:
        seen, out = set(), []
        for fan in self.fans:
            for c in (fan.left, fan.right):
                if c.name not in seen:
                    seen.add(c.name)
                    out.append(c)
        return out


class OnDiscontinuity(enum.Enum):
    """Marker returned when a point sits on a curve across which ``u`` jumps."""

    MARKER = "on_discontinuity"

    def __repr__(self):
        return "ON_DISCONTINUITY"


ON_DISCONTINUITY = OnDiscontinuity.MARKER


# --- classification -----------------------------------------------------


def classify(data: DeltaRiemannData, sum_tolerance: float = 0.0) -> CaseTag:
    """Sign case of ``(u_a, u_b)`` and, where relevant, the subcase.

    ``u_a + u_b`` is compared with zero exactly unless ``sum_tolerance`` is
    given.
    """
    ua, ub = data.u_a, data.u_b
    if ua == 0.0 or ub == 0.0:
        raise UncoveredCase(
            f"uncovered case: the case analysis requires u_a != 0 and u_b != 0 (got u_a={ua}, u_b={ub})"
        )
    if ua < 0 and ub > 0:
        return CaseTag(Major.CASE1)
    if ua < 0 and ub < 0:
        return CaseTag(Major.CASE6)
    if ua > 0 and ub > 0:
        xs, _ = _x_star_case2(data)
        return CaseTag(Major.CASE2, _compare(data.d, xs))
    s = ua + ub
    if abs(s) <= sum_tolerance:
        return CaseTag(Major.CASE5, _compare(data.c, 0.5 * (data.a + data.b)))
    xs, _ = _x_star_case345(data)
    return CaseTag(Major.CASE3 if s > 0 else Major.CASE4, _compare(data.c, xs))


def _compare(value, pivot) -> Subcase:
    if value < pivot:
        return Subcase.BELOW
    if value > pivot:
        return Subcase.ABOVE
    return Subcase.AT


def _x_star_case2(data):
    a, b, ua, ub = data.a, data.b, data.u_a, data.u_b
    gap = math.sqrt(ua + ub) - math.sqrt(ub)
    return b + (b - a) * math.sqrt(ub) / gap, (b - a) ** 2 / (2.0 * gap * gap)


def _x_star_case345(data):
    a, b, ua, ub = data.a, data.b, data.u_a, data.u_b
    total = math.sqrt(ua) + math.sqrt(-ub)
    return a + (b - a) * math.sqrt(ua) / total, (b - a) ** 2 / (2.0 * total * total)


def x_star(data: DeltaRiemannData, tag: CaseTag) -> tuple[float, float]:
    """Interaction point ``(x*, t*)`` for Cases 2-5."""
    if tag.major is Major.CASE2:
        return _x_star_case2(data)
    if tag.major in (Major.CASE3, Major.CASE4, Major.CASE5):
        return _x_star_case345(data)
    raise DomainError(f"no interaction point in this case ({tag})")


# --- curve construction ---------------------------------------------------


def _first_crossing(s1: Segment, s2: Segment, after: float) -> float:
    """Smallest ``t >= after`` with ``s1(t) == s2(t)``, solved as a quadratic in sqrt(t)."""
    a1, b1, g1 = s1.coefficients()
    a2, b2, g2 = s2.coefficients()
    A, B, C = g1 - g2, b1 - b2, a1 - a2
    if A == 0.0:
        roots = [-C / B] if B != 0.0 else []
    else:
        disc = B * B - 4.0 * A * C
        if abs(disc) <= 1e-9 * (B * B + abs(4.0 * A * C)):
            disc = 0.0
        if disc < 0.0:
            roots = []
        elif disc == 0.0:
            roots = [-B / (2.0 * A)]
        else:
            q = -0.5 * (B + math.copysign(math.sqrt(disc), B))
            roots = [q / A] + ([C / q] if q != 0.0 else [])
    times = sorted(s * s for s in roots if s >= 0.0)
    floor = after * (1.0 - 1e-12)
    for tt in times:
        if tt >= floor and tt > 0.0:
            return max(tt, after)
    raise InvariantViolation(
        f"segments {s1.kind.value}({s1.x0}, {s1.param}) and {s2.kind.value}({s2.x0}, {s2.param}) "
        f"do not meet after t={after}"
    )


def chain(name: str, pieces) -> Curve:
    """Join ``(segment, nominal_switch_time)`` pieces into a continuous curve.

    The switch time of each junction is the first intersection of the two
    neighbouring formulas after the previous switch.  The nominal value is
    only recorded for comparison.
    """
    segments, records = [], []
    t_prev = 0.0
    for i, (seg, nominal) in enumerate(pieces):
        if i == len(pieces) - 1:
            segments.append(replace(seg, t_start=t_prev, t_end=math.inf))
            break
        t_switch = _first_crossing(seg, pieces[i + 1][0], t_prev)
        segments.append(replace(seg, t_start=t_prev, t_end=t_switch))
        rec = Breakpoint(name, i, nominal, t_switch)
        if rec.discrepancy > BREAKPOINT_RTOL:
            logger.info("%s switch %d: nominal %.17g, continuity gives %.17g", name, i, nominal, t_switch)
        records.append(rec)
        t_prev = t_switch
    return Curve(name, tuple(segments), tuple(records))


def build_solution(data: DeltaRiemannData, sum_tolerance: float = 0.0) -> LimitSolution:
    """All curves, fans and carriers of the case that ``data`` falls in."""
    tag = classify(data, sum_tolerance)
    a, b, c, d = data.a, data.b, data.c, data.d
    ua, ub = data.u_a, data.u_b
    s = ua + ub
    mid = 0.5 * (a + b)
    anchor_a = Curve("anchor_a", (const(a),))
    anchor_b = Curve("anchor_b", (const(b),))
    xs = ts = None
    major = tag.major

    if major is Major.CASE1:
        g_a = chain("gamma_a", [(sqrt_left(a, -ua), None)])
        g_b = chain("gamma_b", [(sqrt_right(b, ub), None)])
        g_c = chain("gamma_c", [(const(c), None)])
        g_d = chain("gamma_d", [(const(d), (d - b) ** 2 / (2 * ub)), (sqrt_right(b, ub), None)])
        curves = [g_a, g_b, g_c, g_d]
        fans = (Fan(a, g_a, anchor_a), Fan(b, anchor_b, g_b))
        ordering = (("gamma_a", "anchor_a", "anchor_b", "gamma_b"),)

    elif major is Major.CASE2:
        xs, ts = _x_star_case2(data)
        gap2 = (math.sqrt(s) - math.sqrt(ub)) ** 2
        t_ab = (b - a) ** 2 / (2 * ua)
        nominal_merge = (d - a) ** 2 / (2 * gap2)
        merged = sqrt_right(a, s)
        shock = line(mid, ua / (b - a))
        g_a = chain("gamma_a", [(sqrt_right(a, ua), t_ab), (shock, nominal_merge), (merged, None)])
        g_b1 = chain("gamma_b1", [(const(b), t_ab), (shock, (b - a) ** 2 / (2 * gap2)), (merged, None)])
        g_b2 = chain("gamma_b2", [(sqrt_right(b, ub), (b - a) ** 2 / (2 * gap2)), (merged, None)])
        g_c = chain(
            "gamma_c",
            [(const(c), (c - a) ** 2 / (2 * ua)), (sqrt_right(a, ua), t_ab), (shock, nominal_merge), (merged, None)],
        )
        if tag.subcase is Subcase.BELOW:
            g_d = chain("gamma_d", [(const(d), (d - b) ** 2 / (2 * ub)), (sqrt_right(b, ub), ts), (merged, None)])
        elif tag.subcase is Subcase.AT:
            g_d = chain("gamma_d", [(const(d), ts), (merged, None)])
        else:
            g_d = chain("gamma_d", [(const(d), (d - b) ** 2 / (2 * ub)), (merged, None)])
        curves = [g_a, g_b1, g_b2, g_c, g_d]
        fans = (Fan(a, anchor_a, g_a), Fan(b, g_b1, g_b2))
        ordering = (("anchor_a", "gamma_a", "gamma_b1", "gamma_b2"),)

    elif major in (Major.CASE3, Major.CASE4, Major.CASE5):
        xs, ts = _x_star_case345(data)
        meet = (b - a) ** 2 / (2 * (math.sqrt(ua) + math.sqrt(-ub)) ** 2)
        front_a = sqrt_right(a, ua)
        front_b = sqrt_left(b, -ub)
        if major is Major.CASE5:
            shock = const(mid)
            g_a = chain("gamma_a", [(front_a, meet), (shock, None)])
            g_b = chain("gamma_b", [(front_b, meet), (shock, None)])
            pivot_pieces = [(shock, None)]
        else:
            shock = line(mid, s / (b - a))
            if major is Major.CASE3:
                merged = sqrt_right(a, s)
                t_end = (b - a) ** 2 / (2 * s)
            else:
                merged = sqrt_left(b, -s)
                t_end = (b - a) ** 2 / (-2 * s)
            pivot_pieces = [(shock, t_end), (merged, None)]
        if tag.subcase is Subcase.BELOW:
            g_c = chain("gamma_c", [(const(c), (c - a) ** 2 / (2 * ua)), (front_a, ts), *pivot_pieces])
        elif tag.subcase is Subcase.AT:
            if major is Major.CASE5:
                g_c = chain("gamma_c", [(const(mid), None)])
            else:
                g_c = chain("gamma_c", [(const(c), ts), *pivot_pieces])
        else:
            g_c = chain("gamma_c", [(const(c), (b - c) ** 2 / (-2 * ub)), (front_b, ts), *pivot_pieces])

        if major is Major.CASE3:
            g_a = chain("gamma_a", [(front_a, meet), (shock, t_end), (merged, None)])
            g_b1 = chain("gamma_b1", [(front_b, meet), (shock, t_end), (merged, None)])
            g_b2 = chain("gamma_b2", [(const(b), t_end), (merged, None)])
            g_d = chain("gamma_d", [(const(d), (d - a) ** 2 / (2 * s)), (merged, None)])
            curves = [g_a, g_b1, g_b2, g_c, g_d]
            fans = (Fan(a, anchor_a, g_a), Fan(b, g_b1, g_b2))
            ordering = (("anchor_a", "gamma_a", "gamma_b1", "gamma_b2"),)
        elif major is Major.CASE4:
            g_a1 = chain("gamma_a1", [(const(a), t_end), (merged, None)])
            g_a2 = chain("gamma_a2", [(front_a, meet), (shock, t_end), (merged, None)])
            g_b = chain("gamma_b", [(front_b, meet), (shock, t_end), (merged, None)])
            g_d = chain("gamma_d", [(const(d), None)])
            curves = [g_a1, g_a2, g_b, g_c, g_d]
            fans = (Fan(a, g_a1, g_a2), Fan(b, g_b, anchor_b))
            ordering = (("gamma_a1", "gamma_a2", "gamma_b", "anchor_b"),)
        else:
            g_d = chain("gamma_d", [(const(d), None)])
            curves = [g_a, g_b, g_c, g_d]
            fans = (Fan(a, anchor_a, g_a), Fan(b, g_b, anchor_b))
            ordering = (("anchor_a", "gamma_a", "gamma_b", "anchor_b"),)

    else:  # Case 6
        gap2 = (math.sqrt(-s) - math.sqrt(-ua)) ** 2
        t_late = (b - a) ** 2 / (2 * gap2)
        t_hit = (b - a) ** 2 / (-2 * ub)
        merged = sqrt_left(b, -s)
        shock = line(mid, ub / (b - a))
        front_b = sqrt_left(b, -ub)
        g_a1 = chain("gamma_a1", [(sqrt_left(a, -ua), t_late), (merged, None)])
        g_a2 = chain("gamma_a2", [(const(a), t_hit), (shock, t_late), (merged, None)])
        g_b = chain("gamma_b", [(front_b, t_hit), (shock, t_late), (merged, None)])
        g_c = chain("gamma_c", [(const(c), (b - c) ** 2 / (-2 * ub)), (front_b, t_hit), (shock, t_late), (merged, None)])
        g_d = chain("gamma_d", [(const(d), None)])
        curves = [g_a1, g_a2, g_b, g_c, g_d]
        fans = (Fan(a, g_a1, g_a2), Fan(b, g_b, anchor_b))
        ordering = (("gamma_a1", "gamma_a2", "gamma_b", "anchor_b"),)

    by_name = {cv.name: cv for cv in curves}
    by_name["anchor_a"] = anchor_a
    by_name["anchor_b"] = anchor_b
    ordering = ordering + (("gamma_c", "gamma_d"),)
    return LimitSolution(
        data=data,
        tag=tag,
        curves=by_name,
        fans=fans,
        carriers=(Carrier(by_name["gamma_c"], data.rho_c), Carrier(by_name["gamma_d"], data.rho_d)),
        x_star=xs,
        t_star=ts,
        ordering=ordering,
    )


def breakpoint_discrepancies(sol: LimitSolution, rtol: float = BREAKPOINT_RTOL) -> list[Breakpoint]:
    """Junctions whose nominal switch time disagrees with the continuity solve."""
    return [bp for cv in sol.gamma_curves for bp in cv.breakpoints if bp.discrepancy > rtol]


def corrupt_curve(sol: LimitSolution, name: str, shift: float = 1e-3) -> LimitSolution:
    """Copy of ``sol`` whose curve ``name`` has its last segment displaced (negative control)."""
    cv = sol.curves[name]
    segs = list(cv.segments)
    segs[-1] = replace(segs[-1], x0=segs[-1].x0 + shift)
    bad = replace(cv, segments=tuple(segs))

    def swap(c):
        return bad if c.name == name else c

    curves = {k: swap(v) for k, v in sol.curves.items()}
    fans = tuple(Fan(f.center, swap(f.left), swap(f.right)) for f in sol.fans)
    carriers = tuple(Carrier(swap(cr.curve), cr.mass) for cr in sol.carriers)
    return replace(sol, curves=curves, fans=fans, carriers=carriers)


# --- evaluation -----------------------------------------------------------


def _check_t(t):
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"t must be positive and finite, got {t!r}")


def curve_position(curve: Curve, t: float) -> float:
    _check_t(t)
    return curve.segment_at(t).position(t)


def initial_position(curve: Curve) -> float:
    return curve.segments[0].position(0.0)


def curve_speed(curve: Curve, t: float) -> tuple[float, float]:
    """One-sided time derivatives ``(left, right)``; equal except at switch times."""
    _check_t(t)
    for i, seg in enumerate(curve.segments):
        if t < seg.t_end or i == len(curve.segments) - 1:
            v = seg.speed(t)
            if i > 0 and abs(t - seg.t_start) <= POSITION_RTOL * max(1.0, t):
                return curve.segments[i - 1].speed(t), v
            return v, v
        if abs(t - seg.t_end) <= POSITION_RTOL * max(1.0, t):
            return seg.speed(t), curve.segments[i + 1].speed(t)
    raise AssertionError("unreachable")


def _tol(x: float) -> float:
    return POSITION_RTOL * max(1.0, abs(x))


def one_sided_u(sol: LimitSolution, x: float, t: float) -> tuple[float, float]:
    """Limits of ``u`` from the left and from the right of ``x`` at time ``t``."""
    _check_t(t)
    tol = _tol(x)
    ul = ur = 0.0
    for fan in sol.fans:
        lo = curve_position(fan.left, t)
        hi = curve_position(fan.right, t)
        if hi - lo <= tol:
            continue
        value = (x - fan.center) / t
        if lo < x - tol and x <= hi + tol:
            ul = value
        if lo - tol <= x and x < hi - tol:
            ur = value
    return ul, ur


def eval_u(sol: LimitSolution, x: float, t: float):
    """Limit velocity, or :data:`ON_DISCONTINUITY` on a curve where ``u`` jumps."""
    ul, ur = one_sided_u(sol, x, t)
    if ul != ur and abs(ul - ur) > 1e-12 * max(1.0, abs(ul), abs(ur)):
        return ON_DISCONTINUITY
    return 0.5 * (ul + ur)


class DeltaEntry(NamedTuple):
    x: float
    mass: float
    merged: bool = False


def delta_positions(sol: LimitSolution, t: float) -> list[DeltaEntry]:
    """Locations and masses of the density's point masses at time ``t``."""
    _check_t(t)
    (cc, cd) = sol.carriers
    xc, xd = curve_position(cc.curve, t), curve_position(cd.curve, t)
    if abs(xc - xd) <= POSITION_RTOL * max(1.0, abs(xc), abs(xd)):
        return [DeltaEntry(0.5 * (xc + xd), cc.mass + cd.mass, True)]
    return [DeltaEntry(xc, cc.mass), DeltaEntry(xd, cd.mass)]


def limit_R(sol: LimitSolution, x: float, t: float) -> float:
    """Plateau value of the integrated density (``nan`` on a carrier)."""
    (cc, cd) = sol.carriers
    xc, xd = curve_position(cc.curve, t), curve_position(cd.curve, t)
    tol = _tol(x)
    if abs(x - xc) <= tol or abs(x - xd) <= tol:
        return math.nan
    return (cc.mass if x > xc else 0.0) + (cd.mass if x > xd else 0.0)


class OneSidedResiduals(NamedTuple):
    left: float
    right: float


def rankine_hugoniot_residual(sol: LimitSolution, curve: Curve, t: float):
    """``gamma'(t) - (u_l + u_r) / 2`` along ``curve``.

    At a switch time of the curve the two one-sided residuals are returned
    as :class:`OneSidedResiduals`.
    """
    x = curve_position(curve, t)
    ul, ur = one_sided_u(sol, x, t)
    avg = 0.5 * (ul + ur)
    vl, vr = curve_speed(curve, t)
    if vl != vr:
        return OneSidedResiduals(vl - avg, vr - avg)
    return vl - avg


def momentum(sol: LimitSolution, t: float) -> float:
    """``∫ u(x, t) dx`` summed over the fans; conserved and equal to ``u_a + u_b``."""
    _check_t(t)
    total = 0.0
    for fan in sol.fans:
        lo = curve_position(fan.left, t)
        hi = curve_position(fan.right, t)
        if hi > lo:
            total += (hi - lo) * (hi + lo - 2.0 * fan.center) / (2.0 * t)
    return total


def discontinuity_positions(sol: LimitSolution, t: float) -> list[float]:
    """Positions at time ``t`` of bounding curves across which ``u`` jumps."""
    out = []
    for cv in sol.bounding_curves:
        x = curve_position(cv, t)
        ul, ur = one_sided_u(sol, x, t)
        if abs(ul - ur) > 1e-12 * max(1.0, abs(ul), abs(ur)):
            out.append(x)
    return sorted(set(out))


def all_breakpoints(sol: LimitSolution) -> list[float]:
    return sorted({tb for cv in sol.curves.values() for tb in cv.breakpoint_times()})
