"""Exact viscous solutions of the modified adhesion model.

With ``U`` and ``R`` the primitives of the velocity and density, the
Hopf-Cole substitutions ``V = exp(-U/eps)`` and ``S = R exp(-U/eps)`` turn
the viscous system into two heat equations ``V_t = (eps/2) V_xx`` (same
for ``S``) with piecewise-constant data.  Convolving with the heat kernel
gives ``V`` and ``S`` as weighted sums of Gaussian masses of intervals, and

    u_eps = -eps V_x / V,        R_eps = S / V.

Each interval mass is evaluated with arguments made nonnegative according to
which of the five regions ``x < a < c < b < d`` the point lies in, and every
product with ``exp(-U/eps)`` is carried as a log-magnitude.  Nothing of size
``exp(K/eps)`` is ever formed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DomainError, EvaluationAtJump, InvariantViolation
from .logsum import SignedLogSum, ratio
from .special_fn import (
    SQRT_PI,
    log_abs_expm1,
    log_erfc_central,
    log_erfc_diff,
)

LOG_SQRT_PI = math.log(SQRT_PI)


@dataclass(frozen=True)
class DeltaRiemannData:
    """Two-point delta data: ``u_a δ_a + u_b δ_b`` and ``rho_c δ_c + rho_d δ_d``."""

    a: float
    c: float
    b: float
    d: float
    u_a: float
    u_b: float
    rho_c: float
    rho_d: float

    def __post_init__(self):
        for name in ("a", "c", "b", "d", "u_a", "u_b", "rho_c", "rho_d"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not (self.a < self.c < self.b < self.d):
            raise DomainError(
                f"positions must satisfy a < c < b < d, got "
                f"a={self.a}, c={self.c}, b={self.b}, d={self.d}"
            )

    @property
    def nodes(self) -> tuple[float, float, float, float]:
        return (self.a, self.c, self.b, self.d)

    def replace(self, **changes) -> "DeltaRiemannData":
        return replace(self, **changes)


@dataclass(frozen=True)
class ScaledVariables:
    A: float
    B: float
    C: float
    D: float


def scaled_variables(data: DeltaRiemannData, eps: float, x: float, t: float) -> ScaledVariables:
    sigma = _sigma(eps, t)
    return ScaledVariables(
        A=abs(x - data.a) / sigma,
        B=abs(x - data.b) / sigma,
        C=abs(x - data.c) / sigma,
        D=abs(x - data.d) / sigma,
    )


def _sigma(eps: float, t: float) -> float:
    if not (eps > 0.0 and math.isfinite(eps)):
        raise DomainError(f"eps must be positive and finite, got {eps!r}")
    if not (t > 0.0 and math.isfinite(t)):
        raise DomainError(f"t must be positive and finite, got {t!r}")
    return math.sqrt(2.0 * t * eps)


def initial_profiles(data: DeltaRiemannData, x: float) -> tuple[float, float]:
    """Integrated initial data ``(U(x,0), R(x,0))``."""
    region = region_of(data, x)
    U0 = 0.0 if region == 1 else (data.u_a if region in (2, 3) else data.u_a + data.u_b)
    R0 = {1: 0.0, 2: 0.0, 3: data.rho_c, 4: data.rho_c, 5: data.rho_c + data.rho_d}[region]
    return U0, R0


def region_of(data: DeltaRiemannData, x: float) -> int:
    """Region index 1..5 of ``x`` among ``a < c < b < d``."""
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    for name, node in zip("acbd", data.nodes):
        if x == node:
            raise EvaluationAtJump(x, name)
    if x < data.a:
        return 1
    if x < data.c:
        return 2
    if x < data.b:
        return 3
    if x < data.d:
        return 4
    return 5


def _regions(data: DeltaRiemannData, x: float, allow_nodes: bool) -> tuple[int, ...]:
    """Region(s) whose rewrite is used at ``x``; two one-sided ones at a node."""
    try:
        return (region_of(data, x),)
    except EvaluationAtJump:
        if not allow_nodes:
            raise
    k = data.nodes.index(x)
    return (k + 1, k + 2)


# Index of the piece of the initial data that contains x, per region.
_V_CONTAINING = {1: 0, 2: 1, 3: 1, 4: 2, 5: 2}
_S_CONTAINING = {1: 0, 2: 0, 3: 1, 4: 2, 5: 3}


def _piece_mass(lo: float, hi: float, x: float, sigma: float, where: int) -> float:
    """Log Gaussian mass of the piece ``(lo, hi)``; ``where`` is -1/0/+1 for left/contains/right."""
    if where > 0:
        return log_erfc_diff((lo - x) / sigma, (hi - x) / sigma)
    if where < 0:
        return log_erfc_diff((x - hi) / sigma, (x - lo) / sigma)
    return log_erfc_central((x - lo) / sigma, (hi - x) / sigma)


def _heat_sum(breaks, weights, x, sigma, containing) -> SignedLogSum:
    """``(1/sqrt(pi)) * sum_k w_k * mass(piece_k)``, ``weights`` as (sign, log|w|)."""
    edges = (-math.inf, *breaks, math.inf)
    out = SignedLogSum()
    for k, (sign, log_w) in enumerate(weights):
        if sign == 0:
            continue
        where = (k > containing) - (k < containing)
        log_mass = _piece_mass(edges[k], edges[k + 1], x, sigma, where)
        out.add(sign, log_w + log_mass - LOG_SQRT_PI)
    return out


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def _log_abs(v: float) -> float:
    return math.log(abs(v)) if v != 0.0 else -math.inf


def _v_weights(data: DeltaRiemannData, eps: float):
    return [
        (1, 0.0),
        (1, -data.u_a / eps),
        (1, -(data.u_a + data.u_b) / eps),
    ]


def _s_weights(data: DeltaRiemannData, eps: float):
    rc, rcd = data.rho_c, data.rho_c + data.rho_d
    return [
        (0, -math.inf),
        (_sign(rc), _log_abs(rc) - data.u_a / eps),
        (_sign(rc), _log_abs(rc) - (data.u_a + data.u_b) / eps),
        (_sign(rcd), _log_abs(rcd) - (data.u_a + data.u_b) / eps),
    ]


def _V_S_region(data, eps, x, t, region):
    sigma = _sigma(eps, t)
    V = _heat_sum((data.a, data.b), _v_weights(data, eps), x, sigma, _V_CONTAINING[region])
    S = _heat_sum((data.c, data.b, data.d), _s_weights(data, eps), x, sigma, _S_CONTAINING[region])
    return V, S


def _certify_positive(V: SignedLogSum, x, t):
    if V.collapse()[0] != 1:
        raise InvariantViolation(f"heat solution V is not positive at x={x!r}, t={t!r}")


def viscous_V_S(
    data: DeltaRiemannData, eps: float, x: float, t: float, *, allow_nodes: bool = False
) -> tuple[SignedLogSum, SignedLogSum]:
    """Closed-form heat solutions ``V`` and ``S`` as log-domain sums.

    At a node (only with ``allow_nodes``) the left-region rewrite is used;
    it is continuous there.
    """
    region = _regions(data, x, allow_nodes)[0]
    V, S = _V_S_region(data, eps, x, t, region)
    _certify_positive(V, x, t)
    return V, S


def _gaussian_jumps(nodes, jumps, x, sigma) -> SignedLogSum:
    """``(1/(sigma sqrt(pi))) * sum_n jump_n exp(-((n-x)/sigma)**2)``."""
    out = SignedLogSum()
    for node, (sign, log_j) in zip(nodes, jumps):
        z = (node - x) / sigma
        out.add(sign, log_j - z * z - math.log(sigma) - LOG_SQRT_PI)
    return out


def viscous_V_S_x(data: DeltaRiemannData, eps: float, x: float, t: float) -> tuple[SignedLogSum, SignedLogSum]:
    """Analytic ``x``-derivatives of ``V`` and ``S``.

    The derivative of a Gaussian-weighted step function only sees the jumps,
    so each node contributes ``(w_right - w_left) * kernel(x - node)``.
    """
    sigma = _sigma(eps, t)
    ua, ub = data.u_a / eps, data.u_b / eps
    # exp(-ua) - 1 and exp(-ua) (exp(-ub) - 1)
    jump_a = (_sign(-ua), log_abs_expm1(-ua))
    jump_b = (_sign(-ub), -ua + log_abs_expm1(-ub))
    Vx = _gaussian_jumps((data.a, data.b), (jump_a, jump_b), x, sigma)
    rc, rd = data.rho_c, data.rho_d
    s_jumps = (
        (_sign(rc), _log_abs(rc) - ua),
        (_sign(rc) * _sign(-ub), _log_abs(rc) - ua + log_abs_expm1(-ub)),
        (_sign(rd), _log_abs(rd) - ua - ub),
    )
    Sx = _gaussian_jumps((data.c, data.b, data.d), s_jumps, x, sigma)
    return Vx, Sx


def _u_numerator(data: DeltaRiemannData, eps: float, x: float, t: float) -> SignedLogSum:
    """Numerator of the explicit velocity formula (Gaussian terms at a and b)."""
    sv = scaled_variables(data, eps, x, t)
    ua, ub = data.u_a / eps, data.u_b / eps
    num = SignedLogSum()
    # exp(-A^2) (1 - exp(-ua))
    num.add(_sign(ua), -sv.A ** 2 + log_abs_expm1(-ua))
    # exp(-B^2) (exp(-ua) - exp(-ua-ub))
    num.add(_sign(ub), -sv.B ** 2 - ua + log_abs_expm1(-ub))
    return num


def _check_x(x: float):
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")


def viscous_u(data: DeltaRiemannData, eps: float, x: float, t: float, *, allow_nodes: bool = False) -> float:
    """Velocity ``u_eps(x, t)`` from the explicit Hopf-Cole representation."""
    _check_x(x)
    sigma = _sigma(eps, t)
    num = _u_numerator(data, eps, x, t)
    vals = []
    for region in _regions(data, x, allow_nodes):
        V, _ = _V_S_region(data, eps, x, t, region)
        _certify_positive(V, x, t)
        # u = (eps / sigma) * num / (sqrt(pi) V)
        vals.append(ratio(num, V, math.log(eps / sigma) - LOG_SQRT_PI))
    return sum(vals) / len(vals)


def viscous_R(data: DeltaRiemannData, eps: float, x: float, t: float, *, allow_nodes: bool = False) -> float:
    """Integrated density ``R_eps(x, t) = S / V``."""
    _check_x(x)
    vals = []
    for region in _regions(data, x, allow_nodes):
        V, S = _V_S_region(data, eps, x, t, region)
        _certify_positive(V, x, t)
        vals.append(ratio(S, V))
    return sum(vals) / len(vals)


def hopf_cole_u(data: DeltaRiemannData, eps: float, x: float, t: float) -> float:
    """``-eps * V_x / V`` with the analytic jump derivative of ``V``."""
    V, _ = viscous_V_S(data, eps, x, t, allow_nodes=True)
    Vx, _ = viscous_V_S_x(data, eps, x, t)
    return -ratio(Vx, V, math.log(eps))


def viscous_R_x(data: DeltaRiemannData, eps: float, x: float, t: float) -> float:
    """Viscous density ``rho_eps = d/dx (S/V) = S_x/V - R V_x/V``."""
    V, S = viscous_V_S(data, eps, x, t, allow_nodes=True)
    Vx, Sx = viscous_V_S_x(data, eps, x, t)
    R = ratio(S, V)
    num = SignedLogSum(list(Sx.terms))
    if R != 0.0:
        num.extend(Vx, sign=-_sign(R), log_scale=math.log(abs(R)))
    return ratio(num, V)


def viscous_u_R(data: DeltaRiemannData, eps: float, x: float, t: float) -> tuple[float, float]:
    """Both fields at one point; node values are averages of the one-sided rewrites."""
    return (
        viscous_u(data, eps, x, t, allow_nodes=True),
        viscous_R(data, eps, x, t, allow_nodes=True),
    )
