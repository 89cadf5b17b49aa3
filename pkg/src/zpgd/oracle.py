"""Heat-kernel quadrature, independent of the erfc closed forms.

``V`` and ``S`` are convolutions of the Gaussian kernel with piecewise
constant data whose levels are ``exp(-U/eps)``.  Each piece is integrated
with QUADPACK after factoring out the integrand's maximum over the piece,
so the quadrature only ever sees values in ``[0, 1]``.  The velocity uses
the differentiated kernel inside the same quadrature.

Reliable for ``eps >= 0.05``; below that the integrands become too stiff to
be a useful reference.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy import integrate

from .errors import DomainError, OracleConvergenceError
from .logsum import SignedLogSum, ratio
from .viscous import DeltaRiemannData


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-10
    max_subdivisions: int = 200
    window_halfwidth_sigmas: float = 12.0

    def __post_init__(self):
        if not self.relative_tolerance > 0:
            raise DomainError("relative_tolerance must be positive")
        if self.window_halfwidth_sigmas < 8:
            raise DomainError("window_halfwidth_sigmas must be at least 8")


DEFAULT_SPEC = QuadratureSpec()


def _pieces_V(data: DeltaRiemannData, eps: float):
    """``(lo, hi, sign, log|level|)`` for ``V(., 0)``."""
    return [
        (-math.inf, data.a, 1, 0.0),
        (data.a, data.b, 1, -data.u_a / eps),
        (data.b, math.inf, 1, -(data.u_a + data.u_b) / eps),
    ]


def _pieces_S(data: DeltaRiemannData, eps: float):
    out = []
    levels = [
        (data.c, data.b, data.rho_c, -data.u_a / eps),
        (data.b, data.d, data.rho_c, -(data.u_a + data.u_b) / eps),
        (data.d, math.inf, data.rho_c + data.rho_d, -(data.u_a + data.u_b) / eps),
    ]
    for lo, hi, r, log_level in levels:
        if r != 0.0:
            out.append((lo, hi, 1 if r > 0 else -1, math.log(abs(r)) + log_level))
    return out


def _quad(f, lo, hi, spec: QuadratureSpec, what: str) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            f, lo, hi, epsabs=0.0, epsrel=spec.relative_tolerance, limit=spec.max_subdivisions
        )
    if err > max(spec.relative_tolerance * abs(val), 1e-300) * 10.0:
        raise OracleConvergenceError(f"quadrature of {what} on ({lo}, {hi}) did not converge", val, err)
    return val


def _kernel_sum(pieces, x, t, eps, spec, derivative=False) -> SignedLogSum:
    """``∫ K(x - y) f(y) dy`` (or with ``∂x K``) over each piece, in log form."""
    h = 2.0 * t * eps  # kernel exp(-(x-y)^2 / h)
    width = spec.window_halfwidth_sigmas * math.sqrt(h)
    log_norm = -0.5 * math.log(math.pi * h)
    out = SignedLogSum()
    for lo, hi, sign, log_level in pieces:
        y0 = min(max(x, lo), hi)  # maximiser of the kernel over the piece
        base = (x - y0) ** 2
        a = max(lo, y0 - width)
        b = min(hi, y0 + width)
        if not a < b:
            continue

        def g(y):
            return math.exp(-((x - y) ** 2 - base) / h)

        log_scale = log_level + log_norm - base / h
        if not derivative:
            out.add(sign, log_scale + math.log(_quad(g, a, b, spec, "kernel")))
            continue
        # d/dx K = -2 (x - y) / h * K; split at y = x so each part has one sign
        for lo_part, hi_part in ((a, min(b, x)), (max(a, x), b)):
            if not lo_part < hi_part:
                continue
            val = _quad(lambda y: (y - x) * g(y), lo_part, hi_part, spec, "kernel derivative")
            if val != 0.0:
                s = 1 if val > 0 else -1
                out.add(sign * s, log_scale + math.log(2.0 * abs(val) / h))
    return out


def _check(eps, t):
    if not (eps > 0 and t > 0):
        raise DomainError(f"need eps > 0 and t > 0, got eps={eps!r}, t={t!r}")


def oracle_V(data: DeltaRiemannData, eps: float, x: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> SignedLogSum:
    _check(eps, t)
    return _kernel_sum(_pieces_V(data, eps), x, t, eps, spec)


def oracle_S(data: DeltaRiemannData, eps: float, x: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> SignedLogSum:
    _check(eps, t)
    return _kernel_sum(_pieces_S(data, eps), x, t, eps, spec)


def oracle_Vx(data: DeltaRiemannData, eps: float, x: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> SignedLogSum:
    _check(eps, t)
    return _kernel_sum(_pieces_V(data, eps), x, t, eps, spec, derivative=True)


def oracle_u(data: DeltaRiemannData, eps: float, x: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``-eps V_x / V`` with both integrals from quadrature."""
    V = oracle_V(data, eps, x, t, spec)
    Vx = oracle_Vx(data, eps, x, t, spec)
    return -ratio(Vx, V, math.log(eps))


def oracle_R(data: DeltaRiemannData, eps: float, x: float, t: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    return ratio(oracle_S(data, eps, x, t, spec), oracle_V(data, eps, x, t, spec))
