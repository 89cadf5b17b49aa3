"""Complementary error function in the unnormalised convention.

Throughout the package ``erfc`` means

    erfc_integral(z) = integral from z to infinity of exp(-s**2) ds
                  = (sqrt(pi) / 2) * scipy.special.erfc(z).

Every closed form in :mod:`zpgd.viscous` is written in this convention, so
the conversion happens here and nowhere else.

For ``z >= 8`` the log-domain value comes from the large-argument expansion

    erfc_integral(z) = exp(-z**2) / (2 z) * sum_n (-1)**n (2n-1)!! / (2 z**2)**n

summed up to its smallest term; below the switch point scipy's ``erfc`` and
``erfcx`` are used.  The two branches agree to better than 1e-13 relative at
the switch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .errors import DomainError, RangeError

SQRT_PI = math.sqrt(math.pi)
HALF_SQRT_PI = 0.5 * SQRT_PI
LOG_HALF_SQRT_PI = math.log(HALF_SQRT_PI)

ASYMPTOTIC_SWITCH = 8.0
SCALED_NEGATIVE_LIMIT = -40.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _check_finite(z: float) -> float:
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"argument must be finite, got {z!r}")
    return z


def asymptotic_series(z: float) -> float:
    """Return ``2 z exp(z**2) erfc_integral(z)`` from the divergent series.

    Terms are accumulated while they keep shrinking; for ``z >= 8`` the
    smallest term is far below double precision.
    """
    inv = 1.0 / (2.0 * z * z)
    total = 1.0
    term = 1.0
    n = 0
    while True:
        ratio = -(2 * n + 1) * inv
        if abs(ratio) >= 1.0:
            break
        term *= ratio
        total += term
        n += 1
        if abs(term) < 1e-18 * abs(total):
            break
    return total


def log_erfc_integral(z: float) -> float:
    """Natural log of :func:`erfc_integral`, finite for every finite ``z``."""
    z = _check_finite(z)
    if z >= ASYMPTOTIC_SWITCH:
        return -z * z - math.log(2.0 * z) + math.log(asymptotic_series(z))
    if z >= 0.0:
        return LOG_HALF_SQRT_PI + math.log(special.erfcx(z)) - z * z
    return LOG_HALF_SQRT_PI + math.log(special.erfc(z))


def erfc_integral(z: float) -> float:
    """``∫_z^∞ exp(-s²) ds``.

    >>> round(erfc_integral(0.0), 10)
    0.8862269255
    """
    z = _check_finite(z)
    if z >= ASYMPTOTIC_SWITCH:
        return math.exp(log_erfc_integral(z))
    return HALF_SQRT_PI * float(special.erfc(z))


def erfc_scaled(z: float) -> float:
    """``z * erfc_integral(z) * exp(z**2)``; tends to 1/2 from below.

    ``exp(z**2)`` is never formed for positive arguments.  For very negative
    arguments the value is astronomically large and a :class:`RangeError` is
    raised instead of returning ``inf``.
    """
    z = _check_finite(z)
    if z < SCALED_NEGATIVE_LIMIT:
        raise RangeError(f"erfc_scaled({z!r}): argument below {SCALED_NEGATIVE_LIMIT}")
    if z >= ASYMPTOTIC_SWITCH:
        return 0.5 * asymptotic_series(z)
    value = z * HALF_SQRT_PI * float(special.erfcx(z))
    if not math.isfinite(value):
        raise RangeError(f"erfc_scaled({z!r}) overflows double precision")
    return value


@dataclass(frozen=True)
class ErfcValue:
    value: float
    log_value: float


def erfc_value(z: float) -> ErfcValue:
    """Pair of linear and log values; ``value`` may underflow, ``log_value`` never does."""
    log_value = log_erfc_integral(z)
    return ErfcValue(value=math.exp(log_value), log_value=log_value)


def log1mexp(x: float) -> float:
    """``log(1 - exp(x))`` for ``x <= 0``."""
    if x > 0.0:
        raise DomainError(f"log1mexp needs x <= 0, got {x!r}")
    if x == 0.0:
        return -math.inf
    if x > -math.log(2.0):
        return math.log(-math.expm1(x))
    return math.log1p(-math.exp(x))


def log_abs_expm1(y: float) -> float:
    """``log|exp(y) - 1|``, safe for large ``|y|``."""
    if y == 0.0:
        return -math.inf
    if y > 0.0:
        return y + log1mexp(-y)
    return log1mexp(y)


def log_erfc_diff(p: float, q: float) -> float:
    """``log(erfc_integral(p) - erfc_integral(q))`` for ``0 <= p < q <= inf``.

    Short intervals go through 16-point Gauss-Legendre on the shifted
    integrand so the subtraction never cancels.
    """
    if not (0.0 <= p < q):
        raise DomainError(f"log_erfc_diff needs 0 <= p < q, got p={p!r}, q={q!r}")
    if math.isinf(q):
        return log_erfc_integral(p)
    half = 0.5 * (q - p)
    mid = 0.5 * (p + q)
    if half * (1.0 + mid) <= 0.25:
        u = half * _GL_NODES
        inner = float(np.dot(_GL_WEIGHTS, np.exp(-(2.0 * mid * u + u * u))))
        return -mid * mid + math.log(half * inner)
    lp = log_erfc_integral(p)
    lq = log_erfc_integral(q)
    return lp + log1mexp(lq - lp)


def log_erfc_central(left: float, right: float) -> float:
    """``log(sqrt(pi) - erfc_integral(left) - erfc_integral(right))`` for ``left, right >= 0``.

    This is the mass of ``exp(-s**2)`` on ``(-left, right)``.
    """
    if left < 0.0 or right < 0.0 or (left == 0.0 and right == 0.0):
        raise DomainError(f"log_erfc_central needs nonnegative, not both zero, got {left!r}, {right!r}")
    el = 1.0 if math.isinf(left) else float(special.erf(left))
    er = 1.0 if math.isinf(right) else float(special.erf(right))
    return LOG_HALF_SQRT_PI + math.log(el + er)


def log_gauss_interval(lo: float, hi: float) -> float:
    """``log ∫_lo^hi exp(-s²) ds`` for ``lo < hi`` (either may be infinite)."""
    if not lo < hi:
        raise DomainError(f"empty interval ({lo!r}, {hi!r})")
    if lo >= 0.0:
        return log_erfc_diff(lo, hi)
    if hi <= 0.0:
        return log_erfc_diff(-hi, -lo)
    return log_erfc_central(-lo, hi)


class LogRatio(NamedTuple):
    value: float
    degenerate: bool


def log_erfc_ratio(p: float, q: float, x: float, t: float, eps: float) -> LogRatio:
    """``log erfc(P) - log erfc(Q)`` with ``P = |x-p|/sqrt(2 t eps)``, ``Q`` likewise.

    Diverges to ``-inf`` as ``eps -> 0`` when ``x`` is nearer to ``q`` and to
    ``+inf`` when nearer to ``p``.  ``degenerate`` marks the equidistant case,
    where no side dominates.
    """
    if p == q:
        raise DomainError("log_erfc_ratio needs p != q")
    if t <= 0.0 or eps <= 0.0:
        raise DomainError(f"need t > 0 and eps > 0, got t={t!r}, eps={eps!r}")
    scale = math.sqrt(2.0 * t * eps)
    dp = abs(x - p)
    dq = abs(x - q)
    value = log_erfc_integral(dp / scale) - log_erfc_integral(dq / scale)
    return LogRatio(value, dp == dq)
