"""Signed sums of numbers held as ``sign * exp(log_magnitude)``."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable


@dataclass
class SignedLogSum:
    """Accumulator for terms whose magnitudes span hundreds of decades.

    Terms are stored unevaluated; :meth:`collapse` pivots on the largest
    log-magnitude and adds the rescaled terms with ``math.fsum`` so the
    result does not depend on insertion order.
    """

    terms: list[tuple[int, float]] = field(default_factory=list)

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, float]]) -> "SignedLogSum":
        out = cls()
        for sign, log_mag in pairs:
            out.add(sign, log_mag)
        return out

    @classmethod
    def from_value(cls, value: float) -> "SignedLogSum":
        out = cls()
        if value != 0.0:
            out.add(1 if value > 0 else -1, math.log(abs(value)))
        return out

    def add(self, sign: int, log_mag: float) -> "SignedLogSum":
        if sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {sign!r}")
        if math.isnan(log_mag) or log_mag == math.inf:
            raise ValueError(f"log magnitude must be < inf, got {log_mag!r}")
        if sign != 0 and log_mag != -math.inf:
            self.terms.append((sign, float(log_mag)))
        return self

    def extend(self, other: "SignedLogSum", sign: int = 1, log_scale: float = 0.0) -> "SignedLogSum":
        """Append ``sign * exp(log_scale) * other``."""
        for s, lm in other.terms:
            self.add(s * sign, lm + log_scale)
        return self

    def collapse(self) -> tuple[int, float]:
        """Return ``(sign, log|sum|)``; an exact zero is ``(0, -inf)``."""
        if not self.terms:
            return 0, -math.inf
        pivot = max(lm for _, lm in self.terms)
        total = math.fsum(s * math.exp(lm - pivot) for s, lm in self.terms)
        if total == 0.0:
            return 0, -math.inf
        return (1 if total > 0 else -1), pivot + math.log(abs(total))

    def log_abs(self) -> float:
        return self.collapse()[1]

    def value(self) -> float:
        sign, log_mag = self.collapse()
        if sign == 0:
            return 0.0
        if log_mag > 709.78:
            return sign * math.inf
        return sign * math.exp(log_mag)

    def __len__(self) -> int:
        return len(self.terms)


def ratio(num: SignedLogSum, den: SignedLogSum, log_scale: float = 0.0) -> float:
    """``exp(log_scale) * num / den`` evaluated in the log domain."""
    sn, ln = num.collapse()
    sd, ld = den.collapse()
    if sd == 0:
        raise ZeroDivisionError("denominator collapsed to zero")
    if sn == 0:
        return 0.0
    exponent = ln - ld + log_scale
    if exponent > 709.78:
        return sn * sd * math.inf
    return sn * sd * math.exp(exponent)
