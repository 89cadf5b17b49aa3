"""Exception types shared across the package."""


class ZpgdError(Exception):
    """Base class for all package errors."""


class DomainError(ZpgdError, ValueError):
    """Argument outside the domain of the operation (eps <= 0, t <= 0, nan...)."""


class RangeError(ZpgdError, OverflowError):
    """Result would not be representable as a finite double."""


class EvaluationAtJump(ZpgdError, ValueError):
    """Evaluation requested exactly at a jump point of the initial data."""

    def __init__(self, x, node=None):
        msg = f"evaluation at jump: x = {x!r}"
        if node is not None:
            msg += f" coincides with node {node}"
        super().__init__(msg)
        self.x = x
        self.node = node


class UncoveredCase(ZpgdError, ValueError):
    """Initial weights outside the hypotheses of the case analysis."""


class InvariantViolation(ZpgdError, RuntimeError):
    """An internal mathematical invariant failed numerically."""


class OracleConvergenceError(ZpgdError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate, error_bound):
        super().__init__(f"{message} (estimate={estimate!r}, error bound={error_bound!r})")
        self.estimate = estimate
        self.error_bound = error_bound


class LocalizationError(ZpgdError, RuntimeError):
    """No peak of the density gradient was found inside the search window."""


class ConfigurationError(ZpgdError, ValueError):
    """Harness or CLI configuration cannot be satisfied."""
