"""Delta-Riemann problem for zero-pressure gas dynamics with vanishing viscosity.

Closed-form viscous solutions via the Hopf-Cole transformation, the
inviscid limit as explicit curves, a quadrature oracle, and a harness
comparing them.
"""
from .errors import (
    ConfigurationError,
    DomainError,
    EvaluationAtJump,
    InvariantViolation,
    LocalizationError,
    OracleConvergenceError,
    RangeError,
    UncoveredCase,
    ZpgdError,
)
from .limit import ON_DISCONTINUITY, CaseTag, Major, Subcase, build_solution, classify
from .viscous import DeltaRiemannData, viscous_R, viscous_u, viscous_u_R

__all__ = [
    "CaseTag", "ConfigurationError", "DeltaRiemannData", "DomainError", "EvaluationAtJump",
    "InvariantViolation", "LocalizationError", "Major", "ON_DISCONTINUITY", "OracleConvergenceError",
    "RangeError", "Subcase", "UncoveredCase", "ZpgdError", "build_solution", "classify",
    "viscous_R", "viscous_u", "viscous_u_R",
]
__version__ = "0.1.0"
