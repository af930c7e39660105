"""
Lab Exceptions
Error hierarchy shared by every numerical module and the CLI
"""

from typing import Any, Dict, Optional


class LabError(Exception):
    """Base class for all lab errors"""

    exit_code = 2

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}


class ValidationError(LabError, ValueError):
    """Input rejected before any numerics ran"""

    exit_code = 1


class NumericalError(LabError, RuntimeError):
    """A computation ran but did not reach its accuracy target"""

    exit_code = 2


# Validation errors


class ConfigError(ValidationError):
    """Invalid configuration value or file"""


class UnsupportedDegreeError(ValidationError):
    """Harmonic degree above the configured maximum"""


class OffVarietyError(ValidationError):
    """Complex direction does not satisfy theta . theta = 1"""


class DomainError(ValidationError):
    """Argument outside the function's domain"""


class ClassViolationError(ValidationError):
    """Surface outside the admissible class"""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message, details={"report": report})
        self.report = report


class GridMismatchError(ValidationError):
    """Far-field matrices sampled on different grids"""


class InfeasiblePairError(ValidationError):
    """No complex direction pair exists for this lambda and imaginary scale"""


class DivisionDegenerateError(ValidationError):
    """The inversion formula degenerates at lambda = 0"""


class InsufficientRecordsError(ValidationError):
    """Not enough usable records for a fit"""


# Numerical errors


class NonConvergenceError(NumericalError):
    """Linear system residual above tolerance"""


class ResolutionError(NumericalError):
    """Quadrature too coarse for the requested accuracy"""


class ReconstructionFailedError(NumericalError):
    """Indicator inversion produced no interior"""
