"""Error types raised by the numerical services.

Services raise these; the CLI layer maps them to exit codes.
"""
from typing import Any, Dict, Optional


class CasimirError(Exception):
    """Base class for all library errors."""
    exit_code = 1


class DomainError(CasimirError, ValueError):
    """Argument outside the mathematical domain of an operation."""
    exit_code = 2


class RangeError(CasimirError, IndexError):
    """Coefficient index outside the tabulated range."""
    exit_code = 2


class ConfigError(CasimirError):
    """Invalid run configuration (file, flags or environment)."""
    exit_code = 2

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class ConvergenceError(CasimirError):
    """A series or quadrature failed to reach its tolerance.

    Carries the best estimate obtained so far together with its error bound
    and whatever diagnostics the failing routine collected.
    """
    exit_code = 3

    def __init__(
        self,
        message: str,
        estimate: Optional[float] = None,
        error_bound: Optional[float] = None,
        diagnostics: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound
        self.diagnostics = diagnostics or {}


class AssemblyError(CasimirError):
    """Round-trip matrix is not a contraction (det(1 - M) <= 0)."""
    exit_code = 3


class PrecisionError(CasimirError):
    """Loss of significance detected in a scaled evaluation."""
    exit_code = 3


class DataError(CasimirError):
    """Malformed or mismatched data files."""
    exit_code = 4
