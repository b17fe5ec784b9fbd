"""
Exception hierarchy for the Hardy paradox laboratory.

Every failure raised by the library derives from HardyLabError so that
management commands can map it onto an exit code in one place.
"""

from typing import Optional


class HardyLabError(Exception):
    """Base laboratory error"""
    pass


class InvalidDimensionError(HardyLabError, ValueError):
    """Operand dimensions do not match the operation"""
    pass


class NormalizationError(HardyLabError, ValueError):
    """State is not normalized where a normalized state is required"""
    pass


class NotAProjectorError(HardyLabError, ValueError):
    """Matrix is not a Hermitian idempotent"""
    pass


class NonPhysicalError(HardyLabError, ValueError):
    """Operator is not a density operator"""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class GammaRangeError(HardyLabError, ValueError):
    """Entanglement angle outside the allowed interval"""
    pass


class OptimizationError(HardyLabError):
    """One-dimensional search did not converge"""
    pass


class UnsupportedModeError(HardyLabError, ValueError):
    """q-plate input outside the zero-OAM mode"""
    pass


class ConventionMismatchError(HardyLabError):
    """Prepared state does not reproduce the target under the active Jones convention"""

    def __init__(self, message: str, overlap: float):
        super().__init__(message)
        self.overlap = overlap


class InvalidDistributionError(HardyLabError, ValueError):
    """Hidden-variable distribution or marginals out of range"""
    pass


class NoiseParameterError(HardyLabError, ValueError):
    """Noise model parameter out of range"""
    pass


class ZeroTotalError(HardyLabError, ValueError):
    """Frequency normalization with a non-positive total"""
    pass


class MissingLabelError(HardyLabError, KeyError):
    """A required Hardy event label is absent"""
    pass


class ConfigError(HardyLabError, ValueError):
    """Configuration could not be parsed or validated"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
