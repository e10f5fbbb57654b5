"""
Error Types for the Support Engine
==================================

Every failure raised by the engine derives from SupportEngineError so the
CLI can turn it into a non-zero exit status with a readable message.
Checkers that judge mathematical properties return report dictionaries
instead of raising.
"""

from typing import Any, List, Optional


class SupportEngineError(Exception):
    """Base class for all engine errors."""


class InvalidFieldError(SupportEngineError):
    """Field parameters are inconsistent (even l, p not 1 mod l, ...)."""


class PresentationError(SupportEngineError):
    """Malformed generators, relations or words."""


class DegreeOverflowError(SupportEngineError):
    """A computation in the integration exceeded the declared truncation."""

    def __init__(self, generator: int, exponent: int, bound: int):
        super().__init__(
            f"degree overflow: generator {generator} reached exponent {exponent} "
            f"(truncation bound {bound})"
        )
        self.generator = generator
        self.exponent = exponent
        self.bound = bound


class HopfStructureError(SupportEngineError):
    """Constructor input rejected (shape of P, p | |pi|, Jacobi failure, ...)."""


class UnsupportedAlgebraError(SupportEngineError):
    """The requested operation is not available for this algebra class."""


class ModuleRelationError(SupportEngineError):
    """Action matrices violate a defining relation or the label grading."""


class AlgebraMismatchError(SupportEngineError):
    """Two modules over different algebras were combined."""


class ResolutionMemoryError(SupportEngineError):
    """Resolution aborted by the size guard; carries the completed part."""

    def __init__(self, message: str, partial: Any = None, last_degree: int = -1):
        super().__init__(message)
        self.partial = partial
        self.last_degree = last_degree


class InconclusiveError(SupportEngineError):
    """Stability or truncation window too small to decide; raise the bound."""

    def __init__(self, message: str, witnesses: Optional[List[int]] = None):
        super().__init__(message)
        self.witnesses = witnesses or []


class InvalidHalfBraidingError(SupportEngineError):
    """A half-braiding failed its intertwiner, invertibility or braid check."""


class ConfigError(SupportEngineError):
    """Unreadable or invalid configuration."""


class CacheCorruptionError(SupportEngineError):
    """Stored payload does not match its digest."""


class InconsistentSystemError(SupportEngineError):
    """A linear system A X = B has no solution."""


class ResolutionError(SupportEngineError):
    """A computed resolution failed its minimality, exactness or d^2 = 0 check."""


class InvalidDeformationError(SupportEngineError):
    """A deformation parameter with zero linear part, or an unusable coordinate change."""
