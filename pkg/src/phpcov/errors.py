"""Exception types raised across the package."""


class PhpCovError(Exception):
    """Base class for all package errors."""


class GeometryError(PhpCovError, ValueError):
    pass


class NegativeRadicand(GeometryError):
    """The radicand of the lens-area root term is negative (no partial overlap)."""


class ArgumentOutOfRange(GeometryError):
    """An arccos argument lies outside [-1, 1] by more than the clamp tolerance."""


class OutsideOverlapRegime(GeometryError):
    """A partial-overlap-only quantity was requested outside that regime."""


class QuadratureError(PhpCovError, ArithmeticError):
    pass


class MaxSubdivisionsExceeded(QuadratureError):
    """Adaptive integration ran out of subdivisions.

    The best available estimate is attached so callers can decide whether
    it is good enough.
    """

    def __init__(self, message, value, error):
        super().__init__(message)
        self.value = value
        self.error = error


class NonDecayingIntegrand(QuadratureError):
    pass


class InvalidParams(PhpCovError, ValueError):
    pass


class InvalidDensity(InvalidParams):
    pass


class DomainError(PhpCovError, ValueError):
    pass


class EmptySet(PhpCovError, ValueError):
    pass


class EmptyTier(PhpCovError, RuntimeError):
    pass


class RootNotBracketed(PhpCovError, ArithmeticError):
    pass


class ConfigParse(PhpCovError, ValueError):
    pass
