class OrbitLabError(Exception):
    """Base exception for failures raised by the orbitlab library."""

    def __init__(self, message: str):
        self.message = message
        super().__init__(message)


class DomainError(OrbitLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class PrecisionError(OrbitLabError):
    """Working p-adic precision is too small to decide the question asked."""


class InvariantViolation(OrbitLabError):
    """An internal consistency check failed."""


class ReductionError(InvariantViolation):
    """Reduction to the fundamental domain did not terminate within its move cap."""


class GeodesicCodingError(DomainError):
    """The sampling step of a geodesic walk cannot separate consecutive crossings."""
