"""Exception types shared across the package."""


class TruncLapError(Exception):
    """Base class for all package-specific errors."""


class GeometryError(TruncLapError, ValueError):
    """Raised for degenerate or non-convex geometric input."""


class UnsupportedDomainError(TruncLapError, ValueError):
    """Raised when an operation requires a planar domain but got something else."""


class GridTooCoarseError(TruncLapError):
    """Raised when rasterization produces no interior nodes."""


class FieldMismatchError(TruncLapError, ValueError):
    """Raised when a scalar field is used with a grid it was not built on."""


class SolverError(TruncLapError):
    """Base class for eigensolver failures.

    Carries the best bracket known at the time of failure so callers can
    still report partial information.
    """

    def __init__(self, message, mu_low=None, mu_high=None):
        super().__init__(message)
        self.mu_low = mu_low
        self.mu_high = mu_high


class InnerSolverStalledError(SolverError):
    """Inner solve hit its iteration budget without reaching tolerance."""


class PositivityError(SolverError):
    """A field that must be positive on the interior is not."""


class BracketNotClosedError(SolverError):
    """Outer iteration budget exhausted before the eigenvalue bracket closed."""


class ConstraintError(TruncLapError, ValueError):
    """Raised when a candidate domain cannot be normalized to a constraint."""


class BoundViolationError(TruncLapError):
    """A computed eigenvalue violates a closed-form bound beyond slack."""
