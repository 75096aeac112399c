"""
Exception hierarchy for TubeTheta.

Every error raised on purpose by the package derives from
:class:`TubeThetaError`, which is itself a ``ValueError`` so that callers
treating bad parameters generically keep working.
"""

from typing import Optional


class TubeThetaError(ValueError):
    """Base class for all TubeTheta errors."""


class DescriptorMismatchError(TubeThetaError):
    """Two algebra elements belong to different algebra descriptors."""


class DimensionMismatchError(TubeThetaError):
    """A coordinate vector or matrix has the wrong shape."""


class NotInvertibleError(TubeThetaError):
    """An algebra element or linear map is (numerically) singular."""

    def __init__(self, message: str, determinant: complex = 0.0):
        super().__init__(f"{message} (determinant {determinant!r})")
        self.determinant = determinant


class DomainError(TubeThetaError):
    """A point lies outside the cone, tube domain or Siegel domain."""

    def __init__(self, message: str, min_eigenvalue: Optional[float] = None):
        if min_eigenvalue is not None:
            message = f"{message} (smallest eigenvalue {min_eigenvalue:.6e})"
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class BudgetError(TubeThetaError):
    """The requested tolerance needs more lattice points than allowed."""

    def __init__(self, message: str, achieved_bound: float, points: int):
        super().__init__(
            f"{message}: budget of {points} points only certifies "
            f"a tail bound of {achieved_bound:.6e}"
        )
        self.achieved_bound = achieved_bound
        self.points = points


class UnsupportedOperationError(TubeThetaError):
    """The operation is not available for this configuration."""


class UnsupportedConfigurationError(TubeThetaError):
    """The configuration cannot be handled (e.g. irrational input data)."""


class LatticeMembershipError(TubeThetaError):
    """A vector expected to lie in a lattice does not."""


class CertificationError(TubeThetaError):
    """A check tolerance does not dominate the tail bounds it consumed."""


class ScenarioError(TubeThetaError):
    """A scenario file violates the schema."""

    def __init__(
        self, message: str, field: Optional[str] = None, line: Optional[int] = None
    ):
        location = []
        if field is not None:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} [{', '.join(location)}]"
        super().__init__(message)
        self.field = field
        self.line = line
