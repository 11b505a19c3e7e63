"""Exception hierarchy.

Every error raised on a contract violation derives from ``LizkitError`` so
callers (and the CLI) can report a stable machine-readable kind: the class
name is the kind string.
"""

from __future__ import annotations


class LizkitError(Exception):
    """Base class for all library errors."""


class NonZeroMeanForIntegral(LizkitError):
    """Fractional integration requested on a series with a non-negligible mean."""


class AlphaTooSmall(LizkitError):
    """Order parameter below the admissible range for the requested kernel."""


class DuplicateAtoms(LizkitError):
    """Two atom locations coincide within tolerance."""


class DistributionalCase(LizkitError):
    """Kernel is not a pointwise function for these parameters."""


class OriginSingularity(LizkitError):
    """Kernel evaluation requested at a singular point."""


class NonUnitDirection(LizkitError):
    """Direction vector is not unit length within tolerance."""


class MultiIndexTooLarge(LizkitError):
    """Derivative order exceeds the range covered by the growth estimate."""


class UnsupportedDimension(LizkitError):
    """Operation implemented for d = 2 only."""


class BoundaryMass(LizkitError):
    """Sampled field does not decay at the edge of its grid."""


class DirectionNotOnGrid(LizkitError):
    """Requested direction is not a column of the sinogram grid."""


class NotConverged(LizkitError):
    """Solver hit its iteration budget before certifying optimality.

    Carries the best iterate so callers can still inspect it.
    """

    def __init__(self, message: str, model=None, diagnostics=None):
        super().__init__(message)
        self.model = model
        self.diagnostics = diagnostics


class InfeasibleInterpolation(LizkitError):
    """Interpolation-mode continuation stalled before meeting the residual target."""

    def __init__(self, message: str, model=None, diagnostics=None):
        super().__init__(message)
        self.model = model
        self.diagnostics = diagnostics


class SchemaMismatch(LizkitError):
    """Serialized object does not match the expected schema."""


class InvalidKernelRegime(LizkitError):
    """Kernel parameters outside the regime where the operation is defined."""


class InputNotFound(LizkitError):
    """A file named on the command line does not exist."""
