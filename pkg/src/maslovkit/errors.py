"""Named error types shared across maslovkit.

The CLI serializes any of these as ``{"error": <class name>, "detail": ...}``.
"""


class MaslovKitError(Exception):
    """Base class for domain errors (CLI exit code 2)."""


class DimensionMismatch(MaslovKitError, ValueError):
    pass


class NotLagrangian(MaslovKitError, ValueError):
    pass


class NotSymplectic(MaslovKitError, ValueError):
    pass


class RankDeficient(MaslovKitError, ValueError):
    pass


class ModulusMismatch(MaslovKitError, ValueError):
    pass


class PathTooCoarse(MaslovKitError):
    pass


class DegenerateCrossing(MaslovKitError):
    pass


class CrossCheckFailure(MaslovKitError):
    """Crossing-form and eigenvalue-winding computations disagree."""


class InconsistentStart(MaslovKitError, ValueError):
    pass


class NotTransverse(MaslovKitError, ValueError):
    pass


class NonIntegralIndex(MaslovKitError):
    pass


class DegenerateFixedPoint(MaslovKitError, ValueError):
    pass


class InvalidCurve(MaslovKitError, ValueError):
    pass


class StuckRewrite(MaslovKitError):
    pass


class InvalidConfig(MaslovKitError, ValueError):
    pass


class UnsupportedCase(MaslovKitError, ValueError):
    pass


class MalformedProfile(MaslovKitError, ValueError):
    pass


class NoBoundingTriple(MaslovKitError, ValueError):
    pass


class NotQuasiHomogeneous(MaslovKitError, ValueError):
    pass


class MalformedData(MaslovKitError, ValueError):
    pass


class NotALoop(MaslovKitError, ValueError):
    pass


class NonIntegralWinding(MaslovKitError):
    pass
