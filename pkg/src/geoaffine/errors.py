"""Exception hierarchy for geometric preconditions."""


class GeometryError(ValueError):
    """Base class for all precondition failures raised by geoaffine."""


class InvalidPoint(GeometryError):
    pass


class InvalidTangent(GeometryError):
    pass


class BaseMismatch(GeometryError):
    """A tangent vector is anchored somewhere other than where it is used."""


class CutLocusExceeded(GeometryError):
    """exp on a sphere with a tangent longer than the diameter bound."""


class AntipodalPair(GeometryError):
    """Two sphere points too far apart for a unique minimal geodesic."""


class StepTooSmall(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class MissingPartials(GeometryError):
    """A vector field was used where analytic partial derivatives are required."""


class DegenerateTriangle(GeometryError):
    pass


class EmptySublevel(GeometryError):
    """Rejection sampling found no member of the requested sub-level set."""


class UnsupportedDimension(GeometryError):
    pass


class InvalidProbe(GeometryError):
    pass
