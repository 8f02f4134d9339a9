"""Exception hierarchy.

Every error raised by the package derives from :class:`HelidensError` so
callers can catch the whole family at once.
"""


class HelidensError(Exception):
    pass


class MeshError(HelidensError, ValueError):
    """Invalid mesh data. ``simplex`` names the offending face or edge."""

    def __init__(self, msg, simplex=None):
        super().__init__(msg)
        self.simplex = simplex


class NonManifoldEdge(MeshError):
    pass


class InconsistentOrientation(MeshError):
    pass


class DegenerateFace(MeshError):
    pass


class DisconnectedMesh(HelidensError):
    pass


class ResolutionTooCoarse(HelidensError, ValueError):
    pass


class RangeOutsideParent(HelidensError, ValueError):
    pass


class SingularIntegrand(HelidensError):
    pass


class PathDependenceDetected(HelidensError):
    pass


class InsufficientNeighborhood(HelidensError):
    pass


class EmptyBall(HelidensError):
    pass


class ZeroCurvatureAtCenter(HelidensError):
    pass


class GraphicalityNotCertified(HelidensError):
    pass


class CombinatoricsMismatch(HelidensError, ValueError):
    pass


class NonInjectiveVertexMap(HelidensError, ValueError):
    pass


class TargetOutOfRange(HelidensError, ValueError):
    pass


class TargetNotReached(HelidensError):
    """Raised by the radius search; ``table`` carries the (R, theta) rows."""

    def __init__(self, msg, table=None):
        super().__init__(msg)
        self.table = table


class BlowUpUnverified(HelidensError):
    pass


class SeparationTooSmall(HelidensError):
    pass
