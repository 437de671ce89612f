"""Exceptions raised by the uv path graph library."""


class PathSpaceError(Exception):
    """Base class for every error raised by this package."""


class GraphConstructionError(PathSpaceError):
    """The vertex count or edge list does not describe a simple graph."""


class EdgeSetMismatchError(PathSpaceError):
    """Two edge sets (or cycles) belong to different ambient graphs."""


class InvalidPathError(PathSpaceError):
    """A vertex sequence is not a simple path of the graph."""


class InvalidCycleError(PathSpaceError):
    """An edge set given as a cycle is not a simple cycle of the graph."""


class SpanningTreeError(PathSpaceError):
    """An edge set given as a spanning tree is not one."""


class NotPlaneEmbeddingError(PathSpaceError):
    """A rotation system does not describe a plane embedding."""


class EnumerationLimitError(PathSpaceError):
    """An exhaustive enumeration would exceed its configured guard."""


class NotAdjacentError(PathSpaceError):
    """Two paths are not adjacent in the path graph."""


class DeltaStarError(PathSpaceError):
    """A cycle lacks Property Delta* with respect to a cycle set."""


class InterpolationError(PathSpaceError):
    """No intermediate path was found for a Delta* exchange.

    This is reported as a finding: the exchange construction is expected to
    succeed whenever the witness exists.
    """


class DisconnectedGraphError(PathSpaceError):
    """The operation needs a connected graph."""


class UnknownElementError(PathSpaceError):
    """A vertex or edge index does not exist in the graph."""


class UnicycleError(PathSpaceError):
    """An edge set is not a unicycle of the graph, or an added edge already lies in it."""
