class DupSparseError(Exception):
    """Base class for library errors."""


class DisconnectedPair(DupSparseError, ValueError):
    """Two vertices lie in different connected components."""


class ZeroVolume(DupSparseError, ValueError):
    """Conductance requested for a node set of zero volume."""


class TooManyEdges(DupSparseError, ValueError):
    """More edges requested than a simple graph on n vertices can hold."""


class ModelMismatch(DupSparseError, ValueError):
    """A charge kind that does not exist in the meter's communication model."""


class Infeasible(DupSparseError, ValueError):
    """No per-site sampling probability <= 1 reaches the target."""


class ComponentMismatch(DupSparseError, ValueError):
    """Candidate sparsifier has different connected components than the graph."""


class NotAPath(DupSparseError, ValueError):
    """Edge sequence is not a path joining the required endpoints."""


class ShapeMismatch(DupSparseError, ValueError):
    """Partitions disagree on vertex count or cluster count."""
