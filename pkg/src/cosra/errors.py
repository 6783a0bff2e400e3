"""Exception types raised across the library."""


class CosraError(Exception):
    """Base class for all library errors."""


class DifferentParts(CosraError):
    """Two elements are not mutually comparable (a directed distance would be infinite)."""


class InvalidParam(CosraError):
    """A model parameter is outside its admissible range."""


class NotPrimitive(CosraError):
    """The common support pattern never becomes strictly positive under powers."""


class DepthOverflow(CosraError):
    """Enumerating the invariant-cone generators would exceed the configured cap."""


class ResolutionTooCoarse(CosraError):
    """The lattice is too coarse to certify a covering of the invariant body."""


class DegenerateImage(CosraError):
    """A state was mapped to the zero vector."""


class NoFiniteDistance(CosraError):
    """An interpolation target has no comparable grid point."""


class IterationCap(CosraError):
    """The iteration exceeded its theoretical termination bound, which signals a bug."""


class NotLipschitz(CosraError):
    """A value function violates the 1-Lipschitz property on the grid."""
