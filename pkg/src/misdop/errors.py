"""Exception types shared across the package."""


class MisdopError(Exception):
    """Base class for all library errors."""


class EmptyInterior(MisdopError):
    """Constraint system is infeasible or has no interior point."""


class Unbounded(MisdopError):
    """Constraint system does not bound a finite region."""


class DirectionMismatch(MisdopError):
    """Operation mixed polygons from different direction systems."""


class InvalidDirections(MisdopError):
    """Direction vectors violate the system invariants."""


class MissingProvenance(MisdopError):
    """Object was built without grid derivation metadata."""


class ParseError(MisdopError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class GenerationFailed(MisdopError):
    """Rejection sampling exceeded its retry budget."""


class NotIndependent(MisdopError):
    """Input polygons intersect where independence is required."""


class NotSeeing(MisdopError):
    """Fence construction requested for a pair without the seeing relation."""


class BoundViolated(MisdopError):
    """A guaranteed counting bound failed; indicates an upstream bug."""


class ChargeCollision(MisdopError):
    """The same polygon would absorb two charges."""


class LostProtected(MisdopError):
    """A separating curve cut a protected polygon."""


class NoValidCut(MisdopError):
    """The partition case machine found no applicable construction."""


class InvalidCertificate(MisdopError):
    """Certificate failed verification before replay."""


class TooLarge(MisdopError):
    """Instance exceeds the configured cap of an exact solver."""


class BudgetExceeded(MisdopError):
    """Enumeration budget ran out."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ContainerInvalid(MisdopError):
    """Base class for container validation failures."""


class CrossingFences(ContainerInvalid):
    pass


class CuttingLineOverlap(ContainerInvalid):
    pass


class TooManySegments(ContainerInvalid):
    pass


class EmptySpurInterior(ContainerInvalid):
    pass


class BadOrientation(ContainerInvalid):
    pass
