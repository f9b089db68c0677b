"""Exception types raised across the package."""


class HolophaseError(Exception):
    """Base class for all package errors."""


class InvalidAxis(HolophaseError, ValueError):
    pass


class StepTooLarge(HolophaseError):
    """Sampling is too coarse to track a phase or an SU(2) branch continuously."""


class NonConvergent(HolophaseError):
    """Adaptive refinement hit its point cap."""


class NotNormalized(HolophaseError, ValueError):
    pass


class DegenerateSchmidt(HolophaseError, ValueError):
    """Equal Schmidt coefficients: the preferred directions are undefined."""


class UndefinedPhase(HolophaseError):
    """The overlap whose argument is requested vanishes."""


class EstimatorMismatch(HolophaseError):
    pass


class InvalidTangle(HolophaseError, ValueError):
    pass


class DecompositionMismatch(HolophaseError):
    pass


class InvalidCounts(HolophaseError, ValueError):
    pass


class PhaseUndetermined(HolophaseError):
    """Fringe contrast is too small for the offset to mean anything."""


class DegenerateGrid(HolophaseError, ValueError):
    pass


class NoReference(HolophaseError, ValueError):
    pass


class NotMaximallyEntangled(HolophaseError, ValueError):
    pass


class LeavesMESManifold(NotMaximallyEntangled):
    pass
