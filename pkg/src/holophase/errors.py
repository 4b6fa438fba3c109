"""Exception hierarchy shared by all holophase modules."""


class HolophaseError(Exception):
    """Base class; ``invariant`` names the tolerance or check that failed."""

    invariant = "input"

    def __init__(self, message, invariant=None):
        super().__init__(message)
        if invariant is not None:
            self.invariant = invariant


class NotADensityOperator(HolophaseError):
    invariant = "tol_trace"


class AmbiguousDegeneracy(HolophaseError):
    invariant = "tol_degeneracy"


class FrameNotOrthonormal(HolophaseError):
    invariant = "tol_fiber"


class NotHermitian(HolophaseError):
    invariant = "tol_herm"


class NonUnitarySample(HolophaseError):
    invariant = "tol_unitary"


class NonMonotoneTimes(HolophaseError):
    invariant = "times"


class IncompatibleInitialState(HolophaseError):
    invariant = "tol_fiber"


class NotAntiHermitian(HolophaseError):
    invariant = "tol_herm"


class FiberDrift(HolophaseError):
    invariant = "tol_fiber"


class NotCyclic(HolophaseError):
    invariant = "tol_block"


class IndexOutOfRange(HolophaseError):
    invariant = "index"


class InternalInconsistency(HolophaseError):
    invariant = "existence"


class DegenerateSpectrum(HolophaseError):
    invariant = "tol_degeneracy"


class TooManySequences(HolophaseError):
    invariant = "max_sequences"


class UnknownParameter(HolophaseError):
    invariant = "sweep_param"


class SpecError(HolophaseError):
    invariant = "schema"
