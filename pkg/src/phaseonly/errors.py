"""Domain exceptions shared by the whole toolkit.

Every error that a caller can act on derives from :class:`PhaseOnlyError`;
``code`` is the stable machine-readable identifier used by the CLI.
"""


class PhaseOnlyError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class RankDeficientMatrix(PhaseOnlyError):
    """The measurement matrix does not have full column rank."""


class RankDeficientLifting(PhaseOnlyError):
    """The stacked real/imaginary lifting of the matrix is column rank deficient."""


class RankDeficientBlock(PhaseOnlyError):
    """A row block that must have full row rank does not."""


class ZeroSignal(PhaseOnlyError):
    """The operation is undefined for the zero signal."""


class NonRealSignal(PhaseOnlyError):
    """A real signal was required but the input has a nonzero imaginary part."""


class NotCanonical(PhaseOnlyError):
    """The matrix (or ensemble) is not in canonical form (exact identity top block)."""


class AllMeasurementsZero(PhaseOnlyError):
    """Every measurement of the signal vanished; the phase row test is undefined."""


class FirstEntryZero(PhaseOnlyError):
    """The invertibility condition is only defined for signals with nonzero first entry."""


class OffsetInRange(PhaseOnlyError):
    """The affine offset lies in the column space of the matrix; recovery degenerates."""


class NonUnique(PhaseOnlyError):
    """The observation admits a whole family of consistent signals."""

    def __init__(self, message: str, nullity: int = 0):
        super().__init__(message)
        self.nullity = nullity


class Infeasible(PhaseOnlyError):
    """No signal produces the given observation."""


class DegeneratePhases(PhaseOnlyError):
    """The three phases are degenerate; the magnitude ratio cannot be read off."""


class AnchorNotInSupport(PhaseOnlyError):
    """The anchor coordinate has zero phase, so it cannot serve as reference."""


class NotRecoverable(PhaseOnlyError):
    """The signal is not recoverable from the given measurements."""


class TooFewRows(PhaseOnlyError):
    """The matrix has fewer rows than the requested selection size."""
