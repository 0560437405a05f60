"""Exception types shared across the simulator.

Everything raised on purpose derives from MultiTimeError so callers can
catch the whole family at an API boundary (the HTTP service and the CLI
both do).
"""

from __future__ import annotations


class MultiTimeError(Exception):
    """Base class for all simulator errors."""


class ShapeError(MultiTimeError):
    """Tensor dimensions do not match what the operation requires."""


class CapacityExceeded(MultiTimeError):
    """A would-be tensor exceeds the configured entry budget."""


class AlternationError(MultiTimeError):
    """Boundaries of one system do not alternate ket/bra in time order."""


class ZeroNormState(MultiTimeError):
    """State amplitudes have (numerically) zero Frobenius norm."""


class MissingPeriod(MultiTimeError):
    """An insertion map does not cover a measurement period of the state."""


class ImpossiblePostselection(MultiTimeError):
    """Total relative weight vanishes: the conditioning event has probability zero."""


class OverlapError(MultiTimeError):
    """Two states being composed claim the same (system, time) boundary."""


class EntangledPeriods(MultiTimeError):
    """Requested reduction does not factorize: kept and dropped periods are entangled."""


class NotHermitian(MultiTimeError):
    """Operator expected to be Hermitian is not, beyond tolerance."""


class NotUnitary(MultiTimeError):
    """Operator expected to be unitary is not, beyond tolerance."""


class OverlappingPeriods(MultiTimeError):
    """Terms of a multi-time observable bind the same measurement period twice."""


class IncompleteKrausSet(MultiTimeError):
    """Kraus family does not resolve the identity within tolerance."""


class IncompleteGrouping(MultiTimeError):
    """Outcome lumping does not cover every fine-grained outcome."""


class ScriptError(MultiTimeError):
    """A sequential experiment script is structurally invalid."""
