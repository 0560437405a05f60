"""Time-boundary bookkeeping for multi-time states.

A state living on several times has one tensor axis per boundary.  A
boundary is either a ket (the system enters a measurement period there,
carrying a prepared state forward) or a bra (the period ends there in a
post-selection).  Time labels are opaque strings compared lexicographically,
so generated labels are zero-padded to keep string order equal to temporal
order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Direction(enum.Enum):
    KET = "ket"
    BRA = "bra"


@dataclass(frozen=True)
class BoundarySpec:
    """One tensor axis of a multi-time state.

    Ordering (and hence axis order in amplitude tensors) is by
    (system, time_label), both lexicographic.
    """

    system: str
    time_label: str
    direction: Direction
    dimension: int

    def __post_init__(self) -> None:
        if self.dimension < 2:
            raise ValueError(f"boundary dimension must be >= 2, got {self.dimension}")
        if not self.system or not self.time_label:
            raise ValueError("system and time_label must be non-empty strings")

    def __lt__(self, other: "BoundarySpec") -> bool:
        return (self.system, self.time_label) < (other.system, other.time_label)


@dataclass(frozen=True)
class MeasurementPeriod:
    """A stretch of one system's worldline where operators may be inserted.

    Between a ket boundary and the next bra boundary of the same system.
    Either end may be absent: no start_ket means the past of this period is
    open (nothing prepared it), no end_bra means its future is open (nothing
    selects on it).  At least one end exists.
    """

    system: str
    start_ket: BoundarySpec | None
    end_bra: BoundarySpec | None

    def __post_init__(self) -> None:
        if self.start_ket is None and self.end_bra is None:
            raise ValueError("measurement period needs at least one boundary")
        for b, want in ((self.start_ket, Direction.KET), (self.end_bra, Direction.BRA)):
            if b is not None:
                if b.direction is not want:
                    raise ValueError(f"{want.value} slot of period holds a {b.direction.value} boundary")
                if b.system != self.system:
                    raise ValueError("period boundaries must belong to the period's system")

    @property
    def in_dim(self) -> int:
        """Dimension an inserted operator consumes (the ket side)."""
        b = self.start_ket if self.start_ket is not None else self.end_bra
        assert b is not None
        return b.dimension

    @property
    def out_dim(self) -> int:
        """Dimension an inserted operator produces (the bra side)."""
        b = self.end_bra if self.end_bra is not None else self.start_ket
        assert b is not None
        return b.dimension

    @property
    def open_past(self) -> bool:
        return self.start_ket is None

    @property
    def open_future(self) -> bool:
        return self.end_bra is None

    def sort_key(self) -> tuple[str, str]:
        # An open-past period precedes every labelled time of its system.
        start = "" if self.start_ket is None else self.start_ket.time_label
        return (self.system, start)

    def describe(self) -> str:
        lo = "-inf" if self.start_ket is None else self.start_ket.time_label
        hi = "+inf" if self.end_bra is None else self.end_bra.time_label
        return f"{self.system}[{lo},{hi}]"


def canonical_periods(periods: list[MeasurementPeriod]) -> tuple[MeasurementPeriod, ...]:
    return tuple(sorted(periods, key=MeasurementPeriod.sort_key))
