"""Laboratory realization of multi-time states.

The key primitives are a maximally entangled resource pair and a SWAP:
preparing the target amplitudes as a map over (system, ancillas), swapping
template registers into the system at the right moments and Bell
post-selecting pairs of registers turns any supported boundary pattern
into an ordinary run-forward experiment.  A plan records the script plus
the probe slots where period measurements get spliced in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundaries import Direction, MeasurementPeriod
from .errors import ShapeError
from .oracle import ExperimentScript, Postselect, Prepare, ProbeSlot, Step, Unitary, realize_multitime
from .states import MultiTimeState
from .tensors import DEFAULT_TOLERANCE, Tolerance


def bell_state(dim: int) -> np.ndarray:
    """Unnormalized maximally entangled pair sum_n |n>|n> on dim x dim."""
    vec = np.zeros(dim * dim, dtype=complex)
    for n in range(dim):
        vec[n * dim + n] = 1.0
    return vec


def swap_operator(dim: int) -> np.ndarray:
    """Unitary exchanging two dim-dimensional registers."""
    op = np.zeros((dim * dim, dim * dim), dtype=complex)
    for a in range(dim):
        for b in range(dim):
            op[b * dim + a, a * dim + b] = 1.0
    return op


@dataclass(frozen=True)
class PreparationPlan:
    """Recipe that realizes a multi-time state in a sequential experiment."""

    target: MultiTimeState
    systems: tuple[tuple[str, int], ...]
    steps: tuple[Step, ...]
    slots: dict[MeasurementPeriod, ProbeSlot]
    ancilla_count: int

    @property
    def script(self) -> ExperimentScript:
        """The bare script (valid only when it already measures or selects)."""
        return ExperimentScript(self.systems, self.steps)

    def success_probability(self, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
        """Joint probability that every post-selection of the plan fires.

        Computed by running the plan with identity probes in every slot.
        """
        dims = dict(self.systems)
        probes = {}
        for period, slot in self.slots.items():
            joint = 1
            for reg in slot.registers:
                joint *= dims[reg]
            probes[period] = {"id": np.eye(joint, dtype=complex)}
        return realize_multitime(self, probes, tol).success_probability


def _single_system_boundaries(target: MultiTimeState) -> tuple[str, list]:
    systems = {b.system for b in target.boundaries}
    if len(systems) != 1:
        raise ShapeError("plan builders accept single-system targets")
    (system,) = systems
    return system, sorted(target.boundaries, key=lambda b: b.time_label)


def plan_two_time(target: MultiTimeState, initial_ket: object | None = None) -> PreparationPlan:
    """Realize sum_ij alpha[i,j] (bra j)(ket i).

    Without initial_ket: prepare the block as a map over (system, ancilla)
    and Bell post-select the pair after the probe slot.  With initial_ket
    the block must factor as outer(initial_ket, post-part); the plan is
    then plain ancilla-free pre- and post-selection.
    """
    system, bs = _single_system_boundaries(target)
    if len(bs) != 2 or bs[0].direction is not Direction.KET or bs[1].direction is not Direction.BRA:
        raise ShapeError("two-time target must be (ket, bra) in time order")
    block = target.amplitudes  # axes: (ket index, bra index)
    d_in, d_out = block.shape
    period = target.periods[0]

    if initial_ket is not None:
        ket = np.asarray(initial_ket, dtype=complex).reshape(-1)
        if ket.shape != (d_in,):
            raise ShapeError(f"initial ket has {ket.size} entries, expected {d_in}")
        pivot = int(np.argmax(np.abs(ket)))
        if abs(ket[pivot]) == 0.0:
            raise ShapeError("initial ket is zero")
        post = block[pivot, :] / ket[pivot]
        residual = np.max(np.abs(block - np.outer(ket, post)))
        if residual > DEFAULT_TOLERANCE.eq_tol * max(1.0, float(np.max(np.abs(block)))):
            raise ShapeError("target does not factor through the given initial ket")
        steps: tuple[Step, ...] = (
            Prepare((system,), ket),
            Postselect((system,), np.conj(post)),
        )
        return PreparationPlan(
            target=target,
            systems=((system, d_in),),
            steps=steps,
            slots={period: ProbeSlot(1, (system,))},
            ancilla_count=0,
        )

    if d_in != d_out:
        raise ShapeError("Bell-channel route needs equal in/out dimensions")
    anc = f"{system}_a1"
    steps = (
        Prepare((system, anc), block.reshape(-1)),
        Postselect((system, anc), bell_state(d_in)),
    )
    return PreparationPlan(
        target=target,
        systems=((system, d_in), (anc, d_in)),
        steps=steps,
        slots={period: ProbeSlot(1, (system,))},
        ancilla_count=1,
    )


def plan_two_time_entangled(target: MultiTimeState, tol: Tolerance = DEFAULT_TOLERANCE) -> PreparationPlan:
    """Alternative realization of a two-time block via entangled pre/post pair.

    Splits the block by SVD: pre-select sum_r sqrt(s_r)|u_r>|r>, post-select
    sum_r sqrt(s_r)|v_r>|r> on (system, ancilla).  No SWAP, no Bell pair.
    """
    system, bs = _single_system_boundaries(target)
    if len(bs) != 2 or bs[0].direction is not Direction.KET or bs[1].direction is not Direction.BRA:
        raise ShapeError("two-time target must be (ket, bra) in time order")
    block = target.amplitudes
    d_in, d_out = block.shape
    u, s, vh = np.linalg.svd(block)
    rank = int(np.sum(s > tol.eq_tol * s[0]))
    anc_dim = max(2, rank)
    pre = np.zeros((d_in, anc_dim), dtype=complex)
    post = np.zeros((d_out, anc_dim), dtype=complex)
    for r in range(rank):
        pre[:, r] = np.sqrt(s[r]) * u[:, r]
        post[:, r] = np.sqrt(s[r]) * vh[r, :].conj()
    anc = f"{system}_a1"
    period = target.periods[0]
    steps: tuple[Step, ...] = (
        Prepare((system, anc), pre.reshape(-1)),
        Postselect((system, anc), post.reshape(-1)),
    )
    return PreparationPlan(
        target=target,
        systems=((system, d_in), (anc, anc_dim)),
        steps=steps,
        slots={period: ProbeSlot(1, (system,))},
        ancilla_count=1,
    )


def plan_four_time(target: MultiTimeState) -> PreparationPlan:
    """Realize a (ket, bra, ket[, bra]) single-system target.

    Prepare the amplitude tensor over (system, one ancilla per later
    boundary), SWAP the third-boundary template into the system between
    the probe slots, then Bell post-select (a1, a2) and, when the target
    has a final bra, (system, a3).  Omitting that last pair realizes the
    three-boundary target whose future stays open.
    """
    system, bs = _single_system_boundaries(target)
    directions = tuple(b.direction for b in bs)
    want3 = (Direction.KET, Direction.BRA, Direction.KET)
    want4 = want3 + (Direction.BRA,)
    if directions not in (want3, want4):
        raise ShapeError("target must be (ket, bra, ket[, bra]) in time order")
    dims = {b.dimension for b in bs}
    if len(dims) != 1:
        raise ShapeError("plan needs a fixed system dimension across boundaries")
    (d,) = dims
    ancillas = [f"{system}_a{k}" for k in range(1, len(bs))]
    registers = (system, *ancillas)
    p1 = target.periods[0]
    p2 = target.periods[1]
    steps: list[Step] = [
        Prepare(registers, target.amplitudes.reshape(-1)),
        Unitary((system, ancillas[1]), swap_operator(d)),
        Postselect((ancillas[0], ancillas[1]), bell_state(d)),
    ]
    if len(bs) == 4:
        steps.append(Postselect((system, ancillas[2]), bell_state(d)))
    return PreparationPlan(
        target=target,
        systems=tuple((r, d) for r in registers),
        steps=tuple(steps),
        slots={p1: ProbeSlot(1, (system,)), p2: ProbeSlot(2, (system,))},
        ancilla_count=len(ancillas),
    )


def plan_neutral_past(target: MultiTimeState) -> PreparationPlan:
    """Realize a lone bra boundary: entangle with an untouched ancilla.

    The system starts as half of a maximally entangled pair, the probe acts
    during the open-past period, then the selected vector is post-selected.
    The ancilla is never measured, which is exactly what leaves the past
    neutral.
    """
    system, bs = _single_system_boundaries(target)
    if len(bs) != 1 or bs[0].direction is not Direction.BRA:
        raise ShapeError("neutral-past plan wants a single bra boundary")
    d = bs[0].dimension
    anc = f"{system}_a1"
    selected = np.conj(target.amplitudes)  # bra axes hold conjugated components
    steps: tuple[Step, ...] = (
        Prepare((system, anc), bell_state(d)),
        Postselect((system,), selected),
    )
    return PreparationPlan(
        target=target,
        systems=((system, d), (anc, d)),
        steps=steps,
        slots={target.periods[0]: ProbeSlot(1, (system,))},
        ancilla_count=1,
    )
