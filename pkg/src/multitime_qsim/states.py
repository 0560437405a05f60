"""Multi-time quantum states and the insertion probability rule.

A multi-time state assigns one tensor axis to every time boundary it
occupies.  Ket boundaries carry prepared amplitudes forward into a
measurement period; bra boundaries close a period with (already
conjugated) post-selection amplitudes.  Quantum operations performed
inside the periods are inserted as operators; the squared Frobenius norm
of the fully contracted tensor is the relative probability of that
operator combination, and one global normalization turns relative
weights into probabilities.

Axis order is canonical everywhere: boundaries sorted by (system,
time_label), both compared as strings.  Generated time labels are
zero-padded so lexicographic order is temporal order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .boundaries import BoundarySpec, Direction, MeasurementPeriod, canonical_periods
from .errors import (
    AlternationError,
    EntangledPeriods,
    ImpossiblePostselection,
    MissingPeriod,
    OverlapError,
    ShapeError,
    ZeroNormState,
)
from .kraus import KrausOperator, KrausSet, ensure_complete, identity_set
from .tensors import DEFAULT_TOLERANCE, Tolerance, as_tensor, frobenius_norm_sq, frozen


def _derive_periods(boundaries: Sequence[BoundarySpec]) -> tuple[MeasurementPeriod, ...]:
    """Pair each ket with the next bra of its system; open ends allowed."""
    by_system: dict[str, list[BoundarySpec]] = {}
    for b in boundaries:
        by_system.setdefault(b.system, []).append(b)
    periods: list[MeasurementPeriod] = []
    for system, bs in by_system.items():
        bs = sorted(bs, key=lambda b: b.time_label)
        for prev, cur in zip(bs, bs[1:]):
            if prev.direction is cur.direction:
                raise AlternationError(
                    f"system {system!r}: boundaries at {prev.time_label} and "
                    f"{cur.time_label} are both {cur.direction.value}s"
                )
        if bs[0].direction is Direction.BRA:
            periods.append(MeasurementPeriod(system, None, bs[0]))
        for prev, cur in zip(bs, bs[1:]):
            if prev.direction is Direction.KET and cur.direction is Direction.BRA:
                periods.append(MeasurementPeriod(system, prev, cur))
        if bs[-1].direction is Direction.KET:
            periods.append(MeasurementPeriod(system, bs[-1], None))
    return canonical_periods(periods)


@dataclass(frozen=True, eq=False)
class MultiTimeState:
    """Unnormalized state over an alternating sequence of time boundaries."""

    boundaries: tuple[BoundarySpec, ...]
    amplitudes: np.ndarray
    periods: tuple[MeasurementPeriod, ...] = field(init=False)

    def __post_init__(self) -> None:
        bs = tuple(self.boundaries)
        if not bs:
            raise ShapeError("state needs at least one boundary")
        keys = [(b.system, b.time_label) for b in bs]
        if len(set(keys)) != len(keys):
            raise OverlapError("two boundaries share the same (system, time)")
        amp = as_tensor(self.amplitudes, [b.dimension for b in bs])
        order = sorted(range(len(bs)), key=lambda i: (bs[i].system, bs[i].time_label))
        bs = tuple(bs[i] for i in order)
        amp = amp.transpose(order)
        norm = frobenius_norm_sq(amp)
        if norm <= DEFAULT_TOLERANCE.eq_tol**2:
            raise ZeroNormState(f"state norm^2 = {norm:.3e}")
        object.__setattr__(self, "boundaries", bs)
        object.__setattr__(self, "amplitudes", frozen(amp))
        object.__setattr__(self, "periods", _derive_periods(bs))

    @property
    def systems(self) -> tuple[str, ...]:
        return tuple(sorted({b.system for b in self.boundaries}))

    def axis_of(self, boundary: BoundarySpec) -> int:
        return self.boundaries.index(boundary)

    def scaled(self, factor: complex) -> "MultiTimeState":
        return MultiTimeState(self.boundaries, self.amplitudes * factor)

    def norm_sq(self) -> float:
        return frobenius_norm_sq(self.amplitudes)


def validate(state: MultiTimeState, tol: Tolerance = DEFAULT_TOLERANCE) -> tuple[MeasurementPeriod, ...]:
    """Re-check the state invariants and return its measurement periods."""
    if frobenius_norm_sq(state.amplitudes) <= tol.eq_tol**2:
        raise ZeroNormState("state norm vanished")
    return _derive_periods(state.boundaries)


@dataclass(frozen=True)
class MultiTimeMixture:
    """Classical mixture of multi-time states sharing one boundary structure."""

    components: tuple[tuple[float, MultiTimeState], ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ShapeError("mixture needs at least one component")
        total = 0.0
        reference = self.components[0][1].boundaries
        for weight, state in self.components:
            if weight <= 0:
                raise ValueError(f"mixture weights must be positive, got {weight}")
            if state.boundaries != reference:
                raise ShapeError("mixture components differ in boundary structure")
            total += float(weight)
        if abs(total - 1.0) > DEFAULT_TOLERANCE.eq_tol:
            raise ValueError(f"mixture weights sum to {total}, expected 1")

    @property
    def periods(self) -> tuple[MeasurementPeriod, ...]:
        return self.components[0][1].periods

    @property
    def boundaries(self) -> tuple[BoundarySpec, ...]:
        return self.components[0][1].boundaries


# ---------------------------------------------------------------------------
# state builders

def one_time_ket(system: str, time_label: str, psi: object) -> MultiTimeState:
    """|Psi> prepared at time_label; its future is open."""
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    b = BoundarySpec(system, time_label, Direction.KET, len(vec))
    return MultiTimeState((b,), vec)


def one_time_bra(system: str, time_label: str, phi: object) -> MultiTimeState:
    """<Phi| selected at time_label; its past is open.

    phi is the ket vector of the selected state; amplitudes stored are its
    conjugate, as bra axes always hold conjugated components.
    """
    vec = np.conj(np.asarray(phi, dtype=complex).reshape(-1))
    b = BoundarySpec(system, time_label, Direction.BRA, len(vec))
    return MultiTimeState((b,), vec)


def two_time_state(system: str, t_start: str, t_end: str, block: object) -> MultiTimeState:
    """sum_ij block[i, j] (bra j at t_end)(ket i at t_start).

    block rows index the ket boundary, columns the bra boundary; bra
    components enter as given (they are amplitudes, not a vector to be
    conjugated).
    """
    mat = np.asarray(block, dtype=complex)
    if mat.ndim != 2:
        raise ShapeError("two-time block must be a matrix")
    bk = BoundarySpec(system, t_start, Direction.KET, mat.shape[0])
    bb = BoundarySpec(system, t_end, Direction.BRA, mat.shape[1])
    if not t_start < t_end:
        raise ShapeError("t_start must precede t_end (string order)")
    return MultiTimeState((bk, bb), mat)


def pre_post_state(system: str, t_start: str, t_end: str, pre: object, post: object) -> MultiTimeState:
    """Ordinary pre- and post-selected pair <Post| ... |Pre>."""
    pre_v = np.asarray(pre, dtype=complex).reshape(-1)
    post_v = np.asarray(post, dtype=complex).reshape(-1)
    return two_time_state(system, t_start, t_end, np.outer(pre_v, post_v.conj()))


def channel_state(system: str, t_in: str, t_out: str, operator: object) -> MultiTimeState:
    """An operator A as a state: sum_ij A[j, i] (ket j at t_out)(bra i at t_in).

    Feeding it the identity yields the identity-channel state that glues
    t_in to t_out.
    """
    mat = np.asarray(operator, dtype=complex)
    if mat.ndim != 2:
        raise ShapeError("channel operator must be a matrix")
    if not t_in < t_out:
        raise ShapeError("t_in must precede t_out (string order)")
    bb = BoundarySpec(system, t_in, Direction.BRA, mat.shape[1])
    bk = BoundarySpec(system, t_out, Direction.KET, mat.shape[0])
    # canonical axis order is (t_in, t_out) = (bra index i, ket index j)
    return MultiTimeState((bb, bk), mat.T)


def identity_channel_state(system: str, t_in: str, t_out: str, dim: int) -> MultiTimeState:
    return channel_state(system, t_in, t_out, np.eye(dim))


def closed_loop_state(system: str, t_start: str, t_end: str, dim: int) -> MultiTimeState:
    """sum_i (bra i at t_end)(ket i at t_start): output fed back into input.

    Inserting an operator into the single period takes its trace.
    """
    if not t_start < t_end:
        raise ShapeError("t_start must precede t_end (string order)")
    bk = BoundarySpec(system, t_start, Direction.KET, dim)
    bb = BoundarySpec(system, t_end, Direction.BRA, dim)
    return MultiTimeState((bk, bb), np.eye(dim))


# ---------------------------------------------------------------------------
# contraction engine

@dataclass(frozen=True)
class OperatorPlacement:
    """An operator tensor attached to specific periods at specific positions.

    positions order the placement relative to others inside the same
    period (smaller acts earlier); ties resolve by placement order.
    tensor axes are [outputs..., inputs...] matching `periods`.
    """

    periods: tuple[MeasurementPeriod, ...]
    positions: tuple[float, ...]
    tensor: np.ndarray

    def __post_init__(self) -> None:
        if len(self.periods) != len(self.positions):
            raise ShapeError("one position per bound period required")


@dataclass(frozen=True)
class ContractionResult:
    """Outcome of inserting operators into every period of a state.

    value carries one axis per open slot, ordered canonically by the slot's
    period; open_bra_boundaries / open_ket_boundaries list what stayed open
    (the period whose past resp. future no boundary closes).
    """

    open_bra_boundaries: tuple[MeasurementPeriod, ...]
    open_ket_boundaries: tuple[MeasurementPeriod, ...]
    value: np.ndarray

    def norm_sq(self) -> float:
        return frobenius_norm_sq(self.value)


def contract_network(state: MultiTimeState, placements: Sequence[OperatorPlacement]) -> ContractionResult:
    """Contract operator placements into the state's periods.

    Within each period the placements form a chain ordered by position:
    period input -> first operator -> ... -> last operator -> period output.
    The input end contracts with the start ket (or stays open as a bra
    slot), the output end with the end bra (or stays open as a ket slot).
    """
    period_set = set(state.periods)
    legs: dict[MeasurementPeriod, list[tuple[float, int, int]]] = {p: [] for p in state.periods}
    for idx, pl in enumerate(placements):
        for slot, (p, pos) in enumerate(zip(pl.periods, pl.positions)):
            if p not in period_set:
                raise MissingPeriod(f"{p.describe()} is not a period of this state")
            legs[p].append((pos, idx, slot))
        expected = tuple(q.out_dim for q in pl.periods) + tuple(q.in_dim for q in pl.periods)
        if pl.tensor.shape != expected:
            raise ShapeError(f"placement tensor shape {pl.tensor.shape}, expected {expected}")

    counter = itertools.count()
    axis_wire: dict[BoundarySpec, int] = {}
    leg_in: dict[tuple[int, int], int] = {}
    leg_out: dict[tuple[int, int], int] = {}
    open_bra: list[MeasurementPeriod] = []
    open_ket: list[MeasurementPeriod] = []
    free_wires: list[int] = []
    for p in state.periods:
        wire = next(counter)
        entry = wire
        for pos, idx, slot in sorted(legs[p], key=lambda t: (t[0], t[1])):
            leg_in[(idx, slot)] = wire
            wire = next(counter)
            leg_out[(idx, slot)] = wire
        if p.start_ket is not None:
            axis_wire[p.start_ket] = entry
        else:
            open_bra.append(p)
            free_wires.append(entry)
        if p.end_bra is not None:
            axis_wire[p.end_bra] = wire
        else:
            open_ket.append(p)
            free_wires.append(wire)

    operands: list[object] = [state.amplitudes, [axis_wire[b] for b in state.boundaries]]
    for idx, pl in enumerate(placements):
        ids = [leg_out[(idx, s)] for s in range(len(pl.periods))]
        ids += [leg_in[(idx, s)] for s in range(len(pl.periods))]
        operands.append(pl.tensor)
        operands.append(ids)
    value = np.einsum(*operands, free_wires)
    return ContractionResult(tuple(open_bra), tuple(open_ket), np.asarray(value, dtype=complex))


def insert(
    state: MultiTimeState,
    assignment: Mapping[MeasurementPeriod, object],
) -> ContractionResult:
    """Insert one operator matrix (or None for identity) into every period."""
    unknown = [p for p in assignment if p not in set(state.periods)]
    if unknown:
        raise MissingPeriod(f"{unknown[0].describe()} is not a period of this state")
    placements = []
    for p in state.periods:
        if p not in assignment:
            raise MissingPeriod(f"no operator assigned to period {p.describe()}")
        op = assignment[p]
        if op is None:
            if p.in_dim != p.out_dim:
                raise ShapeError(f"identity does not fit period {p.describe()}")
            mat = np.eye(p.in_dim, dtype=complex)
        else:
            mat = np.asarray(op, dtype=complex)
            if mat.shape != (p.out_dim, p.in_dim):
                raise ShapeError(
                    f"operator shape {mat.shape} does not fit period {p.describe()} "
                    f"(expected {(p.out_dim, p.in_dim)})"
                )
        placements.append(OperatorPlacement((p,), (0.0,), mat))
    return contract_network(state, placements)


# ---------------------------------------------------------------------------
# probability rule

@dataclass(frozen=True)
class MeasurementEvent:
    """A Kraus set placed into the state, optionally under a record label.

    Unrecorded events do not appear in outcome tuples; their outcomes are
    summed over (useful for unitary evolution steps, which are singleton
    complete sets anyway).
    """

    kraus: KrausSet
    positions: tuple[float, ...] | None = None
    record: str | None = None

    def resolved_positions(self) -> tuple[float, ...]:
        if self.positions is None:
            return (0.0,) * len(self.kraus.periods)
        if len(self.positions) != len(self.kraus.periods):
            raise ShapeError("one position per bound period required")
        return self.positions


@dataclass(frozen=True)
class OutcomeDistribution:
    """Normalized probabilities plus the relative weights they came from."""

    records: tuple[str, ...]
    probabilities: dict[tuple[str, ...], float]
    relative: dict[tuple[str, ...], float]
    total: float

    def __getitem__(self, key: tuple[str, ...] | str) -> float:
        if isinstance(key, str):
            key = (key,)
        return self.probabilities[key]

    def __iter__(self):
        return iter(self.probabilities)

    def __len__(self) -> int:
        return len(self.probabilities)

    def items(self):
        return self.probabilities.items()


def _normalize_events(
    state_periods: tuple[MeasurementPeriod, ...],
    assignment: Mapping[MeasurementPeriod, KrausSet] | Sequence[MeasurementEvent],
    pad_identity: bool,
) -> list[MeasurementEvent]:
    if isinstance(assignment, Mapping):
        covered: dict[int, MeasurementEvent] = {}
        for p in state_periods:
            if p not in assignment:
                raise MissingPeriod(f"no Kraus set assigned to period {p.describe()}")
            ks = assignment[p]
            if p not in ks.periods:
                raise ShapeError(f"assigned set does not bind period {p.describe()}")
            for q in ks.periods:
                if assignment.get(q) is not ks:
                    raise ShapeError(
                        f"multi-period set must be assigned to all its periods "
                        f"(missing {q.describe()})"
                    )
            covered.setdefault(id(ks), MeasurementEvent(ks, None, None))
        extra = [p for p in assignment if p not in set(state_periods)]
        if extra:
            raise MissingPeriod(f"{extra[0].describe()} is not a period of this state")
        events = sorted(covered.values(), key=lambda e: e.kraus.periods[0].sort_key())
        # every event is an observable record in the mapping form
        return [
            MeasurementEvent(e.kraus, None, f"m{i}") for i, e in enumerate(events)
        ]
    events = list(assignment)
    touched = {p for e in events for p in e.kraus.periods}
    stray = [p for p in touched if p not in set(state_periods)]
    if stray:
        raise MissingPeriod(f"{stray[0].describe()} is not a period of this state")
    if pad_identity:
        for p in state_periods:
            if p not in touched:
                events.append(MeasurementEvent(identity_set(p), None, None))
    else:
        missing = [p for p in state_periods if p not in touched]
        if missing:
            raise MissingPeriod(f"no Kraus set assigned to period {missing[0].describe()}")
    return events


def probabilities(
    state: MultiTimeState | MultiTimeMixture,
    assignment: Mapping[MeasurementPeriod, KrausSet] | Sequence[MeasurementEvent],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> OutcomeDistribution:
    """Outcome distribution of complete Kraus families inserted into the state.

    The relative weight of an outcome combination is the squared Frobenius
    norm of the contracted tensor, summed over operators lumped into the
    same label (and over all outcomes of unrecorded events); mixtures add
    component weights linearly.  One global normalization at the end.
    """
    if isinstance(state, MultiTimeMixture):
        components = state.components
        periods = state.periods
        scale = sum(w * s.norm_sq() for w, s in components)
    else:
        components = ((1.0, state),)
        periods = state.periods
        scale = state.norm_sq()

    events = _normalize_events(periods, assignment, pad_identity=True)
    for e in events:
        ensure_complete(e.kraus, tol)

    recorded = [e for e in events if e.record is not None]
    records = tuple(e.record for e in recorded)  # type: ignore[misc]
    if len(set(records)) != len(records):
        raise ShapeError("record labels must be unique")

    # per event: list of (label, operators) in declaration order
    groups = [list(e.kraus.outcomes.items()) for e in events]
    recorded_idx = [i for i, e in enumerate(events) if e.record is not None]

    relative: dict[tuple[str, ...], float] = {}
    for combo in itertools.product(*(range(len(groups[i])) for i in recorded_idx)):
        chosen = dict(zip(recorded_idx, combo))
        pools: list[list[KrausOperator]] = []
        for i, event in enumerate(events):
            if i in chosen:
                pools.append(list(groups[i][chosen[i]][1]))
            else:
                pools.append([op for _, ops in groups[i] for op in ops])
        weight = 0.0
        for ops in itertools.product(*pools):
            placements = [
                OperatorPlacement(op.periods, events[i].resolved_positions(), op.tensor)
                for i, op in enumerate(ops)
            ]
            for w, component in components:
                weight += w * contract_network(component, placements).norm_sq()
        key = tuple(groups[i][chosen[i]][0] for i in recorded_idx)
        relative[key] = weight

    total = sum(relative.values())
    if total <= tol.eq_tol * scale:
        raise ImpossiblePostselection(
            f"total relative weight {total:.3e} vanishes against state scale {scale:.3e}"
        )
    probs = {k: v / total for k, v in relative.items()}
    return OutcomeDistribution(records, probs, relative, total)


# ---------------------------------------------------------------------------
# composition, reduction, histories

def tensor_compose(a: MultiTimeState, b: MultiTimeState) -> MultiTimeState:
    """Tensor product of two states; boundary sets must not collide.

    Valid whenever the merged per-system boundary sequences still
    alternate (disjoint systems, or disjoint / interleaving time windows).
    """
    keys_a = {(x.system, x.time_label) for x in a.boundaries}
    keys_b = {(x.system, x.time_label) for x in b.boundaries}
    clash = keys_a & keys_b
    if clash:
        raise OverlapError(f"states overlap at {sorted(clash)}")
    merged = a.boundaries + b.boundaries
    amp = np.multiply.outer(a.amplitudes, b.amplitudes)
    return MultiTimeState(merged, amp)


def reduce(
    state: MultiTimeState,
    keep: Iterable[MeasurementPeriod],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> MultiTimeState:
    """Factor the state onto the kept periods, dropping the rest.

    Raises EntangledPeriods when the amplitude tensor does not factorize
    across the requested split (singular values below eq_tol times the
    largest count as zero).
    """
    keep = list(keep)
    period_set = set(state.periods)
    for p in keep:
        if p not in period_set:
            raise MissingPeriod(f"{p.describe()} is not a period of this state")
    if not keep:
        raise ShapeError("nothing to keep")
    kept_boundaries: set[BoundarySpec] = set()
    for p in keep:
        if p.start_ket is not None:
            kept_boundaries.add(p.start_ket)
        if p.end_bra is not None:
            kept_boundaries.add(p.end_bra)
    kept_axes = [i for i, b in enumerate(state.boundaries) if b in kept_boundaries]
    drop_axes = [i for i, b in enumerate(state.boundaries) if b not in kept_boundaries]
    if not drop_axes:
        return state
    perm = kept_axes + drop_axes
    kept_dims = [state.boundaries[i].dimension for i in kept_axes]
    mat = state.amplitudes.transpose(perm).reshape(int(np.prod(kept_dims)), -1)
    u, s, _ = np.linalg.svd(mat, full_matrices=False)
    rank = int(np.sum(s > tol.eq_tol * s[0]))
    if rank > 1:
        raise EntangledPeriods(
            f"kept periods are entangled with the rest (rank {rank})"
        )
    factor = u[:, 0]
    # deterministic gauge: unit norm, largest-magnitude entry real positive
    pivot = int(np.argmax(np.abs(factor)))
    factor = factor * (np.conj(factor[pivot]) / abs(factor[pivot]))
    boundaries = tuple(state.boundaries[i] for i in kept_axes)
    return MultiTimeState(boundaries, factor.reshape(kept_dims))


def history_inner_product(
    history: MultiTimeState,
    state: MultiTimeState,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> ContractionResult:
    """Contract a history (operators written as a state) with a state.

    Every bra axis of the history pairs with the state's ket boundary at
    the same (system, time), and vice versa; unpaired history axes stay
    open in the result.  If the history only touches a subset of the
    state's periods, the state is first reduced onto that subset.
    """
    hist_keys = {(b.system, b.time_label): b for b in history.boundaries}

    def matches(b: BoundarySpec) -> bool:
        other = hist_keys.get((b.system, b.time_label))
        if other is None:
            return False
        if other.direction is b.direction:
            raise ShapeError(
                f"history and state both have a {b.direction.value} at "
                f"({b.system}, {b.time_label})"
            )
        if other.dimension != b.dimension:
            raise ShapeError(f"dimension mismatch at ({b.system}, {b.time_label})")
        return True

    covered: list[MeasurementPeriod] = []
    for p in state.periods:
        hits = [matches(b) for b in (p.start_ket, p.end_bra) if b is not None]
        if all(hits):
            covered.append(p)
        elif any(hits):
            raise ShapeError(f"history covers period {p.describe()} only partially")
    if len(covered) != len(state.periods):
        state = reduce(state, covered, tol)

    counter = itertools.count()
    wire_by_key: dict[tuple[str, str], int] = {}
    state_ids = []
    for b in state.boundaries:
        wire = next(counter)
        wire_by_key[(b.system, b.time_label)] = wire
        state_ids.append(wire)
    hist_ids = []
    free: list[tuple[BoundarySpec, int]] = []
    for b in history.boundaries:
        key = (b.system, b.time_label)
        if key in wire_by_key:
            hist_ids.append(wire_by_key[key])
        else:
            wire = next(counter)
            hist_ids.append(wire)
            free.append((b, wire))
    out_ids = [w for _, w in free]
    value = np.einsum(state.amplitudes, state_ids, history.amplitudes, hist_ids, out_ids)
    open_ket = tuple(MeasurementPeriod(b.system, b, None) for b, _ in free if b.direction is Direction.KET)
    open_bra = tuple(MeasurementPeriod(b.system, None, b) for b, _ in free if b.direction is Direction.BRA)
    return ContractionResult(open_bra, open_ket, np.asarray(value, dtype=complex))
