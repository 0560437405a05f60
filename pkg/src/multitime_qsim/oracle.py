"""Sequential state-vector oracle: forward evolution, Born branching.

This engine never builds multi-time tensors.  It walks an experiment
script step by step, splitting into branches at measurements and
conditioning on post-selections, exactly as the textbook collapse rules
prescribe.  It exists to check the multi-time contraction engine against
an independent computation path, so it shares only data types with it,
not algorithms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .boundaries import MeasurementPeriod
from .errors import (
    ImpossiblePostselection,
    IncompleteKrausSet,
    NotUnitary,
    ScriptError,
    ShapeError,
)
from .kraus import KrausSet
from .tensors import DEFAULT_TOLERANCE, Tolerance, frobenius_norm_sq, frozen, prod

# Branches below this cumulative weight are dead ends and are dropped.
PRUNE_WEIGHT = 1e-14


def _as_outcome_table(payload: object) -> dict[str, tuple[np.ndarray, ...]]:
    """Normalize a measurement payload to label -> operator matrices."""
    if isinstance(payload, KrausSet):
        return {
            label: tuple(op.flat_matrix() for op in ops)
            for label, ops in payload.outcomes.items()
        }
    if isinstance(payload, Mapping):
        table: dict[str, tuple[np.ndarray, ...]] = {}
        for label, value in payload.items():
            mats = value if isinstance(value, (list, tuple)) else [value]
            table[str(label)] = tuple(np.asarray(m, dtype=complex) for m in mats)
        return table
    raise ShapeError(f"cannot interpret measurement payload of type {type(payload)!r}")


@dataclass(frozen=True)
class Prepare:
    systems: tuple[str, ...]
    vector: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "vector", frozen(np.asarray(self.vector, dtype=complex).reshape(-1)))


@dataclass(frozen=True)
class Unitary:
    systems: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", frozen(np.asarray(self.matrix, dtype=complex)))


@dataclass(frozen=True)
class Measure:
    systems: tuple[str, ...]
    outcomes: dict[str, tuple[np.ndarray, ...]]
    record: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "outcomes", _as_outcome_table(self.outcomes))
        if not self.record:
            raise ScriptError("measurement needs a record label")


@dataclass(frozen=True)
class Postselect:
    systems: tuple[str, ...]
    vector: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "vector", frozen(np.asarray(self.vector, dtype=complex).reshape(-1)))


Step = Prepare | Unitary | Measure | Postselect


@dataclass(frozen=True)
class ExperimentScript:
    """Declared registers plus an ordered list of steps."""

    systems: tuple[tuple[str, int], ...]
    steps: tuple[Step, ...]

    def __post_init__(self) -> None:
        labels = [name for name, _ in self.systems]
        if len(set(labels)) != len(labels):
            raise ScriptError("duplicate system declaration")
        for name, dim in self.systems:
            if dim < 2:
                raise ScriptError(f"system {name!r} needs dimension >= 2")
        declared = set(labels)
        if not any(isinstance(s, (Measure, Postselect)) for s in self.steps):
            raise ScriptError("script needs at least one measurement or post-selection")
        for step in self.steps:
            if len(set(step.systems)) != len(step.systems):
                raise ScriptError("step references a system twice")
            for name in step.systems:
                if name not in declared:
                    raise ScriptError(f"step references undeclared system {name!r}")

    def dim_of(self, name: str) -> int:
        for label, dim in self.systems:
            if label == name:
                return dim
        raise ScriptError(f"unknown system {name!r}")


@dataclass(frozen=True)
class BranchDistribution:
    """Conditional outcome distribution of one simulated script."""

    records: tuple[str, ...]
    probabilities: dict[tuple[str, ...], float]
    joint: dict[tuple[str, ...], float]
    success_probability: float

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

    def aligned(self, records: Sequence[str]) -> dict[tuple[str, ...], float]:
        """Probabilities with outcome tuples permuted to the given record order."""
        if set(records) != set(self.records) or len(records) != len(self.records):
            raise ShapeError(f"cannot align records {self.records} to {tuple(records)}")
        perm = [self.records.index(r) for r in records]
        return {tuple(key[i] for i in perm): p for key, p in self.probabilities.items()}


def max_discrepancy(a: Mapping[tuple[str, ...], float], b: Mapping[tuple[str, ...], float]) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys), default=0.0)


@dataclass
class _Branch:
    amp: np.ndarray
    axes: list[str]
    weight: float
    records: dict[str, str]


def _apply_operator(amp: np.ndarray, axes: list[str], targets: Sequence[str], mat: np.ndarray, dims: list[int]) -> np.ndarray:
    k = len(targets)
    block = mat.reshape(dims + dims)
    positions = [axes.index(t) for t in targets]
    moved = np.tensordot(block, amp, axes=(list(range(k, 2 * k)), positions))
    return np.moveaxis(moved, list(range(k)), positions)


def simulate(
    script: ExperimentScript,
    tol: Tolerance = DEFAULT_TOLERANCE,
    prune: float = PRUNE_WEIGHT,
) -> BranchDistribution:
    """Run the script, enumerating every measurement branch exhaustively.

    Prepared vectors are normalized, so branch weights are genuine joint
    probabilities of (records so far, post-selections so far).  Raises
    ImpossiblePostselection when no branch survives the post-selections.
    """
    record_labels: list[str] = []
    for step in script.steps:
        if isinstance(step, Measure):
            if step.record in record_labels:
                raise ScriptError(f"duplicate record label {step.record!r}")
            record_labels.append(step.record)

    branches = [_Branch(np.array(1.0 + 0.0j), [], 1.0, {})]
    for step in script.steps:
        dims = [script.dim_of(name) for name in step.systems]
        joint = prod(dims)
        if isinstance(step, Prepare):
            if step.vector.size != joint:
                raise ShapeError(f"prepared vector has {step.vector.size} entries, expected {joint}")
            norm = np.sqrt(frobenius_norm_sq(step.vector))
            if norm <= tol.eq_tol:
                raise ScriptError("prepared vector has zero norm")
            vec = (step.vector / norm).reshape(dims)
            for br in branches:
                for name in step.systems:
                    if name in br.axes:
                        raise ScriptError(f"system {name!r} is already active; post-select it first")
                br.amp = np.multiply.outer(br.amp, vec) if br.axes else vec.copy()
                br.axes = br.axes + list(step.systems)
        elif isinstance(step, Unitary):
            if step.matrix.shape != (joint, joint):
                raise ShapeError(f"unitary shape {step.matrix.shape}, expected {(joint, joint)}")
            dev = np.max(np.abs(step.matrix.conj().T @ step.matrix - np.eye(joint)), initial=0.0)
            if dev > tol.eq_tol:
                raise NotUnitary(f"unitary step deviates by {dev:.3e}")
            for br in branches:
                _require_active(br, step.systems)
                br.amp = _apply_operator(br.amp, br.axes, step.systems, step.matrix, dims)
        elif isinstance(step, Measure):
            next_branches: list[_Branch] = []
            for br in branches:
                _require_active(br, step.systems)
                spawned = 0.0
                for label, mats in step.outcomes.items():
                    for mat in mats:
                        if mat.shape != (joint, joint):
                            raise ShapeError(f"Kraus operator shape {mat.shape}, expected {(joint, joint)}")
                        child_amp = _apply_operator(br.amp, br.axes, step.systems, mat, dims)
                        w = frobenius_norm_sq(child_amp)
                        spawned += w
                        total = br.weight * w
                        if total < prune:
                            continue
                        records = dict(br.records)
                        records[step.record] = label
                        next_branches.append(
                            _Branch(child_amp / np.sqrt(w), list(br.axes), total, records)
                        )
                if abs(spawned - 1.0) > max(tol.eq_tol, 1e3 * np.finfo(float).eps):
                    raise IncompleteKrausSet(
                        f"branch weights sum to {spawned!r} at record {step.record!r}"
                    )
            branches = next_branches
        elif isinstance(step, Postselect):
            if step.vector.size != joint:
                raise ShapeError(f"post-selected vector has {step.vector.size} entries, expected {joint}")
            norm = np.sqrt(frobenius_norm_sq(step.vector))
            if norm <= tol.eq_tol:
                raise ScriptError("post-selected vector has zero norm")
            phi = (step.vector / norm).conj().reshape(dims)
            next_branches = []
            for br in branches:
                _require_active(br, step.systems)
                positions = [br.axes.index(t) for t in step.systems]
                projected = np.tensordot(phi, br.amp, axes=(list(range(len(dims))), positions))
                w = frobenius_norm_sq(projected)
                total = br.weight * w
                if total < prune:
                    continue
                axes = [a for a in br.axes if a not in step.systems]
                next_branches.append(
                    _Branch(projected / np.sqrt(w), axes, total, dict(br.records))
                )
            branches = next_branches
        else:  # pragma: no cover - dataclass union is closed
            raise ScriptError(f"unknown step type {type(step)!r}")

    success = sum(br.weight for br in branches)
    if success <= tol.eq_tol:
        raise ImpossiblePostselection(f"no branch survives (success {success:.3e})")
    joint_weights: dict[tuple[str, ...], float] = {}
    for br in branches:
        key = tuple(br.records[r] for r in record_labels)
        joint_weights[key] = joint_weights.get(key, 0.0) + br.weight
    probs = {k: v / success for k, v in joint_weights.items()}
    return BranchDistribution(tuple(record_labels), probs, joint_weights, success)


def _require_active(branch: _Branch, systems: Sequence[str]) -> None:
    for name in systems:
        if name not in branch.axes:
            raise ScriptError(f"system {name!r} is not active at this step")


# ---------------------------------------------------------------------------
# protocol realization

@dataclass(frozen=True)
class ProbeSlot:
    """Where a preparation plan accepts the probe for one measurement period.

    index is the step position (in the plan's script) where a Measure
    should be spliced in; registers name the script systems that carry the
    period's Hilbert space at that moment.
    """

    index: int
    registers: tuple[str, ...]


def realize_multitime(
    plan,
    probes: Mapping[MeasurementPeriod, object],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> BranchDistribution:
    """Splice probe measurements into a preparation plan and simulate it.

    plan must expose `systems`, `steps` and `slots` (period -> ProbeSlot).
    Probe record labels are m0, m1, ... in canonical period order, matching
    the labels the contraction engine assigns, so distributions can be
    aligned by record name.
    """
    slots: Mapping[MeasurementPeriod, ProbeSlot] = plan.slots
    ordered = sorted(slots, key=MeasurementPeriod.sort_key)
    insertions: list[tuple[int, int, Measure]] = []
    for rank, period in enumerate(ordered):
        payload = probes.get(period)
        if payload is None:
            continue
        slot = slots[period]
        insertions.append(
            (slot.index, rank, Measure(slot.registers, _as_outcome_table(payload), f"m{rank}"))
        )
    unknown = [p for p in probes if p not in slots]
    if unknown:
        raise ShapeError(f"plan has no slot for period {unknown[0].describe()}")
    steps = list(plan.steps)
    for index, _, measure in sorted(insertions, key=lambda t: (t[0], t[1]), reverse=True):
        steps.insert(index, measure)
    spliced = ExperimentScript(tuple(plan.systems), tuple(steps))
    return simulate(spliced, tol)
