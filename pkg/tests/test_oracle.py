"""Sequential statevector engine: branching, records, post-selection."""

import numpy as np
import pytest

from multitime_qsim.errors import ImpossiblePostselection, ScriptError, ShapeError
from multitime_qsim.oracle import (
    BranchDistribution,
    ExperimentScript,
    Measure,
    Postselect,
    Prepare,
    ProbeSlot,
    Unitary,
    max_discrepancy,
    realize_multitime,
    simulate,
)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
P_UP = np.diag([1.0, 0.0]).astype(complex)
P_DOWN = np.diag([0.0, 1.0]).astype(complex)
P_PLUS = np.full((2, 2), 0.5, dtype=complex)
P_MINUS = np.array([[0.5, -0.5], [-0.5, 0.5]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def z_measure(record: str, *systems: str) -> Measure:
    return Measure(systems, {"up": P_UP, "down": P_DOWN}, record)


def test_script_validation():
    with pytest.raises(ScriptError):
        ExperimentScript((("S", 2), ("S", 2)), (z_measure("m", "S"),))
    with pytest.raises(ScriptError):
        ExperimentScript((("S", 1),), (z_measure("m", "S"),))
    with pytest.raises(ScriptError):
        ExperimentScript((("S", 2),), (Prepare(("S",), [1, 0]),))
    with pytest.raises(ScriptError):
        ExperimentScript((("S", 2),), (z_measure("m", "Q"),))


def test_plain_born_statistics():
    script = ExperimentScript(
        (("S", 2),),
        (Prepare(("S",), [1, 1j]), z_measure("m", "S")),
    )
    dist = simulate(script)
    assert dist.records == ("m",)
    assert dist[("up",)] == pytest.approx(0.5)
    assert dist[("down",)] == pytest.approx(0.5)
    assert dist.success_probability == pytest.approx(1.0)


def test_postselection_renormalizes():
    # measure sigma_x on |0>, then select |0> again: both records equally likely
    script = ExperimentScript(
        (("S", 2),),
        (
            Prepare(("S",), [1, 0]),
            Measure(("S",), {"plus": P_PLUS, "minus": P_MINUS}, "m"),
            Postselect(("S",), [1, 0]),
        ),
    )
    dist = simulate(script)
    assert dist[("plus",)] == pytest.approx(0.5)
    assert dist[("minus",)] == pytest.approx(0.5)
    assert dist.success_probability == pytest.approx(0.5)
    assert dist.joint[("plus",)] == pytest.approx(0.25)


def test_unitary_evolution_changes_basis():
    script = ExperimentScript(
        (("S", 2),),
        (Prepare(("S",), [1, 0]), Unitary(("S",), HADAMARD), z_measure("m", "S")),
    )
    dist = simulate(script)
    assert dist[("up",)] == pytest.approx(0.5)


def test_impossible_selection_raises():
    script = ExperimentScript(
        (("S", 2),),
        (Prepare(("S",), [1, 0]), Postselect(("S",), [0, 1])),
    )
    with pytest.raises(ImpossiblePostselection):
        simulate(script)


def test_zero_probability_branches_are_pruned():
    script = ExperimentScript(
        (("S", 2),),
        (Prepare(("S",), [1, 0]), z_measure("m", "S")),
    )
    dist = simulate(script)
    assert set(dist) == {("up",)}


def test_lumped_outcomes_sum_branches():
    script = ExperimentScript(
        (("S", 2),),
        (
            Prepare(("S",), [0.6, 0.8]),
            Measure(("S",), {"any": (P_UP, P_DOWN)}, "m"),
        ),
    )
    dist = simulate(script)
    assert dist[("any",)] == pytest.approx(1.0)


def test_two_system_entangled_measurement():
    bell = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    script = ExperimentScript(
        (("A", 2), ("B", 2)),
        (
            Prepare(("A", "B"), bell),
            z_measure("a", "A"),
            z_measure("b", "B"),
        ),
    )
    dist = simulate(script)
    assert dist[("up", "up")] == pytest.approx(0.5)
    assert dist[("down", "down")] == pytest.approx(0.5)
    assert ("up", "down") not in dist.probabilities


def test_aligned_permutes_record_order():
    dist = BranchDistribution(
        records=("b", "a"),
        probabilities={("x", "y"): 1.0},
        joint={("x", "y"): 1.0},
        success_probability=1.0,
    )
    assert dist.aligned(("a", "b")) == {("y", "x"): 1.0}
    with pytest.raises(ShapeError):
        dist.aligned(("a", "c"))


def test_max_discrepancy_spans_key_union():
    a = {("x",): 0.7, ("y",): 0.3}
    b = {("x",): 0.7, ("z",): 0.3}
    assert max_discrepancy(a, b) == pytest.approx(0.3)
    assert max_discrepancy({}, {}) == 0.0


def test_measure_requires_record_and_prepared_systems():
    with pytest.raises(ScriptError):
        Measure(("S",), {"up": P_UP, "down": P_DOWN}, "")
    script = ExperimentScript(
        (("S", 2), ("Q", 2)),
        (Prepare(("S",), [1, 0]), z_measure("m", "Q")),
    )
    with pytest.raises(ScriptError):
        simulate(script)


def test_realize_multitime_splices_probes_in_canonical_order():
    class PlanStub:
        systems = (("S", 2),)
        steps = (Prepare(("S",), [0.6, 0.8]), Postselect(("S",), [1, 0]))
        slots = {}

    from multitime_qsim.boundaries import BoundarySpec, Direction, MeasurementPeriod

    period = MeasurementPeriod(
        "S",
        BoundarySpec("S", "t1", Direction.KET, 2),
        BoundarySpec("S", "t2", Direction.BRA, 2),
    )
    plan = PlanStub()
    plan.slots = {period: ProbeSlot(1, ("S",))}
    dist = realize_multitime(plan, {period: {"up": P_UP, "down": P_DOWN}})
    assert dist.records == ("m0",)
    # pre (0.6, 0.8), post |0>: only the up branch survives the selection
    assert dist[("up",)] == pytest.approx(1.0)

    stray = MeasurementPeriod(
        "S",
        BoundarySpec("S", "t8", Direction.KET, 2),
        BoundarySpec("S", "t9", Direction.BRA, 2),
    )
    with pytest.raises(ShapeError):
        realize_multitime(plan, {stray: {"up": P_UP, "down": P_DOWN}})
