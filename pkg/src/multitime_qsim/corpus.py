"""Randomized cross-checking corpus.

Two products, both seed-deterministic:

* equivalence_cases: multi-time states paired with a circuit realization
  and randomized probe measurements, for comparing the contraction engine
  against step-by-step simulation, and
* generate_documents: experiment scripts in the text format, runnable on
  both engines.

Instances stay small on purpose: dimensions up to 4, at most 3 measurement
periods, realizations with at most 2 ancilla registers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import script
from .boundaries import BoundarySpec, Direction, MeasurementPeriod
from .kraus import (
    KrausSet,
    identity_set,
    kraus_set,
    lump,
    projective_set,
    von_neumann_with_evolution,
)
from .oracle import Postselect, Prepare, ProbeSlot
from .preparation import (
    PreparationPlan,
    bell_state,
    plan_four_time,
    plan_neutral_past,
    plan_two_time,
    plan_two_time_entangled,
)
from .states import MultiTimeState, one_time_bra, one_time_ket, tensor_compose, two_time_state
from .tensors import DEFAULT_TOLERANCE


# ---------------------------------------------------------------------------
# random ingredients

def random_state_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    # fix the QR phase ambiguity so the draw is Haar distributed
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (z + z.conj().T) / 2


def random_kraus_family(rng: np.random.Generator, dim: int, count: int) -> list[np.ndarray]:
    """count matrices A_k with sum A_k^dag A_k = 1 (blocks of a random isometry)."""
    z = rng.normal(size=(count * dim, dim)) + 1j * rng.normal(size=(count * dim, dim))
    q, _ = np.linalg.qr(z)
    return [q[k * dim : (k + 1) * dim, :] for k in range(count)]


def random_block(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


_PROBE_STYLES = ("projective", "kraus", "lumped", "sandwich", "identity")


def random_probe(rng: np.random.Generator, period: MeasurementPeriod, style: str) -> KrausSet:
    d = period.in_dim
    if style == "identity":
        return identity_set(period)
    if style == "projective":
        return projective_set(random_hermitian(rng, d), period)
    if style == "kraus":
        fam = random_kraus_family(rng, d, int(rng.integers(2, 4)))
        return kraus_set(period, {f"k{i}": m for i, m in enumerate(fam)})
    if style == "lumped":
        fam = random_kraus_family(rng, d, 3)
        fine = kraus_set(period, {f"k{i}": m for i, m in enumerate(fam)})
        return lump(fine, {"k0": "a", "k1": "b", "k2": "a"})
    if style == "sandwich":
        base = projective_set(random_hermitian(rng, d), period)
        return von_neumann_with_evolution(base, random_unitary(rng, d), random_unitary(rng, d))
    raise ValueError(f"unknown probe style {style!r}")


# ---------------------------------------------------------------------------
# state + realization families

@dataclass(frozen=True)
class EquivalenceCase:
    """One corpus instance: a state, its circuit realization and the probes."""

    name: str
    state: MultiTimeState
    plan: PreparationPlan
    probes: dict[MeasurementPeriod, KrausSet]


def _probes_for(rng: np.random.Generator, state: MultiTimeState) -> dict[MeasurementPeriod, KrausSet]:
    probes: dict[MeasurementPeriod, KrausSet] = {}
    for period in state.periods:
        style = _PROBE_STYLES[int(rng.integers(0, len(_PROBE_STYLES)))]
        probes[period] = random_probe(rng, period, style)
    return probes


def _case_two_time(rng: np.random.Generator, dim: int, tag: int, system: str = "S") -> EquivalenceCase:
    block = random_block(rng, (dim, dim))
    state = two_time_state(system, "t0001", "t0002", block)
    plan = plan_two_time(state)
    return EquivalenceCase(f"two-time-{system}-{tag}", state, plan, _probes_for(rng, state))


def _case_two_time_svd(rng: np.random.Generator, dim: int, tag: int, system: str = "S") -> EquivalenceCase:
    block = random_block(rng, (dim, dim))
    state = two_time_state(system, "t0001", "t0002", block)
    plan = plan_two_time_entangled(state)
    return EquivalenceCase(f"two-time-svd-{system}-{tag}", state, plan, _probes_for(rng, state))


def _case_three_time(rng: np.random.Generator, dim: int, tag: int, system: str = "S") -> EquivalenceCase:
    amp = random_block(rng, (dim, dim, dim))
    state = MultiTimeState(
        (
            BoundarySpec(system, "t0001", Direction.KET, dim),
            BoundarySpec(system, "t0002", Direction.BRA, dim),
            BoundarySpec(system, "t0003", Direction.KET, dim),
        ),
        amp,
    )
    plan = plan_four_time(state)
    return EquivalenceCase(f"three-time-{system}-{tag}", state, plan, _probes_for(rng, state))


def _case_neutral_past(rng: np.random.Generator, dim: int, tag: int, system: str = "S") -> EquivalenceCase:
    state = one_time_bra(system, "t0001", random_state_vector(rng, dim))
    plan = plan_neutral_past(state)
    return EquivalenceCase(f"neutral-past-{system}-{tag}", state, plan, _probes_for(rng, state))


def _case_bra_ket_product(rng: np.random.Generator, dim: int, tag: int, system: str = "S") -> EquivalenceCase:
    phi = random_state_vector(rng, dim)
    psi = random_state_vector(rng, dim)
    state = tensor_compose(
        one_time_bra(system, "t0001", phi), one_time_ket(system, "t0003", psi)
    )
    past, future = state.periods
    anc = f"{system}_a1"
    plan = PreparationPlan(
        target=state,
        systems=((system, dim), (anc, dim)),
        steps=(
            Prepare((system, anc), bell_state(dim)),
            Postselect((system,), phi),
            Prepare((system,), psi),
        ),
        slots={past: ProbeSlot(1, (system,)), future: ProbeSlot(3, (system,))},
        ancilla_count=1,
    )
    return EquivalenceCase(f"bra-ket-product-{system}-{tag}", state, plan, _probes_for(rng, state))


def _merge(name: str, a: EquivalenceCase, b: EquivalenceCase) -> EquivalenceCase:
    state = tensor_compose(a.state, b.state)
    offset = len(a.plan.steps)
    slots = dict(a.plan.slots)
    for period, slot in b.plan.slots.items():
        slots[period] = ProbeSlot(slot.index + offset, slot.registers)
    plan = PreparationPlan(
        target=state,
        systems=a.plan.systems + b.plan.systems,
        steps=a.plan.steps + b.plan.steps,
        slots=slots,
        ancilla_count=a.plan.ancilla_count + b.plan.ancilla_count,
    )
    return EquivalenceCase(name, state, plan, {**a.probes, **b.probes})


def equivalence_cases(count: int, max_dim: int = 4, seed: int = 0) -> Iterator[EquivalenceCase]:
    """Deterministic stream of corpus instances cycling over the families."""
    if max_dim < 2:
        raise ValueError("max_dim must be at least 2")
    rng = np.random.default_rng(seed)
    single = (
        _case_two_time,
        _case_two_time_svd,
        _case_three_time,
        _case_neutral_past,
        _case_bra_ket_product,
    )
    for i in range(count):
        kind = i % (len(single) + 2)
        dim = int(rng.integers(2, max_dim + 1))
        if kind < len(single):
            yield single[kind](rng, dim, i)
        elif kind == len(single):
            # two systems side by side: two-time x neutral past
            a = _case_two_time(rng, dim, i, "S")
            b = _case_neutral_past(rng, int(rng.integers(2, max_dim + 1)), i, "R")
            yield _merge(f"composed-a-{i}", a, b)
        else:
            # three periods across two systems
            a = _case_two_time(rng, dim, i, "S")
            b = _case_bra_ket_product(rng, int(rng.integers(2, max_dim + 1)), i, "R")
            yield _merge(f"composed-b-{i}", a, b)


# ---------------------------------------------------------------------------
# script documents

def _decl_state(name: str, vec: np.ndarray) -> script.StateDecl:
    return script.StateDecl(name, tuple(complex(v) for v in vec))


def _decl_operator(name: str, mat: np.ndarray) -> script.OperatorDecl:
    return script.OperatorDecl(name, tuple(tuple(complex(v) for v in row) for row in mat))


def _doc_pre_post(rng: np.random.Generator, dim: int) -> list[script.Statement]:
    return [
        script.SystemDecl("Q", dim),
        _decl_state("psi", random_state_vector(rng, dim)),
        _decl_state("phi", random_state_vector(rng, dim)),
        _decl_operator("U", random_unitary(rng, dim)),
        _decl_operator("H", random_hermitian(rng, dim)),
        script.PrepareStmt(("Q",), "psi"),
        script.UnitaryStmt(("Q",), "U"),
        script.MeasureProjective(("Q",), "H", "m1"),
        script.PostselectStmt(("Q",), "phi"),
    ]


def _doc_two_system(rng: np.random.Generator, dim: int) -> list[script.Statement]:
    db = int(rng.integers(2, dim + 1))
    joint = random_state_vector(rng, dim * db)
    return [
        script.SystemDecl("QA", dim),
        script.SystemDecl("QB", db),
        _decl_state("joint", joint),
        _decl_state("phi", random_state_vector(rng, dim)),
        _decl_operator("HA", random_hermitian(rng, dim)),
        _decl_operator("HB", random_hermitian(rng, db)),
        script.PrepareStmt(("QA", "QB"), "joint"),
        script.MeasureProjective(("QA",), "HA", "m1"),
        script.MeasureProjective(("QB",), "HB", "m2"),
        script.PostselectStmt(("QA",), "phi"),
    ]


def _doc_kraus(rng: np.random.Generator, dim: int) -> list[script.Statement]:
    fam = random_kraus_family(rng, dim, 3)
    stmts: list[script.Statement] = [
        script.SystemDecl("Q", dim),
        _decl_state("psi", random_state_vector(rng, dim)),
        _decl_state("phi", random_state_vector(rng, dim)),
    ]
    for i, mat in enumerate(fam):
        stmts.append(_decl_operator(f"K{i}", mat))
    stmts += [
        script.PrepareStmt(("Q",), "psi"),
        # two fine operators lumped into outcome a
        script.MeasureKraus(("Q",), (("a", "K0"), ("b", "K1"), ("a", "K2")), "m1"),
        script.PostselectStmt(("Q",), "phi"),
    ]
    return stmts


def _doc_reprepare(rng: np.random.Generator, dim: int) -> list[script.Statement]:
    return [
        script.SystemDecl("Q", dim),
        _decl_state("psi", random_state_vector(rng, dim)),
        _decl_state("phi", random_state_vector(rng, dim)),
        _decl_state("xi", random_state_vector(rng, dim)),
        _decl_operator("U", random_unitary(rng, dim)),
        _decl_operator("H1", random_hermitian(rng, dim)),
        _decl_operator("H2", random_hermitian(rng, dim)),
        script.PrepareStmt(("Q",), "psi"),
        script.MeasureProjective(("Q",), "H1", "m1"),
        script.PostselectStmt(("Q",), "phi"),
        script.PrepareStmt(("Q",), "xi"),
        script.UnitaryStmt(("Q",), "U"),
        script.MeasureProjective(("Q",), "H2", "m2"),
    ]


def _doc_open_future(rng: np.random.Generator, dim: int) -> list[script.Statement]:
    db = int(rng.integers(2, dim + 1))
    joint = random_state_vector(rng, dim * db)
    fam = random_kraus_family(rng, db, 2)
    return [
        script.SystemDecl("QA", dim),
        script.SystemDecl("QB", db),
        _decl_state("joint", joint),
        _decl_state("phi", random_state_vector(rng, dim)),
        _decl_operator("UA", random_unitary(rng, dim)),
        _decl_operator("K0", fam[0]),
        _decl_operator("K1", fam[1]),
        script.PrepareStmt(("QA", "QB"), "joint"),
        script.UnitaryStmt(("QA",), "UA"),
        script.MeasureKraus(("QB",), (("k0", "K0"), ("k1", "K1")), None),
        script.PostselectStmt(("QA",), "phi"),
    ]


_DOC_FAMILIES = (_doc_pre_post, _doc_two_system, _doc_kraus, _doc_reprepare, _doc_open_future)


def generate_documents(count: int, max_dim: int = 4, seed: int = 0) -> list[str]:
    """Deterministic experiment scripts, each valid on both engines."""
    if max_dim < 2:
        raise ValueError("max_dim must be at least 2")
    rng = np.random.default_rng(seed)
    docs: list[str] = []
    for i in range(count):
        family = _DOC_FAMILIES[i % len(_DOC_FAMILIES)]
        dim = int(rng.integers(2, max_dim + 1))
        docs.append(script.render(family(rng, dim)))
    return docs
