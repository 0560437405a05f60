"""Randomized corpus generators: determinism and structural guarantees."""

import numpy as np
import pytest

from multitime_qsim import script
from multitime_qsim.corpus import (
    equivalence_cases,
    generate_documents,
    random_hermitian,
    random_kraus_family,
    random_probe,
    random_state_vector,
    random_unitary,
)
from multitime_qsim.kraus import check_complete
from multitime_qsim.oracle import max_discrepancy, realize_multitime
from multitime_qsim.states import probabilities


def test_random_state_vector_is_normalized():
    rng = np.random.default_rng(0)
    for dim in (2, 3, 4):
        v = random_state_vector(rng, dim)
        assert v.shape == (dim,)
        assert np.sum(np.abs(v) ** 2) == pytest.approx(1.0)


def test_random_unitary_is_unitary():
    rng = np.random.default_rng(1)
    for dim in (2, 3, 4):
        u = random_unitary(rng, dim)
        assert np.allclose(u.conj().T @ u, np.eye(dim), atol=1e-12)


def test_random_hermitian_is_hermitian():
    rng = np.random.default_rng(2)
    h = random_hermitian(rng, 3)
    assert np.allclose(h, h.conj().T)


def test_random_kraus_family_is_complete():
    rng = np.random.default_rng(3)
    mats = random_kraus_family(rng, 3, 4)
    acc = sum(m.conj().T @ m for m in mats)
    assert np.allclose(acc, np.eye(3), atol=1e-12)


def test_random_probe_styles_are_complete():
    from multitime_qsim.boundaries import BoundarySpec, Direction, MeasurementPeriod

    period = MeasurementPeriod(
        "S",
        BoundarySpec("S", "t1", Direction.KET, 3),
        BoundarySpec("S", "t2", Direction.BRA, 3),
    )
    rng = np.random.default_rng(4)
    for style in ("projective", "kraus", "lumped", "sandwich", "identity"):
        ks = random_probe(rng, period, style)
        ok, dev = check_complete(ks)
        assert ok, (style, dev)


def test_equivalence_cases_are_deterministic():
    a = list(equivalence_cases(8, max_dim=4, seed=7))
    b = list(equivalence_cases(8, max_dim=4, seed=7))
    assert [c.name for c in a] == [c.name for c in b]
    for ca, cb in zip(a, b):
        assert np.array_equal(ca.state.amplitudes, cb.state.amplitudes)
    c = list(equivalence_cases(8, max_dim=4, seed=8))
    assert any(
        not np.array_equal(x.state.amplitudes, y.state.amplitudes) for x, y in zip(a, c)
    )


def test_equivalence_cases_cover_boundary_shapes():
    cases = list(equivalence_cases(25, max_dim=3, seed=0))
    saw_open_past = any(
        any(p.open_past for p in case.state.periods) for case in cases
    )
    saw_open_future = any(
        any(p.open_future for p in case.state.periods) for case in cases
    )
    saw_closed = any(
        any(not p.open_past and not p.open_future for p in case.state.periods)
        for case in cases
    )
    saw_multi_period = any(len(case.state.periods) >= 2 for case in cases)
    assert saw_open_past and saw_open_future and saw_closed and saw_multi_period


def test_equivalence_case_engines_agree_spot_check():
    for case in equivalence_cases(10, max_dim=3, seed=5):
        want = probabilities(case.state, case.probes)
        have = realize_multitime(case.plan, case.probes).aligned(want.records)
        assert max_discrepancy(want.probabilities, have) <= 1e-9, case.name


def test_generated_documents_parse_and_render_stably():
    docs = generate_documents(10, max_dim=4, seed=11)
    assert len(docs) == 10
    for text in docs:
        doc = script.parse(text)
        assert doc.valid, [d.format() for d in doc.diagnostics]
        assert script.render(doc) == text


def test_generated_documents_deterministic():
    assert generate_documents(6, max_dim=3, seed=2) == generate_documents(
        6, max_dim=3, seed=2
    )
    assert generate_documents(6, max_dim=3, seed=2) != generate_documents(
        6, max_dim=3, seed=3
    )
