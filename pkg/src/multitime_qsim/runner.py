"""Compile parsed experiment scripts and run them on either engine.

A document walks through two independent compilations:

* the tensor engine builds one multi-time state (a boundary per prepare
  and post-select) plus measurement events placed into its periods, and
* the sequential engine builds a step-by-step statevector script.

``measure2`` statements only exist on the tensor engine; a joint
measurement of two times has no step-by-step realization, so asking the
sequential engine for one is reported as a diagnostic, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import oracle, script
from .boundaries import BoundarySpec, Direction, MeasurementPeriod, canonical_periods
from .errors import ImpossiblePostselection
from .kraus import (
    KrausOperator,
    KrausSet,
    MultiTimeObservable,
    multi_time_projective_set,
    spectral_table,
)
from .oracle import ExperimentScript, max_discrepancy, simulate
from .script import Diagnostic, ScriptDocument
from .states import MeasurementEvent, MultiTimeState, probabilities
from .tensors import DEFAULT_TOLERANCE, Tolerance

ENGINES = ("multitime", "oracle", "both")

REPORT_HEADER = "# multitime-qsim report"


@dataclass
class RunResult:
    exit_code: int  # 0 report, 1 diagnostics, 2 impossible post-selection
    report: str = ""
    diagnostics: list[Diagnostic] = field(default_factory=list)
    records: tuple[str, ...] = ()
    rows: tuple[tuple[tuple[str, ...], float, float], ...] = ()
    max_discrepancy: float | None = None
    error: str | None = None

    @property
    def diagnostic_text(self) -> str:
        return "\n".join(d.format() for d in self.diagnostics)


def _time_label(index: int) -> str:
    # zero padded so lexicographic order equals statement order
    return f"t{index:04d}"


def _record_of(stmt: script.Statement, index: int) -> str | None:
    if isinstance(stmt, (script.MeasureProjective, script.Measure2)):
        return stmt.record
    if isinstance(stmt, script.MeasureKraus):
        return stmt.record or f"r{index}"
    return None


def _bound_stmt_order(periods: list[MeasurementPeriod], matrix: np.ndarray) -> KrausOperator:
    """Bind a joint matrix whose tensor factors follow statement order."""
    canon = canonical_periods(periods)
    outs = tuple(p.out_dim for p in periods)
    ins = tuple(p.in_dim for p in periods)
    arr = np.asarray(matrix, dtype=complex).reshape(outs + ins)
    if tuple(canon) != tuple(periods):
        k = len(periods)
        perm = [periods.index(p) for p in canon]
        arr = arr.transpose([*perm, *(k + i for i in perm)])
    return KrausOperator(tuple(canon), arr)


@dataclass
class _Tables:
    systems: dict[str, int]
    states: dict[str, np.ndarray]
    operators: dict[str, np.ndarray]


def _collect_tables(doc: ScriptDocument) -> _Tables:
    systems: dict[str, int] = {}
    states: dict[str, np.ndarray] = {}
    operators: dict[str, np.ndarray] = {}
    for stmt in doc.statements:
        if isinstance(stmt, script.SystemDecl):
            systems[stmt.name] = stmt.dim
        elif isinstance(stmt, script.StateDecl):
            states[stmt.name] = np.asarray(stmt.values, dtype=complex)
        elif isinstance(stmt, script.OperatorDecl):
            operators[stmt.name] = np.array(stmt.rows, dtype=complex)
    return _Tables(systems, states, operators)


def compile_oracle(doc: ScriptDocument, tol: Tolerance = DEFAULT_TOLERANCE) -> ExperimentScript:
    """Sequential-engine script for a semantically valid document."""
    tables = _collect_tables(doc)
    steps: list[oracle.Step] = []
    for index, stmt in enumerate(doc.statements):
        if isinstance(stmt, script.PrepareStmt):
            steps.append(oracle.Prepare(stmt.systems, tables.states[stmt.state]))
        elif isinstance(stmt, script.UnitaryStmt):
            steps.append(oracle.Unitary(stmt.systems, tables.operators[stmt.operator]))
        elif isinstance(stmt, script.MeasureProjective):
            table = {
                label: (proj,)
                for label, proj in spectral_table(tables.operators[stmt.operator], tol)
            }
            steps.append(oracle.Measure(stmt.systems, table, stmt.record))
        elif isinstance(stmt, script.MeasureKraus):
            grouped: dict[str, list[np.ndarray]] = {}
            for label, op_name in stmt.items:
                grouped.setdefault(label, []).append(tables.operators[op_name])
            record = _record_of(stmt, index)
            assert record is not None
            steps.append(oracle.Measure(stmt.systems, {k: tuple(v) for k, v in grouped.items()}, record))
        elif isinstance(stmt, script.PostselectStmt):
            steps.append(oracle.Postselect(stmt.systems, tables.states[stmt.state]))
        elif isinstance(stmt, script.Measure2):
            raise ValueError("measure2 cannot be compiled for the sequential engine")
    return ExperimentScript(tuple(tables.systems.items()), tuple(steps))


def compile_multitime(
    doc: ScriptDocument, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[MultiTimeState, list[MeasurementEvent]]:
    """Multi-time state plus measurement events for a valid document."""
    tables = _collect_tables(doc)
    boundaries: list[BoundarySpec] = []
    factors: list[np.ndarray] = []
    start_label: dict[str, str] = {}
    slot_marks: dict[str, tuple[int, dict[str, str]]] = {}
    # (statement index, systems, start labels, kind, payload, record)
    pending: list[tuple[int, tuple[str, ...], tuple[str, ...], str, object, str | None]] = []

    for index, stmt in enumerate(doc.statements):
        label = _time_label(index)
        if isinstance(stmt, script.PrepareStmt):
            dims = [tables.systems[s] for s in stmt.systems]
            for s in stmt.systems:
                boundaries.append(BoundarySpec(s, label, Direction.KET, tables.systems[s]))
                start_label[s] = label
            factors.append(tables.states[stmt.state].reshape(dims))
        elif isinstance(stmt, script.PostselectStmt):
            dims = [tables.systems[s] for s in stmt.systems]
            for s in stmt.systems:
                boundaries.append(BoundarySpec(s, label, Direction.BRA, tables.systems[s]))
                start_label.pop(s, None)
            factors.append(np.conj(tables.states[stmt.state]).reshape(dims))
        elif isinstance(stmt, script.SlotStmt):
            slot_marks[stmt.name] = (index, dict(start_label))
        elif isinstance(stmt, script.UnitaryStmt):
            labels = tuple(start_label[s] for s in stmt.systems)
            pending.append((index, stmt.systems, labels, "matrix", tables.operators[stmt.operator], None))
        elif isinstance(stmt, script.MeasureProjective):
            labels = tuple(start_label[s] for s in stmt.systems)
            pending.append(
                (index, stmt.systems, labels, "projective", tables.operators[stmt.operator], stmt.record)
            )
        elif isinstance(stmt, script.MeasureKraus):
            labels = tuple(start_label[s] for s in stmt.systems)
            items = [(lab, tables.operators[op]) for lab, op in stmt.items]
            pending.append((index, stmt.systems, labels, "kraus", items, _record_of(stmt, index)))
        elif isinstance(stmt, script.Measure2):
            mark_a = slot_marks[stmt.slot_a]
            mark_b = slot_marks[stmt.slot_b]
            payload = (
                (1.0, tables.operators[stmt.op_a], mark_a[0], mark_a[1][stmt.system]),
                (-1.0, tables.operators[stmt.op_b], mark_b[0], mark_b[1][stmt.system]),
            )
            pending.append((index, (stmt.system,), (), "measure2", payload, stmt.record))

    state = MultiTimeState(tuple(boundaries), _outer(factors))
    period_at = {
        (p.system, p.start_ket.time_label): p for p in state.periods if p.start_ket is not None
    }

    events: list[MeasurementEvent] = []
    for index, systems, labels, kind, payload, record in pending:
        if kind == "measure2":
            terms = []
            pos_by_period: dict[MeasurementPeriod, float] = {}
            for coeff, mat, slot_index, slot_start in payload:  # type: ignore[misc]
                period = period_at[(systems[0], slot_start)]
                terms.append((coeff, period, mat))
                pos_by_period[period] = float(slot_index)
            mt_set = multi_time_projective_set(MultiTimeObservable(tuple(terms)), tol)
            positions = tuple(pos_by_period[p] for p in mt_set.periods)
            events.append(MeasurementEvent(mt_set, positions, record))
            continue
        periods = [period_at[(s, lab)] for s, lab in zip(systems, labels)]
        canon = canonical_periods(periods)
        positions = (float(index),) * len(canon)
        if kind == "matrix":
            ks = KrausSet({"u": (_bound_stmt_order(periods, payload),)})  # type: ignore[arg-type]
        elif kind == "projective":
            ks = KrausSet(
                {
                    lab: (_bound_stmt_order(periods, proj),)
                    for lab, proj in spectral_table(payload, tol)  # type: ignore[arg-type]
                }
            )
        else:  # kraus
            grouped: dict[str, list[KrausOperator]] = {}
            for lab, mat in payload:  # type: ignore[misc]
                grouped.setdefault(lab, []).append(_bound_stmt_order(periods, mat))
            ks = KrausSet({k: tuple(v) for k, v in grouped.items()})
        events.append(MeasurementEvent(ks, positions, record))
    return state, events


def _outer(factors: list[np.ndarray]) -> np.ndarray:
    amp = factors[0]
    for f in factors[1:]:
        amp = np.multiply.outer(amp, f)
    return amp


# ---------------------------------------------------------------------------
# running and reporting

def _render_report(
    engine: str,
    records: tuple[str, ...],
    rows: list[tuple[tuple[str, ...], float, float]],
    discrepancy: float | None,
    tol: Tolerance,
) -> str:
    lines = [REPORT_HEADER, f"# engine: {engine}"]
    lines.append("# records: " + (",".join(records) if records else "-"))
    for key, prob, rel in rows:
        outcome = ",".join(key) if key else "-"
        lines.append(f"{outcome}\t{prob:.9f}\t{rel:.9e}")
    if discrepancy is not None:
        lines.append(f"# max-discrepancy: {discrepancy:.3e}")
        lines.append(f"# equivalence: {'PASS' if discrepancy <= tol.prob_tol else 'FAIL'}")
    return "\n".join(lines) + "\n"


def run_document(
    doc: ScriptDocument, engine: str = "multitime", tol: Tolerance = DEFAULT_TOLERANCE
) -> RunResult:
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")
    diagnostics = list(doc.diagnostics)
    if engine != "multitime":
        for stmt in doc.statements:
            if isinstance(stmt, script.Measure2):
                diagnostics.append(
                    Diagnostic(
                        stmt.line,
                        1,
                        script.UNSUPPORTED_FOR_ENGINE,
                        "two-time observables have no sequential realization; "
                        "run them on the multitime engine",
                    )
                )
    if diagnostics:
        diagnostics.sort(key=lambda d: (d.line, d.col))
        return RunResult(exit_code=1, diagnostics=diagnostics)

    try:
        mt_dist = None
        or_dist = None
        if engine in ("multitime", "both"):
            state, events = compile_multitime(doc, tol)
            mt_dist = probabilities(state, events, tol)
        if engine in ("oracle", "both"):
            or_dist = simulate(compile_oracle(doc, tol), tol)
    except ImpossiblePostselection as err:
        return RunResult(exit_code=2, error=f"impossible post-selection: {err}")

    if engine == "oracle":
        assert or_dist is not None
        records = or_dist.records
        rows = [(key, or_dist.probabilities[key], or_dist.joint[key]) for key in or_dist.probabilities]
        discrepancy = None
    else:
        assert mt_dist is not None
        records = mt_dist.records
        rows = [(key, mt_dist.probabilities[key], mt_dist.relative[key]) for key in mt_dist.probabilities]
        discrepancy = None
        if engine == "both":
            assert or_dist is not None
            discrepancy = max_discrepancy(mt_dist.probabilities, or_dist.aligned(records))
    rows.sort(key=lambda row: row[0])
    report = _render_report(engine, records, rows, discrepancy, tol)
    return RunResult(
        exit_code=0,
        report=report,
        records=records,
        rows=tuple(rows),
        max_discrepancy=discrepancy,
    )


def run_text(
    text: str, engine: str = "multitime", tol: Tolerance = DEFAULT_TOLERANCE
) -> RunResult:
    return run_document(script.parse(text), engine, tol)
