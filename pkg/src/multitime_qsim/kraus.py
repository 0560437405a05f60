"""Kraus families, projective measurements and multi-time observables.

A KrausOperator may bind several measurement periods at once; its tensor
carries one output axis followed by one input axis per bound period, with
periods in canonical order.  For a single period that is just the operator
matrix (out, in).  Outcome labels are strings; one label may own several
operators (a lumped, coarse-grained outcome).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .boundaries import MeasurementPeriod, canonical_periods
from .errors import (
    IncompleteGrouping,
    IncompleteKrausSet,
    NotHermitian,
    NotUnitary,
    OverlappingPeriods,
    ShapeError,
)
from .tensors import DEFAULT_TOLERANCE, Tolerance, as_tensor, frozen, prod

# Eigenvalues closer than this are treated as one degenerate outcome.
EIGENVALUE_CLUSTER_TOL = 1e-8


def render_eigenvalue(value: float) -> str:
    """Outcome label for a projective eigenvalue: 12 significant digits.

    Values within the cluster tolerance of zero print as 0 (they would
    have been clustered with an exact zero anyway).
    """
    if abs(value) <= EIGENVALUE_CLUSTER_TOL:
        value = 0.0
    return f"{value + 0.0:.12g}"


@dataclass(frozen=True)
class KrausOperator:
    """One operator bound to one or more measurement periods."""

    periods: tuple[MeasurementPeriod, ...]
    tensor: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        if not self.periods:
            raise ShapeError("Kraus operator must bind at least one period")
        ordered = canonical_periods(list(self.periods))
        if ordered != self.periods:
            raise ShapeError("Kraus operator periods must be in canonical order")
        if len(set(self.periods)) != len(self.periods):
            raise ShapeError("Kraus operator binds a period twice")
        outs = tuple(p.out_dim for p in self.periods)
        ins = tuple(p.in_dim for p in self.periods)
        arr = as_tensor(self.tensor, outs + ins)
        object.__setattr__(self, "tensor", frozen(arr))

    @property
    def period_bindings(self) -> tuple[tuple[MeasurementPeriod, int, int], ...]:
        return tuple((p, p.in_dim, p.out_dim) for p in self.periods)

    @property
    def out_dims(self) -> tuple[int, ...]:
        return tuple(p.out_dim for p in self.periods)

    @property
    def in_dims(self) -> tuple[int, ...]:
        return tuple(p.in_dim for p in self.periods)

    def flat_matrix(self) -> np.ndarray:
        """The operator as a matrix on the joint period space."""
        return self.tensor.reshape(prod(self.out_dims), prod(self.in_dims))


def bound_operator(
    periods: MeasurementPeriod | Sequence[MeasurementPeriod], matrix: object
) -> KrausOperator:
    """Build a KrausOperator from a joint matrix, reshaping to period axes."""
    if isinstance(periods, MeasurementPeriod):
        periods = (periods,)
    ordered = canonical_periods(list(periods))
    outs = tuple(p.out_dim for p in ordered)
    ins = tuple(p.in_dim for p in ordered)
    arr = np.asarray(matrix, dtype=complex)
    if arr.size != prod(outs) * prod(ins):
        raise ShapeError(
            f"operator with {arr.size} entries cannot act on periods "
            f"{[p.describe() for p in ordered]}"
        )
    return KrausOperator(tuple(ordered), arr.reshape(outs + ins))


@dataclass(frozen=True)
class KrausSet:
    """Labelled family of Kraus operators sharing one period binding.

    Constructors in this module always return complete families; a raw
    KrausSet may be incomplete so that check_complete can report on it.
    Consumers that need completeness (probability rules, the oracle) call
    ensure_complete first.
    """

    outcomes: dict[str, tuple[KrausOperator, ...]]

    def __post_init__(self) -> None:
        if not self.outcomes:
            raise ShapeError("Kraus set needs at least one outcome")
        reference: tuple[MeasurementPeriod, ...] | None = None
        cleaned: dict[str, tuple[KrausOperator, ...]] = {}
        for label, ops in self.outcomes.items():
            ops = tuple(ops)
            if not label:
                raise ShapeError("outcome labels must be non-empty")
            if not ops:
                raise ShapeError(f"outcome {label!r} has no operators")
            for op in ops:
                if reference is None:
                    reference = op.periods
                elif op.periods != reference:
                    raise ShapeError("all operators of a Kraus set must bind the same periods")
            cleaned[label] = ops
        object.__setattr__(self, "outcomes", cleaned)

    @property
    def periods(self) -> tuple[MeasurementPeriod, ...]:
        first = next(iter(self.outcomes.values()))
        return first[0].periods

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.outcomes)

    def operators(self) -> list[KrausOperator]:
        return [op for ops in self.outcomes.values() for op in ops]


def check_complete(kraus: KrausSet, tol: Tolerance = DEFAULT_TOLERANCE) -> tuple[bool, float]:
    """Whether sum_k A_k^dag A_k = 1 on the joint period input space; max deviation."""
    ops = kraus.operators()
    din = prod(ops[0].in_dims)
    acc = np.zeros((din, din), dtype=complex)
    for op in ops:
        m = op.flat_matrix()
        acc += m.conj().T @ m
    dev = float(np.max(np.abs(acc - np.eye(din)), initial=0.0))
    return dev <= tol.eq_tol, dev


def ensure_complete(kraus: KrausSet, tol: Tolerance = DEFAULT_TOLERANCE) -> None:
    ok, dev = check_complete(kraus, tol)
    if not ok:
        raise IncompleteKrausSet(f"Kraus family misses the identity by {dev:.3e}")


def kraus_set(
    periods: MeasurementPeriod | Sequence[MeasurementPeriod],
    outcomes: Mapping[str, object] | Iterable[tuple[str, object]],
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> KrausSet:
    """Build a complete KrausSet from labelled matrices.

    A label may repeat (or map to a list of matrices) to declare a lumped
    outcome with several fine-grained operators.
    """
    items = outcomes.items() if isinstance(outcomes, Mapping) else outcomes
    table: dict[str, list[KrausOperator]] = {}
    for label, value in items:
        mats = value if isinstance(value, (list, tuple)) else [value]
        for mat in mats:
            table.setdefault(label, []).append(bound_operator(periods, mat))
    result = KrausSet({k: tuple(v) for k, v in table.items()})
    ensure_complete(result, tol)
    return result


def identity_set(period: MeasurementPeriod, label: str = "id") -> KrausSet:
    if period.in_dim != period.out_dim:
        raise ShapeError("identity insertion needs equal in/out dimensions")
    return KrausSet({label: (bound_operator(period, np.eye(period.in_dim)),)})


def _cluster_eigenvalues(values: np.ndarray) -> list[tuple[float, list[int]]]:
    """Group sorted-ascending eigenvalues within the cluster tolerance."""
    clusters: list[tuple[float, list[int]]] = []
    order = np.argsort(values)
    current: list[int] = []
    for idx in order:
        if current and abs(values[idx] - values[current[-1]]) > EIGENVALUE_CLUSTER_TOL:
            rep = float(np.mean(values[current]))
            clusters.append((rep, current))
            current = []
        current.append(int(idx))
    if current:
        clusters.append((float(np.mean(values[current])), current))
    return clusters


def spectral_table(observable: object, tol: Tolerance = DEFAULT_TOLERANCE) -> list[tuple[str, np.ndarray]]:
    """Eigenvalue-labelled projectors of a Hermitian matrix, descending.

    Eigenvalues within the cluster tolerance share one projector; labels are
    the cluster means rendered to 12 significant digits.
    """
    mat = np.asarray(observable, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ShapeError(f"observable must be a square matrix, got shape {mat.shape}")
    dev = float(np.max(np.abs(mat - mat.conj().T), initial=0.0))
    if dev > tol.eq_tol:
        raise NotHermitian(f"observable deviates from Hermitian by {dev:.3e}")
    values, vectors = np.linalg.eigh(mat)
    d = mat.shape[0]
    rows: list[tuple[float, np.ndarray]] = []
    for rep, idxs in _cluster_eigenvalues(values):
        proj = np.zeros((d, d), dtype=complex)
        for i in idxs:
            v = vectors[:, i]
            proj += np.outer(v, v.conj())
        rows.append((rep, proj))
    rows.sort(key=lambda pair: -pair[0])
    return [(render_eigenvalue(rep), proj) for rep, proj in rows]


def projective_set(
    observable: object, period: MeasurementPeriod, tol: Tolerance = DEFAULT_TOLERANCE
) -> KrausSet:
    """Spectral measurement of a Hermitian observable within one period.

    Outcome labels are the (clustered) eigenvalues rendered to 12
    significant digits; outcomes are ordered by descending eigenvalue.
    """
    mat = np.asarray(observable, dtype=complex)
    d = period.in_dim
    if period.out_dim != d or mat.shape != (d, d):
        raise ShapeError(f"observable shape {mat.shape} does not fit period {period.describe()}")
    result = KrausSet(
        {label: (bound_operator(period, proj),) for label, proj in spectral_table(mat, tol)}
    )
    ensure_complete(result, tol)
    return result


@dataclass(frozen=True)
class MultiTimeObservable:
    """Real combination of single-period Hermitian operators, one per period."""

    terms: tuple[tuple[float, MeasurementPeriod, np.ndarray], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise ShapeError("multi-time observable needs at least one term")
        seen: set[MeasurementPeriod] = set()
        cleaned = []
        for coeff, period, op in self.terms:
            coeff = float(coeff)
            if period in seen:
                raise OverlappingPeriods(f"period {period.describe()} bound by two terms")
            seen.add(period)
            d = period.in_dim
            if period.out_dim != d:
                raise ShapeError("multi-time observable terms need square period spaces")
            mat = as_tensor(op, (d, d))
            dev = float(np.max(np.abs(mat - mat.conj().T), initial=0.0))
            if dev > DEFAULT_TOLERANCE.eq_tol:
                raise NotHermitian(f"term operator deviates from Hermitian by {dev:.3e}")
            cleaned.append((coeff, period, frozen(mat)))
        object.__setattr__(self, "terms", tuple(cleaned))

    @property
    def periods(self) -> tuple[MeasurementPeriod, ...]:
        return canonical_periods([p for _, p, _ in self.terms])

    def joint_matrix(self) -> np.ndarray:
        """sum_t coeff_t * (op_t at its slot, identity elsewhere), canonical order."""
        ordered = self.periods
        dims = [p.in_dim for p in ordered]
        total = prod(dims)
        joint = np.zeros((total, total), dtype=complex)
        by_period = {p: (c, m) for c, p, m in self.terms}
        for slot, period in enumerate(ordered):
            coeff, mat = by_period[period]
            factors = [np.eye(d, dtype=complex) for d in dims]
            factors[slot] = mat
            term = factors[0]
            for f in factors[1:]:
                term = np.kron(term, f)
            joint += coeff * term
        return joint


def multi_time_projective_set(
    observable: MultiTimeObservable, tol: Tolerance = DEFAULT_TOLERANCE
) -> KrausSet:
    """Joint spectral measurement of a multi-time observable.

    Returns projectors onto the eigenvalue clusters of the joint operator,
    each bound to all the observable's periods at once.
    """
    ordered = observable.periods
    result = KrausSet(
        {
            label: (bound_operator(ordered, proj),)
            for label, proj in spectral_table(observable.joint_matrix(), tol)
        }
    )
    ensure_complete(result, tol)
    return result


def von_neumann_with_evolution(
    projectors: KrausSet,
    u_before: object,
    u_after: object,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> KrausSet:
    """Sandwich each operator of a single-period set: U_after . A . U_before."""
    periods = projectors.periods
    if len(periods) != 1:
        raise ShapeError("evolution sandwich applies to single-period sets")
    period = periods[0]
    ub = np.asarray(u_before, dtype=complex)
    ua = np.asarray(u_after, dtype=complex)
    for name, u, dim in (("U_before", ub, period.in_dim), ("U_after", ua, period.out_dim)):
        if u.shape != (dim, dim):
            raise ShapeError(f"{name} shape {u.shape} does not fit period {period.describe()}")
        dev = float(np.max(np.abs(u.conj().T @ u - np.eye(dim)), initial=0.0))
        if dev > tol.eq_tol:
            raise NotUnitary(f"{name} deviates from unitary by {dev:.3e}")
    table = {
        label: tuple(bound_operator(period, ua @ op.flat_matrix() @ ub) for op in ops)
        for label, ops in projectors.outcomes.items()
    }
    result = KrausSet(table)
    ensure_complete(result, tol)
    return result


def lump(kraus: KrausSet, grouping: Mapping[str, str]) -> KrausSet:
    """Coarse-grain outcomes: fine label -> coarse label, operators concatenated.

    Every outcome of the set must be assigned a coarse label.
    """
    missing = [label for label in kraus.outcomes if label not in grouping]
    if missing:
        raise IncompleteGrouping(f"grouping misses outcomes {missing}")
    table: dict[str, list[KrausOperator]] = {}
    for label, ops in kraus.outcomes.items():
        table.setdefault(grouping[label], []).extend(ops)
    return KrausSet({k: tuple(v) for k, v in table.items()})
