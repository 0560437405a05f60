"""Simulator for quantum states that occupy several moments of time.

A state here is a tensor with one axis per time boundary: ket axes carry
prepared amplitudes, bra axes carry (conjugated) post-selection
amplitudes.  Each system's boundaries pair up into measurement periods;
measurements are Kraus families inserted into those periods, and outcome
weights are squared Frobenius norms of the contracted network.

Two engines compute every distribution: the contraction engine above, and
a sequential statevector engine that runs an equivalent laboratory
protocol (preparations, unitaries, measurements, post-selections) branch
by branch.  They must agree; the test corpus checks that they do.
"""

__version__ = "0.1.0"

from .boundaries import BoundarySpec, Direction, MeasurementPeriod, canonical_periods
from .errors import (
    AlternationError,
    CapacityExceeded,
    EntangledPeriods,
    ImpossiblePostselection,
    IncompleteGrouping,
    IncompleteKrausSet,
    MissingPeriod,
    MultiTimeError,
    NotHermitian,
    NotUnitary,
    OverlapError,
    OverlappingPeriods,
    ScriptError,
    ShapeError,
    ZeroNormState,
)
from .kraus import (
    KrausOperator,
    KrausSet,
    MultiTimeObservable,
    bound_operator,
    check_complete,
    identity_set,
    kraus_set,
    lump,
    multi_time_projective_set,
    projective_set,
    spectral_table,
    von_neumann_with_evolution,
)
from .oracle import (
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
from .preparation import (
    PreparationPlan,
    bell_state,
    plan_four_time,
    plan_neutral_past,
    plan_two_time,
    plan_two_time_entangled,
    swap_operator,
)
from .runner import RunResult, run_document, run_text
from .script import Diagnostic, ScriptDocument, parse, render
from .states import (
    MeasurementEvent,
    MultiTimeMixture,
    MultiTimeState,
    OutcomeDistribution,
    channel_state,
    closed_loop_state,
    history_inner_product,
    identity_channel_state,
    insert,
    one_time_bra,
    one_time_ket,
    pre_post_state,
    probabilities,
    reduce,
    tensor_compose,
    two_time_state,
    validate,
)
from .tensors import DEFAULT_TOLERANCE, Tolerance

__all__ = [
    "__version__",
    "AlternationError",
    "BoundarySpec",
    "BranchDistribution",
    "CapacityExceeded",
    "DEFAULT_TOLERANCE",
    "Diagnostic",
    "Direction",
    "EntangledPeriods",
    "ExperimentScript",
    "ImpossiblePostselection",
    "IncompleteGrouping",
    "IncompleteKrausSet",
    "KrausOperator",
    "KrausSet",
    "Measure",
    "MeasurementEvent",
    "MeasurementPeriod",
    "MissingPeriod",
    "MultiTimeError",
    "MultiTimeMixture",
    "MultiTimeObservable",
    "MultiTimeState",
    "NotHermitian",
    "NotUnitary",
    "OutcomeDistribution",
    "OverlapError",
    "OverlappingPeriods",
    "Postselect",
    "Prepare",
    "PreparationPlan",
    "ProbeSlot",
    "RunResult",
    "ScriptDocument",
    "ScriptError",
    "ShapeError",
    "Tolerance",
    "Unitary",
    "ZeroNormState",
    "bell_state",
    "bound_operator",
    "canonical_periods",
    "channel_state",
    "check_complete",
    "closed_loop_state",
    "history_inner_product",
    "identity_channel_state",
    "identity_set",
    "insert",
    "kraus_set",
    "lump",
    "max_discrepancy",
    "multi_time_projective_set",
    "one_time_bra",
    "one_time_ket",
    "parse",
    "plan_four_time",
    "plan_neutral_past",
    "plan_two_time",
    "plan_two_time_entangled",
    "pre_post_state",
    "probabilities",
    "projective_set",
    "realize_multitime",
    "reduce",
    "render",
    "run_document",
    "run_text",
    "simulate",
    "spectral_table",
    "swap_operator",
    "tensor_compose",
    "two_time_state",
    "validate",
    "von_neumann_with_evolution",
]
