"""Fixture corpus for the experiment description language.

VALID entries are (name, text) pairs that must parse cleanly and survive a
render/parse round trip.  INVALID entries are (name, text, line, code)
tuples: parsing must emit a diagnostic with that code on that line.
"""

INV_SQRT2 = 0.7071067811865476

VALID: list[tuple[str, str]] = [
    (
        "abl_pair",
        """\
system S dim 2
state up = [1, 0]
state plusx = [0.7071067811865476, 0.7071067811865476]
operator Z = [[1, 0], [0, -1]]
prepare S up
measure S projective Z as m
postselect S plusx
""",
    ),
    (
        "comments_and_blanks",
        """\
# a heavily commented run
system S dim 2

state psi = [0.6, 0.8]  # normalized by hand
operator X = [[0, 1], [1, 0]]

prepare S psi
# the only measurement:
measure S projective X as m
""",
    ),
    (
        "kraus_recorded",
        """\
system S dim 2
state psi = [0.6, 0.8]
operator K0 = [[1, 0], [0, 0]]
operator K1 = [[0, 0], [0, 1]]
prepare S psi
measure S kraus { a: K0, b: K1 } as k
""",
    ),
    (
        "kraus_unrecorded",
        """\
system S dim 2
state psi = [1, 0]
operator K0 = [[1, 0], [0, 0]]
operator K1 = [[0, 0], [0, 1]]
prepare S psi
measure S kraus { a: K0, b: K1 }
""",
    ),
    (
        "kraus_lumped",
        """\
system S dim 2
state psi = [0.6, 0.8]
operator KA = [[0.7071067811865476, 0], [0, 0]]
operator KB = [[0, 0], [0, 1]]
operator KC = [[0.7071067811865476, 0], [0, 0]]
prepare S psi
measure S kraus { a: KA, b: KB, a: KC } as k
""",
    ),
    (
        "joint_prepare",
        """\
system A dim 2
system B dim 2
state bell = [0.7071067811865476, 0, 0, 0.7071067811865476]
operator Z = [[1, 0], [0, -1]]
prepare A B bell
measure A projective Z as ma
measure B projective Z as mb
""",
    ),
    (
        "unitary_between",
        """\
system S dim 2
state up = [1, 0]
operator H = [[0.7071067811865476, 0.7071067811865476], [0.7071067811865476, -0.7071067811865476]]
operator Z = [[1, 0], [0, -1]]
prepare S up
unitary S H
measure S projective Z as m
postselect S up
""",
    ),
    (
        "two_time_observable",
        """\
system S dim 2
state psi = [0.6, 0.8]
state phi = [1, 0]
operator X = [[0, 1], [1, 0]]
prepare S psi
slot s1
postselect S phi
prepare S psi
slot s2
postselect S phi
measure2 S X@s1 - X@s2 as w
""",
    ),
    (
        "open_future",
        """\
system S dim 2
state psi = [0.8, 0.6]
operator Z = [[1, 0], [0, -1]]
prepare S psi
measure S projective Z as m
""",
    ),
    (
        "re_preparation",
        """\
system S dim 2
state a = [1, 0]
state b = [0, 1]
operator X = [[0, 1], [1, 0]]
prepare S a
measure S projective X as m1
postselect S b
prepare S b
measure S projective X as m2
postselect S a
""",
    ),
    (
        "complex_literals",
        """\
system S dim 2
state v = [0.5+0.5i, 0.5-0.5i]
operator Y = [[0, 0-1i], [0+1i, 0]]
prepare S v
measure S projective Y as m
""",
    ),
    (
        "imaginary_only",
        """\
system S dim 2
state v = [1i, -1i]
operator Z = [[1, 0], [0, -1]]
prepare S v
measure S projective Z as m
""",
    ),
    (
        "exponent_reals",
        """\
system S dim 2
state v = [1e-3, 0.999999499999875]
operator Z = [[1, 0], [0, -1]]
prepare S v
measure S projective Z as m
""",
    ),
    (
        "joint_measure",
        """\
system A dim 2
system B dim 2
state up = [1, 0]
operator ZZ = [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]
prepare A up
prepare B up
measure A B projective ZZ as m
""",
    ),
    (
        "joint_postselect",
        """\
system A dim 2
system B dim 2
state up = [1, 0]
state bell = [0.7071067811865476, 0, 0, 0.7071067811865476]
operator Z = [[1, 0], [0, -1]]
prepare A up
prepare B up
measure A projective Z as m
postselect A B bell
""",
    ),
    (
        "qutrit",
        """\
system Q dim 3
state psi = [0.6, 0, 0.8]
operator L = [[1, 0, 0], [0, 0, 0], [0, 0, -1]]
prepare Q psi
measure Q projective L as m
""",
    ),
    (
        "dim_four_kraus",
        """\
system S dim 4
state psi = [0.5, 0.5, 0.5, 0.5]
operator P01 = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]
operator P23 = [[0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
prepare S psi
measure S kraus { low: P01, high: P23 } as band
""",
    ),
    (
        "several_records",
        """\
system S dim 2
state up = [1, 0]
state plusx = [0.7071067811865476, 0.7071067811865476]
operator Z = [[1, 0], [0, -1]]
operator X = [[0, 1], [1, 0]]
prepare S up
measure S projective Z as first
measure S projective X as second
postselect S plusx
""",
    ),
    (
        "phase_unitary",
        """\
system S dim 2
state plusx = [0.7071067811865476, 0.7071067811865476]
operator PH = [[1i, 0], [0, 1]]
operator X = [[0, 1], [1, 0]]
prepare S plusx
unitary S PH
measure S projective X as m
""",
    ),
    (
        "postselect_only",
        """\
system S dim 2
state up = [1, 0]
state tilt = [0.6, 0.8]
prepare S up
postselect S tilt
""",
    ),
    (
        "comment_only_document",
        """\
# nothing here yet

# still nothing
""",
    ),
    (
        "measure2_with_inner_measure",
        """\
system S dim 2
state psi = [0.6, 0.8]
state phi = [0.8, -0.6]
operator Z = [[1, 0], [0, -1]]
prepare S psi
slot s1
postselect S phi
prepare S phi
slot s2
measure S projective Z as m
postselect S psi
measure2 S Z@s1 - Z@s2 as w
""",
    ),
]


INVALID: list[tuple[str, str, int, str]] = [
    (
        "truncated_system",
        "system S dim\n",
        1,
        "SyntaxError",
    ),
    (
        "missing_imaginary_suffix",
        """\
system S dim 2
state v = [1+2]
""",
        2,
        "SyntaxError",
    ),
    (
        "unknown_keyword",
        "teleport S somewhere\n",
        1,
        "SyntaxError",
    ),
    (
        "projective_without_record",
        """\
system S dim 2
state up = [1, 0]
operator Z = [[1, 0], [0, -1]]
prepare S up
measure S projective Z
""",
        5,
        "SyntaxError",
    ),
    (
        "undeclared_system",
        """\
system S dim 2
state up = [1, 0]
prepare Q up
postselect S up
""",
        3,
        "UnknownSystem",
    ),
    (
        "undeclared_state",
        """\
system S dim 2
state up = [1, 0]
prepare S nosuch
postselect S up
""",
        3,
        "UnknownName",
    ),
    (
        "undeclared_slot",
        """\
system S dim 2
state up = [1, 0]
operator Z = [[1, 0], [0, -1]]
prepare S up
slot s1
postselect S up
measure2 S Z@s1 - Z@s9 as w
""",
        7,
        "UnknownName",
    ),
    (
        "duplicate_state",
        """\
system S dim 2
state up = [1, 0]
state up = [0, 1]
prepare S up
postselect S up
""",
        3,
        "DuplicateName",
    ),
    (
        "duplicate_record",
        """\
system S dim 2
state up = [1, 0]
operator Z = [[1, 0], [0, -1]]
operator X = [[0, 1], [1, 0]]
prepare S up
measure S projective Z as m
measure S projective X as m
""",
        7,
        "DuplicateName",
    ),
    (
        "vector_wrong_length",
        """\
system S dim 2
state v = [1, 0, 0]
prepare S v
postselect S v
""",
        3,
        "DimensionMismatch",
    ),
    (
        "ragged_operator",
        """\
system S dim 2
state up = [1, 0]
operator M = [[1, 0], [0]]
prepare S up
measure S projective M as m
""",
        3,
        "DimensionMismatch",
    ),
    (
        "measure_before_prepare",
        """\
system S dim 2
state up = [1, 0]
operator Z = [[1, 0], [0, -1]]
measure S projective Z as m
""",
        4,
        "InvalidSequence",
    ),
    (
        "prepare_while_active",
        """\
system S dim 2
state up = [1, 0]
prepare S up
prepare S up
postselect S up
""",
        4,
        "InvalidSequence",
    ),
    (
        "never_measures",
        """\
system S dim 2
state up = [1, 0]
prepare S up
""",
        4,
        "InvalidSequence",
    ),
    (
        "non_unitary_evolution",
        """\
system S dim 2
state up = [1, 0]
operator P = [[1, 0], [0, 0]]
prepare S up
unitary S P
postselect S up
""",
        5,
        "NotUnitary",
    ),
    (
        "non_hermitian_observable",
        """\
system S dim 2
state up = [1, 0]
operator R = [[0, 1], [0, 0]]
prepare S up
measure S projective R as m
""",
        5,
        "NotHermitian",
    ),
    (
        "incomplete_kraus_family",
        """\
system S dim 2
state up = [1, 0]
operator K0 = [[1, 0], [0, 0]]
prepare S up
measure S kraus { a: K0 } as m
""",
        5,
        "IncompleteKraus",
    ),
    (
        "measure2_same_slot",
        """\
system S dim 2
state up = [1, 0]
operator Z = [[1, 0], [0, -1]]
prepare S up
slot s1
postselect S up
measure2 S Z@s1 - Z@s1 as w
""",
        7,
        "OverlappingPeriods",
    ),
    (
        "measure2_same_period",
        """\
system S dim 2
state up = [1, 0]
operator Z = [[1, 0], [0, -1]]
prepare S up
slot s1
slot s2
postselect S up
measure2 S Z@s1 - Z@s2 as w
""",
        8,
        "OverlappingPeriods",
    ),
    (
        "zero_norm_state",
        """\
system S dim 2
state z = [0, 0]
prepare S z
postselect S z
""",
        3,
        "ZeroNormState",
    ),
]
