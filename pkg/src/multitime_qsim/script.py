"""Line-oriented experiment description language.

One statement per line, `#` starts a comment.  Statements:

    system <name> dim <d>
    state <name> = [ <complex>, ... ]
    operator <name> = [[ <complex>, ... ], ... ]
    prepare <system...> <state>
    unitary <system...> <operator>
    measure <system...> projective <operator> as <label>
    measure <system...> kraus { <label>: <operator>, ... } [as <label>]
    measure2 <system> <operator>@<slot> - <operator>@<slot> as <label>
    postselect <system...> <state>
    slot <name>

Complex literals take the forms a, bi, a+bi, a-bi (reals may carry an
exponent).  Parsing never aborts: every problem becomes a diagnostic with
a line and column, and the parser moves on to the next line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .tensors import DEFAULT_TOLERANCE

# diagnostic codes
SYNTAX = "SyntaxError"
UNKNOWN_SYSTEM = "UnknownSystem"
UNKNOWN_NAME = "UnknownName"
DUPLICATE_NAME = "DuplicateName"
DIMENSION_MISMATCH = "DimensionMismatch"
INVALID_SEQUENCE = "InvalidSequence"
NOT_UNITARY = "NotUnitary"
NOT_HERMITIAN = "NotHermitian"
INCOMPLETE_KRAUS = "IncompleteKraus"
OVERLAPPING_PERIODS = "OverlappingPeriods"
UNSUPPORTED_FOR_ENGINE = "UnsupportedForEngine"
ZERO_NORM = "ZeroNormState"


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    code: str
    message: str

    def format(self) -> str:
        return f"{self.line}:{self.col}: {self.code}: {self.message}"


# ---------------------------------------------------------------------------
# statements

@dataclass(frozen=True)
class SystemDecl:
    name: str
    dim: int
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class StateDecl:
    name: str
    values: tuple[complex, ...]
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class OperatorDecl:
    name: str
    rows: tuple[tuple[complex, ...], ...]
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class PrepareStmt:
    systems: tuple[str, ...]
    state: str
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class UnitaryStmt:
    systems: tuple[str, ...]
    operator: str
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class MeasureProjective:
    systems: tuple[str, ...]
    operator: str
    record: str
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class MeasureKraus:
    systems: tuple[str, ...]
    items: tuple[tuple[str, str], ...]  # (outcome label, operator name)
    record: str | None = None
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Measure2:
    system: str
    op_a: str
    slot_a: str
    op_b: str
    slot_b: str
    record: str
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class PostselectStmt:
    systems: tuple[str, ...]
    state: str
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class SlotStmt:
    name: str
    line: int = field(compare=False, default=0)


Statement = (
    SystemDecl
    | StateDecl
    | OperatorDecl
    | PrepareStmt
    | UnitaryStmt
    | MeasureProjective
    | MeasureKraus
    | Measure2
    | PostselectStmt
    | SlotStmt
)


@dataclass
class ScriptDocument:
    statements: tuple[Statement, ...]
    diagnostics: list[Diagnostic]

    @property
    def valid(self) -> bool:
        return not self.diagnostics


# ---------------------------------------------------------------------------
# tokenizer

_NUMBER_RE = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_PUNCT = set("[]{},:@=+-")


@dataclass(frozen=True)
class _Token:
    kind: str  # ident | number | imag | punct | end
    text: str
    col: int
    value: float = 0.0


class _LineSyntaxError(Exception):
    def __init__(self, col: int, message: str) -> None:
        super().__init__(message)
        self.col = col
        self.message = message


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "#":
            break
        if c in " \t":
            i += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER_RE.match(text, i)
            assert m is not None
            end = m.end()
            kind = "number"
            # a trailing bare i marks an imaginary literal
            if end < n and text[end] == "i" and (end + 1 == n or not (text[end + 1].isalnum() or text[end + 1] == "_")):
                kind = "imag"
                end += 1
            tokens.append(_Token(kind, text[i:end], i + 1, float(m.group(0))))
            i = end
            continue
        m = _IDENT_RE.match(text, i)
        if m is not None:
            tokens.append(_Token("ident", m.group(0), i + 1))
            i = m.end()
            continue
        if c in _PUNCT:
            tokens.append(_Token("punct", c, i + 1))
            i += 1
            continue
        raise _LineSyntaxError(i + 1, f"unexpected character {c!r}")
    tokens.append(_Token("end", "", len(text.rstrip()) + 1 if tokens else 1))
    return tokens


class _Cursor:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "end":
            self.pos += 1
        return tok

    def accept(self, kind: str, text: str | None = None) -> _Token | None:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.next()
        return None

    def expect(self, kind: str, text: str | None = None, what: str | None = None) -> _Token:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.next()
        want = what or (text if text is not None else kind)
        got = tok.text or "end of line"
        raise _LineSyntaxError(tok.col, f"expected {want}, got {got!r}")

    def expect_end(self) -> None:
        tok = self.peek()
        if tok.kind != "end":
            raise _LineSyntaxError(tok.col, f"unexpected trailing {tok.text!r}")


def _parse_complex(cur: _Cursor) -> complex:
    sign = 1.0
    tok = cur.accept("punct", "-")
    if tok is not None:
        sign = -1.0
    elif cur.accept("punct", "+") is not None:
        sign = 1.0
    first = cur.peek()
    if first.kind == "imag":
        cur.next()
        return complex(0.0, sign * first.value)
    if first.kind != "number":
        raise _LineSyntaxError(first.col, f"expected number, got {first.text or 'end of line'!r}")
    cur.next()
    real = sign * first.value
    op = cur.peek()
    if op.kind == "punct" and op.text in "+-":
        nxt = cur.tokens[cur.pos + 1]
        if nxt.kind == "imag":
            cur.next()
            cur.next()
            imag = nxt.value if op.text == "+" else -nxt.value
            return complex(real, imag)
        if nxt.kind == "number":
            raise _LineSyntaxError(nxt.col, "expected imaginary part (did you forget the i suffix?)")
    return complex(real, 0.0)


def _parse_vector(cur: _Cursor) -> tuple[complex, ...]:
    cur.expect("punct", "[")
    values = [_parse_complex(cur)]
    while cur.accept("punct", ","):
        values.append(_parse_complex(cur))
    cur.expect("punct", "]")
    return tuple(values)


def _parse_matrix(cur: _Cursor) -> tuple[tuple[complex, ...], ...]:
    cur.expect("punct", "[")
    rows = [_parse_vector(cur)]
    while cur.accept("punct", ","):
        rows.append(_parse_vector(cur))
    cur.expect("punct", "]")
    return tuple(rows)


def _parse_names_until(cur: _Cursor, sentinels: set[str]) -> tuple[list[str], _Token]:
    """Collect identifiers until one of the sentinel keywords appears."""
    names: list[str] = []
    while True:
        tok = cur.peek()
        if tok.kind == "ident" and tok.text in sentinels:
            return names, cur.next()
        if tok.kind != "ident":
            raise _LineSyntaxError(tok.col, f"expected name, got {tok.text or 'end of line'!r}")
        names.append(cur.next().text)


def _parse_statement(line_no: int, cur: _Cursor) -> Statement:
    head = cur.expect("ident", what="statement keyword")
    kw = head.text
    if kw == "system":
        name = cur.expect("ident", what="system name").text
        cur.expect("ident", "dim")
        dim_tok = cur.expect("number", what="dimension")
        cur.expect_end()
        if dim_tok.value != int(dim_tok.value):
            raise _LineSyntaxError(dim_tok.col, "dimension must be an integer")
        return SystemDecl(name, int(dim_tok.value), line_no)
    if kw == "state":
        name = cur.expect("ident", what="state name").text
        cur.expect("punct", "=")
        values = _parse_vector(cur)
        cur.expect_end()
        return StateDecl(name, values, line_no)
    if kw == "operator":
        name = cur.expect("ident", what="operator name").text
        cur.expect("punct", "=")
        rows = _parse_matrix(cur)
        cur.expect_end()
        return OperatorDecl(name, rows, line_no)
    if kw in ("prepare", "postselect"):
        names: list[str] = []
        while True:
            names.append(cur.expect("ident", what="name").text)
            if cur.peek().kind == "end":
                break
        if len(names) < 2:
            raise _LineSyntaxError(cur.peek().col, f"{kw} needs systems and a state")
        cls = PrepareStmt if kw == "prepare" else PostselectStmt
        return cls(tuple(names[:-1]), names[-1], line_no)
    if kw == "unitary":
        names = []
        while True:
            names.append(cur.expect("ident", what="name").text)
            if cur.peek().kind == "end":
                break
        if len(names) < 2:
            raise _LineSyntaxError(cur.peek().col, "unitary needs systems and an operator")
        return UnitaryStmt(tuple(names[:-1]), names[-1], line_no)
    if kw == "measure":
        systems, mode = _parse_names_until(cur, {"projective", "kraus"})
        if not systems:
            raise _LineSyntaxError(mode.col, "measure needs at least one system")
        if mode.text == "projective":
            op = cur.expect("ident", what="operator name").text
            cur.expect("ident", "as")
            record = cur.expect("ident", what="record label").text
            cur.expect_end()
            return MeasureProjective(tuple(systems), op, record, line_no)
        cur.expect("punct", "{")
        items: list[tuple[str, str]] = []
        while True:
            label = cur.expect("ident", what="outcome label").text
            cur.expect("punct", ":")
            op = cur.expect("ident", what="operator name").text
            items.append((label, op))
            if not cur.accept("punct", ","):
                break
        cur.expect("punct", "}")
        record: str | None = None
        if cur.accept("ident", "as"):
            record = cur.expect("ident", what="record label").text
        cur.expect_end()
        return MeasureKraus(tuple(systems), tuple(items), record, line_no)
    if kw == "measure2":
        system = cur.expect("ident", what="system name").text
        op_a = cur.expect("ident", what="operator name").text
        cur.expect("punct", "@")
        slot_a = cur.expect("ident", what="slot name").text
        cur.expect("punct", "-")
        op_b = cur.expect("ident", what="operator name").text
        cur.expect("punct", "@")
        slot_b = cur.expect("ident", what="slot name").text
        cur.expect("ident", "as")
        record = cur.expect("ident", what="record label").text
        cur.expect_end()
        return Measure2(system, op_a, slot_a, op_b, slot_b, record, line_no)
    if kw == "slot":
        name = cur.expect("ident", what="slot name").text
        cur.expect_end()
        return SlotStmt(name, line_no)
    raise _LineSyntaxError(head.col, f"unknown statement {kw!r}")


def parse(text: str) -> ScriptDocument:
    """Parse a document; collect diagnostics instead of raising."""
    statements: list[Statement] = []
    diagnostics: list[Diagnostic] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            tokens = _tokenize(raw)
            cur = _Cursor(tokens)
            statements.append(_parse_statement(line_no, cur))
        except _LineSyntaxError as err:
            diagnostics.append(Diagnostic(line_no, err.col, SYNTAX, err.message))
    diagnostics.extend(_semantic(statements, line_count=text.count("\n") + 1))
    diagnostics.sort(key=lambda d: (d.line, d.col))
    return ScriptDocument(tuple(statements), diagnostics)


# ---------------------------------------------------------------------------
# semantic checks

def _matrix_of(decl: OperatorDecl) -> np.ndarray | None:
    width = {len(row) for row in decl.rows}
    if len(width) != 1:
        return None
    return np.array(decl.rows, dtype=complex)


def _semantic(statements: Sequence[Statement], line_count: int) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    systems: dict[str, int] = {}
    states: dict[str, tuple[complex, ...]] = {}
    operators: dict[str, np.ndarray | None] = {}
    slots: dict[str, int] = {}  # slot name -> statement index
    records: set[str] = set()
    active: dict[str, bool] = {}
    period_ordinal: dict[str, int] = {}
    # snapshot of (active, ordinal) per system at each slot statement
    slot_views: dict[str, dict[str, tuple[bool, int]]] = {}
    eq_tol = DEFAULT_TOLERANCE.eq_tol

    def err(stmt: Statement, code: str, message: str) -> None:
        out.append(Diagnostic(stmt.line, 1, code, message))

    def check_systems(stmt: Statement, names: Iterable[str]) -> bool:
        ok = True
        for name in names:
            if name not in systems:
                err(stmt, UNKNOWN_SYSTEM, f"system {name!r} is not declared")
                ok = False
        return ok

    def joint_dim(names: Iterable[str]) -> int:
        total = 1
        for name in names:
            total *= systems.get(name, 1)
        return total

    def require_active(stmt: Statement, names: Iterable[str]) -> bool:
        ok = True
        for name in names:
            if name in systems and not active.get(name, False):
                err(stmt, INVALID_SEQUENCE, f"system {name!r} carries no state here (prepare it first)")
                ok = False
        return ok

    def check_vector(stmt: Statement, state_name: str, span: Iterable[str]) -> None:
        vec = states.get(state_name)
        if vec is None:
            err(stmt, UNKNOWN_NAME, f"state {state_name!r} is not declared")
            return
        if len(vec) != joint_dim(span):
            err(
                stmt,
                DIMENSION_MISMATCH,
                f"state {state_name!r} has {len(vec)} entries, systems span {joint_dim(span)}",
            )
        elif sum(abs(v) ** 2 for v in vec) <= eq_tol**2:
            err(stmt, ZERO_NORM, f"state {state_name!r} has vanishing norm")

    measured_or_selected = False
    for index, stmt in enumerate(statements):
        if isinstance(stmt, SystemDecl):
            if stmt.name in systems:
                err(stmt, DUPLICATE_NAME, f"system {stmt.name!r} already declared")
            elif stmt.dim < 2:
                err(stmt, DIMENSION_MISMATCH, f"system dimension must be >= 2, got {stmt.dim}")
            else:
                systems[stmt.name] = stmt.dim
        elif isinstance(stmt, StateDecl):
            if stmt.name in states:
                err(stmt, DUPLICATE_NAME, f"state {stmt.name!r} already declared")
            else:
                states[stmt.name] = stmt.values
        elif isinstance(stmt, OperatorDecl):
            if stmt.name in operators:
                err(stmt, DUPLICATE_NAME, f"operator {stmt.name!r} already declared")
            else:
                mat = _matrix_of(stmt)
                if mat is None:
                    err(stmt, DIMENSION_MISMATCH, f"operator {stmt.name!r} has ragged rows")
                operators[stmt.name] = mat
        elif isinstance(stmt, SlotStmt):
            if stmt.name in slots:
                err(stmt, DUPLICATE_NAME, f"slot {stmt.name!r} already declared")
            else:
                slots[stmt.name] = index
                slot_views[stmt.name] = {
                    name: (active.get(name, False), period_ordinal.get(name, -1))
                    for name in systems
                }
        elif isinstance(stmt, PrepareStmt):
            if not check_systems(stmt, stmt.systems):
                continue
            for name in stmt.systems:
                if active.get(name, False):
                    err(stmt, INVALID_SEQUENCE, f"system {name!r} is still active (post-select it first)")
            check_vector(stmt, stmt.state, stmt.systems)
            for name in stmt.systems:
                active[name] = True
                period_ordinal[name] = period_ordinal.get(name, -1) + 1
        elif isinstance(stmt, PostselectStmt):
            measured_or_selected = True
            if not check_systems(stmt, stmt.systems):
                continue
            require_active(stmt, stmt.systems)
            check_vector(stmt, stmt.state, stmt.systems)
            for name in stmt.systems:
                active[name] = False
        elif isinstance(stmt, UnitaryStmt):
            if not check_systems(stmt, stmt.systems):
                continue
            require_active(stmt, stmt.systems)
            mat = operators.get(stmt.operator)
            if stmt.operator not in operators:
                err(stmt, UNKNOWN_NAME, f"operator {stmt.operator!r} is not declared")
            elif mat is not None:
                d = joint_dim(stmt.systems)
                if mat.shape != (d, d):
                    err(stmt, DIMENSION_MISMATCH, f"operator {stmt.operator!r} is {mat.shape}, expected {(d, d)}")
                elif np.max(np.abs(mat.conj().T @ mat - np.eye(d))) > eq_tol:
                    err(stmt, NOT_UNITARY, f"operator {stmt.operator!r} is not unitary")
        elif isinstance(stmt, MeasureProjective):
            measured_or_selected = True
            if stmt.record in records:
                err(stmt, DUPLICATE_NAME, f"record label {stmt.record!r} already used")
            records.add(stmt.record)
            if not check_systems(stmt, stmt.systems):
                continue
            require_active(stmt, stmt.systems)
            mat = operators.get(stmt.operator)
            if stmt.operator not in operators:
                err(stmt, UNKNOWN_NAME, f"operator {stmt.operator!r} is not declared")
            elif mat is not None:
                d = joint_dim(stmt.systems)
                if mat.shape != (d, d):
                    err(stmt, DIMENSION_MISMATCH, f"operator {stmt.operator!r} is {mat.shape}, expected {(d, d)}")
                elif np.max(np.abs(mat - mat.conj().T)) > eq_tol:
                    err(stmt, NOT_HERMITIAN, f"operator {stmt.operator!r} is not Hermitian")
        elif isinstance(stmt, MeasureKraus):
            measured_or_selected = True
            record = stmt.record or f"r{index}"
            if record in records:
                err(stmt, DUPLICATE_NAME, f"record label {record!r} already used")
            records.add(record)
            if not check_systems(stmt, stmt.systems):
                continue
            require_active(stmt, stmt.systems)
            d = joint_dim(stmt.systems)
            acc = np.zeros((d, d), dtype=complex)
            usable = True
            for _, op_name in stmt.items:
                mat = operators.get(op_name)
                if op_name not in operators:
                    err(stmt, UNKNOWN_NAME, f"operator {op_name!r} is not declared")
                    usable = False
                elif mat is None:
                    usable = False
                elif mat.shape != (d, d):
                    err(stmt, DIMENSION_MISMATCH, f"operator {op_name!r} is {mat.shape}, expected {(d, d)}")
                    usable = False
                else:
                    acc += mat.conj().T @ mat
            if usable and np.max(np.abs(acc - np.eye(d))) > eq_tol:
                err(stmt, INCOMPLETE_KRAUS, "Kraus operators do not resolve the identity")
        elif isinstance(stmt, Measure2):
            measured_or_selected = True
            if stmt.record in records:
                err(stmt, DUPLICATE_NAME, f"record label {stmt.record!r} already used")
            records.add(stmt.record)
            if not check_systems(stmt, [stmt.system]):
                continue
            d = systems[stmt.system]
            for op_name in (stmt.op_a, stmt.op_b):
                mat = operators.get(op_name)
                if op_name not in operators:
                    err(stmt, UNKNOWN_NAME, f"operator {op_name!r} is not declared")
                elif mat is not None:
                    if mat.shape != (d, d):
                        err(stmt, DIMENSION_MISMATCH, f"operator {op_name!r} is {mat.shape}, expected {(d, d)}")
                    elif np.max(np.abs(mat - mat.conj().T)) > eq_tol:
                        err(stmt, NOT_HERMITIAN, f"operator {op_name!r} is not Hermitian")
            views = []
            for slot_name in (stmt.slot_a, stmt.slot_b):
                view = slot_views.get(slot_name)
                if view is None:
                    err(stmt, UNKNOWN_NAME, f"slot {slot_name!r} is not declared")
                else:
                    views.append(view)
            if stmt.slot_a == stmt.slot_b:
                err(stmt, OVERLAPPING_PERIODS, "the two slots must differ")
            elif len(views) == 2:
                states_at = []
                for slot_name, view in zip((stmt.slot_a, stmt.slot_b), views):
                    is_active, ordinal = view.get(stmt.system, (False, -1))
                    if not is_active:
                        err(
                            stmt,
                            INVALID_SEQUENCE,
                            f"system {stmt.system!r} carries no state at slot {slot_name!r}",
                        )
                    states_at.append(ordinal)
                # same stretch of worldline twice is not a two-time observable
                if all(v >= 0 for v in states_at) and states_at[0] == states_at[1]:
                    err(
                        stmt,
                        OVERLAPPING_PERIODS,
                        f"slots {stmt.slot_a!r} and {stmt.slot_b!r} fall in the same "
                        f"measurement period of {stmt.system!r}",
                    )

    if statements and not measured_or_selected:
        out.append(
            Diagnostic(line_count, 1, INVALID_SEQUENCE, "script never measures or post-selects anything")
        )
    return out


# ---------------------------------------------------------------------------
# renderer

def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def format_complex(z: complex) -> str:
    re_part, im_part = z.real + 0.0, z.imag + 0.0
    if im_part == 0.0:
        return _fmt_real(re_part)
    if re_part == 0.0:
        return f"{_fmt_real(im_part)}i"
    sign = "+" if im_part > 0 else "-"
    return f"{_fmt_real(re_part)}{sign}{_fmt_real(abs(im_part))}i"


def _fmt_vector(values: Sequence[complex]) -> str:
    return "[" + ", ".join(format_complex(v) for v in values) + "]"


def render_statement(stmt: Statement) -> str:
    if isinstance(stmt, SystemDecl):
        return f"system {stmt.name} dim {stmt.dim}"
    if isinstance(stmt, StateDecl):
        return f"state {stmt.name} = {_fmt_vector(stmt.values)}"
    if isinstance(stmt, OperatorDecl):
        body = ", ".join(_fmt_vector(row) for row in stmt.rows)
        return f"operator {stmt.name} = [{body}]"
    if isinstance(stmt, PrepareStmt):
        return f"prepare {' '.join(stmt.systems)} {stmt.state}"
    if isinstance(stmt, UnitaryStmt):
        return f"unitary {' '.join(stmt.systems)} {stmt.operator}"
    if isinstance(stmt, MeasureProjective):
        return f"measure {' '.join(stmt.systems)} projective {stmt.operator} as {stmt.record}"
    if isinstance(stmt, MeasureKraus):
        body = ", ".join(f"{label}: {op}" for label, op in stmt.items)
        suffix = f" as {stmt.record}" if stmt.record is not None else ""
        return f"measure {' '.join(stmt.systems)} kraus {{{body}}}{suffix}"
    if isinstance(stmt, Measure2):
        return (
            f"measure2 {stmt.system} {stmt.op_a}@{stmt.slot_a} - "
            f"{stmt.op_b}@{stmt.slot_b} as {stmt.record}"
        )
    if isinstance(stmt, PostselectStmt):
        return f"postselect {' '.join(stmt.systems)} {stmt.state}"
    if isinstance(stmt, SlotStmt):
        return f"slot {stmt.name}"
    raise TypeError(f"cannot render {type(stmt)!r}")


def render(doc: ScriptDocument | Sequence[Statement]) -> str:
    statements = doc.statements if isinstance(doc, ScriptDocument) else doc
    return "\n".join(render_statement(s) for s in statements) + "\n"
