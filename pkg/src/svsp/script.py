"""Scenario script files: parsing and deterministic replay.

One statement per line (``#`` comments): ``call`` and ``group`` drive the
session, ``expect`` checks the most recent outcome, ``assert`` checks an
indicator or the current operating state.  Expect/assert mismatches are
recorded and execution continues; referencing an unknown function, group
or element is a hard error.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .engine import (
    CallOutcome,
    EXCEPTION_CODES,
    IndicatorTriple,
    OutcomeKind,
    UnknownNameError,
    apply_call,
    new_session,
)
from .model import Literal, SpecDb, expand_group

PREDICATES = ("allocated", "unallocated", "defined", "undefined", "valued", "unvalued")


class ScriptError(Exception):
    def __init__(self, file: str, line: int, message: str):
        super().__init__(f"{file}:{line}: {message}")
        self.file = file
        self.line = line
        self.reason = message


@dataclass(frozen=True)
class CallStatement:
    line: int
    function: str
    args: tuple[tuple[str, Literal], ...] = ()


@dataclass(frozen=True)
class GroupStatement:
    line: int
    group: str


@dataclass(frozen=True)
class ExpectStatement:
    line: int
    expectation: str  # "completed" | "error" | exception code
    error_number: int | None = None


@dataclass(frozen=True)
class AssertStatement:
    line: int
    element: str
    predicate: str


@dataclass(frozen=True)
class AssertStateStatement:
    line: int
    state: str


Statement = CallStatement | GroupStatement | ExpectStatement | AssertStatement | AssertStateStatement


@dataclass(frozen=True)
class ScenarioScript:
    file: str
    statements: tuple[Statement, ...]


@dataclass(frozen=True)
class ScriptFailure:
    line: int
    kind: str  # "expect" | "assert"
    message: str


@dataclass(frozen=True)
class ScenarioResult:
    outcomes: tuple[CallOutcome, ...]
    failures: tuple[ScriptFailure, ...]
    snapshot: dict[str, IndicatorTriple]
    final_state: str | None

    @property
    def expect_failures(self) -> tuple[ScriptFailure, ...]:
        return tuple(f for f in self.failures if f.kind == "expect")

    @property
    def assert_failures(self) -> tuple[ScriptFailure, ...]:
        return tuple(f for f in self.failures if f.kind == "assert")


_TOKEN_RE = re.compile(
    r'"((?:[^"\\\n]|\\.)*)"'  # string
    r"|(-?\d+\.\d+)"  # real
    r"|(-?\d+)"  # int
    r"|([A-Za-z_]\w*)"  # ident
    r"|(=)|(,)"
    r"|(\S)"  # anything else: error
)


def _scan(file: str, lineno: int, text: str) -> list[Literal]:
    toks: list[Literal] = []
    for m in _TOKEN_RE.finditer(text):
        s, real, integer, ident, eq, comma, bad = m.groups()
        if bad is not None:
            raise ScriptError(file, lineno, f"unexpected character {bad!r}")
        if s is not None:
            toks.append(Literal.string(s.replace('\\"', '"').replace("\\\\", "\\")))
        elif real is not None:
            toks.append(Literal.real(float(real)))
        elif integer is not None:
            toks.append(Literal.integer(int(integer)))
        elif ident is not None:
            toks.append(Literal.ident(ident))
        elif eq is not None:
            toks.append(Literal.ident("="))
        else:
            toks.append(Literal.ident(","))
    return toks


def _is_ident(tok: Literal, *names: str) -> bool:
    return tok.kind.value == "ident" and (not names or tok.value in names)


def parse_statement_line(line: str, file: str = "<line>", lineno: int = 1) -> Statement:
    """Parse a single scenario statement, as the repl does."""
    return _parse_statement(file, lineno, _scan(file, lineno, line))


def parse_script(text: str, file: str = "<script>") -> ScenarioScript:
    """Parse a scenario script; raises ScriptError on the first bad line."""
    statements: list[Statement] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        toks = _scan(file, lineno, line)
        stmt = _parse_statement(file, lineno, toks)
        if isinstance(stmt, (ExpectStatement, AssertStatement, AssertStateStatement)):
            if not any(isinstance(s, (CallStatement, GroupStatement)) for s in statements):
                raise ScriptError(
                    file, lineno, "expect/assert must follow a call or group statement"
                )
        statements.append(stmt)
    return ScenarioScript(file, tuple(statements))


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    i = 0
    while i < len(line):
        c = line[i]
        if c == '"' and (i == 0 or line[i - 1] != "\\"):
            in_string = not in_string
        if c == "#" and not in_string:
            break
        out.append(c)
        i += 1
    return "".join(out)


def _parse_statement(file: str, lineno: int, toks: list[Literal]) -> Statement:
    def fail(msg: str) -> ScriptError:
        return ScriptError(file, lineno, msg)

    head = toks[0]
    if _is_ident(head, "call"):
        if len(toks) < 2 or toks[1].kind.value != "string":
            raise fail('call needs a quoted function name')
        args: list[tuple[str, Literal]] = []
        rest = toks[2:]
        if rest:
            if not _is_ident(rest[0], "with"):
                raise fail("expected 'with' after the function name")
            rest = rest[1:]
            while True:
                if len(rest) < 3 or rest[0].kind.value != "string" or not _is_ident(rest[1], "="):
                    raise fail('expected "element" = literal')
                args.append((str(rest[0].value), rest[2]))
                rest = rest[3:]
                if not rest:
                    break
                if not _is_ident(rest[0], ","):
                    raise fail("expected ',' between arguments")
                rest = rest[1:]
        return CallStatement(lineno, str(toks[1].value), tuple(args))
    if _is_ident(head, "group"):
        if len(toks) != 2 or toks[1].kind.value != "string":
            raise fail("group needs a quoted group name")
        return GroupStatement(lineno, str(toks[1].value))
    if _is_ident(head, "expect"):
        if len(toks) >= 2 and _is_ident(toks[1], "completed") and len(toks) == 2:
            return ExpectStatement(lineno, "completed")
        if len(toks) == 3 and _is_ident(toks[1], "error") and toks[2].kind.value == "int":
            return ExpectStatement(lineno, "error", int(toks[2].value))
        if len(toks) == 2 and _is_ident(toks[1], *EXCEPTION_CODES):
            return ExpectStatement(lineno, str(toks[1].value))
        raise fail("expected: expect completed | expect error <n> | expect X101..X106")
    if _is_ident(head, "assert"):
        if len(toks) == 3 and _is_ident(toks[1], "state") and toks[2].kind.value == "ident":
            return AssertStateStatement(lineno, str(toks[2].value))
        if len(toks) == 3 and toks[1].kind.value == "string" and _is_ident(toks[2], *PREDICATES):
            return AssertStatement(lineno, str(toks[1].value), str(toks[2].value))
        raise fail('expected: assert "element" <predicate> | assert state <name>')
    raise fail(f"unknown statement {head.value!r}")


def check_predicate(t: IndicatorTriple, predicate: str) -> bool:
    return {
        "allocated": t.allocated,
        "unallocated": not t.allocated,
        "defined": t.defined,
        "undefined": not t.defined,
        "valued": t.valued,
        "unvalued": not t.valued,
    }[predicate]


def describe_outcome(outcome: CallOutcome) -> str:
    if outcome.kind == OutcomeKind.COMPLETED:
        return "completed"
    if outcome.kind == OutcomeKind.SPEC_ERROR:
        return f"error {outcome.error_number}"
    return "exception " + "+".join(outcome.codes)


def run_script(db: SpecDb, script: ScenarioScript, level: str) -> ScenarioResult:
    """Execute a parsed script on a fresh session; deterministic."""
    session = new_session(db, level)
    outcomes: list[CallOutcome] = []
    failures: list[ScriptFailure] = []

    for stmt in script.statements:
        if isinstance(stmt, CallStatement):
            try:
                outcomes.append(apply_call(session, stmt.function, dict(stmt.args)))
            except UnknownNameError as e:
                raise ScriptError(script.file, stmt.line, str(e)) from e
        elif isinstance(stmt, GroupStatement):
            try:
                members, unresolved = expand_group(db, stmt.group)
            except KeyError:
                raise ScriptError(
                    script.file, stmt.line, f"unknown group {stmt.group!r}"
                ) from None
            if unresolved is not None:
                raise ScriptError(
                    script.file,
                    stmt.line,
                    f"group {stmt.group!r} member {unresolved!r} is not a declared function",
                )
            for member in members:
                outcomes.append(apply_call(session, member.name))
        elif isinstance(stmt, ExpectStatement):
            outcome = outcomes[-1]
            if stmt.expectation == "completed":
                ok = outcome.kind == OutcomeKind.COMPLETED
            elif stmt.expectation == "error":
                ok = (
                    outcome.kind == OutcomeKind.SPEC_ERROR
                    and outcome.error_number == stmt.error_number
                )
            else:
                ok = outcome.kind == OutcomeKind.EXCEPTION and stmt.expectation in outcome.codes
            if not ok:
                expected = (
                    f"error {stmt.error_number}"
                    if stmt.expectation == "error"
                    else stmt.expectation
                )
                failures.append(
                    ScriptFailure(
                        stmt.line,
                        "expect",
                        f"expected {expected}, got {describe_outcome(outcome)} "
                        f"from {outcome.function!r}",
                    )
                )
        elif isinstance(stmt, AssertStatement):
            t = session.indicators.get(stmt.element)
            if t is None:
                raise ScriptError(
                    script.file, stmt.line, f"unknown data element {stmt.element!r}"
                )
            if not check_predicate(t, stmt.predicate):
                failures.append(
                    ScriptFailure(
                        stmt.line,
                        "assert",
                        f"{stmt.element!r} expected {stmt.predicate}, is {t.describe()}",
                    )
                )
        else:
            state = session.current_state()
            if state != stmt.state:
                failures.append(
                    ScriptFailure(
                        stmt.line,
                        "assert",
                        f"expected operating state {stmt.state}, got {state}",
                    )
                )

    return ScenarioResult(
        outcomes=tuple(outcomes),
        failures=tuple(failures),
        snapshot=session.snapshot(),
        final_state=session.current_state(),
    )
