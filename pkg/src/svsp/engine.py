"""Scenario simulation of function calls against a specification.

A session tracks, per data element, the three Boolean state indicators
(allocated, definition, value) plus the stored value when one is known.
Calls are checked for operating-state and level callability, then their
effects are evaluated clause by clause: ``requires`` clauses and the
default input rule accumulate validation exceptions, ``sets`` clauses
raise indicators, ``when`` clauses branch on actual values, and
``onerror`` turns the call into a specification-recognised error outcome.

A call either commits atomically (COMPLETED / SPEC_ERROR) or, when any
validation exception accumulated, leaves the session untouched.
"""
from __future__ import annotations

import secrets
from dataclasses import dataclass, field

from . import checker
from .model import (
    Clause,
    ClauseKind,
    DataElementDef,
    Diagnostic,
    Direction,
    FunctionDef,
    Literal,
    LiteralKind,
    Locality,
    ParameterDef,
    Restriction,
    RestrictionKind,
    Severity,
    SpecDb,
    TypeKind,
    ValueCond,
)

X101 = "X101"  # not callable in current operating state
X102 = "X102"  # input not allocated
X103 = "X103"  # input not defined
X104 = "X104"  # conditional test or value condition indeterminate/failed
X105 = "X105"  # supplied or assigned value violates restriction or membership
X106 = "X106"  # function level above session level

EXCEPTION_CODES = (X101, X102, X103, X104, X105, X106)


class EngineError(Exception):
    """Base for hard errors (misuse), as opposed to validation exceptions."""


class UnknownNameError(EngineError, LookupError):
    pass


class ArgumentError(EngineError):
    pass


class StaticErrorsError(EngineError):
    """Session refused: the specification has ERROR-severity diagnostics."""

    def __init__(self, diags: list[Diagnostic]):
        errors = [d for d in diags if d.severity is Severity.ERROR]
        super().__init__(
            f"specification has {len(errors)} static error(s); fix them before running scenarios"
        )
        self.diagnostics = diags


@dataclass(frozen=True)
class IndicatorTriple:
    """Allocation/definition/value indicators plus the value when known."""

    allocated: bool = False
    defined: bool = False
    valued: bool = False
    value: Literal | None = None

    def __post_init__(self) -> None:
        if self.valued and not self.defined or self.defined and not self.allocated:
            raise ValueError(f"indicator monotonicity violated: {self}")
        if self.valued != (self.value is not None):
            raise ValueError(f"value present must match the value indicator: {self}")

    def describe(self) -> str:
        if self.valued:
            return f"allocated, defined, value {self.value}"
        if self.defined:
            return "allocated, defined, no value"
        if self.allocated:
            return "allocated, undefined"
        return "unallocated"


UNTOUCHED = IndicatorTriple()


class OutcomeKind:
    COMPLETED = "COMPLETED"
    SPEC_ERROR = "SPEC_ERROR"
    EXCEPTION = "EXCEPTION"


@dataclass(frozen=True)
class Delta:
    element: str
    before: IndicatorTriple
    after: IndicatorTriple


@dataclass(frozen=True)
class CallOutcome:
    function: str
    kind: str
    error_number: int | None = None
    error_numbers: tuple[int, ...] = ()  # all numbers listed on the reached onerror
    codes: tuple[str, ...] = ()  # exception codes, first-occurrence order
    details: tuple[str, ...] = ()
    displayed_effects: tuple[str, ...] = ()
    deltas: tuple[Delta, ...] = ()
    state_after: str | None = None


@dataclass(frozen=True)
class CallRecord:
    index: int
    function: str
    args: tuple[tuple[str, Literal], ...]
    outcome: CallOutcome


@dataclass
class Session:
    """Mutable scenario state over an immutable SpecDb; single-owner."""

    db: SpecDb
    level: str
    indicators: dict[str, IndicatorTriple]
    log: list[CallRecord] = field(default_factory=list)
    id: str = field(default_factory=lambda: secrets.token_urlsafe(8))

    def current_state(self) -> str | None:
        if self.db.state_element is None:
            return None
        t = self.indicators[self.db.state_element]
        return str(t.value.value) if t.value is not None else None

    def snapshot(self) -> dict[str, IndicatorTriple]:
        return dict(self.indicators)


def new_session(db: SpecDb, level: str) -> Session:
    """Fresh session: all indicators false except elements with an init value.

    Refuses to start while the specification has ERROR diagnostics.
    """
    diags = checker.run_all_checks(db)
    if checker.has_errors(diags):
        raise StaticErrorsError(diags)
    if level not in db.levels:
        raise UnknownNameError(f"level {level!r} is not declared")
    indicators: dict[str, IndicatorTriple] = {}
    for name, elem in db.data_elements.items():
        if elem.initial is not None:
            indicators[name] = IndicatorTriple(True, True, True, elem.initial)
        else:
            indicators[name] = UNTOUCHED
    return Session(db=db, level=level, indicators=indicators)


@dataclass(frozen=True)
class Callability:
    ok: bool
    code: str | None = None  # X101 or X106
    detail: str = ""
    current_state: str | None = None
    required_states: tuple[str, ...] = ()
    fn_level: str = ""
    session_level: str = ""


def check_callability(session: Session, fn_name: str) -> Callability:
    """Operating-state and level gate; never mutates the session."""
    fn = session.db.functions.get(fn_name)
    if fn is None:
        raise UnknownNameError(f"unknown function {fn_name!r}")
    state = session.current_state()
    if state not in fn.valid_states:
        return Callability(
            ok=False,
            code=X101,
            detail=(
                f"{fn.name!r} is not callable in operating state {state}: "
                f"valid states are {', '.join(fn.valid_states)}"
            ),
            current_state=state,
            required_states=fn.valid_states,
            fn_level=fn.level,
            session_level=session.level,
        )
    db = session.db
    if db.level_index(fn.level) > db.level_index(session.level):
        return Callability(
            ok=False,
            code=X106,
            detail=(
                f"{fn.name!r} requires level {fn.level}, but the session runs at "
                f"level {session.level}"
            ),
            current_state=state,
            required_states=fn.valid_states,
            fn_level=fn.level,
            session_level=session.level,
        )
    return Callability(
        ok=True,
        current_state=state,
        required_states=fn.valid_states,
        fn_level=fn.level,
        session_level=session.level,
    )


# ---------------------------------------------------------------------------
# Value admission


def _range_problem(r: Restriction, lit: Literal, origin: str) -> str | None:
    if r.kind is RestrictionKind.INT_RANGE and not (r.lo <= lit.value <= r.hi):
        return f"{lit} outside {origin} range {r.lo} .. {r.hi}"
    if r.kind is RestrictionKind.MEMBERSHIP and lit.value not in r.values:
        return f"{lit} outside {origin} membership {{ {' '.join(r.values)} }}"
    return None


def _value_problem(
    db: SpecDb,
    elem: DataElementDef,
    param: ParameterDef | None,
    lit: Literal,
    storable_only: bool,
) -> str | None:
    """Why ``lit`` may not be bound/stored into ``elem``, or None if it may.

    ``storable_only`` restricts to kinds whose values persist (integer,
    enum, state); argument binding additionally admits name elements, whose
    values are call-scoped strings.
    """
    kind = elem.dtype.kind
    if kind is TypeKind.NAME and not storable_only:
        if lit.kind is not LiteralKind.STRING:
            return f"{lit} is not a quoted name"
        return None
    if kind is TypeKind.INTEGER:
        if lit.kind is not LiteralKind.INT:
            return f"{lit} is not an integer"
    elif kind is TypeKind.ENUM:
        if lit.kind is not LiteralKind.IDENT:
            return f"{lit} is not an enumeration value"
        enum = db.enums.get(elem.dtype.enum_name or "")
        if enum is not None and lit.value not in enum.values:
            return f"{lit.value} is not a value of enum {enum.name}"
    elif kind is TypeKind.STATE:
        if lit.kind is not LiteralKind.IDENT or lit.value not in db.states:
            return f"{lit} is not a declared state"
    else:
        return f"element {elem.name!r} of type '{elem.dtype}' cannot hold a value"
    problem = _range_problem(elem.restriction, lit, "element")
    if problem is None and param is not None:
        problem = _range_problem(param.restriction, lit, "parameter")
    return problem


# ---------------------------------------------------------------------------
# Call evaluation


class _CallContext:
    def __init__(self, session: Session, fn: FunctionDef):
        self.db = session.db
        self.fn = fn
        self.working: dict[str, IndicatorTriple] = dict(session.indicators)
        self.touched: set[str] = set()
        self.exceptions: list[tuple[str, str]] = []
        self.displayed: list[str] = []
        self.spec_error: int | None = None
        self.spec_error_numbers: tuple[int, ...] = ()
        self.error_pending = False
        self.stop = False

    def exc(self, code: str, detail: str) -> None:
        self.exceptions.append((code, detail))

    # -- clause evaluation ---------------------------------------------------

    def run_effects(self) -> None:
        for effect in self.fn.effects:
            if self.stop:
                break
            self.displayed.append(effect.text)
            self.run_list(effect.clauses)

    def run_list(self, clauses: tuple[Clause, ...]) -> None:
        for clause in clauses:
            self.run_clause(clause)
            if self.stop:
                return
        # An error path applies its own sets, then ends the call.
        if self.error_pending:
            self.stop = True

    def run_clause(self, clause: Clause) -> None:
        if clause.kind is ClauseKind.REQUIRES:
            self.eval_requires(clause)
        elif clause.kind is ClauseKind.SETS:
            self.eval_sets(clause)
        elif clause.kind is ClauseKind.WHEN:
            self.eval_when(clause)
        else:
            if self.spec_error is None:
                self.spec_error = clause.error_numbers[0]
                self.spec_error_numbers = clause.error_numbers
            self.error_pending = True

    def _read_ladder(self, element: str, required: set[str]) -> bool:
        """X102/X103 ladder for one read; True when the read is satisfied."""
        t = self.working[element]
        if "allocated" in required and not t.allocated:
            self.exc(X102, f"input {element!r} is not allocated")
            return False
        if "defined" in required and not t.defined:
            self.exc(X103, f"input {element!r} is allocated but not defined")
            return False
        return True

    def eval_requires(self, clause: Clause) -> None:
        element = clause.element
        param = self.fn.param_for(element)
        required = set(clause.flags)
        if param is not None and param.direction is Direction.IN:
            # Default input rule: an element read by an effect must have been
            # initialised before the call.
            required |= {"allocated", "defined"}
        if not self._read_ladder(element, required):
            return
        t = self.working[element]
        if clause.value_cond is ValueCond.KNOWN and not t.valued:
            self.exc(X104, f"value of {element!r} is required to be known but is not")
        elif clause.value_cond is ValueCond.EQUALS:
            if not t.valued:
                self.exc(
                    X104,
                    f"value condition on {element!r} is indeterminate: no value stored",
                )
            elif t.value != clause.value:
                self.exc(
                    X104,
                    f"value of {element!r} is {t.value}, required {clause.value}",
                )

    def eval_sets(self, clause: Clause) -> None:
        element = clause.element
        t = self.working[element]
        defined = t.defined or "defined" in clause.flags
        valued, value = t.valued, t.value
        if clause.value is not None:
            elem = self.db.data_elements[element]
            problem = _value_problem(
                self.db, elem, self.fn.param_for(element), clause.value, storable_only=True
            )
            if problem is not None:
                self.exc(X105, f"cannot assign to {element!r}: {problem}")
            else:
                defined, valued, value = True, True, clause.value
        self.working[element] = IndicatorTriple(True, defined, valued, value)
        self.touched.add(element)

    def eval_when(self, clause: Clause) -> None:
        element = clause.element
        param = self.fn.param_for(element)
        if param is not None and param.direction is Direction.IN:
            self._read_ladder(element, {"allocated", "defined"})
        t = self.working[element]
        if not t.valued:
            self.exc(
                X104,
                f"conditional test on {element!r} is indeterminate: no value stored",
            )
            return
        cond = t.value == clause.value
        if clause.relation == "!=":
            cond = not cond
        self.run_list(clause.then_clauses if cond else clause.else_clauses)


def apply_call(
    session: Session, fn_name: str, args: dict[str, Literal] | None = None
) -> CallOutcome:
    """Simulate one function call; commits atomically or not at all.

    ``args`` binds external IN parameters for the duration of the call;
    bindings do not persist unless an effect's ``sets`` touched the element.
    """
    fn = session.db.functions.get(fn_name)
    if fn is None:
        raise UnknownNameError(f"unknown function {fn_name!r}")
    args = dict(args or {})
    for name in args:
        param = fn.param_for(name)
        if param is None:
            raise ArgumentError(f"{name!r} is not a parameter of {fn_name!r}")
        if param.direction is not Direction.IN or param.locality is not Locality.EXTERNAL:
            raise ArgumentError(
                f"{name!r} is not an external IN parameter of {fn_name!r}"
            )

    pre = dict(session.indicators)

    verdict = check_callability(session, fn_name)
    if not verdict.ok:
        outcome = CallOutcome(
            function=fn_name,
            kind=OutcomeKind.EXCEPTION,
            codes=(verdict.code,),
            details=(verdict.detail,),
            state_after=session.current_state(),
        )
        _log(session, fn_name, args, outcome)
        return outcome

    ctx = _CallContext(session, fn)
    for param in fn.params:
        if param.direction is Direction.IN and param.locality is Locality.EXTERNAL:
            lit = args.get(param.element)
            if lit is None:
                continue  # missing argument: prior state is left in place
            elem = session.db.data_elements[param.element]
            problem = _value_problem(session.db, elem, param, lit, storable_only=False)
            if problem is not None:
                ctx.exc(X105, f"argument for {param.element!r}: {problem}")
            else:
                ctx.working[param.element] = IndicatorTriple(True, True, True, lit)

    ctx.run_effects()

    if ctx.exceptions:
        codes: list[str] = []
        for code, _ in ctx.exceptions:
            if code not in codes:
                codes.append(code)
        outcome = CallOutcome(
            function=fn_name,
            kind=OutcomeKind.EXCEPTION,
            codes=tuple(codes),
            details=tuple(f"{c}: {d}" for c, d in ctx.exceptions),
            displayed_effects=tuple(ctx.displayed),
            state_after=session.current_state(),
        )
        _log(session, fn_name, args, outcome)
        return outcome

    # Commit: only elements written by sets persist; argument bindings are
    # call-scoped and fall back to their prior indicators.
    final = pre.copy()
    for name in ctx.touched:
        final[name] = ctx.working[name]
    deltas = tuple(
        Delta(name, pre[name], final[name])
        for name in session.db.data_elements
        if pre[name] != final[name]
    )
    session.indicators = final

    displayed = list(ctx.displayed)
    if ctx.spec_error is not None:
        err = session.db.errors.get(ctx.spec_error)
        text = err.text if err is not None else "(not in error table)"
        displayed.append(f"error {ctx.spec_error}: {text}")
        displayed.append(
            "output values not set by the error path are implementation dependent "
            "and left untouched"
        )
        outcome = CallOutcome(
            function=fn_name,
            kind=OutcomeKind.SPEC_ERROR,
            error_number=ctx.spec_error,
            error_numbers=ctx.spec_error_numbers,
            displayed_effects=tuple(displayed),
            deltas=deltas,
            state_after=session.current_state(),
        )
    else:
        outcome = CallOutcome(
            function=fn_name,
            kind=OutcomeKind.COMPLETED,
            displayed_effects=tuple(displayed),
            deltas=deltas,
            state_after=session.current_state(),
        )
    _log(session, fn_name, args, outcome)
    return outcome


def _log(session: Session, fn_name: str, args: dict[str, Literal], outcome: CallOutcome) -> None:
    session.log.append(
        CallRecord(
            index=len(session.log),
            function=fn_name,
            args=tuple(sorted(args.items())),
            outcome=outcome,
        )
    )


def dry_run(
    session: Session, fn_name: str, args: dict[str, Literal] | None = None
) -> CallOutcome:
    """Identical outcome to apply_call on a copy; the session is untouched."""
    clone = Session(
        db=session.db,
        level=session.level,
        indicators=dict(session.indicators),
        log=list(session.log),
        id=session.id,
    )
    return apply_call(clone, fn_name, args)
