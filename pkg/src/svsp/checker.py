"""Static validation catalog.

Checks a built SpecDb for uniqueness, existence, restriction consistency,
type compatibility, direction discipline and reachability.  Findings are
data, not failures: every check emits :class:`Diagnostic` records and the
run itself never raises.  ERROR-severity codes block scenario sessions;
WARNING codes do not.
"""
from __future__ import annotations

from .model import (
    Clause,
    ClauseKind,
    DataElementDef,
    Diagnostic,
    Direction,
    FunctionDef,
    Literal,
    LiteralKind,
    ParameterDef,
    RestrictionKind,
    Severity,
    SourceLocation,
    SpecDb,
    SubsumeResult,
    TypeKind,
    ValueCond,
    restriction_fits_type,
    subsumes,
)

#: code -> (severity, short title); every code has exactly one triggering rule.
CATALOG: dict[str, tuple[Severity, str]] = {
    "E001": (Severity.ERROR, "duplicate function name"),
    "E002": (Severity.ERROR, "duplicate data element name"),
    "E003": (Severity.ERROR, "duplicate error number"),
    "E004": (Severity.ERROR, "duplicate state/level/enum-value name"),
    "E005": (Severity.ERROR, "parameter references undefined data element"),
    "E006": (Severity.ERROR, "effect clause references a non-parameter"),
    "E007": (Severity.ERROR, "parameter restriction not subsumed by element restriction"),
    "E008": (Severity.ERROR, "restriction kind incompatible with data type"),
    "E009": (Severity.ERROR, "error number not in error table"),
    "E010": (Severity.ERROR, "undeclared state, level or enum type referenced"),
    "E014": (Severity.ERROR, "value clause on a type that cannot hold a value"),
    "E015": (Severity.ERROR, "effect sets an IN parameter or reads an OUT parameter before it is set"),
    "E016": (Severity.ERROR, "designated operating-state element missing or unusable"),
    "W011": (Severity.WARNING, "data element referenced by no parameter list"),
    "W012": (Severity.WARNING, "function with no effects"),
    "W013": (Severity.WARNING, "bundle/group member undefined"),
    "W017": (Severity.WARNING, "literal outside the element's declared domain"),
}


def _levenshtein(a: str, b: str) -> int:
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def suggest_similar_names(missing: str, db: SpecDb) -> list[str]:
    """Declared data-element names likely meant by an unresolved reference.

    A candidate qualifies by edit distance <= 2 (case-insensitive) or by
    sharing a whole word with the missing name; ranked by (distance, name).
    """
    missing_l = missing.lower()
    missing_words = set(missing_l.split())
    scored: list[tuple[int, str]] = []
    for name in db.data_elements:
        if name == missing:
            continue
        name_l = name.lower()
        dist = _levenshtein(missing_l, name_l)
        if dist <= 2 or (missing_words & set(name_l.split())):
            scored.append((dist, name))
    return [name for _, name in sorted(scored)]


class _Checker:
    def __init__(self, db: SpecDb):
        self.db = db
        self.diags: list[Diagnostic] = []

    def emit(
        self,
        code: str,
        loc: SourceLocation,
        subject: str,
        message: str,
        related: tuple[str, ...] = (),
    ) -> None:
        severity = CATALOG[code][0]
        self.diags.append(Diagnostic(code, severity, loc, subject, message, related))

    # -- literal/domain helpers ---------------------------------------------

    def literal_domain_problem(self, elem: DataElementDef, lit: Literal) -> str | None:
        """Why ``lit`` does not fit ``elem``'s type/restriction, or None.

        Only called for kinds that can hold values; state names resolve
        against the state universe, enum names against the declared values
        and any membership restriction, integers against range restrictions.
        """
        kind = elem.dtype.kind
        if kind is TypeKind.INTEGER:
            if lit.kind is not LiteralKind.INT:
                return f"{lit} is not an integer"
            r = elem.restriction
            if r.kind is RestrictionKind.INT_RANGE and not (r.lo <= lit.value <= r.hi):
                return f"{lit} outside range {r.lo} .. {r.hi}"
            return None
        if kind is TypeKind.STATE:
            return None  # undeclared states are E010, handled by the caller
        if kind is TypeKind.ENUM:
            if lit.kind is not LiteralKind.IDENT:
                return f"{lit} is not an enumeration value"
            enum = self.db.enums.get(elem.dtype.enum_name or "")
            if enum is not None and lit.value not in enum.values:
                return f"{lit.value} is not a value of enum {enum.name}"
            r = elem.restriction
            if r.kind is RestrictionKind.MEMBERSHIP and lit.value not in r.values:
                return f"{lit.value} outside membership {{ {' '.join(r.values)} }}"
            return None
        return None

    def check_value_literal(self, fn: FunctionDef, clause: Clause, elem_name: str, lit: Literal) -> None:
        elem = self.db.data_elements.get(elem_name)
        if elem is None:
            return  # E005 already covers the dangling reference
        if not elem.dtype.can_hold_value:
            self.emit(
                "E014",
                clause.loc,
                elem_name,
                f"value clause on {elem_name!r} of type '{elem.dtype}' in function "
                f"{fn.name!r}; values are limited to integer, enum and state elements",
            )
            return
        if elem.dtype.kind is TypeKind.STATE:
            if lit.kind is not LiteralKind.IDENT or lit.value not in self.db.states:
                self.emit(
                    "E010",
                    clause.loc,
                    str(lit.value),
                    f"{lit} is not a declared state (in a clause of function {fn.name!r})",
                )
            return
        problem = self.literal_domain_problem(elem, lit)
        if problem is not None:
            self.emit(
                "W017",
                clause.loc,
                elem_name,
                f"in function {fn.name!r}: {problem}",
            )

    # -- declaration-level checks --------------------------------------------

    def check_data_elements(self) -> None:
        db = self.db
        for elem in db.data_elements.values():
            if not restriction_fits_type(elem.restriction, elem.dtype):
                self.emit(
                    "E008",
                    elem.loc,
                    elem.name,
                    f"{elem.restriction} restriction is incompatible with data type "
                    f"'{elem.dtype}' of {elem.name!r}",
                )
            if elem.dtype.kind is TypeKind.ENUM:
                enum = db.enums.get(elem.dtype.enum_name or "")
                if enum is None:
                    self.emit(
                        "E010",
                        elem.loc,
                        elem.dtype.enum_name or "",
                        f"data element {elem.name!r} references undeclared enum type "
                        f"{elem.dtype.enum_name!r}",
                    )
                elif elem.restriction.kind is RestrictionKind.MEMBERSHIP:
                    for v in elem.restriction.values:
                        if v not in enum.values:
                            self.emit(
                                "W017",
                                elem.loc,
                                elem.name,
                                f"membership value {v} is not a value of enum {enum.name}",
                            )
            if elem.dtype.kind is TypeKind.STATE and elem.restriction.kind is RestrictionKind.MEMBERSHIP:
                for v in elem.restriction.values:
                    if v not in db.states:
                        self.emit(
                            "E010",
                            elem.loc,
                            v,
                            f"membership value {v} on {elem.name!r} is not a declared state",
                        )
            if elem.initial is not None:
                if not elem.dtype.can_hold_value:
                    self.emit(
                        "E014",
                        elem.loc,
                        elem.name,
                        f"init value on {elem.name!r} of type '{elem.dtype}'; values are "
                        f"limited to integer, enum and state elements",
                    )
                elif elem.dtype.kind is TypeKind.STATE:
                    if (
                        elem.initial.kind is not LiteralKind.IDENT
                        or elem.initial.value not in db.states
                    ):
                        self.emit(
                            "E010",
                            elem.loc,
                            str(elem.initial.value),
                            f"init value {elem.initial} of {elem.name!r} is not a declared state",
                        )
                else:
                    problem = self.literal_domain_problem(elem, elem.initial)
                    if problem is not None:
                        self.emit("W017", elem.loc, elem.name, f"init value: {problem}")

    def check_state_element(self) -> None:
        db = self.db
        users = [fn for fn in db.functions.values() if fn.valid_states]
        if not users:
            return
        if db.state_element is None:
            self.emit(
                "E016",
                users[0].loc,
                "state element",
                "functions declare valid states but no data element of type 'state' exists",
            )
            return
        elem = db.data_elements[db.state_element]
        if elem.initial is None:
            self.emit(
                "E016",
                elem.loc,
                elem.name,
                f"operating-state element {elem.name!r} has no init value, so sessions "
                f"would start without a current operating state",
            )
        if db.initial_state is not None and db.initial_state not in db.states:
            self.emit(
                "E010",
                elem.loc,
                db.initial_state,
                f"initial state {db.initial_state!r} is not a declared state",
            )

    def check_restriction_compat(self, fn: FunctionDef, elem: DataElementDef, param: ParameterDef) -> None:
        diag = check_restriction_compatibility(elem, param)
        if diag is not None:
            self.diags.append(
                Diagnostic(
                    diag.code,
                    diag.severity,
                    param.loc,
                    diag.subject,
                    f"in function {fn.name!r}: {diag.message}",
                )
            )
        if param.restriction.kind is RestrictionKind.MEMBERSHIP and elem.dtype.kind is TypeKind.ENUM:
            enum = self.db.enums.get(elem.dtype.enum_name or "")
            if enum is not None:
                for v in param.restriction.values:
                    if v not in enum.values:
                        self.emit(
                            "W017",
                            param.loc,
                            elem.name,
                            f"in function {fn.name!r}: membership value {v} is not a "
                            f"value of enum {enum.name}",
                        )

    # -- function-level checks -------------------------------------------------

    def walk_clauses(
        self,
        fn: FunctionDef,
        clauses: tuple[Clause, ...],
        out_set_so_far: set[str],
    ) -> None:
        """Document-order clause walk carrying the set of OUT params already set."""
        db = self.db
        param_names = {p.element for p in fn.params}
        for clause in clauses:
            if clause.kind is ClauseKind.ONERROR:
                for n in clause.error_numbers:
                    if n not in db.errors:
                        self.emit(
                            "E009",
                            clause.loc,
                            str(n),
                            f"onerror {n} in function {fn.name!r} is not in the error table",
                        )
                continue
            if clause.element not in param_names:
                self.emit(
                    "E006",
                    clause.loc,
                    clause.element,
                    f"clause references {clause.element!r}, which is not a parameter "
                    f"of function {fn.name!r}",
                )
            param = fn.param_for(clause.element)
            if clause.kind is ClauseKind.REQUIRES:
                if param is not None and param.direction is Direction.OUT:
                    if clause.element not in out_set_so_far:
                        self.emit(
                            "E015",
                            clause.loc,
                            clause.element,
                            f"function {fn.name!r} requires OUT parameter "
                            f"{clause.element!r} before any effect sets it",
                        )
                if clause.value_cond is ValueCond.EQUALS and clause.value is not None:
                    self.check_value_literal(fn, clause, clause.element, clause.value)
                elif clause.value_cond is ValueCond.KNOWN:
                    elem = db.data_elements.get(clause.element)
                    if elem is not None and not elem.dtype.can_hold_value:
                        self.emit(
                            "E014",
                            clause.loc,
                            clause.element,
                            f"value condition on {clause.element!r} of type "
                            f"'{elem.dtype}' in function {fn.name!r}; values are "
                            f"limited to integer, enum and state elements",
                        )
            elif clause.kind is ClauseKind.SETS:
                if param is not None and param.direction is Direction.IN:
                    self.emit(
                        "E015",
                        clause.loc,
                        clause.element,
                        f"function {fn.name!r} sets its IN parameter {clause.element!r}",
                    )
                if param is not None and param.direction is Direction.OUT:
                    out_set_so_far.add(clause.element)
                if clause.value is not None:
                    self.check_value_literal(fn, clause, clause.element, clause.value)
            elif clause.kind is ClauseKind.WHEN:
                elem = db.data_elements.get(clause.element)
                if elem is not None and not elem.dtype.can_hold_value:
                    self.emit(
                        "E014",
                        clause.loc,
                        clause.element,
                        f"conditional test on {clause.element!r} of type '{elem.dtype}' "
                        f"in function {fn.name!r}; tests are limited to integer, enum "
                        f"and state elements",
                    )
                elif elem is not None and clause.value is not None:
                    self.check_value_literal(fn, clause, clause.element, clause.value)
                self.walk_clauses(fn, clause.then_clauses, out_set_so_far)
                self.walk_clauses(fn, clause.else_clauses, out_set_so_far)

    def check_functions(self) -> None:
        db = self.db
        for fn in db.functions.values():
            if not fn.level:
                self.emit(
                    "E010", fn.loc, fn.name, f"function {fn.name!r} declares no level"
                )
            elif fn.level not in db.levels:
                self.emit(
                    "E010",
                    fn.loc,
                    fn.level,
                    f"function {fn.name!r} references undeclared level {fn.level!r}",
                )
            if not fn.valid_states:
                self.emit(
                    "E010", fn.loc, fn.name, f"function {fn.name!r} declares no valid states"
                )
            for s in fn.valid_states:
                if s not in db.states:
                    self.emit(
                        "E010",
                        fn.loc,
                        s,
                        f"function {fn.name!r} references undeclared state {s!r}",
                    )
            if not fn.effects:
                self.emit("W012", fn.loc, fn.name, f"function {fn.name!r} has no effects")
            for param in fn.params:
                elem = db.data_elements.get(param.element)
                if elem is None:
                    self.emit(
                        "E005",
                        param.loc,
                        param.element,
                        f"parameter of function {fn.name!r} references undefined data "
                        f"element {param.element!r}",
                        related=tuple(suggest_similar_names(param.element, db)),
                    )
                else:
                    self.check_restriction_compat(fn, elem, param)
            self.walk_clauses(fn, tuple(c for e in fn.effects for c in e.clauses), set())

    def check_usage(self) -> None:
        db = self.db
        used = {p.element for fn in db.functions.values() for p in fn.params}
        for elem in db.data_elements.values():
            if elem.name not in used:
                self.emit(
                    "W011",
                    elem.loc,
                    elem.name,
                    f"data element {elem.name!r} appears in no function's parameter list",
                )

    def check_memberships(self) -> None:
        db = self.db
        for bundle in db.bundles.values():
            for m in bundle.members:
                if m not in db.data_elements:
                    self.emit(
                        "W013",
                        bundle.loc,
                        m,
                        f"bundle {bundle.name!r} member {m!r} is not a declared data element",
                    )
        for group in db.groups.values():
            for m in group.members:
                if m not in db.functions:
                    self.emit(
                        "W013",
                        group.loc,
                        m,
                        f"group {group.name!r} member {m!r} is not a declared function",
                    )


def check_restriction_compatibility(
    element: DataElementDef, param: ParameterDef
) -> Diagnostic | None:
    """E007/E008 verdict for one parameter against its data element.

    None when the parameter carries no restriction or a subsumed,
    kind-compatible one.
    """
    r = param.restriction
    if r.is_none:
        return None
    if not restriction_fits_type(r, element.dtype):
        return Diagnostic(
            "E008",
            Severity.ERROR,
            param.loc,
            element.name,
            f"parameter restriction {r} is incompatible with data type "
            f"'{element.dtype}' of {element.name!r}",
        )
    result = subsumes(r, element.restriction)
    if result is SubsumeResult.INCOMPATIBLE:
        return Diagnostic(
            "E008",
            Severity.ERROR,
            param.loc,
            element.name,
            f"parameter restriction {r} cannot be compared with element "
            f"restriction {element.restriction} of {element.name!r}",
        )
    if result is SubsumeResult.NOT_CONTAINED:
        return Diagnostic(
            "E007",
            Severity.ERROR,
            param.loc,
            element.name,
            f"parameter restriction {r} is not subsumed by element restriction "
            f"{element.restriction} of {element.name!r}",
        )
    return None


def run_all_checks(db: SpecDb) -> list[Diagnostic]:
    """Evaluate the whole catalog; deterministic, sorted, never raises.

    Build-time diagnostics stored on the db are merged in.  An empty result
    means the specification is statically consistent and complete as far as
    the catalog can tell.
    """
    checker = _Checker(db)
    checker.diags.extend(db.build_diagnostics)
    checker.check_data_elements()
    checker.check_state_element()
    checker.check_functions()
    checker.check_usage()
    checker.check_memberships()
    return sorted(checker.diags, key=lambda d: d.sort_key())


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diags)
