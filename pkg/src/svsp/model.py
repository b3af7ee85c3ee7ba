"""Domain model for package specifications.

A specification is a set of named data elements (typed, restricted
information units) plus functions that manipulate them through IN/OUT
parameters and classified effects.  ``build_spec_db`` assembles parsed
declarations into an immutable :class:`SpecDb`; dangling references are
kept as plain names so the static checker can report them.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "Clause",
    "BundleDef",
    "DataElementDef",
    "DataType",
    "Diagnostic",
    "Direction",
    "EffectClass",
    "EffectDef",
    "EnumDef",
    "ErrorDef",
    "FunctionDef",
    "GroupDef",
    "Literal",
    "Locality",
    "ParameterDef",
    "Restriction",
    "Severity",
    "SourceLocation",
    "SpecDb",
    "SubsumeResult",
    "build_spec_db",
    "expand_bundle",
    "expand_group",
    "restriction_fits_type",
    "subsumes",
]


@dataclass(frozen=True)
class SourceLocation:
    file: str
    line: int  # 1-based
    column: int  # 1-based

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    def sort_key(self) -> tuple:
        return (self.file, self.line, self.column)


# Placeholder for model objects built without source text (tests, API use).
NOWHERE = SourceLocation("<none>", 1, 1)


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One static-check finding, identified by a catalog code."""

    code: str
    severity: Severity
    location: SourceLocation
    subject: str
    message: str
    related: tuple[str, ...] = ()

    def sort_key(self) -> tuple:
        return (self.code, self.subject, self.location.sort_key())


# ---------------------------------------------------------------------------
# Literals


class LiteralKind(Enum):
    INT = "int"
    REAL = "real"
    IDENT = "ident"
    STRING = "string"


@dataclass(frozen=True)
class Literal:
    """A source-level literal: integer, real, bare identifier, or string."""

    kind: LiteralKind
    value: int | float | str

    @staticmethod
    def integer(v: int) -> Literal:
        return Literal(LiteralKind.INT, v)

    @staticmethod
    def real(v: float) -> Literal:
        return Literal(LiteralKind.REAL, v)

    @staticmethod
    def ident(name: str) -> Literal:
        return Literal(LiteralKind.IDENT, name)

    @staticmethod
    def string(s: str) -> Literal:
        return Literal(LiteralKind.STRING, s)

    def __str__(self) -> str:
        if self.kind is LiteralKind.STRING:
            return '"' + str(self.value).replace("\\", "\\\\").replace('"', '\\"') + '"'
        return str(self.value)


# ---------------------------------------------------------------------------
# Data types and restrictions


class TypeKind(Enum):
    INTEGER = "integer"
    REAL = "real"
    STRING = "string"
    NAME = "name"
    STATE = "state"
    POINT = "point"
    ENUM = "enum"
    LIST = "list"
    QUEUE = "queue"
    TABLE = "table"
    PAIR = "pair"


# Structural kinds carry classification only; no value may be stored in them.
STRUCTURAL_KINDS = frozenset({TypeKind.LIST, TypeKind.QUEUE, TypeKind.TABLE, TypeKind.PAIR})

# Kinds whose elements may hold a stored value during scenario simulation.
# Name elements additionally accept transient call arguments (strings).
VALUED_KINDS = frozenset({TypeKind.INTEGER, TypeKind.ENUM, TypeKind.STATE})


@dataclass(frozen=True)
class DataType:
    kind: TypeKind
    space: str | None = None  # point: "wc" | "ndc" | "dc"
    enum_name: str | None = None  # enum: declared enum type name
    elem: DataType | None = None  # list/queue/table element type
    first: DataType | None = None  # pair
    second: DataType | None = None  # pair

    def __str__(self) -> str:
        k = self.kind
        if k is TypeKind.POINT:
            return f"point {self.space}"
        if k is TypeKind.ENUM:
            return f"enum {self.enum_name}"
        if k in (TypeKind.LIST, TypeKind.QUEUE, TypeKind.TABLE):
            return f"{k.value} of {self.elem}"
        if k is TypeKind.PAIR:
            return f"pair of {self.first} {self.second}"
        return k.value

    @property
    def classification_only(self) -> bool:
        return self.kind in STRUCTURAL_KINDS or self.kind is TypeKind.POINT

    @property
    def can_hold_value(self) -> bool:
        return self.kind in VALUED_KINDS


class RestrictionKind(Enum):
    NONE = "none"
    INT_RANGE = "int-range"
    REAL_RANGE = "real-range"
    MEMBERSHIP = "membership"


@dataclass(frozen=True)
class Restriction:
    kind: RestrictionKind
    lo: int | float | None = None
    hi: int | float | None = None
    values: tuple[str, ...] = ()

    @staticmethod
    def none() -> Restriction:
        return Restriction(RestrictionKind.NONE)

    @staticmethod
    def int_range(lo: int, hi: int) -> Restriction:
        return Restriction(RestrictionKind.INT_RANGE, lo=lo, hi=hi)

    @staticmethod
    def real_range(lo: float, hi: float) -> Restriction:
        return Restriction(RestrictionKind.REAL_RANGE, lo=lo, hi=hi)

    @staticmethod
    def membership(values: tuple[str, ...]) -> Restriction:
        return Restriction(RestrictionKind.MEMBERSHIP, values=values)

    @property
    def is_none(self) -> bool:
        return self.kind is RestrictionKind.NONE

    def __str__(self) -> str:
        if self.kind is RestrictionKind.NONE:
            return "none"
        if self.kind is RestrictionKind.MEMBERSHIP:
            return "in { " + " ".join(self.values) + " }"
        return f"range {self.lo} .. {self.hi}"


class SubsumeResult(Enum):
    CONTAINED = "contained"
    NOT_CONTAINED = "not-contained"
    INCOMPATIBLE = "incompatible"


def subsumes(inner: Restriction, outer: Restriction) -> SubsumeResult:
    """Whether every value admitted by ``inner`` is admitted by ``outer``.

    ``outer`` of kind none admits everything; an inner of kind none against
    a narrower outer is not contained.  A range compared against a
    membership set (or an int range against a real range) is incompatible
    rather than merely not contained.
    """
    if outer.is_none:
        return SubsumeResult.CONTAINED
    if inner.is_none:
        return SubsumeResult.NOT_CONTAINED
    if inner.kind is not outer.kind:
        return SubsumeResult.INCOMPATIBLE
    if inner.kind is RestrictionKind.MEMBERSHIP:
        ok = set(inner.values) <= set(outer.values)
    else:
        ok = outer.lo <= inner.lo and inner.hi <= outer.hi
    return SubsumeResult.CONTAINED if ok else SubsumeResult.NOT_CONTAINED


def restriction_fits_type(restriction: Restriction, dtype: DataType) -> bool:
    """Kind compatibility of a restriction with the data type it constrains."""
    k = restriction.kind
    if k is RestrictionKind.NONE:
        return True
    if k is RestrictionKind.INT_RANGE:
        return dtype.kind is TypeKind.INTEGER
    if k is RestrictionKind.REAL_RANGE:
        return dtype.kind is TypeKind.REAL
    return dtype.kind in (TypeKind.ENUM, TypeKind.STATE)


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class DataElementDef:
    name: str
    dtype: DataType
    restriction: Restriction = field(default_factory=Restriction.none)
    initial: Literal | None = None
    loc: SourceLocation = field(default=NOWHERE, compare=False)


class Direction(Enum):
    IN = "in"
    OUT = "out"


class Locality(Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"


@dataclass(frozen=True)
class ParameterDef:
    element: str
    direction: Direction
    locality: Locality
    restriction: Restriction = field(default_factory=Restriction.none)
    # Provenance only (serialization, cross-references); overlapping bundles
    # make it unreconstructable from canonical source, so it never takes
    # part in structural equality.
    via_bundle: str | None = field(default=None, compare=False)
    loc: SourceLocation = field(default=NOWHERE, compare=False)


class EffectClass(Enum):
    INIT = "init"
    TRANSFORM = "transform"
    TEST = "test"
    TESTTRANSFORM = "testtransform"
    UNCLASSIFIED = "unclassified"


class ClauseKind(Enum):
    REQUIRES = "requires"
    SETS = "sets"
    WHEN = "when"
    ONERROR = "onerror"


class ValueCond(Enum):
    NONE = "none"
    KNOWN = "known"
    EQUALS = "equals"


@dataclass(frozen=True)
class Clause:
    kind: ClauseKind
    element: str = ""  # requires/sets/when target
    flags: frozenset[str] = frozenset()  # subset of {"allocated", "defined"}
    value_cond: ValueCond = ValueCond.NONE  # requires only
    value: Literal | None = None  # requires equals / sets value
    relation: str = "="  # when: "=" | "!="
    then_clauses: tuple[Clause, ...] = ()
    else_clauses: tuple[Clause, ...] = ()
    error_numbers: tuple[int, ...] = ()  # onerror
    loc: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class EffectDef:
    effect_class: EffectClass
    text: str
    clauses: tuple[Clause, ...]
    loc: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class FunctionDef:
    name: str
    ftype: str
    level: str
    valid_states: tuple[str, ...]
    params: tuple[ParameterDef, ...]
    effects: tuple[EffectDef, ...]
    references: tuple[str, ...] = ()
    declared_errors: tuple[int, ...] = ()  # union of onerror numbers, first-seen order
    loc: SourceLocation = field(default=NOWHERE, compare=False)

    def param_for(self, element: str) -> ParameterDef | None:
        for p in self.params:
            if p.element == element:
                return p
        return None


@dataclass(frozen=True)
class BundleDef:
    name: str
    members: tuple[str, ...]
    loc: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class GroupDef:
    name: str
    members: tuple[str, ...]
    loc: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class ErrorDef:
    number: int
    text: str
    loc: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class EnumDef:
    name: str
    values: tuple[str, ...]
    loc: SourceLocation = field(default=NOWHERE, compare=False)


# ---------------------------------------------------------------------------
# Parsed declarations (parser output, build input)


@dataclass(frozen=True)
class StatesDecl:
    names: tuple[str, ...]
    initial: str
    loc: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class LevelsDecl:
    names: tuple[str, ...]
    loc: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class ParamItem:
    """A parameter as written: either a direct element or a bundle reference."""

    direction: Direction
    locality: Locality
    element: str | None = None
    bundle: str | None = None
    restriction: Restriction = field(default_factory=Restriction.none)
    loc: SourceLocation = field(default=NOWHERE, compare=False)


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    ftype: str
    level: str
    valid_states: tuple[str, ...]
    param_items: tuple[ParamItem, ...]
    effects: tuple[EffectDef, ...]
    references: tuple[str, ...]
    loc: SourceLocation = field(default=NOWHERE, compare=False)


Declaration = (
    StatesDecl
    | LevelsDecl
    | ErrorDef
    | EnumDef
    | DataElementDef
    | BundleDef
    | FunctionDecl
    | GroupDef
)


# ---------------------------------------------------------------------------
# The specification database


@dataclass(frozen=True)
class SpecDb:
    """Immutable symbol-table view of a parsed specification.

    Dicts preserve declaration order.  Cross-references may dangle; the
    static checker, not construction, enforces resolvability.
    """

    states: tuple[str, ...] = ()
    initial_state: str | None = None
    levels: tuple[str, ...] = ()
    enums: dict[str, EnumDef] = field(default_factory=dict)
    data_elements: dict[str, DataElementDef] = field(default_factory=dict)
    bundles: dict[str, BundleDef] = field(default_factory=dict)
    functions: dict[str, FunctionDef] = field(default_factory=dict)
    groups: dict[str, GroupDef] = field(default_factory=dict)
    errors: dict[int, ErrorDef] = field(default_factory=dict)
    state_element: str | None = None  # the designated operating-state element
    build_diagnostics: tuple[Diagnostic, ...] = ()

    def level_index(self, level: str) -> int:
        """Position in the declared (ascending-capability) level order; -1 if unknown."""
        try:
            return self.levels.index(level)
        except ValueError:
            return -1


def _diag(
    code: str,
    severity: Severity,
    loc: SourceLocation,
    subject: str,
    message: str,
    related: tuple[str, ...] = (),
) -> Diagnostic:
    return Diagnostic(code, severity, loc, subject, message, related)


def expand_bundle(
    db: SpecDb,
    bundle_name: str,
    direction: Direction,
    locality: Locality,
    loc: SourceLocation = NOWHERE,
) -> list[ParameterDef]:
    """One parameter per bundle member, in declared order, restriction none.

    Raises KeyError for an unknown bundle; callers that must not fail emit a
    W013 diagnostic instead.
    """
    bundle = db.bundles.get(bundle_name)
    if bundle is None:
        raise KeyError(bundle_name)
    return [
        ParameterDef(m, direction, locality, Restriction.none(), via_bundle=bundle_name, loc=loc)
        for m in bundle.members
    ]


def expand_group(db: SpecDb, group_name: str) -> tuple[list[FunctionDef], str | None]:
    """Member functions in declared order.

    Stops at the first unresolved member and returns it as the error marker
    (second element of the result); ``None`` when all members resolve.
    """
    group = db.groups.get(group_name)
    if group is None:
        raise KeyError(group_name)
    out: list[FunctionDef] = []
    for member in group.members:
        fn = db.functions.get(member)
        if fn is None:
            return out, member
        out.append(fn)
    return out, None


def _collect_error_numbers(clauses: tuple[Clause, ...], acc: list[int]) -> None:
    for c in clauses:
        if c.kind is ClauseKind.ONERROR:
            for n in c.error_numbers:
                if n not in acc:
                    acc.append(n)
        elif c.kind is ClauseKind.WHEN:
            _collect_error_numbers(c.then_clauses, acc)
            _collect_error_numbers(c.else_clauses, acc)


def build_spec_db(decls: list[Declaration]) -> tuple[SpecDb, list[Diagnostic]]:
    """Index declarations into a SpecDb.

    Never fails: duplicate names are indexed first-wins and diagnosed,
    dangling references survive as plain names.  The returned diagnostics
    are also stored on the db itself so later checks can merge them.
    """
    diags: list[Diagnostic] = []
    states: list[str] = []
    initial_state: str | None = None
    levels: list[str] = []
    enums: dict[str, EnumDef] = {}
    data_elements: dict[str, DataElementDef] = {}
    bundles: dict[str, BundleDef] = {}
    functions: dict[str, FunctionDef] = {}
    groups: dict[str, GroupDef] = {}
    errors: dict[int, ErrorDef] = {}
    state_element: str | None = None

    def dup(code: str, loc: SourceLocation, subject: str, what: str) -> None:
        diags.append(
            _diag(code, Severity.ERROR, loc, subject, f"duplicate {what} {subject!r}")
        )

    for d in decls:
        if isinstance(d, StatesDecl):
            for name in d.names:
                if name in states:
                    dup("E004", d.loc, name, "state name")
                else:
                    states.append(name)
            if initial_state is None:
                initial_state = d.initial
            elif d.initial != initial_state:
                diags.append(
                    _diag(
                        "E004",
                        Severity.ERROR,
                        d.loc,
                        d.initial,
                        f"conflicting initial state {d.initial!r}; keeping {initial_state!r}",
                    )
                )
        elif isinstance(d, LevelsDecl):
            for name in d.names:
                if name in levels:
                    dup("E004", d.loc, name, "level name")
                else:
                    levels.append(name)
        elif isinstance(d, ErrorDef):
            if d.number in errors:
                dup("E003", d.loc, str(d.number), "error number")
            else:
                errors[d.number] = d
        elif isinstance(d, EnumDef):
            if d.name in enums:
                dup("E004", d.loc, d.name, "enum type name")
                continue
            seen: list[str] = []
            for v in d.values:
                if v in seen:
                    dup("E004", d.loc, v, f"value in enum {d.name!r}")
                else:
                    seen.append(v)
            enums[d.name] = EnumDef(d.name, tuple(seen), d.loc)
        elif isinstance(d, DataElementDef):
            if d.name in data_elements:
                dup("E002", d.loc, d.name, "data element name")
                continue
            data_elements[d.name] = d
            if d.dtype.kind is TypeKind.STATE and state_element is None:
                state_element = d.name
        elif isinstance(d, BundleDef):
            if d.name in bundles:
                dup("E004", d.loc, d.name, "bundle name")
            else:
                bundles[d.name] = d
        elif isinstance(d, GroupDef):
            if d.name in groups or d.name in functions:
                dup("E001", d.loc, d.name, "function/group name")
            else:
                groups[d.name] = d
        elif isinstance(d, FunctionDecl):
            if d.name in functions or d.name in groups:
                dup("E001", d.loc, d.name, "function name")
                continue
            params: list[ParameterDef] = []
            seen_elems: set[str] = set()
            for item in d.param_items:
                if item.bundle is not None:
                    bundle = bundles.get(item.bundle)
                    if bundle is None:
                        diags.append(
                            _diag(
                                "W013",
                                Severity.WARNING,
                                item.loc,
                                item.bundle,
                                f"parameter of function {d.name!r} references "
                                f"undefined bundle {item.bundle!r}",
                            )
                        )
                        continue
                    expanded = [
                        ParameterDef(
                            m,
                            item.direction,
                            item.locality,
                            Restriction.none(),
                            via_bundle=item.bundle,
                            loc=item.loc,
                        )
                        for m in bundle.members
                    ]
                else:
                    expanded = [
                        ParameterDef(
                            item.element,
                            item.direction,
                            item.locality,
                            item.restriction,
                            loc=item.loc,
                        )
                    ]
                for p in expanded:
                    if p.element in seen_elems:
                        diags.append(
                            _diag(
                                "E002",
                                Severity.ERROR,
                                p.loc,
                                p.element,
                                f"data element {p.element!r} appears twice in the "
                                f"parameter list of function {d.name!r}",
                            )
                        )
                        continue
                    seen_elems.add(p.element)
                    params.append(p)
            declared: list[int] = []
            for eff in d.effects:
                _collect_error_numbers(eff.clauses, declared)
            functions[d.name] = FunctionDef(
                name=d.name,
                ftype=d.ftype,
                level=d.level,
                valid_states=d.valid_states,
                params=tuple(params),
                effects=d.effects,
                references=d.references,
                declared_errors=tuple(declared),
                loc=d.loc,
            )
        else:  # pragma: no cover - parser emits only the kinds above
            raise TypeError(f"unknown declaration {d!r}")

    # Extra state-kind elements are diagnosed here; the checker owns the
    # missing/uninitialised cases (E016).
    for name, elem in data_elements.items():
        if elem.dtype.kind is TypeKind.STATE and name != state_element:
            diags.append(
                _diag(
                    "E016",
                    Severity.ERROR,
                    elem.loc,
                    name,
                    f"more than one operating-state element: {name!r} in addition "
                    f"to {state_element!r}",
                )
            )

    db = SpecDb(
        states=tuple(states),
        initial_state=initial_state,
        levels=tuple(levels),
        enums=enums,
        data_elements=data_elements,
        bundles=bundles,
        functions=functions,
        groups=groups,
        errors=errors,
        state_element=state_element,
        build_diagnostics=tuple(diags),
    )
    return db, list(diags)
