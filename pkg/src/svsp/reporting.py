"""Rendering: diagnostics, function listings, and cross-references.

All output is deterministic; two runs over the same specification produce
byte-identical results.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .model import Diagnostic, Direction, Locality, Severity, SpecDb
from .model import Clause, ClauseKind

ORDERINGS = ("name", "type", "level", "state", "decl")

_RED = "\x1b[31m"
_YELLOW = "\x1b[33m"
_RESET = "\x1b[0m"


def render_diagnostics(
    diags: list[Diagnostic], format: str = "text", color: bool = False
) -> bytes:
    """Render sorted diagnostics as UTF-8 text or json-lines.

    Text: one ``CODE severity file:line:col "subject" — message`` line per
    diagnostic plus a final summary line.  Json-lines: one object per
    diagnostic with keys code, severity, file, line, col, subject, message,
    related, in that order; empty input renders as empty output.
    """
    if format == "json":
        format = "json-lines"
    if format == "json-lines":
        lines = []
        for d in diags:
            lines.append(
                json.dumps(
                    {
                        "code": d.code,
                        "severity": d.severity.value,
                        "file": d.location.file,
                        "line": d.location.line,
                        "col": d.location.column,
                        "subject": d.subject,
                        "message": d.message,
                        "related": list(d.related),
                    },
                    ensure_ascii=False,
                )
            )
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    lines = []
    n_err = sum(1 for d in diags if d.severity is Severity.ERROR)
    n_warn = len(diags) - n_err
    for d in diags:
        sev = d.severity.value
        label = f"{d.code} {sev}"
        if color:
            tint = _RED if d.severity is Severity.ERROR else _YELLOW
            label = f"{tint}{label}{_RESET}"
        line = f'{label} {d.location} "{d.subject}" — {d.message}'
        if d.related:
            line += " [related: " + ", ".join(f'"{r}"' for r in d.related) + "]"
        lines.append(line)
    lines.append(f"{n_err} errors, {n_warn} warnings")
    return ("\n".join(lines) + "\n").encode("utf-8")


@dataclass(frozen=True)
class ListingRow:
    name: str
    ftype: str
    level: str
    states: tuple[str, ...]


@dataclass(frozen=True)
class Listing:
    ordering: str
    rows: tuple[ListingRow, ...]


def function_listing(db: SpecDb, ordering: str) -> Listing:
    """All declared functions, ordered by one of the classification axes.

    Rows are always a permutation of the declared functions; the ordering
    key is honoured with the function name as tie-break.  The ``state``
    ordering groups a function under its first valid state in
    state-declaration order.
    """
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}; expected one of {ORDERINGS}")
    rows = [
        ListingRow(fn.name, fn.ftype, fn.level, fn.valid_states)
        for fn in db.functions.values()
    ]
    if ordering == "name":
        rows.sort(key=lambda r: r.name)
    elif ordering == "type":
        rows.sort(key=lambda r: (r.ftype, r.name))
    elif ordering == "level":
        rows.sort(key=lambda r: (_index(db.levels, r.level), r.name))
    elif ordering == "state":
        rows.sort(
            key=lambda r: (
                min((_index(db.states, s) for s in r.states), default=len(db.states)),
                r.name,
            )
        )
    return Listing(ordering, tuple(rows))


def _index(seq: tuple[str, ...], item: str) -> int:
    try:
        return seq.index(item)
    except ValueError:
        return len(seq)


def render_listing(listing: Listing) -> bytes:
    lines = []
    for r in listing.rows:
        lines.append(f"{r.name:<44} {r.ftype:<16} {r.level:<6} {' '.join(r.states)}")
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


@dataclass(frozen=True)
class ParameterUse:
    function: str
    direction: Direction
    locality: Locality
    via_bundle: str | None


@dataclass(frozen=True)
class EffectUse:
    function: str
    effect_index: int
    clause_kinds: tuple[str, ...]  # e.g. ("requires", "sets")


@dataclass(frozen=True)
class CrossReference:
    element: str
    uses: tuple[ParameterUse, ...]
    effects: tuple[EffectUse, ...]
    bundles: tuple[str, ...]


def _clause_kinds_for(clauses: tuple[Clause, ...], element: str, found: set[str]) -> None:
    for c in clauses:
        if c.kind is ClauseKind.ONERROR:
            continue
        if c.element == element:
            found.add(c.kind.value)
        if c.kind is ClauseKind.WHEN:
            _clause_kinds_for(c.then_clauses, element, found)
            _clause_kinds_for(c.else_clauses, element, found)


def cross_reference(db: SpecDb, element: str) -> CrossReference:
    """Exact usage report for one data element.

    An empty ``uses`` tuple is exactly the W011 condition.  Raises KeyError
    for an undeclared element.
    """
    if element not in db.data_elements:
        raise KeyError(element)
    uses = []
    effects = []
    for fn in db.functions.values():
        for p in fn.params:
            if p.element == element:
                uses.append(ParameterUse(fn.name, p.direction, p.locality, p.via_bundle))
        for i, eff in enumerate(fn.effects):
            kinds: set[str] = set()
            _clause_kinds_for(eff.clauses, element, kinds)
            if kinds:
                effects.append(EffectUse(fn.name, i, tuple(sorted(kinds))))
    bundles = tuple(b.name for b in db.bundles.values() if element in b.members)
    return CrossReference(element, tuple(uses), tuple(effects), bundles)


def render_xref(db: SpecDb, xref: CrossReference) -> bytes:
    elem = db.data_elements[xref.element]
    lines = [f'"{xref.element}" : {elem.dtype}']
    if not elem.restriction.is_none:
        lines.append(f"  restriction: {elem.restriction}")
    if elem.initial is not None:
        lines.append(f"  initial: {elem.initial}")
    if xref.bundles:
        lines.append("  bundles: " + ", ".join(f'"{b}"' for b in xref.bundles))
    if xref.uses:
        lines.append("  parameters:")
        for u in xref.uses:
            via = f' (via bundle "{u.via_bundle}")' if u.via_bundle else ""
            lines.append(
                f'    {u.direction.value:<3} {u.locality.value:<8} "{u.function}"{via}'
            )
    else:
        lines.append("  parameters: none (referenced by no function)")
    if xref.effects:
        lines.append("  effects:")
        for e in xref.effects:
            lines.append(
                f'    "{e.function}" effect {e.effect_index + 1}: {", ".join(e.clause_kinds)}'
            )
    return ("\n".join(lines) + "\n").encode("utf-8")
