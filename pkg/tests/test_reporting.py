"""Diagnostic rendering, listings in five orderings, cross-references."""
from __future__ import annotations

import json

import pytest

from svsp import run_all_checks
from svsp.model import Severity
from svsp.reporting import (
    ORDERINGS,
    cross_reference,
    function_listing,
    render_diagnostics,
    render_listing,
    render_xref,
)


# ---------------------------------------------------------------------------
# render_diagnostics


def test_text_format_lines_and_summary(faulty_db):
    out = render_diagnostics(run_all_checks(faulty_db), format="text").decode("utf-8")
    lines = out.splitlines()
    assert any(
        line.startswith("E005 error ") and '"control flag"' in line and "—" in line
        for line in lines
    )
    assert any('[related: "window"]' in line for line in lines)
    assert lines[-1] == "4 errors, 1 warnings"


def test_empty_diagnostics_render(faulty_db):
    assert render_diagnostics([], format="text") == b"0 errors, 0 warnings\n"
    assert render_diagnostics([], format="json-lines") == b""


def test_json_lines_parse_and_round_trip(faulty_db):
    diags = run_all_checks(faulty_db)
    out = render_diagnostics(diags, format="json-lines")
    lines = out.decode("utf-8").splitlines()
    assert len(lines) == len(diags)
    for line, diag in zip(lines, diags):
        obj = json.loads(line)
        assert list(obj.keys()) == [
            "code",
            "severity",
            "file",
            "line",
            "col",
            "subject",
            "message",
            "related",
        ]
        assert obj["code"] == diag.code
        assert obj["severity"] == diag.severity.value
        assert obj["line"] == diag.location.line
        assert obj["col"] == diag.location.column
        assert obj["subject"] == diag.subject
        assert obj["message"] == diag.message
        assert tuple(obj["related"]) == diag.related


def test_rendering_is_byte_identical_across_runs(faulty_db):
    a = render_diagnostics(run_all_checks(faulty_db), format="json-lines")
    b = render_diagnostics(run_all_checks(faulty_db), format="json-lines")
    assert a == b
    assert render_diagnostics(run_all_checks(faulty_db)) == render_diagnostics(
        run_all_checks(faulty_db)
    )


def test_color_mode_wraps_only_the_label(faulty_db):
    diags = [d for d in run_all_checks(faulty_db) if d.severity is Severity.ERROR][:1]
    plain = render_diagnostics(diags, format="text").decode()
    tinted = render_diagnostics(diags, format="text", color=True).decode()
    assert "\x1b[31m" in tinted and "\x1b[31m" not in plain


def test_unknown_format_rejected(faulty_db):
    with pytest.raises(ValueError):
        render_diagnostics([], format="yaml")


# ---------------------------------------------------------------------------
# function_listing


def test_all_orderings_are_permutations_of_the_same_rows(clean_db):
    reference = {r.name for r in function_listing(clean_db, "decl").rows}
    assert len(reference) == len(clean_db.functions)
    for ordering in ORDERINGS:
        listing = function_listing(clean_db, ordering)
        assert {r.name for r in listing.rows} == reference
        assert len(listing.rows) == len(reference)


def test_declaration_ordering_is_source_order(clean_db):
    listing = function_listing(clean_db, "decl")
    assert [r.name for r in listing.rows] == list(clean_db.functions)


def test_name_ordering_is_sorted(clean_db):
    listing = function_listing(clean_db, "name")
    names = [r.name for r in listing.rows]
    assert names == sorted(names)


def test_state_ordering_groups_by_first_state_brute_force(clean_db):
    # Independent computation: bucket functions under their first valid
    # state in state declaration order, names sorted inside a bucket.
    buckets: dict[int, list[str]] = {}
    for fn in clean_db.functions.values():
        key = min(clean_db.states.index(s) for s in fn.valid_states)
        buckets.setdefault(key, []).append(fn.name)
    expected = [name for key in sorted(buckets) for name in sorted(buckets[key])]
    listing = function_listing(clean_db, "state")
    assert [r.name for r in listing.rows] == expected


def test_level_ordering_uses_declaration_order_not_alphabet(clean_db):
    listing = function_listing(clean_db, "level")
    levels = [r.level for r in listing.rows]
    indexed = [clean_db.levels.index(lv) for lv in levels]
    assert indexed == sorted(indexed)


def test_unknown_ordering_rejected(clean_db):
    with pytest.raises(ValueError):
        function_listing(clean_db, "by-coolness")


def test_render_listing_deterministic(clean_db):
    a = render_listing(function_listing(clean_db, "name"))
    b = render_listing(function_listing(clean_db, "name"))
    assert a == b and a.decode("utf-8").count("\n") == len(clean_db.functions)


# ---------------------------------------------------------------------------
# cross_reference


def test_operating_state_is_used_by_every_transition_function(clean_db):
    xref = cross_reference(clean_db, "operating state")
    users = {u.function for u in xref.uses}
    assert {
        "OPEN GKS",
        "CLOSE GKS",
        "OPEN WORKSTATION",
        "CLOSE WORKSTATION",
        "ACTIVATE WORKSTATION",
        "DEACTIVATE WORKSTATION",
        "CREATE SEGMENT",
        "CLOSE SEGMENT",
    } <= users
    touching = {e.function for e in xref.effects}
    assert "OPEN GKS" in touching and "INQUIRE LEVEL OF GKS" in touching


def test_unused_element_has_empty_uses(faulty_db):
    xref = cross_reference(faulty_db, "locator position")
    assert xref.uses == () and xref.effects == () and xref.bundles == ()


def test_bundle_only_element_reports_bundle_and_bundle_expanded_use(clean_db):
    xref = cross_reference(clean_db, "viewport")
    assert xref.bundles == ("GKS state list",)
    assert [u.function for u in xref.uses] == ["OPEN GKS"]
    assert xref.uses[0].via_bundle == "GKS state list"


def test_unknown_element_raises(clean_db):
    with pytest.raises(KeyError):
        cross_reference(clean_db, "ghost")


def test_use_counts_sum_to_expanded_parameter_count(clean_db):
    # Double-count check: every expanded parameter is exactly one use.
    total_params = sum(len(fn.params) for fn in clean_db.functions.values())
    total_uses = sum(
        len(cross_reference(clean_db, name).uses) for name in clean_db.data_elements
    )
    assert total_uses == total_params


def test_render_xref_mentions_restriction_and_initial(clean_db):
    out = render_xref(clean_db, cross_reference(clean_db, "operating state")).decode()
    assert '"operating state" : state' in out
    assert "initial: GKCL" in out
