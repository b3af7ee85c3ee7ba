"""Model construction, restriction subsumption, bundle/group expansion."""
from __future__ import annotations

import itertools

import pytest

from svsp import build_spec_db, parse_source
from svsp.model import (
    Direction,
    Locality,
    Restriction,
    SubsumeResult,
    expand_bundle,
    expand_group,
    subsumes,
)

CONTAINED = SubsumeResult.CONTAINED
NOT_CONTAINED = SubsumeResult.NOT_CONTAINED
INCOMPATIBLE = SubsumeResult.INCOMPATIBLE


# ---------------------------------------------------------------------------
# subsumes


def test_int_range_containment():
    assert subsumes(Restriction.int_range(1, 5), Restriction.int_range(1, 10)) is CONTAINED


def test_membership_subset():
    inner = Restriction.membership(("OUTPUT",))
    outer = Restriction.membership(("OUTPUT", "INPUT", "OUTIN"))
    assert subsumes(inner, outer) is CONTAINED


def test_int_range_not_contained():
    assert (
        subsumes(Restriction.int_range(0, 10), Restriction.int_range(1, 10))
        is NOT_CONTAINED
    )


def test_none_outer_always_contains():
    assert subsumes(Restriction.int_range(5, 9), Restriction.none()) is CONTAINED
    assert subsumes(Restriction.none(), Restriction.none()) is CONTAINED


def test_none_inner_against_real_outer_not_contained():
    assert subsumes(Restriction.none(), Restriction.int_range(0, 1)) is NOT_CONTAINED


def test_incomparable_kinds_are_incompatible_not_false():
    r = subsumes(Restriction.membership(("A",)), Restriction.int_range(0, 1))
    assert r is INCOMPATIBLE
    r = subsumes(Restriction.int_range(0, 1), Restriction.real_range(0.0, 1.0))
    assert r is INCOMPATIBLE


def test_real_range_exact_bounds():
    assert (
        subsumes(Restriction.real_range(0.0, 1.0), Restriction.real_range(0.0, 1.0))
        is CONTAINED
    )
    assert (
        subsumes(Restriction.real_range(0.0, 1.0000001), Restriction.real_range(0.0, 1.0))
        is NOT_CONTAINED
    )


def _all_int_ranges(lo: int, hi: int) -> list[Restriction]:
    out = [Restriction.none()]
    for a, b in itertools.product(range(lo, hi + 1), repeat=2):
        if a <= b:
            out.append(Restriction.int_range(a, b))
    return out


def _int_range_as_set(r: Restriction, universe: range) -> set[int]:
    if r.is_none:
        return set(universe)
    return {v for v in universe if r.lo <= v <= r.hi}


def test_int_range_subsumption_matches_brute_force_set_containment():
    # Independent oracle: enumerate both ranges as explicit integer sets over
    # a universe strictly larger than the bound range and compare.
    universe = range(-5, 6)
    mismatches = []
    for inner, outer in itertools.product(_all_int_ranges(-3, 3), repeat=2):
        expected = _int_range_as_set(inner, universe) <= _int_range_as_set(outer, universe)
        got = subsumes(inner, outer)
        if (got is CONTAINED) != expected:
            mismatches.append((inner, outer, got, expected))
    assert mismatches == []


def _all_memberships(values: tuple[str, ...]) -> list[Restriction]:
    out = [Restriction.none()]
    for k in range(1, len(values) + 1):
        for combo in itertools.combinations(values, k):
            out.append(Restriction.membership(combo))
    return out


def test_membership_subsumption_matches_brute_force_over_4_value_enum():
    # "none" admits every value, including ones outside this enum's four, so
    # the oracle models it as the universe plus a sentinel outside it.
    values = ("A", "B", "C", "D")
    unrestricted = set(values) | {"<anything else>"}
    mismatches = []
    for inner, outer in itertools.product(_all_memberships(values), repeat=2):
        inner_set = unrestricted if inner.is_none else set(inner.values)
        outer_set = unrestricted if outer.is_none else set(outer.values)
        expected = inner_set <= outer_set
        got = subsumes(inner, outer)
        if (got is CONTAINED) != expected:
            mismatches.append((inner, outer))
    assert mismatches == []


def test_subsumes_reflexive_and_transitive():
    rs = _all_int_ranges(-3, 3) + _all_memberships(("A", "B", "C", "D"))
    for r in rs:
        assert subsumes(r, r) is CONTAINED
    for a, b, c in itertools.product(_all_int_ranges(-2, 2), repeat=3):
        if subsumes(a, b) is CONTAINED and subsumes(b, c) is CONTAINED:
            assert subsumes(a, c) is CONTAINED


# ---------------------------------------------------------------------------
# build_spec_db


def test_empty_declaration_list_builds_empty_db():
    db, diags = build_spec_db([])
    assert diags == []
    assert not db.functions and not db.data_elements
    assert db.states == () and db.initial_state is None


def test_duplicate_data_declaration_first_wins():
    text = 'data "window" : integer range 0 .. 5\ndata "window" : real'
    result = parse_source(text, "dup.svs")
    db, diags = build_spec_db(result.declarations)
    assert len(db.data_elements) == 1
    assert str(db.data_elements["window"].dtype) == "integer"
    assert [d.code for d in diags] == ["E002"]


def test_duplicate_function_yields_e001(clean_text):
    result = parse_source(clean_text + '\nfunction "OPEN GKS" { type control }', "d.svs")
    _, diags = build_spec_db(result.declarations)
    assert [d.code for d in diags] == ["E001"]


def test_duplicate_error_number_yields_e003():
    result = parse_source('error 7 "a"\nerror 7 "b"', "e.svs")
    db, diags = build_spec_db(result.declarations)
    assert [d.code for d in diags] == ["E003"]
    assert db.errors[7].text == "a"


def test_duplicate_state_and_enum_value_yield_e004():
    result = parse_source(
        "states { GKCL GKCL } initial GKCL\nenum x { A A }", "e.svs"
    )
    db, diags = build_spec_db(result.declarations)
    assert sorted(d.code for d in diags) == ["E004", "E004"]
    assert db.states == ("GKCL",)
    assert db.enums["x"].values == ("A",)


def test_table_one_function_builds_expected_shape(clean_db):
    fn = clean_db.functions["INQUIRE WORKSTATION STATE"]
    assert fn.valid_states == ("GKCL", "GKOP", "WSOP", "WSAC", "SGOP")
    external = [p for p in fn.params if p.locality is Locality.EXTERNAL]
    ins = [p for p in external if p.direction is Direction.IN]
    outs = [p for p in external if p.direction is Direction.OUT]
    assert [p.element for p in ins] == ["workstation identifier"]
    assert [p.element for p in outs] == ["error indicator", "workstation state"]
    assert fn.references == ("4.52", "4.11.2")


def test_build_is_pure_function_of_declarations(clean_text):
    decls1 = parse_source(clean_text, "a.svs").declarations
    decls2 = parse_source(clean_text, "a.svs").declarations
    db1, _ = build_spec_db(decls1)
    db2, _ = build_spec_db(decls2)
    assert db1 == db2


def test_state_element_is_designated(clean_db):
    assert clean_db.state_element == "operating state"


def test_second_state_element_is_diagnosed():
    text = 'states { A } initial A\ndata "s1" : state init A\ndata "s2" : state init A'
    db, diags = build_spec_db(parse_source(text, "s.svs").declarations)
    assert [d.code for d in diags] == ["E016"]
    assert db.state_element == "s1"


# ---------------------------------------------------------------------------
# expand_bundle / expand_group


def test_expand_bundle_matches_fixture_member_count(clean_db):
    params = expand_bundle(clean_db, "GKS state list", Direction.OUT, Locality.INTERNAL)
    assert len(params) == len(clean_db.bundles["GKS state list"].members) == 6
    assert [p.element for p in params] == list(clean_db.bundles["GKS state list"].members)
    assert all(
        p.direction is Direction.OUT
        and p.locality is Locality.INTERNAL
        and p.restriction.is_none
        and p.via_bundle == "GKS state list"
        for p in params
    )


def test_expand_empty_and_singleton_bundles():
    text = (
        'data "a" : integer\n'
        'bundle "empty" { }\n'
        'bundle "one" { "a" }\n'
    )
    db, _ = build_spec_db(parse_source(text, "b.svs").declarations)
    assert expand_bundle(db, "empty", Direction.IN, Locality.EXTERNAL) == []
    single = expand_bundle(db, "one", Direction.IN, Locality.EXTERNAL)
    assert len(single) == 1 and single[0].element == "a"


def test_expand_unknown_bundle_raises():
    db, _ = build_spec_db([])
    with pytest.raises(KeyError):
        expand_bundle(db, "nope", Direction.IN, Locality.EXTERNAL)


def test_expand_group_preserves_paper_order(clean_db):
    members, unresolved = expand_group(clean_db, "EMERGENCY CLOSE GKS")
    assert unresolved is None
    assert [fn.name for fn in members] == [
        "CLOSE SEGMENT",
        "UPDATE WORKSTATION",
        "DEACTIVATE WORKSTATION",
        "CLOSE WORKSTATION",
        "CLOSE GKS",
    ]
    assert len(members) == len(clean_db.groups["EMERGENCY CLOSE GKS"].members)


def test_expand_group_of_one():
    text = (
        'function "F" { type t level L states { S } }\n'
        'group "G" { calls "F" }\n'
    )
    db, _ = build_spec_db(parse_source(text, "g.svs").declarations)
    members, unresolved = expand_group(db, "G")
    assert unresolved is None and [m.name for m in members] == ["F"]


def test_expand_group_with_undefined_member_returns_prefix_and_marker():
    text = (
        'function "F" { type t level L states { S } }\n'
        'group "G" { calls "F" "MISSING" "F" }\n'
    )
    db, _ = build_spec_db(parse_source(text, "g.svs").declarations)
    members, unresolved = expand_group(db, "G")
    assert [m.name for m in members] == ["F"]
    assert unresolved == "MISSING"


def test_bundle_param_names_unknown_bundle_is_w013():
    text = 'function "F" { type t level L states { S } param out internal bundle "nope" }'
    db, diags = build_spec_db(parse_source(text, "g.svs").declarations)
    assert [d.code for d in diags] == ["W013"]
    assert db.functions["F"].params == ()


def test_duplicate_parameter_element_is_dropped_and_diagnosed():
    text = (
        'data "a" : integer\n'
        'function "F" { type t level L states { S }'
        ' param in external "a" param out internal "a" }'
    )
    db, diags = build_spec_db(parse_source(text, "p.svs").declarations)
    assert [d.code for d in diags] == ["E002"]
    assert len(db.functions["F"].params) == 1
    assert db.functions["F"].params[0].direction is Direction.IN
