"""Acceptance criteria, one test per criterion.

Each criterion prints a single PASS/FAIL line (visible under ``pytest -v -s``
or in the captured output of a failing run).  Tolerances are exact-match
unless a criterion states otherwise; the only timed criterion allows one
second for the seeded-fault check.
"""
from __future__ import annotations

import itertools
import json
import random
import re
import time

from conftest import CLEAN_SVS, FAULTY_SVS, run_cli

from svsp import build_spec_db, parse_source, run_all_checks, serialize
from svsp.engine import OutcomeKind, apply_call, new_session
from svsp.model import Literal, Restriction, SubsumeResult, subsumes
from svsp.script import parse_script, run_script


def verdict(name: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail and not ok:
        line += f" ({detail})"
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------


def test_c1_seeded_fault_detection():
    started = time.monotonic()
    r = run_cli("check", "fixtures/mini-gks.svs", "--format", "json")
    elapsed = time.monotonic() - started
    findings = [json.loads(line) for line in r.stdout.splitlines()]
    errors = [(f["code"], f["subject"]) for f in findings if f["severity"] == "error"]
    by_subject = {f["subject"]: f for f in findings if f["severity"] == "error"}
    ok = (
        sorted(errors)
        == [
            ("E005", "control flag"),
            ("E005", "error indicator"),
            ("E005", "window limits"),
            ("E008", "window"),
        ]
        and "CLEAR WORKSTATION" in by_subject["control flag"]["message"]
        and "INQUIRE LEVEL OF GKS" in by_subject["error indicator"]["message"]
        and "SET WINDOW" in by_subject["window limits"]["message"]
        and by_subject["window limits"]["related"] == ["window"]
        and r.returncode == 1
        and elapsed < 1.0
    )
    verdict("C1 seeded-fault detection", ok, f"errors={errors} elapsed={elapsed:.3f}s")


def test_c2_table_one_fidelity(clean_db):
    session = new_session(clean_db, "L2")
    ws1 = {"workstation identifier": Literal.string("ws1")}
    first = apply_call(session, "INQUIRE WORKSTATION STATE", ws1)
    fresh_ok = (
        first.kind == OutcomeKind.SPEC_ERROR
        and first.error_number == 7
        and session.indicators["error indicator"].value == Literal.integer(7)
    )
    apply_call(
        session,
        "OPEN GKS",
        {"error file": Literal.string("e.log"), "amount of memory": Literal.integer(64)},
    )
    apply_call(
        session,
        "OPEN WORKSTATION",
        {
            "workstation identifier": Literal.string("ws1"),
            "connection identifier": Literal.string("tty1"),
            "workstation type": Literal.string("wx200"),
        },
    )
    second = apply_call(session, "INQUIRE WORKSTATION STATE", ws1)
    after_ok = (
        second.kind == OutcomeKind.COMPLETED
        and session.indicators["error indicator"].value == Literal.integer(0)
    )
    # Same flow through the CLI alone: the repl prints the indicator deltas.
    stdin = (
        'call "INQUIRE WORKSTATION STATE" with "workstation identifier" = "ws1"\n'
        "expect error 7\n"
        'call "OPEN GKS" with "error file" = "e", "amount of memory" = 1\n'
        'call "OPEN WORKSTATION" with "workstation identifier" = "ws1", '
        '"connection identifier" = "c", "workstation type" = "t"\n'
        'call "INQUIRE WORKSTATION STATE" with "workstation identifier" = "ws1"\n'
        "expect completed\n"
        "quit\n"
    )
    r = run_cli("repl", "fixtures/mini-gks-clean.svs", stdin=stdin)
    cli_ok = (
        r.returncode == 0
        and "value 7" in r.stdout
        and "value 0" in r.stdout
        and r.stdout.count("expect: ok") == 2
    )
    verdict("C2 Table-1 fidelity", fresh_ok and after_ok and cli_ok)


def test_c3_bundle_allocation(clean_db):
    # Bundle size read independently from the fixture text, not the model.
    text = CLEAN_SVS.read_text(encoding="utf-8")
    block = re.search(r'bundle "GKS state list" \{(.*?)\}', text, re.DOTALL).group(1)
    members_in_file = re.findall(r'"([^"]+)"', block)
    session = new_session(clean_db, "L2")
    apply_call(
        session,
        "OPEN GKS",
        {"error file": Literal.string("e.log"), "amount of memory": Literal.integer(64)},
    )
    allocated_and_defined = [
        m
        for m in members_in_file
        if session.indicators[m].allocated and session.indicators[m].defined
    ]
    ok = len(members_in_file) > 0 and len(allocated_and_defined) == len(members_in_file)
    # CLI route: a generated script asserts both indicators per member.
    script_lines = ['call "OPEN GKS" with "error file" = "e", "amount of memory" = 1']
    for member in members_in_file:
        script_lines.append(f'assert "{member}" allocated')
        script_lines.append(f'assert "{member}" defined')
    scn = CLEAN_SVS.parent.parent / "build" / "c3-bundle.scn"
    scn.parent.mkdir(exist_ok=True)
    scn.write_text("\n".join(script_lines) + "\n", encoding="utf-8")
    r = run_cli("run", "fixtures/mini-gks-clean.svs", str(scn))
    cli_ok = r.returncode == 0 and "0 assertion failures" in r.stdout
    verdict(
        "C3 bundle allocation",
        ok and cli_ok,
        f"{len(allocated_and_defined)}/{len(members_in_file)} members, cli exit={r.returncode}",
    )


def test_c4_group_expansion_order(clean_db):
    text = (
        'call "OPEN GKS" with "error file" = "e", "amount of memory" = 1\n'
        'call "OPEN WORKSTATION" with "workstation identifier" = "w", '
        '"connection identifier" = "c", "workstation type" = "t"\n'
        'call "ACTIVATE WORKSTATION" with "workstation identifier" = "w"\n'
        'call "CREATE SEGMENT" with "segment name" = 1\n'
        'group "EMERGENCY CLOSE GKS"\n'
    )
    result = run_script(clean_db, parse_script(text, "c4.scn"), "L2")
    group_outcomes = result.outcomes[4:]
    expected_order = [
        "CLOSE SEGMENT",
        "UPDATE WORKSTATION",
        "DEACTIVATE WORKSTATION",
        "CLOSE WORKSTATION",
        "CLOSE GKS",
    ]
    ok = [o.function for o in group_outcomes] == expected_order and len(group_outcomes) == 5
    # CLI route: outcome lines #5..#9 carry the member order.
    r = run_cli("run", "fixtures/mini-gks-clean.svs", "scripts/emergency-close.scn")
    cli_names = [
        re.match(r'#\d+ "([^"]+)"', line).group(1)
        for line in r.stdout.splitlines()
        if line.startswith("#")
    ][4:9]
    cli_ok = r.returncode == 0 and cli_names == expected_order
    verdict("C4 group expansion", ok and cli_ok, f"got {[o.function for o in group_outcomes]}")


# ---------------------------------------------------------------------------
# C5: property suites


def _int_ranges():
    yield Restriction.none()
    for a, b in itertools.product(range(-3, 4), repeat=2):
        if a <= b:
            yield Restriction.int_range(a, b)


def _memberships():
    values = ("A", "B", "C", "D")
    yield Restriction.none()
    for k in range(1, 5):
        for combo in itertools.combinations(values, k):
            yield Restriction.membership(combo)


def test_c5a_subsumes_matches_brute_force():
    universe = range(-5, 6)
    mismatches = 0
    for inner, outer in itertools.product(list(_int_ranges()), repeat=2):
        inner_set = {v for v in universe if inner.is_none or inner.lo <= v <= inner.hi}
        outer_set = {v for v in universe if outer.is_none or outer.lo <= v <= outer.hi}
        expected = inner_set <= outer_set
        if (subsumes(inner, outer) is SubsumeResult.CONTAINED) != expected:
            mismatches += 1
    sentinel = "<other>"
    for inner, outer in itertools.product(list(_memberships()), repeat=2):
        inner_set = {*inner.values} if not inner.is_none else {"A", "B", "C", "D", sentinel}
        outer_set = {*outer.values} if not outer.is_none else {"A", "B", "C", "D", sentinel}
        expected = inner_set <= outer_set
        if (subsumes(inner, outer) is SubsumeResult.CONTAINED) != expected:
            mismatches += 1
    verdict("C5a subsumption vs brute force", mismatches == 0, f"{mismatches} mismatches")


def test_c5b_parser_round_trip_on_every_fixture():
    ok = True
    for path in (CLEAN_SVS, FAULTY_SVS):
        text = path.read_text(encoding="utf-8")
        first = parse_source(text, str(path))
        db1, _ = build_spec_db(first.declarations)
        again = parse_source(serialize(db1), str(path) + ".canon")
        db2, _ = build_spec_db(again.declarations)
        ok = ok and first.diagnostics == [] and again.diagnostics == [] and db1 == db2
    verdict("C5b parser round trip", ok)


def test_c5c_abort_atomicity_under_randomized_calls(clean_db):
    rng = random.Random(1987)
    names = list(clean_db.functions)
    session = new_session(clean_db, "L2")
    calls = 0
    violations = 0
    literals = [
        Literal.integer(1),
        Literal.integer(512),
        Literal.integer(-7),
        Literal.string("ws1"),
        Literal.string("tty1"),
        Literal.ident("ALWAYS"),
        Literal.ident("PERFORM"),
        Literal.ident("GKOP"),
        Literal.real(0.5),
    ]
    while calls < 1000:
        fn = clean_db.functions[rng.choice(names)]
        args = {
            p.element: rng.choice(literals)
            for p in fn.params
            if p.direction.value == "in"
            and p.locality.value == "external"
            and rng.random() < 0.5
        }
        before = dict(session.indicators)
        outcome = apply_call(session, fn.name, args)
        calls += 1
        if outcome.kind == OutcomeKind.EXCEPTION and session.indicators != before:
            violations += 1
        for t in session.indicators.values():
            if (t.valued and not t.defined) or (t.defined and not t.allocated):
                violations += 1
    verdict(
        "C5c abort atomicity + monotonicity",
        violations == 0,
        f"{violations} violations over {calls} calls",
    )


def test_c5d_deleting_any_referenced_data_declaration_is_caught():
    text = CLEAN_SVS.read_text(encoding="utf-8")
    lines = text.splitlines()
    misses = []
    checked = 0
    for i, line in enumerate(lines):
        if not line.startswith("data "):
            continue
        name = re.match(r'data "([^"]+)"', line).group(1)
        mutated = "\n".join(lines[:i] + lines[i + 1 :])
        db, _ = build_spec_db(parse_source(mutated, "mut.svs").declarations)
        diags = run_all_checks(db)
        checked += 1
        if not any(d.code == "E005" and d.subject == name for d in diags):
            misses.append(name)
    verdict(
        "C5d missing-element completeness",
        checked >= 25 and misses == [],
        f"{checked} deletions, missed {misses}",
    )


# ---------------------------------------------------------------------------


def test_c6_determinism():
    a = run_cli("check", "fixtures/mini-gks.svs", "--format", "json")
    b = run_cli("check", "fixtures/mini-gks.svs", "--format", "json")
    json_ok = a.stdout.encode() == b.stdout.encode() and a.returncode == b.returncode

    db, _ = build_spec_db(
        parse_source(CLEAN_SVS.read_text(encoding="utf-8"), str(CLEAN_SVS)).declarations
    )
    runs_ok = True
    for name in ("open-inquire.scn", "state-walk.scn", "emergency-close.scn"):
        script_text = (CLEAN_SVS.parent.parent / "scripts" / name).read_text()
        script = parse_script(script_text, name)
        if run_script(db, script, "L2") != run_script(db, script, "L2"):
            runs_ok = False
    verdict("C6 determinism", json_ok and runs_ok)


def test_c7_operating_state_walk_via_cli():
    r = run_cli("run", "fixtures/mini-gks-clean.svs", "scripts/state-walk.scn")
    ok = (
        r.returncode == 0
        and "0 expect mismatches, 0 assertion failures" in r.stdout
        and "4 calls" in r.stdout
    )
    verdict("C7 operating-state walk", ok, f"exit={r.returncode}")
