"""End-to-end CLI behaviour: exit codes, stdout purity, determinism."""
from __future__ import annotations

import json

from conftest import run_cli


FAULTY = "fixtures/mini-gks.svs"
CLEAN = "fixtures/mini-gks-clean.svs"


# ---------------------------------------------------------------------------
# check


def test_check_faulty_fixture_exits_1_with_findings_on_stdout():
    r = run_cli("check", FAULTY)
    assert r.returncode == 1
    assert "E005" in r.stdout and "E008" in r.stdout
    assert '"control flag"' in r.stdout
    assert r.stderr == ""


def test_check_clean_fixture_exits_0():
    r = run_cli("check", CLEAN)
    assert r.returncode == 0
    assert r.stdout == "0 errors, 0 warnings\n"


def test_check_json_output_is_machine_readable():
    r = run_cli("check", FAULTY, "--format", "json")
    assert r.returncode == 1
    lines = r.stdout.splitlines()
    assert len(lines) == 5
    codes = [json.loads(line)["code"] for line in lines]
    assert codes == sorted(codes)


def test_check_json_runs_are_byte_identical():
    a = run_cli("check", FAULTY, "--format", "json")
    b = run_cli("check", FAULTY, "--format", "json")
    assert a.stdout == b.stdout
    assert a.returncode == b.returncode == 1


def test_warn_as_error_promotes_warnings():
    # The clean fixture has no warnings at all, so build one that does.
    r = run_cli("check", CLEAN)
    assert r.returncode == 0
    r = run_cli("check", CLEAN, "--warn-as-error")
    assert r.returncode == 0  # still nothing to promote
    r = run_cli("check", FAULTY, "--warn-as-error")
    assert r.returncode == 1


def test_check_concatenates_multiple_spec_files(tmp_path):
    part1 = tmp_path / "part1.svs"
    part2 = tmp_path / "part2.svs"
    part1.write_text(
        "states { A } initial A\nlevels { L0 }\n"
        'data "st" : state init A\ndata "x" : integer\n'
    )
    part2.write_text(
        'function "F" { type t level L0 states { A }\n'
        '  param out external "x"\n'
        '  param out internal "st"\n'
        '  effect init "sets x" { sets "x" { } sets "st" { } }\n'
        "}\n"
    )
    r = run_cli("check", str(part1), str(part2))
    assert r.returncode == 0, r.stdout + r.stderr
    assert r.stdout == "0 errors, 0 warnings\n"


def test_missing_file_is_exit_2():
    r = run_cli("check", "fixtures/no-such.svs")
    assert r.returncode == 2
    assert r.stdout == ""
    assert "no-such.svs" in r.stderr


def test_syntax_errors_are_exit_2_on_stderr(tmp_path):
    bad = tmp_path / "bad.svs"
    bad.write_text('data "x" integer\n')
    r = run_cli("check", str(bad))
    assert r.returncode == 2
    assert "expected" in r.stderr
    assert r.stdout == ""


def test_color_toggle_via_environment(tmp_path, monkeypatch):
    import subprocess
    import sys

    env_run = subprocess.run(
        [sys.executable, "-m", "svsp.cli", "check", FAULTY],
        cwd=str(__import__("pathlib").Path(__file__).resolve().parent.parent),
        capture_output=True,
        text=True,
        env={"SVSP_COLOR": "1", "PATH": "/usr/bin:/bin", "PYTHONPATH": ""},
    )
    assert "\x1b[31m" in env_run.stdout


# ---------------------------------------------------------------------------
# list / xref


def test_list_orderings_agree_on_row_count():
    counts = set()
    for order in ("name", "type", "level", "state", "decl"):
        r = run_cli("list", CLEAN, "--order", order)
        assert r.returncode == 0
        counts.add(len(r.stdout.splitlines()))
    assert counts == {14}


def test_list_rejects_unknown_order():
    r = run_cli("list", CLEAN, "--order", "fancy")
    assert r.returncode == 2


def test_xref_prints_usage_report():
    r = run_cli("xref", CLEAN, "window")
    assert r.returncode == 0
    assert "GKS state list" in r.stdout
    assert "SET WINDOW" in r.stdout


def test_xref_unknown_element_is_exit_2():
    r = run_cli("xref", CLEAN, "ghost")
    assert r.returncode == 2
    assert r.stdout == ""


# ---------------------------------------------------------------------------
# run


def test_run_script_with_expectations_passes():
    r = run_cli("run", CLEAN, "scripts/open-inquire.scn")
    assert r.returncode == 0, r.stdout + r.stderr
    assert "0 expect mismatches, 0 assertion failures" in r.stdout


def test_run_walk_script_passes():
    r = run_cli("run", CLEAN, "scripts/state-walk.scn", "--level", "L1")
    assert r.returncode == 0
    assert "4 calls" in r.stdout


def test_run_against_faulty_spec_is_exit_1():
    r = run_cli("run", FAULTY, "scripts/open-inquire.scn")
    assert r.returncode == 1
    assert "static errors" in r.stderr


def test_run_expect_mismatch_is_exit_1(tmp_path):
    scn = tmp_path / "bad-expect.scn"
    scn.write_text('call "OPEN GKS"\nexpect error 7\n')
    r = run_cli("run", CLEAN, str(scn))
    assert r.returncode == 1
    assert "expect failure" in r.stdout


def test_run_assert_failure_only_is_exit_3(tmp_path):
    scn = tmp_path / "bad-assert.scn"
    scn.write_text('call "OPEN GKS"\nassert state GKCL\n')
    r = run_cli("run", CLEAN, str(scn))
    assert r.returncode == 3
    assert "assert failure" in r.stdout


def test_run_bad_script_reference_is_exit_2(tmp_path):
    scn = tmp_path / "unknown.scn"
    scn.write_text('call "NO SUCH FUNCTION"\n')
    r = run_cli("run", CLEAN, str(scn))
    assert r.returncode == 2


def test_run_output_is_deterministic():
    a = run_cli("run", CLEAN, "scripts/emergency-close.scn")
    b = run_cli("run", CLEAN, "scripts/emergency-close.scn")
    assert a.stdout == b.stdout
    assert a.returncode == b.returncode == 0


# ---------------------------------------------------------------------------
# repl


def test_repl_executes_statements_from_stdin():
    stdin = (
        'call "OPEN GKS" with "error file" = "e", "amount of memory" = 1\n'
        "assert state GKOP\n"
        'call "INQUIRE LEVEL OF GKS"\n'
        "expect completed\n"
        "quit\n"
    )
    r = run_cli("repl", CLEAN, stdin=stdin)
    assert r.returncode == 0
    assert '"OPEN GKS" COMPLETED state=GKOP' in r.stdout
    assert "assert: ok" in r.stdout
    assert "expect: ok" in r.stdout
    # Effect text is displayed as processed.
    assert "GKS is put into the operating state GKS open." in r.stdout


def test_repl_prompt_and_banner_stay_on_stderr():
    r = run_cli("repl", CLEAN, stdin="quit\n")
    assert r.returncode == 0
    assert "svsp repl" in r.stderr
    assert "svsp repl" not in r.stdout


def test_repl_reports_exceptions_without_dying():
    stdin = 'call "CLOSE GKS"\ncall "NOPE"\nquit\n'
    r = run_cli("repl", CLEAN, stdin=stdin)
    assert r.returncode == 0
    assert "EXCEPTION X101" in r.stdout
    assert "error:" in r.stderr


def test_repl_runs_groups():
    stdin = (
        'call "OPEN GKS" with "error file" = "e", "amount of memory" = 1\n'
        'call "OPEN WORKSTATION" with "workstation identifier" = "w", '
        '"connection identifier" = "c", "workstation type" = "t"\n'
        'call "ACTIVATE WORKSTATION" with "workstation identifier" = "w"\n'
        'call "CREATE SEGMENT" with "segment name" = 1\n'
        'group "EMERGENCY CLOSE GKS"\n'
        "assert state GKCL\n"
        "quit\n"
    )
    r = run_cli("repl", CLEAN, stdin=stdin)
    assert r.returncode == 0
    assert '"CLOSE GKS" COMPLETED state=GKCL' in r.stdout
    assert r.stdout.rstrip().endswith("assert: ok")


def test_check_clean_json_output_is_empty():
    r = run_cli("check", CLEAN, "--format", "json")
    assert r.returncode == 0
    assert r.stdout == ""


# ---------------------------------------------------------------------------
# usage


def test_unknown_subcommand_is_exit_2():
    r = run_cli("frobnicate")
    assert r.returncode == 2
    assert r.stdout == ""
    assert "usage" in r.stderr.lower()
