"""Command-line interface.

Subcommands: check (static validation), list (function listings), xref
(element cross-reference), run (scripted scenario), repl (interactive
scenario), serve (HTTP explorer service).

Exit codes: 0 clean; 1 ERROR diagnostics or expect mismatches; 2 usage,
parse or file errors; 3 scenario assertion failures only.  stdout carries
payload only; logs and usage go to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import checker, engine, reporting, script as script_mod, service
from .model import SpecDb
from .parser import ParseDiagnostic, parse_bytes
from .script import ScriptError

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_ASSERTIONS = 3


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(data: bytes) -> None:
    sys.stdout.buffer.write(data)
    sys.stdout.buffer.flush()


def load_spec(paths: list[str]) -> tuple[SpecDb, list, list[ParseDiagnostic]]:
    """Parse and build one SpecDb from spec files concatenated in order."""
    decls = []
    parse_diags: list[ParseDiagnostic] = []
    for path in paths:
        data = Path(path).read_bytes()
        result = parse_bytes(data, path)
        decls.extend(result.declarations)
        parse_diags.extend(result.diagnostics)
    from .model import build_spec_db

    db, _ = build_spec_db(decls)
    diags = checker.run_all_checks(db)
    return db, diags, parse_diags


def _load_or_exit(paths: list[str]) -> tuple[SpecDb, list]:
    try:
        db, diags, parse_diags = load_spec(paths)
    except OSError as e:
        _err(f"svsp: {e}")
        raise SystemExit(EXIT_USAGE) from None
    if parse_diags:
        for d in parse_diags:
            _err(str(d))
        raise SystemExit(EXIT_USAGE)
    return db, diags


def cmd_check(args: argparse.Namespace) -> int:
    db, diags = _load_or_exit(args.specs)
    color = os.environ.get("SVSP_COLOR", "0") == "1" and args.format == "text"
    _emit(reporting.render_diagnostics(diags, format=args.format, color=color))
    if checker.has_errors(diags):
        return EXIT_FINDINGS
    if args.warn_as_error and diags:
        return EXIT_FINDINGS
    return EXIT_OK


def cmd_list(args: argparse.Namespace) -> int:
    db, _ = _load_or_exit([args.spec])
    listing = reporting.function_listing(db, args.order)
    _emit(reporting.render_listing(listing))
    return EXIT_OK


def cmd_xref(args: argparse.Namespace) -> int:
    db, _ = _load_or_exit([args.spec])
    try:
        xref = reporting.cross_reference(db, args.element)
    except KeyError:
        _err(f"svsp: unknown data element {args.element!r}")
        return EXIT_USAGE
    _emit(reporting.render_xref(db, xref))
    return EXIT_OK


def _default_level(db: SpecDb, level: str | None) -> str:
    if level is not None:
        return level
    if not db.levels:
        _err("svsp: specification declares no levels")
        raise SystemExit(EXIT_USAGE)
    return db.levels[-1]


def _outcome_line(outcome: engine.CallOutcome, index: int | None = None) -> str:
    if outcome.kind == engine.OutcomeKind.COMPLETED:
        verdict = "COMPLETED"
    elif outcome.kind == engine.OutcomeKind.SPEC_ERROR:
        verdict = f"error {outcome.error_number}"
    else:
        verdict = "EXCEPTION " + "+".join(outcome.codes)
    prefix = f"#{index} " if index is not None else ""
    return f'{prefix}"{outcome.function}" {verdict} state={outcome.state_after}'


def cmd_run(args: argparse.Namespace) -> int:
    db, diags = _load_or_exit([args.spec])
    try:
        text = Path(args.script).read_text(encoding="utf-8")
    except OSError as e:
        _err(f"svsp: {e}")
        return EXIT_USAGE
    try:
        parsed = script_mod.parse_script(text, args.script)
    except ScriptError as e:
        _err(f"svsp: {e}")
        return EXIT_USAGE
    level = _default_level(db, args.level)
    try:
        result = script_mod.run_script(db, parsed, level)
    except engine.StaticErrorsError:
        _err("svsp: specification has static errors; run 'check' first")
        for line in reporting.render_diagnostics(diags).decode("utf-8").splitlines():
            _err("  " + line)
        return EXIT_FINDINGS
    except ScriptError as e:
        _err(f"svsp: {e}")
        return EXIT_USAGE

    lines = []
    for i, outcome in enumerate(result.outcomes, start=1):
        lines.append(_outcome_line(outcome, i))
    for f in result.failures:
        lines.append(f"{f.kind} failure at line {f.line}: {f.message}")
    lines.append(
        f"{len(result.outcomes)} calls, {len(result.expect_failures)} expect "
        f"mismatches, {len(result.assert_failures)} assertion failures"
    )
    _emit(("\n".join(lines) + "\n").encode("utf-8"))
    if result.expect_failures:
        return EXIT_FINDINGS
    if result.assert_failures:
        return EXIT_ASSERTIONS
    return EXIT_OK


def _print_outcome(outcome: engine.CallOutcome) -> None:
    lines = [_outcome_line(outcome)]
    for text in outcome.displayed_effects:
        lines.append(f"  | {text}")
    for detail in outcome.details:
        lines.append(f"  ! {detail}")
    for d in outcome.deltas:
        lines.append(f"  ~ {d.element}: {d.before.describe()} -> {d.after.describe()}")
    _emit(("\n".join(lines) + "\n").encode("utf-8"))


def cmd_repl(args: argparse.Namespace) -> int:
    db, diags = _load_or_exit([args.spec])
    level = _default_level(db, args.level)
    try:
        session = engine.new_session(db, level)
    except engine.StaticErrorsError:
        _err("svsp: specification has static errors; run 'check' first")
        return EXIT_FINDINGS
    _err(f"svsp repl: level {level}, state {session.current_state()}; 'quit' to leave")
    while True:
        _err_prompt()
        raw = sys.stdin.readline()
        if not raw:
            break
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("quit", "exit"):
            break
        try:
            stmt = script_mod.parse_statement_line(line, "<repl>")
        except ScriptError as e:
            _err(f"error: {e.reason}")
            continue
        try:
            _repl_execute(db, session, stmt)
        except (engine.EngineError, ScriptError) as e:
            _err(f"error: {e}")
    return EXIT_OK


def _err_prompt() -> None:
    sys.stderr.write("svsp> ")
    sys.stderr.flush()


def _repl_execute(db: SpecDb, session: engine.Session, stmt: object) -> None:
    from .model import expand_group
    from .script import (
        AssertStatement,
        AssertStateStatement,
        CallStatement,
        ExpectStatement,
        GroupStatement,
        check_predicate,
        describe_outcome,
    )

    if isinstance(stmt, CallStatement):
        _print_outcome(engine.apply_call(session, stmt.function, dict(stmt.args)))
    elif isinstance(stmt, GroupStatement):
        members, unresolved = expand_group(db, stmt.group)
        if unresolved is not None:
            raise ScriptError("<repl>", 1, f"group member {unresolved!r} is undefined")
        for member in members:
            _print_outcome(engine.apply_call(session, member.name))
    elif isinstance(stmt, ExpectStatement):
        if not session.log:
            _err("error: no call to expect against")
            return
        outcome = session.log[-1].outcome
        if stmt.expectation == "completed":
            ok = outcome.kind == engine.OutcomeKind.COMPLETED
        elif stmt.expectation == "error":
            ok = (
                outcome.kind == engine.OutcomeKind.SPEC_ERROR
                and outcome.error_number == stmt.error_number
            )
        else:
            ok = outcome.kind == engine.OutcomeKind.EXCEPTION and stmt.expectation in outcome.codes
        _emit(f"expect: {'ok' if ok else 'MISMATCH (' + describe_outcome(outcome) + ')'}\n".encode())
    elif isinstance(stmt, AssertStatement):
        t = session.indicators.get(stmt.element)
        if t is None:
            raise ScriptError("<repl>", 1, f"unknown data element {stmt.element!r}")
        ok = check_predicate(t, stmt.predicate)
        _emit(f"assert: {'ok' if ok else 'FAILED (' + t.describe() + ')'}\n".encode())
    elif isinstance(stmt, AssertStateStatement):
        state = session.current_state()
        ok = state == stmt.state
        _emit(f"assert: {'ok' if ok else f'FAILED (state {state})'}\n".encode())
    else:
        raise ScriptError("<repl>", 1, "unsupported statement")


def cmd_serve(args: argparse.Namespace) -> int:
    db, diags = _load_or_exit([args.spec])
    ui_dir = os.environ.get("SVSP_UI")
    if ui_dir is None:
        candidate = Path("frontend") / "dist"
        if candidate.is_dir():
            ui_dir = str(candidate)
    try:
        server = service.make_server(db, port=args.port, ui_dir=ui_dir)
    except OSError as e:
        _err(f"svsp: cannot bind port {args.port}: {e}")
        return EXIT_USAGE
    host, port = server.server_address[:2]
    _err(f"svsp: serving on http://{host}:{port}/ (ui: {ui_dir or 'none'}); Ctrl-C to stop")
    if checker.has_errors(diags):
        _err("svsp: note: specification has ERROR diagnostics; sessions are disabled (409)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svsp",
        description="Static and scenario-based validation of software-package specifications.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and statically validate spec files")
    p.add_argument("specs", nargs="+", metavar="spec.svs")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--warn-as-error", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("list", help="list functions in one of the five orderings")
    p.add_argument("spec", metavar="spec.svs")
    p.add_argument("--order", choices=reporting.ORDERINGS, default="decl")
    p.set_defaults(fn=cmd_list)

    p = sub.add_parser("xref", help="cross-reference one data element")
    p.add_argument("spec", metavar="spec.svs")
    p.add_argument("element")
    p.set_defaults(fn=cmd_xref)

    p = sub.add_parser("run", help="run a scenario script")
    p.add_argument("spec", metavar="spec.svs")
    p.add_argument("script", metavar="script.scn")
    p.add_argument("--level", default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("repl", help="interactive scenario session")
    p.add_argument("spec", metavar="spec.svs")
    p.add_argument("--level", default=None)
    p.set_defaults(fn=cmd_repl)

    p = sub.add_parser("serve", help="serve the HTTP explorer API")
    p.add_argument("spec", metavar="spec.svs")
    p.add_argument("--port", type=int, default=service.DEFAULT_PORT)
    p.set_defaults(fn=cmd_serve)

    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)
    return args.fn(args)


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
