"""Embedded HTTP+JSON service exposing the spec, diagnostics and sessions.

Transport adds nothing to the semantics: every response body is derived
from the same model/engine calls the CLI uses.  Sessions are in-memory
and per-session mutation is serialized with a lock; the SpecDb itself is
immutable and shared.
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote

from . import checker, engine
from .engine import CallOutcome, Session
from .model import Diagnostic, Literal, SpecDb, TypeKind

DEFAULT_PORT = 7410

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
}


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


def _literal_to_json(lit: Literal | None) -> object:
    if lit is None:
        return None
    return lit.value


def _json_to_literal(db: SpecDb, element: str, value: object) -> Literal:
    """Map a JSON argument value onto a literal, guided by the element kind."""
    elem = db.data_elements.get(element)
    if elem is None:
        raise ApiError(404, f"unknown data element {element!r}")
    kind = elem.dtype.kind
    if isinstance(value, bool):
        raise ApiError(400, f"argument for {element!r}: booleans are not literals")
    if isinstance(value, int):
        return Literal.integer(value)
    if isinstance(value, float):
        return Literal.real(value)
    if isinstance(value, str):
        if kind in (TypeKind.ENUM, TypeKind.STATE):
            return Literal.ident(value)
        return Literal.string(value)
    raise ApiError(
        400, f"argument for {element!r}: expected a number or string, got {value!r}"
    )


def _triple_json(element: str, t: engine.IndicatorTriple) -> dict:
    return {
        "element": element,
        "allocated": t.allocated,
        "defined": t.defined,
        "valued": t.valued,
        "value": _literal_to_json(t.value),
    }


def _outcome_json(outcome: CallOutcome) -> dict:
    return {
        "function": outcome.function,
        "kind": outcome.kind,
        "number": outcome.error_number,
        "numbers": list(outcome.error_numbers),
        "codes": list(outcome.codes),
        "details": list(outcome.details),
        "effects": list(outcome.displayed_effects),
        "deltas": [
            {
                "element": d.element,
                "before": _triple_json(d.element, d.before),
                "after": _triple_json(d.element, d.after),
            }
            for d in outcome.deltas
        ],
        "state_after": outcome.state_after,
    }


def _diag_json(d: Diagnostic) -> dict:
    return {
        "code": d.code,
        "severity": d.severity.value,
        "file": d.location.file,
        "line": d.location.line,
        "col": d.location.column,
        "subject": d.subject,
        "message": d.message,
        "related": list(d.related),
    }


@dataclass
class _Held:
    session: Session
    created_at: str
    lock: threading.Lock = field(default_factory=threading.Lock)


class Service:
    """Request handling for the explorer API, independent of the transport."""

    def __init__(self, db: SpecDb, ui_dir: str | None = None):
        self.db = db
        self.diagnostics = checker.run_all_checks(db)
        self.has_errors = checker.has_errors(self.diagnostics)
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self._sessions: dict[str, _Held] = {}
        self._registry_lock = threading.Lock()

    # -- session plumbing ---------------------------------------------------

    def _held(self, session_id: str) -> _Held:
        with self._registry_lock:
            held = self._sessions.get(session_id)
        if held is None:
            raise ApiError(404, f"unknown session {session_id!r}")
        return held

    def _default_level(self) -> str:
        if not self.db.levels:
            raise ApiError(409, "specification declares no levels")
        return self.db.levels[-1]

    # -- dispatch -------------------------------------------------------------

    def handle_request(
        self, method: str, path: str, body: dict | None = None
    ) -> tuple[int, object]:
        """Serve one API request; returns (status, json payload)."""
        try:
            return self._dispatch(method, path, body or {})
        except ApiError as e:
            return e.status, {"error": e.message}
        except engine.ArgumentError as e:
            return 400, {"error": str(e)}
        except engine.UnknownNameError as e:
            return 404, {"error": str(e)}

    def _dispatch(self, method: str, path: str, body: dict) -> tuple[int, object]:
        parts = [unquote(p) for p in path.split("/") if p]
        if parts[:1] != ["api"]:
            raise ApiError(404, f"unknown path {path!r}")
        rest = parts[1:]
        if rest == ["spec"] and method == "GET":
            return 200, self._spec_summary()
        if rest == ["spec", "functions"] and method == "GET":
            return 200, [
                {
                    "name": fn.name,
                    "type": fn.ftype,
                    "level": fn.level,
                    "states": list(fn.valid_states),
                }
                for fn in self.db.functions.values()
            ]
        if len(rest) == 3 and rest[:2] == ["spec", "functions"] and method == "GET":
            return 200, self._function_detail(rest[2])
        if rest == ["spec", "data-elements"] and method == "GET":
            return 200, [
                {
                    "name": e.name,
                    "dtype": str(e.dtype),
                    "restriction": None if e.restriction.is_none else str(e.restriction),
                    "initial": _literal_to_json(e.initial),
                }
                for e in self.db.data_elements.values()
            ]
        if rest == ["diagnostics"] and method == "GET":
            return 200, [_diag_json(d) for d in self.diagnostics]
        if rest == ["sessions"] and method == "POST":
            return self._create_session(body)
        if len(rest) >= 2 and rest[0] == "sessions":
            return self._session_request(method, rest[1], rest[2:], body)
        raise ApiError(404, f"unknown path {path!r}")

    def _spec_summary(self) -> dict:
        db = self.db
        return {
            "counts": {
                "functions": len(db.functions),
                "data_elements": len(db.data_elements),
                "bundles": len(db.bundles),
                "groups": len(db.groups),
                "errors": len(db.errors),
                "enums": len(db.enums),
            },
            "states": list(db.states),
            "initial_state": db.initial_state,
            "levels": list(db.levels),
            "state_element": db.state_element,
            "diagnostic_count": len(self.diagnostics),
            "has_errors": self.has_errors,
        }

    def _function_detail(self, name: str) -> dict:
        fn = self.db.functions.get(name)
        if fn is None:
            raise ApiError(404, f"unknown function {name!r}")
        return {
            "name": fn.name,
            "type": fn.ftype,
            "level": fn.level,
            "states": list(fn.valid_states),
            "params": [
                {
                    "element": p.element,
                    "direction": p.direction.value,
                    "locality": p.locality.value,
                    "restriction": None if p.restriction.is_none else str(p.restriction),
                    "via_bundle": p.via_bundle,
                }
                for p in fn.params
            ],
            "effects": [
                {"class": e.effect_class.value, "text": e.text} for e in fn.effects
            ],
            "references": list(fn.references),
            "errors": list(fn.declared_errors),
        }

    def _create_session(self, body: dict) -> tuple[int, object]:
        if self.has_errors:
            raise ApiError(
                409,
                "specification has ERROR diagnostics; fix static errors before "
                "running scenarios",
            )
        level = body.get("level") or self._default_level()
        if level not in self.db.levels:
            raise ApiError(400, f"level {level!r} is not declared")
        session = engine.new_session(self.db, level)
        held = _Held(
            session=session,
            created_at=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        )
        with self._registry_lock:
            self._sessions[session.id] = held
        return 201, {"id": session.id, "level": level, "created_at": held.created_at}

    def _session_request(
        self, method: str, session_id: str, rest: list[str], body: dict
    ) -> tuple[int, object]:
        held = self._held(session_id)
        if not rest and method == "GET":
            with held.lock:
                return 200, self._snapshot_json(held.session)
        if rest == ["log"] and method == "GET":
            with held.lock:
                return 200, [
                    {
                        "index": r.index,
                        "function": r.function,
                        "args": {k: _literal_to_json(v) for k, v in r.args},
                        "outcome": _outcome_json(r.outcome),
                    }
                    for r in held.session.log
                ]
        if rest == ["calls"] and method == "POST":
            fn_name, args = self._call_body(body)
            with held.lock:
                outcome = engine.apply_call(held.session, fn_name, args)
                return 200, _outcome_json(outcome)
        if rest == ["dry-run"] and method == "POST":
            fn_name, args = self._call_body(body)
            with held.lock:
                outcome = engine.dry_run(held.session, fn_name, args)
                return 200, _outcome_json(outcome)
        if rest == ["reset"] and method == "POST":
            with held.lock:
                fresh = engine.new_session(self.db, held.session.level)
                held.session.indicators = fresh.indicators
                held.session.log = []
                return 200, self._snapshot_json(held.session)
        raise ApiError(404, f"unknown session endpoint {'/'.join(rest) or '(root)'!r}")

    def _call_body(self, body: dict) -> tuple[str, dict[str, Literal]]:
        fn_name = body.get("function")
        if not isinstance(fn_name, str):
            raise ApiError(400, "body must carry a 'function' name")
        raw_args = body.get("args") or {}
        if not isinstance(raw_args, dict):
            raise ApiError(400, "'args' must be an object of element -> literal")
        args = {k: _json_to_literal(self.db, k, v) for k, v in raw_args.items()}
        return fn_name, args

    def _snapshot_json(self, session: Session) -> dict:
        return {
            "id": session.id,
            "level": session.level,
            "state": session.current_state(),
            "indicators": [
                _triple_json(name, session.indicators[name])
                for name in self.db.data_elements
            ],
            "log_length": len(session.log),
        }

    # -- static assets ---------------------------------------------------------

    def static_file(self, path: str) -> tuple[int, str, bytes] | None:
        """Resolve a UI asset; returns (status, content-type, body) or None."""
        if self.ui_dir is None:
            return None
        rel = unquote(path).lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        root = self.ui_dir.resolve()
        if root not in target.parents and target != root:
            return 404, "text/plain; charset=utf-8", b"not found"
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            return None
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        return 200, ctype, target.read_bytes()


class _Handler(BaseHTTPRequestHandler):
    service: Service  # assigned by make_server
    protocol_version = "HTTP/1.1"

    def log_message(self, format: str, *args: object) -> None:  # noqa: A002
        pass  # keep stdout/stderr quiet; the CLI owns user-facing output

    def _send_json(self, status: int, payload: object) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _handle(self, method: str) -> None:
        path = self.path.split("?", 1)[0]
        if path.startswith("/api"):
            body: dict | None = None
            length = int(self.headers.get("Content-Length") or 0)
            if length:
                try:
                    body = json.loads(self.rfile.read(length).decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError):
                    self._send_json(400, {"error": "malformed JSON body"})
                    return
                if body is not None and not isinstance(body, dict):
                    self._send_json(400, {"error": "body must be a JSON object"})
                    return
            status, payload = self.service.handle_request(method, path, body)
            self._send_json(status, payload)
            return
        if method != "GET":
            self._send_json(405, {"error": "method not allowed"})
            return
        asset = self.service.static_file(path)
        if asset is None:
            if path in ("/", "/index.html"):
                body = (
                    b"svsp service\n\nAPI under /api/ (spec, diagnostics, sessions).\n"
                    b"No UI assets bundled; point --ui or SVSP_UI at a build of the "
                    b"explorer frontend.\n"
                )
                self.send_response(200)
                self.send_header("Content-Type", "text/plain; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
                return
            self._send_json(404, {"error": "not found"})
            return
        status, ctype, content = asset
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(content)))
        self.end_headers()
        self.wfile.write(content)

    def do_GET(self) -> None:  # noqa: N802
        self._handle("GET")

    def do_POST(self) -> None:  # noqa: N802
        self._handle("POST")


def make_server(
    db: SpecDb,
    host: str = "127.0.0.1",
    port: int = DEFAULT_PORT,
    ui_dir: str | None = None,
) -> ThreadingHTTPServer:
    """Threading HTTP server bound to loopback; caller runs serve_forever()."""
    service = Service(db, ui_dir=ui_dir)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)
