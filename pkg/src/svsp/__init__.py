"""svsp: static and scenario-based validation of software-package specifications."""

from .checker import (
    CATALOG,
    check_restriction_compatibility,
    has_errors,
    run_all_checks,
    suggest_similar_names,
)
from .engine import (
    CallOutcome,
    CallRecord,
    Callability,
    IndicatorTriple,
    OutcomeKind,
    Session,
    StaticErrorsError,
    apply_call,
    check_callability,
    dry_run,
    new_session,
)
from .model import (
    DataElementDef,
    DataType,
    Diagnostic,
    Direction,
    FunctionDef,
    Literal,
    Locality,
    Restriction,
    Severity,
    SourceLocation,
    SpecDb,
    SubsumeResult,
    build_spec_db,
    expand_bundle,
    expand_group,
    subsumes,
)
from .parser import ParseDiagnostic, ParseResult, parse_bytes, parse_source, serialize
from .script import (
    ScenarioResult,
    ScenarioScript,
    ScriptError,
    parse_script,
    run_script,
)

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "CallOutcome",
    "CallRecord",
    "Callability",
    "DataElementDef",
    "DataType",
    "Diagnostic",
    "Direction",
    "FunctionDef",
    "IndicatorTriple",
    "Literal",
    "Locality",
    "OutcomeKind",
    "ParseDiagnostic",
    "ParseResult",
    "Restriction",
    "ScenarioResult",
    "ScenarioScript",
    "ScriptError",
    "Session",
    "Severity",
    "SourceLocation",
    "SpecDb",
    "StaticErrorsError",
    "SubsumeResult",
    "apply_call",
    "build_spec_db",
    "check_callability",
    "check_restriction_compatibility",
    "dry_run",
    "expand_bundle",
    "expand_group",
    "has_errors",
    "new_session",
    "parse_bytes",
    "parse_script",
    "parse_source",
    "run_all_checks",
    "run_script",
    "serialize",
    "subsumes",
    "suggest_similar_names",
]
