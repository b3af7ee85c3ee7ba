from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

from svsp import build_spec_db, parse_source

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "fixtures"
SCRIPTS = REPO / "scripts"

CLEAN_SVS = FIXTURES / "mini-gks-clean.svs"
FAULTY_SVS = FIXTURES / "mini-gks.svs"


def load_db(path: Path):
    result = parse_source(path.read_text(encoding="utf-8"), str(path))
    assert not result.diagnostics, f"fixture {path} must parse cleanly: {result.diagnostics}"
    db, _ = build_spec_db(result.declarations)
    return db


@pytest.fixture(scope="session")
def clean_db():
    return load_db(CLEAN_SVS)


@pytest.fixture(scope="session")
def faulty_db():
    return load_db(FAULTY_SVS)


@pytest.fixture(scope="session")
def clean_text() -> str:
    return CLEAN_SVS.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def faulty_text() -> str:
    return FAULTY_SVS.read_text(encoding="utf-8")


def run_cli(*argv: str, stdin: str = "") -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "svsp.cli", *argv],
        cwd=REPO,
        input=stdin,
        capture_output=True,
        text=True,
        timeout=60,
    )
