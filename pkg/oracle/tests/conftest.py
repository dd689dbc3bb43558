import json
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent.parent
FIXTURES = REPO_ROOT / "fixtures"

ORACLE_ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ORACLE_ACCEPTANCE_LINES:
        terminalreporter.write_line("")
        terminalreporter.write_line("secondary acceptance:")
        for line in ORACLE_ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def oracle_acceptance_log() -> list[str]:
    return ORACLE_ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def labeled_entries() -> list[dict]:
    path = FIXTURES / "labeled_snippets.jsonl"
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()]


@pytest.fixture(scope="session")
def executable_entries(labeled_entries) -> list[dict]:
    return [e for e in labeled_entries if e["executable"]]


@pytest.fixture(scope="session")
def labeled_snippets_path() -> Path:
    return FIXTURES / "labeled_snippets.jsonl"


@pytest.fixture(scope="session")
def python_exe() -> str:
    return sys.executable
