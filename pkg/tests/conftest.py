import json
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log() -> list[str]:
    return ACCEPTANCE_LINES


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def replay_store_path() -> Path:
    return FIXTURES / "replay" / "completions.jsonl"


@pytest.fixture(scope="session")
def main_config_path() -> Path:
    return FIXTURES / "configs" / "main.cfg"


@pytest.fixture(scope="session")
def labeled_snippets() -> list[dict]:
    path = FIXTURES / "labeled_snippets.jsonl"
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()]


@pytest.fixture(scope="session")
def kill_snippets() -> list[dict]:
    path = FIXTURES / "kill_snippets.jsonl"
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()
            if line.strip()]


@pytest.fixture(scope="session")
def ztest_oracle_table() -> dict:
    return json.loads((FIXTURES / "ztest_oracle.json").read_text(encoding="utf-8"))
