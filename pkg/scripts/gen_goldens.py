#!/usr/bin/env python3
"""Regenerate the committed golden artifacts for the main replay run.

Runs generate -> audit -> report against the bundled fixture store into a
temp directory and copies cells.csv, tests.csv, and comparison.csv into
fixtures/golden/. Only rerun after a deliberate fixture or formatting change;
the acceptance suite enforces byte equality against these files.
"""

import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from codebias.cli import main as cli_main  # noqa: E402

GOLDEN_DIR = ROOT / "fixtures" / "golden"
CONFIG = str(ROOT / "fixtures" / "configs" / "main.cfg")
STORE = str(ROOT / "fixtures" / "replay" / "completions.jsonl")


def run() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        for argv in (
            ["generate", "--config", CONFIG, "--replay", STORE, "--out", tmp],
            ["audit", "--config", CONFIG, "--run", tmp],
            ["report", "--run", tmp],
        ):
            code = cli_main(argv)
            if code != 0:
                raise SystemExit(f"{argv[0]} exited {code}")
        GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
        for name in ("cells.csv", "tests.csv", "comparison.csv"):
            shutil.copy(Path(tmp) / name, GOLDEN_DIR / name)
            print(f"froze {GOLDEN_DIR / name}")


if __name__ == "__main__":
    run()
