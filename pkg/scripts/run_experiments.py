#!/usr/bin/env python3
"""Run every experiment offline against the bundled replay fixtures.

Produces runs/main (per-attribute bias, tests, code-type comparison,
sensitive-vs-irrelevant contrast), runs/sweep (attribute-count curve),
runs/difficulty (tier table with code lengths), and runs/detect (usage
detection accuracy). Everything replays from fixtures/replay, so this needs
no network and finishes in seconds.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from codebias.cli import main as cli  # noqa: E402

STORE = str(ROOT / "fixtures" / "replay" / "completions.jsonl")
CFG = ROOT / "fixtures" / "configs"


def run(*argv):
    code = cli(list(argv))
    if code != 0:
        raise SystemExit(f"command failed ({code}): {' '.join(argv)}")


def main():
    out = ROOT / "runs"
    run("generate", "--config", str(CFG / "main.cfg"), "--replay", STORE,
        "--out", str(out / "main"))
    run("audit", "--config", str(CFG / "main.cfg"), "--run", str(out / "main"))
    run("report", "--run", str(out / "main"))
    run("sweep", "--config", str(CFG / "sweep.cfg"), "--replay", STORE,
        "--out", str(out / "sweep"))
    run("difficulty", "--config", str(CFG / "difficulty.cfg"), "--replay", STORE,
        "--out", str(out / "difficulty"))
    run("detect", "--config", str(CFG / "detect.cfg"), "--replay", STORE,
        "--out", str(out / "detect"))
    print(f"\nall experiment artifacts under {out}/")


if __name__ == "__main__":
    main()
