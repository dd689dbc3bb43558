"""Harness-side client: one subprocess per probe with a wall-clock limit.

Worker failures of any kind (crash, timeout, garbage output) surface as an
ObservedInfluence with a non-ok exec_status; they never raise into the caller.
"""

from __future__ import annotations

import subprocess
import sys

from .protocol import ObservedInfluence, ProbeRequest, parse_handshake

DEFAULT_TIMEOUT = 10.0


class OracleClient:
    def __init__(self, python: str = sys.executable, timeout: float = DEFAULT_TIMEOUT):
        self.python = python
        self.timeout = timeout

    def probe(self, code: str, schema, seed: int) -> ObservedInfluence:
        request = ProbeRequest(code=code, schema=tuple(schema), seed=seed)
        proc = subprocess.Popen(
            [self.python, "-m", "execoracle"],
            stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
            text=True)
        try:
            out, err = proc.communicate(request.to_line() + "\n", timeout=self.timeout)
        except subprocess.TimeoutExpired:
            proc.kill()
            proc.communicate()
            return ObservedInfluence((), (), "timeout",
                                     f"wall clock limit of {self.timeout}s exceeded")
        lines = [line for line in out.splitlines() if line.strip()]
        if len(lines) < 2:
            digest = err.strip().splitlines()[-1] if err.strip() else "no response"
            return ObservedInfluence((), (), "runtime_error",
                                     f"worker produced no response: {digest}")
        try:
            parse_handshake(lines[0])
            return ObservedInfluence.from_line(lines[-1])
        except Exception as exc:
            return ObservedInfluence((), (), "runtime_error",
                                     f"malformed worker output: {exc}")
