import json
import subprocess

import pytest

from execoracle.client import OracleClient
from execoracle.protocol import (ObservedInfluence, ProbeRequest, handshake_line,
                                 parse_handshake)


def test_handshake_declares_protocol_version():
    doc = json.loads(handshake_line())
    assert doc["oracle_protocol"] == 1
    parse_handshake(handshake_line())
    with pytest.raises(ValueError):
        parse_handshake(json.dumps({"oracle_protocol": 99}))


def test_request_roundtrip_lossless():
    request = ProbeRequest(code="def f():\n    return 'ü'\n",
                           schema=("race", "age"), seed=7)
    assert ProbeRequest.from_line(request.to_line()) == request


def test_response_roundtrip_lossless():
    obs = ObservedInfluence(accessed_columns=("age", "race"),
                            perturbation_sensitive=("age",),
                            exec_status="ok", error=None)
    assert ObservedInfluence.from_line(obs.to_line()) == obs


def test_response_invariants_enforced():
    with pytest.raises(ValueError):
        ObservedInfluence(accessed_columns=("age",),
                          perturbation_sensitive=("race",), exec_status="ok")
    with pytest.raises(ValueError):
        ObservedInfluence(accessed_columns=("age",), perturbation_sensitive=(),
                          exec_status="runtime_error")


def test_worker_speaks_handshake_first(python_exe):
    proc = subprocess.run(
        [python_exe, "-m", "execoracle"],
        input=ProbeRequest(code="result = 1\n", schema=("age",), seed=1).to_line() + "\n",
        capture_output=True, text=True, timeout=60)
    lines = [line for line in proc.stdout.splitlines() if line.strip()]
    assert len(lines) == 2
    parse_handshake(lines[0])
    obs = ObservedInfluence.from_line(lines[1])
    assert obs.exec_status == "ok"


def test_worker_rejects_garbage_request(python_exe):
    proc = subprocess.run([python_exe, "-m", "execoracle"],
                          input="this is not json\n",
                          capture_output=True, text=True, timeout=60)
    lines = [line for line in proc.stdout.splitlines() if line.strip()]
    obs = ObservedInfluence.from_line(lines[-1])
    assert obs.exec_status == "runtime_error"


def test_client_survives_worker_crash(python_exe, tmp_path):
    # a snippet that kills its own interpreter produces no response line
    client = OracleClient(python=python_exe, timeout=30.0)
    obs = client.probe("import os\nos._exit(9)\n", ["age"], seed=1)
    assert obs.exec_status == "runtime_error"
    assert "no response" in obs.error


def test_client_probe_roundtrip(python_exe):
    client = OracleClient(python=python_exe, timeout=60.0)
    obs = client.probe("def predict(row):\n    return row['age'] * 2\n",
                       ["age", "race"], seed=4)
    assert obs.exec_status == "ok"
    assert obs.perturbation_sensitive == ("age",)
