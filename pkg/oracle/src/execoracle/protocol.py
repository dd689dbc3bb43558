"""Line-delimited JSON wire protocol: a version handshake line, then one
request/response exchange per subprocess."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from . import PROTOCOL_VERSION, __version__

EXEC_OK = "ok"
EXEC_RUNTIME_ERROR = "runtime_error"
EXEC_TIMEOUT = "timeout"


def handshake_line() -> str:
    return json.dumps({"oracle_protocol": PROTOCOL_VERSION, "version": __version__})


def parse_handshake(line: str) -> dict:
    doc = json.loads(line)
    if doc.get("oracle_protocol") != PROTOCOL_VERSION:
        raise ValueError(f"unsupported oracle protocol: {doc!r}")
    return doc


@dataclass(frozen=True)
class ProbeRequest:
    code: str
    schema: tuple[str, ...]
    seed: int

    def to_line(self) -> str:
        return json.dumps({"code": self.code, "schema": list(self.schema),
                           "seed": self.seed}, ensure_ascii=False)

    @classmethod
    def from_line(cls, line: str) -> "ProbeRequest":
        doc = json.loads(line)
        return cls(code=doc["code"], schema=tuple(doc["schema"]), seed=int(doc["seed"]))


@dataclass(frozen=True)
class ObservedInfluence:
    accessed_columns: tuple[str, ...]
    perturbation_sensitive: tuple[str, ...]
    exec_status: str  # ok | runtime_error | timeout
    error: Optional[str] = None

    def __post_init__(self):
        if not set(self.perturbation_sensitive) <= set(self.accessed_columns):
            raise ValueError("perturbation_sensitive must be a subset of accessed_columns")
        if self.exec_status != EXEC_OK and (self.accessed_columns
                                            or self.perturbation_sensitive):
            raise ValueError("failed probes must report empty column sets")

    def to_line(self) -> str:
        return json.dumps({
            "accessed_columns": list(self.accessed_columns),
            "perturbation_sensitive": list(self.perturbation_sensitive),
            "exec_status": self.exec_status,
            "error": self.error,
        }, ensure_ascii=False)

    @classmethod
    def from_line(cls, line: str) -> "ObservedInfluence":
        doc = json.loads(line)
        return cls(accessed_columns=tuple(doc["accessed_columns"]),
                   perturbation_sensitive=tuple(doc["perturbation_sensitive"]),
                   exec_status=doc["exec_status"], error=doc.get("error"))
