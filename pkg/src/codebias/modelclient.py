"""Chat-completion client with a record/replay fixture layer.

Every request is keyed by sha256 over (model_id, prompt text, temperature,
max_tokens). In record mode live responses are appended to a JSONL store; in
replay mode the store is the only source, so full corpus runs are offline and
byte-deterministic regardless of worker count (results are assembled in
prompt order, never completion order).
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .corpus import PromptInstance

STATUS_OK = "ok"
STATUS_NO_CODE_BLOCK = "no_code_block"
STATUS_TRANSPORT_ERROR = "transport_error"

DEFAULT_TOKEN_ENV = "CODEBIAS_API_TOKEN"

_FENCE_RE = re.compile(r"```[ \t]*([A-Za-z0-9_+.-]*)[ \t]*\r?\n(.*?)```", re.DOTALL)


class TransportError(RuntimeError):
    """Transport-level failure (HTTP failure after retries, or replay miss)."""


@dataclass(frozen=True)
class GenerationConfig:
    model_id: str
    temperature: float = 0.0  # 0 = greedy
    max_tokens: int = 512     # sweep runs raise this to 2048
    endpoint: str = "replay"  # URL, or the literal "replay"

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class CodeBlock:
    text: str
    lang: str


@dataclass
class GeneratedSample:
    instance: PromptInstance
    config: GenerationConfig
    raw_completion: Optional[str]
    code: Optional[str]
    code_lang: Optional[str]
    status: str
    error: Optional[str] = None


def request_key(model_id: str, prompt: str, temperature: float, max_tokens: int) -> str:
    """Injective (up to hash collision) key over the request quadruple."""
    payload = json.dumps(
        {"model": model_id, "prompt": prompt, "temperature": temperature,
         "max_tokens": max_tokens},
        sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def extract_code_block(raw: str) -> Optional[CodeBlock]:
    """Contents of the first complete fenced block, or None.

    The fence language tag is ignored for extraction but kept as metadata. A
    missing newline before the closing fence is tolerated; an opening fence
    with no close yields None.
    """
    if raw is None:
        return None
    match = _FENCE_RE.search(raw)
    if match is None:
        return None
    text = match.group(2)
    if text.endswith("\n"):
        text = text[:-1]
    return CodeBlock(text=text, lang=match.group(1))


class FixtureStore:
    """Append-only JSONL store of recorded completions, keyed by request hash.

    Reads are lock-free after load; writes are serialized. Round-trips are
    bit-exact because completions are stored as JSON strings.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._records: dict[str, dict] = {}
        self._lock = threading.Lock()
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._records[rec["key"]] = rec

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: str) -> bool:
        return key in self._records

    def get(self, key: str) -> Optional[dict]:
        return self._records.get(key)

    def put(self, key: str, model_id: str, prompt: str, completion: str) -> bool:
        """Record a completion; returns False if the key was already present."""
        with self._lock:
            if key in self._records:
                return False
            rec = {
                "key": key,
                "model_id": model_id,
                "prompt_sha": hashlib.sha256(prompt.encode("utf-8")).hexdigest(),
                "completion": completion,
                "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            }
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            self._records[key] = rec
            return True

    def sha256(self) -> str:
        if not self.path.exists():
            return "none"
        return hashlib.sha256(self.path.read_bytes()).hexdigest()


class ModelClient:
    """Prompt dispatcher; shareable across workers.

    mode: "replay" (store only), "record" (live, persisting responses), or
    "live" (no persistence). Live transport retries transient failures 3
    times with exponential backoff before surfacing a transport_error sample.
    """

    def __init__(self, store: Optional[FixtureStore] = None, mode: str = "replay",
                 auth_header: str = "Authorization", token_env: str = DEFAULT_TOKEN_ENV,
                 max_retries: int = 3, backoff_base: float = 0.5,
                 max_parallel: int = 8, transport=None):
        if mode not in ("replay", "record", "live"):
            raise ValueError(f"unknown client mode: {mode}")
        if mode in ("replay", "record") and store is None:
            raise ValueError(f"{mode} mode requires a fixture store")
        self.store = store
        self.mode = mode
        self.auth_header = auth_header
        self.token_env = token_env
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.max_parallel = max_parallel
        # injectable transport(endpoint, body) -> completion str, for tests
        self._transport = transport or self._http_transport

    # -- low-level ---------------------------------------------------------

    def complete(self, prompt: str, config: GenerationConfig) -> str:
        """Raw completion for a prompt; raises TransportError on failure."""
        key = request_key(config.model_id, prompt, config.temperature, config.max_tokens)
        if self.mode == "replay":
            rec = self.store.get(key)
            if rec is None:
                raise TransportError(f"replay miss: no fixture for key {key}")
            return rec["completion"]
        completion = self._call_with_retries(prompt, config)
        if self.mode == "record":
            self.store.put(key, config.model_id, prompt, completion)
        return completion

    def _call_with_retries(self, prompt: str, config: GenerationConfig) -> str:
        body = {
            "model": config.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": config.temperature,
            "max_tokens": config.max_tokens,
        }
        last: Exception = TransportError("no attempt made")
        for attempt in range(self.max_retries):
            try:
                return self._transport(config.endpoint, body)
            except Exception as exc:  # transient transport failure
                last = exc
                if attempt + 1 < self.max_retries:
                    time.sleep(self.backoff_base * (2 ** attempt))
        raise TransportError(f"transport failed after {self.max_retries} attempts: {last}")

    def _http_transport(self, endpoint: str, body: dict) -> str:
        data = json.dumps(body).encode("utf-8")
        req = urllib.request.Request(endpoint, data=data, method="POST")
        req.add_header("Content-Type", "application/json")
        token = os.environ.get(self.token_env)
        if token:
            value = token if self.auth_header != "Authorization" else f"Bearer {token}"
            req.add_header(self.auth_header, value)
        with urllib.request.urlopen(req, timeout=120) as resp:
            payload = json.loads(resp.read().decode("utf-8"))
        return payload["choices"][0]["message"]["content"]

    # -- sample-level ------------------------------------------------------

    def generate(self, instance: PromptInstance, config: GenerationConfig) -> GeneratedSample:
        try:
            raw = self.complete(instance.rendered_text, config)
        except TransportError as exc:
            return GeneratedSample(instance=instance, config=config, raw_completion=None,
                                   code=None, code_lang=None,
                                   status=STATUS_TRANSPORT_ERROR, error=str(exc))
        block = extract_code_block(raw)
        if block is None:
            return GeneratedSample(instance=instance, config=config, raw_completion=raw,
                                   code=None, code_lang=None, status=STATUS_NO_CODE_BLOCK)
        return GeneratedSample(instance=instance, config=config, raw_completion=raw,
                               code=block.text, code_lang=block.lang, status=STATUS_OK)

    def generate_many(self, instances: Sequence[PromptInstance],
                      config: GenerationConfig) -> list[GeneratedSample]:
        """Bounded-parallel generation; results in instance order."""
        workers = max(1, self.max_parallel)
        if workers == 1 or len(instances) <= 1:
            return [self.generate(inst, config) for inst in instances]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda inst: self.generate(inst, config), instances))
