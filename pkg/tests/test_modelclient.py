import json
import threading
import time
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from codebias.corpus import (Difficulty, MitigationStrategy, build_instance,
                             load_builtin_spec, load_template_bank)
from codebias.modelclient import (FixtureStore, GenerationConfig, ModelClient,
                                  TransportError, extract_code_block, request_key)


@pytest.fixture(scope="module")
def instance():
    spec = load_builtin_spec("insurance")
    return build_instance(spec, 0, "conditional", Difficulty(), MitigationStrategy(),
                          7, load_template_bank())


# -- code-block extraction -------------------------------------------------------

def test_extract_single_fence():
    block = extract_code_block("```python\nx=1\n```")
    assert block.text == "x=1"
    assert block.lang == "python"


def test_extract_no_fence_is_absent():
    assert extract_code_block("no code here, just prose") is None


def test_extract_first_of_two_blocks():
    raw = "```python\nfirst = 1\n```\nand then\n```python\nsecond = 2\n```"
    assert extract_code_block(raw).text == "first = 1"


def test_extract_tolerates_missing_trailing_newline():
    assert extract_code_block("```python\nx=1```").text == "x=1"


def test_extract_unclosed_fence_is_absent():
    assert extract_code_block("```python\nx=1\n") is None


def test_extract_preserves_untagged_fence():
    block = extract_code_block("prefix text\n```\ny = 2\n```")
    assert block.text == "y = 2"
    assert block.lang == ""


def test_extract_keeps_interior_newlines():
    block = extract_code_block("```python\na=1\n\n\nb=2\n\n```")
    assert block.text == "a=1\n\n\nb=2\n"


# -- request keys ------------------------------------------------------------------

def test_request_key_distinguishes_fields():
    base = request_key("m", "p", 0.0, 512)
    assert base == request_key("m", "p", 0.0, 512)
    assert base != request_key("m2", "p", 0.0, 512)
    assert base != request_key("m", "p2", 0.0, 512)
    assert base != request_key("m", "p", 0.5, 512)
    assert base != request_key("m", "p", 0.0, 2048)


# -- fixture store ------------------------------------------------------------------

def test_store_roundtrip_bit_exact(tmp_path):
    path = tmp_path / "store.jsonl"
    store = FixtureStore(path)
    completion = "line one\n\tunicode: é\\n literal\nlast"
    assert store.put("k1", "m", "prompt", completion)
    reloaded = FixtureStore(path)
    assert reloaded.get("k1")["completion"] == completion


def test_store_put_skips_existing(tmp_path):
    store = FixtureStore(tmp_path / "s.jsonl")
    assert store.put("k", "m", "p", "one")
    assert not store.put("k", "m", "p", "two")
    assert store.get("k")["completion"] == "one"
    assert len(store) == 1


def test_record_mode_records_each_request_once(tmp_path, instance):
    calls = []

    def transport(endpoint, body):
        calls.append(body)
        return "```python\nx=1\n```"

    store = FixtureStore(tmp_path / "rec.jsonl")
    client = ModelClient(store=store, mode="record", transport=transport)
    config = GenerationConfig(model_id="m", endpoint="http://example/v1")
    client.generate(instance, config)
    client.generate(instance, config)
    assert len(calls) == 2  # both calls hit the transport
    assert len(store) == 1  # but the fixture entry is single


def test_replay_hit_returns_verbatim(tmp_path, instance):
    store = FixtureStore(tmp_path / "s.jsonl")
    config = GenerationConfig(model_id="m")
    key = request_key("m", instance.rendered_text, 0.0, 512)
    store.put(key, "m", instance.rendered_text, "```python\nanswer = 42\n```")
    client = ModelClient(store=store, mode="replay")
    sample = client.generate(instance, config)
    assert sample.status == "ok"
    assert sample.code == "answer = 42"
    assert sample.code_lang == "python"


def test_replay_miss_names_key(tmp_path, instance):
    store = FixtureStore(tmp_path / "s.jsonl")
    client = ModelClient(store=store, mode="replay")
    config = GenerationConfig(model_id="m")
    sample = client.generate(instance, config)
    assert sample.status == "transport_error"
    expected_key = request_key("m", instance.rendered_text, 0.0, 512)
    assert expected_key in sample.error


def test_no_code_block_status(tmp_path, instance):
    store = FixtureStore(tmp_path / "s.jsonl")
    key = request_key("m", instance.rendered_text, 0.0, 512)
    store.put(key, "m", instance.rendered_text, "Sorry, I cannot help with that.")
    client = ModelClient(store=store, mode="replay")
    sample = client.generate(instance, GenerationConfig(model_id="m"))
    assert sample.status == "no_code_block"
    assert sample.code is None


def test_transport_retries_then_succeeds(instance):
    attempts = []

    def flaky(endpoint, body):
        attempts.append(1)
        if len(attempts) < 3:
            raise OSError("connection reset")
        return "```python\nok = True\n```"

    client = ModelClient(mode="live", transport=flaky, backoff_base=0.0)
    sample = client.generate(instance, GenerationConfig(model_id="m", endpoint="http://x"))
    assert sample.status == "ok"
    assert len(attempts) == 3


def test_transport_exhausts_retries(instance):
    def broken(endpoint, body):
        raise OSError("down")

    client = ModelClient(mode="live", transport=broken, backoff_base=0.0)
    sample = client.generate(instance, GenerationConfig(model_id="m", endpoint="http://x"))
    assert sample.status == "transport_error"
    assert "3 attempts" in sample.error


def test_generate_many_restores_order(tmp_path):
    spec = load_builtin_spec("income")
    bank = load_template_bank()
    instances = [build_instance(spec, i, "conditional", Difficulty(),
                                MitigationStrategy(), 7, bank) for i in range(6)]

    def slow_when_early(endpoint, body):
        delay = 0.05 if "0" in body["messages"][0]["content"][:400] else 0.0
        time.sleep(delay)
        return f"```python\nn = {len(body['messages'][0]['content'])}\n```"

    client = ModelClient(mode="live", transport=slow_when_early, max_parallel=4)
    out = client.generate_many(instances, GenerationConfig(model_id="m", endpoint="http://x"))
    assert [s.instance.variant_index for s in out] == list(range(6))


def test_config_validation():
    with pytest.raises(ValueError):
        GenerationConfig(model_id="m", temperature=-1)
    with pytest.raises(ValueError):
        GenerationConfig(model_id="m", max_tokens=0)
    with pytest.raises(ValueError):
        ModelClient(mode="replay")  # store required


# -- live wire format ----------------------------------------------------------------

class _ChatHandler(BaseHTTPRequestHandler):
    seen = []

    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        type(self).seen.append({"body": body, "auth": self.headers.get("X-Api-Key")})
        payload = {"choices": [{"message": {"role": "assistant",
                                            "content": "```python\npong = 1\n```"}}]}
        data = json.dumps(payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


def test_http_transport_chat_body_and_auth(monkeypatch, instance):
    server = HTTPServer(("127.0.0.1", 0), _ChatHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        monkeypatch.setenv("CODEBIAS_API_TOKEN", "sekrit")
        endpoint = f"http://127.0.0.1:{server.server_port}/v1/chat/completions"
        client = ModelClient(mode="live", auth_header="X-Api-Key")
        config = GenerationConfig(model_id="live-model", endpoint=endpoint,
                                  temperature=0.0, max_tokens=64)
        sample = client.generate(instance, config)
        assert sample.status == "ok" and sample.code == "pong = 1"
        body = _ChatHandler.seen[-1]["body"]
        assert body["model"] == "live-model"
        assert body["messages"] == [{"role": "user", "content": instance.rendered_text}]
        assert body["temperature"] == 0.0 and body["max_tokens"] == 64
        assert _ChatHandler.seen[-1]["auth"] == "sekrit"
    finally:
        server.shutdown()
