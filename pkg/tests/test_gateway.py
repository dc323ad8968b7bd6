"""Prompt templates, sanitization, fixture backend, live transport."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from metaforge.ecore import emit_ecore
from metaforge.gateway import (
    SYSTEM_PROMPT_ECORE,
    SYSTEM_PROMPT_PUML,
    BackendConfig,
    FixtureMissError,
    PromptPair,
    TransportError,
    UnusableOutputError,
    build_ecore_prompt,
    build_puml_prompt,
    complete,
    prompt_hash,
    sanitize,
)
from metaforge.model import seed_metamodel
from metaforge.puml import emit_puml


class TestPrompts:
    def test_ecore_system_prompt_verbatim(self):
        pair = build_ecore_prompt("r1", emit_ecore(seed_metamodel()))
        assert pair.system == "You are generating .ecore metamodel without additional comments."

    def test_ecore_user_prompt_slots(self):
        current = emit_ecore(seed_metamodel())
        pair = build_ecore_prompt("r1", current)
        assert pair.user == f"Based on description r1 update Ecore metamodel {current}"

    def test_puml_system_prompt_verbatim(self):
        pair = build_puml_prompt("r1", emit_puml(seed_metamodel()))
        assert pair.system == ("You are generating plantuml metamodel about vehicle "
                               "with no additional comments. Subclass relations should be identified.")
        assert pair.system.endswith("Subclass relations should be identified.")

    def test_puml_user_prompt_slots(self):
        current = emit_puml(seed_metamodel())
        pair = build_puml_prompt("reqs here", current)
        assert pair.user == f"Based on description reqs here update plantuml class diagram {current}"

    def test_substitution_preserves_template_bytes(self):
        # bytes around the slots never change, whatever goes in
        for requirements in ("x", "multi\nline req [brackets]"):
            pair = build_ecore_prompt(requirements, "<doc/>")
            assert pair.user.startswith("Based on description ")
            assert " update Ecore metamodel " in pair.user
            prefix, rest = pair.user.split(" update Ecore metamodel ", 1)
            assert prefix == f"Based on description {requirements}"
            assert rest == "<doc/>"

    def test_empty_requirements_rejected(self):
        with pytest.raises(ValueError):
            build_ecore_prompt("   ", "<doc/>")
        with pytest.raises(ValueError):
            build_puml_prompt("", "@startuml\n@enduml")

    def test_system_prompts_exported_as_constants(self):
        assert SYSTEM_PROMPT_ECORE == build_ecore_prompt("r", "<d/>").system
        assert SYSTEM_PROMPT_PUML == build_puml_prompt("r", "@startuml\n@enduml").system


class TestPromptHash:
    def test_stable(self):
        pair = PromptPair("s", "u")
        assert prompt_hash(pair) == prompt_hash(PromptPair("s", "u"))

    def test_sensitive_to_both_parts(self):
        assert prompt_hash(PromptPair("s", "u")) != prompt_hash(PromptPair("s", "v"))
        assert prompt_hash(PromptPair("s", "u")) != prompt_hash(PromptPair("t", "u"))
        # the system/user boundary matters
        assert prompt_hash(PromptPair("ab", "c")) != prompt_hash(PromptPair("a", "bc"))


class TestSanitize:
    def test_strips_markdown_fences(self):
        raw = "```plantuml\n@startuml\nclass Vehicle\n@enduml\n```"
        assert sanitize(raw, "puml") == "@startuml\nclass Vehicle\n@enduml"

    def test_strips_surrounding_prose(self):
        raw = "Sure, here it is:\n@startuml\nclass A\n@enduml\nHope that helps!"
        assert sanitize(raw, "puml") == "@startuml\nclass A\n@enduml"

    def test_clean_input_is_fixpoint(self):
        clean = "@startuml\nclass Vehicle\n@enduml"
        assert sanitize(clean, "puml") == clean
        doc = emit_ecore(seed_metamodel()).strip()
        assert sanitize(doc, "ecore") == doc

    def test_idempotent(self):
        raw = "noise\n```xml\n<?xml version=\"1.0\"?>\n<x/>\n```\nnoise"
        once = sanitize(raw, "ecore")
        assert sanitize(once, "ecore") == once

    def test_normalizes_line_endings(self):
        raw = "@startuml\r\nclass A\r\n@enduml"
        assert sanitize(raw, "puml") == "@startuml\nclass A\n@enduml"

    def test_missing_markers_unusable(self):
        with pytest.raises(UnusableOutputError):
            sanitize("sure, here it is:", "puml")
        with pytest.raises(UnusableOutputError):
            sanitize("no xml here", "ecore")

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            sanitize("x", "yaml")


class TestBackendConfig:
    def test_fixture_mode_requires_directory(self):
        with pytest.raises(ValueError):
            BackendConfig(mode="fixture", fixture_dir=None)

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            BackendConfig(mode="dream", fixture_dir="x")

    def test_from_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv("MF_LLM_BASE_URL", "http://127.0.0.1:9/v1")
        monkeypatch.setenv("MF_LLM_MODEL", "test-model")
        monkeypatch.setenv("MF_LLM_MODE", "fixture")
        monkeypatch.setenv("MF_FIXTURE_DIR", str(tmp_path))
        config = BackendConfig.from_env()
        assert config.base_url == "http://127.0.0.1:9/v1"
        assert config.model == "test-model"
        assert config.mode == "fixture"
        assert config.fixture_dir == str(tmp_path)


class TestFixtureMode:
    def test_registered_hash_returns_canned_text(self, tmp_path):
        prompt = PromptPair("system", "user")
        digest = prompt_hash(prompt)
        (tmp_path / f"{digest}.json").write_text(json.dumps({
            "text": "@startuml\nclass Vehicle\n@enduml",
            "promptTokens": 480,
            "completionTokens": 167,
        }), encoding="utf-8")
        config = BackendConfig(mode="fixture", fixture_dir=str(tmp_path))
        response = complete(config, prompt)
        assert response.text.startswith("@startuml")
        assert response.prompt_tokens == 480
        assert response.completion_tokens == 167
        assert response.wall_seconds == 0.0

    def test_miss_names_the_hash(self, tmp_path):
        prompt = PromptPair("s", "u")
        config = BackendConfig(mode="fixture", fixture_dir=str(tmp_path))
        with pytest.raises(FixtureMissError) as excinfo:
            complete(config, prompt)
        assert prompt_hash(prompt) in str(excinfo.value)

    def test_deterministic(self, tmp_path):
        prompt = PromptPair("s", "u")
        (tmp_path / f"{prompt_hash(prompt)}.json").write_text(
            json.dumps({"text": "@startuml\n@enduml"}), encoding="utf-8")
        config = BackendConfig(mode="fixture", fixture_dir=str(tmp_path))
        assert complete(config, prompt) == complete(config, prompt)


class _StubHandler(BaseHTTPRequestHandler):
    captured: list = []
    status = 200
    payload: dict = {}

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length))
        type(self).captured.append({
            "path": self.path,
            "authorization": self.headers.get("Authorization"),
            "body": body,
        })
        data = json.dumps(type(self).payload).encode("utf-8")
        self.send_response(type(self).status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    _StubHandler.captured = []
    _StubHandler.status = 200
    _StubHandler.payload = {
        "choices": [{"message": {"content": "@startuml\nclass Vehicle\n@enduml"}}],
        "usage": {"prompt_tokens": 12, "completion_tokens": 34},
    }
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}/v1", _StubHandler
    server.shutdown()
    thread.join(timeout=5)


class TestLiveMode:
    def test_request_shape(self, stub_server, monkeypatch):
        base_url, handler = stub_server
        monkeypatch.setenv("MF_LLM_API_KEY", "sk-test-123")
        config = BackendConfig(base_url=base_url, model="gpt-4o", mode="live")
        prompt = PromptPair("sys text", "user text")
        response = complete(config, prompt)

        assert response.text == "@startuml\nclass Vehicle\n@enduml"
        assert response.prompt_tokens == 12
        assert response.completion_tokens == 34
        assert response.wall_seconds > 0

        request = handler.captured[0]
        assert request["path"] == "/v1/chat/completions"
        assert request["authorization"] == "Bearer sk-test-123"
        body = request["body"]
        assert body["model"] == "gpt-4o"
        assert body["temperature"] == 0
        assert [m["role"] for m in body["messages"]] == ["system", "user"]
        assert body["messages"][0]["content"] == "sys text"
        assert body["messages"][1]["content"] == "user text"

    def test_non_2xx_is_transport_error(self, stub_server):
        base_url, handler = stub_server
        handler.status = 503
        handler.payload = {"error": "overloaded"}
        config = BackendConfig(base_url=base_url, mode="live")
        with pytest.raises(TransportError) as excinfo:
            complete(config, PromptPair("s", "u"))
        assert excinfo.value.status == 503
        assert "overloaded" in excinfo.value.body_excerpt

    def test_connection_failure_is_transport_error(self):
        config = BackendConfig(base_url="http://127.0.0.1:9/v1", mode="live", timeout_seconds=0.5)
        with pytest.raises(TransportError):
            complete(config, PromptPair("s", "u"))

    def test_missing_usage_defaults_to_zero(self, stub_server):
        base_url, handler = stub_server
        handler.payload = {"choices": [{"message": {"content": "@startuml\n@enduml"}}]}
        config = BackendConfig(base_url=base_url, mode="live")
        response = complete(config, PromptPair("s", "u"))
        assert response.prompt_tokens == 0
        assert response.completion_tokens == 0
