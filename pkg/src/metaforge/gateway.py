"""LLM gateway: prompt construction, chat-completion transport, response
sanitization and token/latency accounting.

Two backends share one interface: `live` posts to an OpenAI-compatible
chat-completions endpoint; `fixture` serves canned responses keyed by a
stable hash of the prompt pair, which keeps the whole pipeline
deterministic and network-free for tests and offline replay.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path

import requests

logger = logging.getLogger(__name__)

SYSTEM_PROMPT_ECORE = "You are generating .ecore metamodel without additional comments."
USER_TEMPLATE_ECORE = "Based on description [requirements] update Ecore metamodel [current metamodel]"
SYSTEM_PROMPT_PUML = (
    "You are generating plantuml metamodel about vehicle with no additional comments. "
    "Subclass relations should be identified."
)
USER_TEMPLATE_PUML = "Based on description [requirements] update plantuml class diagram [current plantuml]"

ENV_BASE_URL = "MF_LLM_BASE_URL"
ENV_MODEL = "MF_LLM_MODEL"
ENV_API_KEY = "MF_LLM_API_KEY"
ENV_MODE = "MF_LLM_MODE"
ENV_FIXTURE_DIR = "MF_FIXTURE_DIR"

MODE_LIVE = "live"
MODE_FIXTURE = "fixture"


class TransportError(RuntimeError):
    """The chat-completion request failed at the HTTP level."""

    def __init__(self, message: str, status: int | None = None, body_excerpt: str = ""):
        self.status = status
        self.body_excerpt = body_excerpt
        detail = f" (status {status})" if status is not None else ""
        excerpt = f": {body_excerpt}" if body_excerpt else ""
        super().__init__(f"{message}{detail}{excerpt}")


class FixtureMissError(LookupError):
    """No canned response is registered for this prompt hash."""

    def __init__(self, prompt_digest: str, fixture_dir: Path):
        self.prompt_digest = prompt_digest
        super().__init__(f"no fixture for prompt {prompt_digest} in {fixture_dir}")


class UnusableOutputError(ValueError):
    """The model response lacks the structural markers of the target format."""


@dataclass(frozen=True)
class PromptPair:
    system: str
    user: str


@dataclass(frozen=True)
class LlmResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    wall_seconds: float = 0.0


@dataclass(frozen=True)
class BackendConfig:
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    api_key_ref: str = ENV_API_KEY
    timeout_seconds: float = 120.0
    mode: str = MODE_FIXTURE
    fixture_dir: str | None = None

    def __post_init__(self):
        if self.mode not in (MODE_LIVE, MODE_FIXTURE):
            raise ValueError(f"unknown backend mode '{self.mode}'")
        if self.mode == MODE_FIXTURE and not self.fixture_dir:
            raise ValueError("fixture mode requires a fixture directory")
        if self.timeout_seconds <= 0:
            raise ValueError("timeoutSeconds must be positive")

    @classmethod
    def from_env(cls, env=os.environ, *, mode: str | None = None) -> "BackendConfig":
        resolved = mode or env.get(ENV_MODE, MODE_FIXTURE)
        return cls(
            base_url=env.get(ENV_BASE_URL, cls.base_url),
            model=env.get(ENV_MODEL, cls.model),
            api_key_ref=ENV_API_KEY,
            timeout_seconds=float(env.get("MF_LLM_TIMEOUT", "120")),
            mode=resolved,
            fixture_dir=env.get(ENV_FIXTURE_DIR) if resolved == MODE_FIXTURE else None,
        )


def build_ecore_prompt(requirements: str, current_ecore: str) -> PromptPair:
    """Prompt pair asking for an updated Ecore metamodel."""
    if not requirements.strip():
        raise ValueError("requirements must be non-empty")
    user = USER_TEMPLATE_ECORE.replace("[requirements]", requirements)
    user = user.replace("[current metamodel]", current_ecore)
    return PromptPair(SYSTEM_PROMPT_ECORE, user)


def build_puml_prompt(requirements: str, current_puml: str) -> PromptPair:
    """Prompt pair asking for an updated PlantUML class diagram."""
    if not requirements.strip():
        raise ValueError("requirements must be non-empty")
    user = USER_TEMPLATE_PUML.replace("[requirements]", requirements)
    user = user.replace("[current plantuml]", current_puml)
    return PromptPair(SYSTEM_PROMPT_PUML, user)


def prompt_hash(prompt: PromptPair) -> str:
    digest = hashlib.sha256()
    digest.update(prompt.system.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt.user.encode("utf-8"))
    return digest.hexdigest()[:16]


def _complete_fixture(config: BackendConfig, prompt: PromptPair) -> LlmResponse:
    fixture_dir = Path(config.fixture_dir)
    digest = prompt_hash(prompt)
    path = fixture_dir / f"{digest}.json"
    if not path.is_file():
        raise FixtureMissError(digest, fixture_dir)
    payload = json.loads(path.read_text(encoding="utf-8"))
    return LlmResponse(
        text=payload["text"],
        prompt_tokens=int(payload.get("promptTokens", 0)),
        completion_tokens=int(payload.get("completionTokens", 0)),
        wall_seconds=0.0,
    )


def _complete_live(config: BackendConfig, prompt: PromptPair) -> LlmResponse:
    url = config.base_url.rstrip("/") + "/chat/completions"
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(config.api_key_ref, "")
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    body = {
        "model": config.model,
        "messages": [
            {"role": "system", "content": prompt.system},
            {"role": "user", "content": prompt.user},
        ],
        "temperature": 0,
    }
    started = time.perf_counter()
    try:
        response = requests.post(url, headers=headers, json=body, timeout=config.timeout_seconds)
    except requests.RequestException as exc:
        raise TransportError(f"chat completion request failed: {exc}") from exc
    wall = time.perf_counter() - started
    if not 200 <= response.status_code < 300:
        raise TransportError("chat completion rejected", response.status_code, response.text[:200])
    payload = response.json()
    try:
        text = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise TransportError(f"malformed completion payload: {exc}", response.status_code) from exc
    usage = payload.get("usage") or {}
    if not usage:
        logger.warning("backend returned no usage block; token counts recorded as 0")
    return LlmResponse(
        text=text,
        prompt_tokens=int(usage.get("prompt_tokens", 0)),
        completion_tokens=int(usage.get("completion_tokens", 0)),
        wall_seconds=wall,
    )


def complete(config: BackendConfig, prompt: PromptPair) -> LlmResponse:
    """Run one chat completion against the configured backend."""
    if config.mode == MODE_FIXTURE:
        return _complete_fixture(config, prompt)
    return _complete_live(config, prompt)


def sanitize(text: str, kind: str) -> str:
    """Cut model chatter down to the usable document.

    Strips Markdown fences and any prose outside the structural markers:
    @startuml/@enduml for PlantUML, the first '<' and last '>' for Ecore.
    Line endings are normalized to LF. Idempotent. Raises
    UnusableOutputError when the markers are missing.
    """
    if kind not in ("puml", "ecore"):
        raise ValueError(f"unknown sanitize kind '{kind}'")
    normalized = text.replace("\r\n", "\n").replace("\r", "\n")
    if kind == "puml":
        start = normalized.find("@startuml")
        end = normalized.rfind("@enduml")
        if start == -1 or end == -1 or end < start:
            raise UnusableOutputError("output lacks @startuml/@enduml markers")
        return normalized[start:end + len("@enduml")]
    start = normalized.find("<")
    end = normalized.rfind(">")
    if start == -1 or end == -1 or end < start:
        raise UnusableOutputError("output lacks XML angle-bracket markers")
    return normalized[start:end + 1]
