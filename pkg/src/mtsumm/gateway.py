"""Uniform client for chat-completion backends, plus a deterministic mock.

The live backend speaks the OpenAI-compatible chat-completion JSON protocol;
the whole prompt travels as a single user message. Transient failures are
retried with exponential backoff. Every live call is appended to a JSONL
audit log (prompt hash, params, response length) -- never the prompt text
itself.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import requests

from .prompts import PromptBundle

logger = logging.getLogger(__name__)

API_KEY_ENV = "MTSUMM_API_KEY"
BASE_URL_ENV = "MTSUMM_BASE_URL"

RETRY_ATTEMPTS = 3
RETRY_WAITS = (1.0, 2.0, 4.0)


class GatewayError(RuntimeError):
    pass


class BackendUnavailableError(GatewayError):
    pass


class RequestRejectedError(GatewayError):
    pass


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.1
    top_p: float = 0.95
    max_output_tokens: int = 400
    model_name: str = "gpt-3.5-turbo-0613"

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must be in (0, 1], got {self.top_p}")
        if self.max_output_tokens <= 0:
            raise ValueError(f"max_output_tokens must be > 0, got {self.max_output_tokens}")


@dataclass(frozen=True)
class GatewayResponse:
    text: str
    latency_ms: int
    backend_id: str


def _prompt_text(prompt: PromptBundle | str) -> str:
    return prompt.text if isinstance(prompt, PromptBundle) else prompt


def _prompt_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class OpenAIChatGateway:
    """Live backend. API key and base URL come from the environment unless
    passed explicitly. Safe for concurrent calls; a semaphore bounds the
    number of requests in flight."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 max_in_flight: int = 4, audit_path: str | Path | None = None,
                 timeout: float = 120.0, session: requests.Session | None = None):
        self.base_url = (base_url or os.environ.get(BASE_URL_ENV)
                         or "https://api.openai.com/v1").rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.timeout = timeout
        self._session = session or requests.Session()
        self._semaphore = threading.Semaphore(max_in_flight)
        self._audit_path = Path(audit_path) if audit_path else None
        self._audit_lock = threading.Lock()

    def complete(self, prompt: PromptBundle | str,
                 params: GenerationParams | None = None) -> GatewayResponse:
        params = params or GenerationParams()
        text = _prompt_text(prompt)
        body = {
            "model": params.model_name,
            "messages": [{"role": "user", "content": text}],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_output_tokens,
        }
        start = time.monotonic()
        retries = 0
        last_error: Exception | None = None
        with self._semaphore:
            for attempt in range(RETRY_ATTEMPTS):
                if attempt:
                    time.sleep(RETRY_WAITS[attempt - 1])
                    retries += 1
                try:
                    resp = self._session.post(
                        f"{self.base_url}/chat/completions",
                        json=body,
                        headers={"Authorization": f"Bearer {self.api_key}"},
                        timeout=self.timeout,
                    )
                except requests.RequestException as exc:
                    last_error = exc
                    logger.warning("gateway transport error (attempt %d): %s", attempt + 1, exc)
                    continue
                if resp.status_code == 429 or resp.status_code >= 500:
                    last_error = GatewayError(f"HTTP {resp.status_code}")
                    logger.warning("gateway transient HTTP %d (attempt %d)",
                                   resp.status_code, attempt + 1)
                    continue
                if resp.status_code >= 400:
                    raise RequestRejectedError(
                        f"request rejected: HTTP {resp.status_code}: {resp.text[:200]}"
                    )
                payload = resp.json()
                completion = payload["choices"][0]["message"]["content"]
                latency_ms = int((time.monotonic() - start) * 1000)
                self._audit(text, params, completion, latency_ms, retries)
                return GatewayResponse(completion, latency_ms, params.model_name)
        raise BackendUnavailableError(f"backend unavailable after {RETRY_ATTEMPTS} attempts: "
                                      f"{last_error}")

    def _audit(self, prompt_text: str, params: GenerationParams,
               completion: str, latency_ms: int, retry_count: int) -> None:
        if self._audit_path is None:
            return
        record = {
            "prompt_sha256": _prompt_hash(prompt_text),
            "model": params.model_name,
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_output_tokens": params.max_output_tokens,
            "response_chars": len(completion),
            "latency_ms": latency_ms,
            "retry_count": retry_count,
        }
        with self._audit_lock:
            with open(self._audit_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record) + "\n")


@dataclass
class MockGateway:
    """Deterministic in-memory backend for tests and offline runs.

    Responses are selected by, in order: exact prompt hash, then the first
    rule whose substrings all occur in the prompt, then the default. The
    same prompt always yields the same response.
    """

    by_hash: dict[str, str] = field(default_factory=dict)
    rules: Sequence[tuple[tuple[str, ...], str]] = ()
    default: str | None = None
    fail_with: Callable[[str], Exception | None] | None = None

    def complete(self, prompt: PromptBundle | str,
                 params: GenerationParams | None = None) -> GatewayResponse:
        text = _prompt_text(prompt)
        if self.fail_with is not None:
            exc = self.fail_with(text)
            if exc is not None:
                raise exc
        digest = _prompt_hash(text)
        if digest in self.by_hash:
            return GatewayResponse(self.by_hash[digest], 0, "mock")
        for needles, response in self.rules:
            if all(n in text for n in needles):
                return GatewayResponse(response, 0, "mock")
        if self.default is not None:
            return GatewayResponse(self.default, 0, "mock")
        raise BackendUnavailableError("backend unavailable: no mock response for prompt")


class ScriptedGateway:
    """Replays a fixed sequence of responses; for multi-phase tests."""

    def __init__(self, responses: Sequence[str]):
        self._responses = list(responses)
        self.calls: list[str] = []

    def complete(self, prompt: PromptBundle | str,
                 params: GenerationParams | None = None) -> GatewayResponse:
        self.calls.append(_prompt_text(prompt))
        if not self._responses:
            raise BackendUnavailableError("backend unavailable: script exhausted")
        return GatewayResponse(self._responses.pop(0), 0, "scripted")
