"""Provider-neutral language model gateway.

The gateway owns retries, backoff, timeouts, idempotency, and concurrency
limits so callers see one blocking call that either returns text or raises
a typed error. Providers are pluggable; the scripted mock provider makes
every code path reproducible without network access.
"""
from __future__ import annotations

import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .errors import LlmUnavailable, ProviderRejected, Timeout

DEFAULT_TIMEOUT = 30.0
DEFAULT_RETRY_MAX = 2
DEFAULT_BACKOFF_BASE = 0.5
DEFAULT_MAX_CONCURRENT = 4
DEFAULT_MAX_OUTPUT_TOKENS = 1024


@dataclass(frozen=True)
class LlmRequest:
    prompt: str
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    timeout: float | None = None  # seconds; None uses the gateway default
    idempotency_key: str | None = None

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must not be empty")
        if self.max_output_tokens < 1:
            raise ValueError(f"max_output_tokens must be positive, got {self.max_output_tokens}")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")


@dataclass(frozen=True)
class LlmResponse:
    text: str
    model_tag: str
    latency: float
    attempts: int = 1


@dataclass(frozen=True)
class GatewayConfig:
    provider: str = "mock"  # "mock" or "http"
    endpoint: str = ""
    model: str = ""
    credential_env: str = "STAGEBOARD_LLM_CREDENTIAL"
    retry_max: int = DEFAULT_RETRY_MAX
    backoff_base: float = DEFAULT_BACKOFF_BASE
    timeout: float = DEFAULT_TIMEOUT
    max_concurrent: int = DEFAULT_MAX_CONCURRENT
    mock_script: str | None = None


class TransientProviderError(Exception):
    """Retryable provider failure; timed_out distinguishes the final error."""

    def __init__(self, message: str, timed_out: bool = False):
        super().__init__(message)
        self.timed_out = timed_out


class MockProvider:
    """Scripted provider for tests and offline demos.

    Script shape: {"model_tag": ..., "default": {...}, "rules": [{...}]}.
    A rule matches by "contains" (substring) or "pattern" (regex) against
    the prompt; "failures" makes its first N matches fail with "error"
    ("timeout", "unavailable", or "rejected") before succeeding.
    """

    def __init__(self, script: dict | None = None):
        script = script or {}
        self.model_tag = script.get("model_tag", "mock")
        self._default = script.get("default", {"text": ""})
        self._rules = [dict(rule) for rule in script.get("rules", [])]
        for rule in self._rules:
            rule.setdefault("failures", 0)
            rule["_calls"] = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "MockProvider":
        text = Path(path).read_text(encoding="utf-8")
        return cls(json.loads(text))

    def _match(self, prompt: str) -> dict:
        for rule in self._rules:
            if "contains" in rule and rule["contains"] in prompt:
                return rule
            if "pattern" in rule and re.search(rule["pattern"], prompt):
                return rule
        return self._default

    def complete(self, request: LlmRequest, timeout: float) -> tuple[str, str]:
        with self._lock:
            rule = self._match(request.prompt)
            calls = rule["_calls"] = rule.get("_calls", 0) + 1
            failures = rule.get("failures", 0)
            if calls <= failures:
                kind = rule.get("error", "unavailable")
                if kind == "timeout":
                    raise TransientProviderError("scripted timeout", timed_out=True)
                if kind == "rejected":
                    raise ProviderRejected(rule.get("message", "scripted rejection"))
                raise TransientProviderError("scripted outage")
            return rule.get("text", ""), self.model_tag


class HttpProvider:
    """Chat-completions style HTTP provider.

    Credentials come from the environment at call time and are never stored
    on the instance or included in error messages.
    """

    def __init__(self, endpoint: str, model: str, credential_env: str):
        if not endpoint:
            raise ValueError("http provider requires an endpoint")
        self.endpoint = endpoint
        self.model = model
        self.credential_env = credential_env

    def complete(self, request: LlmRequest, timeout: float) -> tuple[str, str]:
        headers = {}
        credential = os.environ.get(self.credential_env, "")
        if credential:
            headers["Authorization"] = f"Bearer {credential}"
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "max_tokens": request.max_output_tokens,
        }
        try:
            response = httpx.post(self.endpoint, json=payload, headers=headers, timeout=timeout)
        except httpx.TimeoutException:
            raise TransientProviderError("provider request timed out", timed_out=True)
        except httpx.TransportError as exc:
            raise TransientProviderError(f"transport failure: {exc}")
        if response.status_code == 429 or response.status_code >= 500:
            raise TransientProviderError(f"provider returned status {response.status_code}")
        if response.status_code >= 400:
            raise ProviderRejected(f"provider returned status {response.status_code}")
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError):
            raise ProviderRejected("provider returned an unreadable response body")
        model_tag = body.get("model") or self.model
        return text, model_tag


class LlmGateway:
    def __init__(self, config: GatewayConfig, provider=None, sleep=time.sleep):
        self.config = config
        self._sleep = sleep
        self._semaphore = threading.BoundedSemaphore(config.max_concurrent)
        self._cache: dict[str, LlmResponse] = {}
        self._cache_lock = threading.Lock()
        if provider is not None:
            self.provider = provider
        elif config.provider == "mock":
            if config.mock_script:
                self.provider = MockProvider.from_file(config.mock_script)
            else:
                self.provider = MockProvider()
        elif config.provider == "http":
            self.provider = HttpProvider(config.endpoint, config.model, config.credential_env)
        else:
            raise ValueError(f"unknown provider {config.provider!r}")

    def complete(self, request: LlmRequest) -> LlmResponse:
        """Run one completion with retries; replays cached idempotent results."""
        key = request.idempotency_key
        if key is not None:
            with self._cache_lock:
                cached = self._cache.get(key)
            if cached is not None:
                return cached
        response = self._complete_with_retries(request)
        if key is not None:
            with self._cache_lock:
                self._cache[key] = response
        return response

    def _complete_with_retries(self, request: LlmRequest) -> LlmResponse:
        timeout = request.timeout if request.timeout is not None else self.config.timeout
        max_attempts = self.config.retry_max + 1
        last_error: TransientProviderError | None = None
        started = time.monotonic()
        for attempt in range(1, max_attempts + 1):
            if attempt > 1:
                self._sleep(self.config.backoff_base * 2 ** (attempt - 2))
            try:
                with self._semaphore:
                    text, model_tag = self.provider.complete(request, timeout)
            except TransientProviderError as exc:
                last_error = exc
                continue
            latency = time.monotonic() - started
            return LlmResponse(text=text, model_tag=model_tag, latency=latency, attempts=attempt)
        assert last_error is not None
        if last_error.timed_out:
            raise Timeout(
                f"model call timed out after {max_attempts} attempts", attempts=max_attempts
            )
        raise LlmUnavailable(
            f"model unavailable after {max_attempts} attempts: {last_error}",
            attempts=max_attempts,
        )


def build_gateway(config: GatewayConfig, sleep=time.sleep) -> LlmGateway:
    return LlmGateway(config, sleep=sleep)
