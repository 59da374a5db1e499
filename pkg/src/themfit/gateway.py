"""Uniform access to chat-completion backends.

One gateway object serves four modes: ``live`` (straight through), ``record``
(live plus a content-addressed cassette written per request), ``replay``
(cassette only, never touches a backend), and ``mock`` (in-process scripted
backend). Requests are keyed by a digest over the full request content, so a
recorded cassette replays byte-identical responses regardless of wall clock
or network.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Protocol, Sequence

import requests

if TYPE_CHECKING:
    from .prompts import PromptChain

MODES = ("live", "record", "replay", "mock")

API_KEY_ENV_VARS = ("THEMFIT_API_KEY", "OPENAI_API_KEY")


class GatewayError(RuntimeError):
    """Base gateway failure; carries the request digest when known."""

    def __init__(self, message: str, digest: str | None = None):
        super().__init__(message)
        self.digest = digest


class TransportError(GatewayError):
    """Network-level or 5xx failure; retried with backoff."""


class AuthError(GatewayError):
    """Authentication rejected by the backend; not retried."""


class BackendError(GatewayError):
    """Backend-reported request error or malformed payload; not retried."""


class CacheMissError(GatewayError):
    """Replay mode found no cassette entry for the request."""


class ChainStepError(GatewayError):
    """A chain step failed; names the 0-based step index."""

    def __init__(self, message: str, step_index: int, digest: str | None = None):
        super().__init__(message, digest)
        self.step_index = step_index


class FinishReason(Enum):
    STOP = "stop"
    LENGTH = "length"
    ERROR = "error"


@dataclass(frozen=True)
class ModelParams:
    """Sampling parameters for one backend call."""

    model_name: str
    temperature: float = 0.0
    top_p: float = 0.95
    max_tokens: int = 100

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")
        if not 0 < self.top_p <= 1:
            raise ValueError(f"top_p must lie in (0, 1], got {self.top_p}")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")


_ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class Message:
    role: str
    text: str

    def __post_init__(self) -> None:
        if self.role not in _ROLES:
            raise ValueError(f"unknown message role {self.role!r}")
        if self.role in ("user", "assistant") and not self.text:
            raise ValueError(f"{self.role} message text must be nonempty")


@dataclass(frozen=True)
class ModelResponse:
    """Backend reply. ``finish_reason == LENGTH`` means possibly truncated text."""

    text: str
    finish_reason: FinishReason
    latency_ms: int
    from_cache: bool


def cache_key(params: ModelParams, messages: Sequence[Message]) -> str:
    """Digest over the full request content; any field change changes the key."""
    payload = {
        "model_name": params.model_name,
        "temperature": params.temperature,
        "top_p": params.top_p,
        "max_tokens": params.max_tokens,
        "messages": [{"role": m.role, "text": m.text} for m in messages],
    }
    encoded = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(encoded.encode("utf-8")).hexdigest()


class Backend(Protocol):
    def send(self, messages: Sequence[Message], params: ModelParams) -> tuple[str, FinishReason]:
        """Return (text, finish_reason) or raise a GatewayError subclass."""
        ...


class HttpBackend:
    """Chat-completion HTTP backend with a configurable base URL.

    Speaks the common ``POST {base_url}/chat/completions`` shape so both
    hosted and self-served models are reachable.
    """

    def __init__(self, base_url: str, api_key: str | None = None, timeout: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout

    def send(self, messages: Sequence[Message], params: ModelParams) -> tuple[str, FinishReason]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": params.model_name,
            "messages": [{"role": m.role, "content": m.text} for m in messages],
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_tokens,
        }
        try:
            response = requests.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise TransportError(f"transport failure: {exc}") from exc
        if response.status_code in (401, 403):
            raise AuthError(f"authentication failed (HTTP {response.status_code})")
        if response.status_code >= 500:
            raise TransportError(f"backend HTTP {response.status_code}: {response.text[:200]}")
        if response.status_code >= 400:
            raise BackendError(f"backend HTTP {response.status_code}: {response.text[:200]}")
        try:
            data = response.json()
            choice = data["choices"][0]
            text = choice["message"]["content"]
            reason = choice.get("finish_reason", "stop")
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed backend response: {exc}") from exc
        finish = FinishReason.LENGTH if reason == "length" else FinishReason.STOP
        return text, finish


class MockBackend:
    """Scriptable in-process backend.

    ``responses`` maps request digests to reply text; ``fallback`` may be a
    constant string or a callable ``(messages, params) -> str | (str, FinishReason)``
    for requests not scripted by digest.
    """

    def __init__(
        self,
        responses: dict[str, str] | None = None,
        fallback: str | Callable | None = None,
    ):
        self.responses = dict(responses or {})
        self.fallback = fallback

    def send(self, messages: Sequence[Message], params: ModelParams) -> tuple[str, FinishReason]:
        digest = cache_key(params, messages)
        if digest in self.responses:
            return self.responses[digest], FinishReason.STOP
        if callable(self.fallback):
            result = self.fallback(messages, params)
            if isinstance(result, tuple):
                return result
            return result, FinishReason.STOP
        if isinstance(self.fallback, str):
            return self.fallback, FinishReason.STOP
        raise BackendError("mock backend has no scripted response for this request", digest)


@dataclass(frozen=True)
class _CacheRecord:
    text: str
    finish_reason: FinishReason


class Gateway:
    """Thread-safe front door for all backend calls.

    At most ``max_in_flight`` backend calls run concurrently; transient
    transport failures are retried with exponential backoff. Chain execution
    is strictly sequential within a chain.
    """

    def __init__(
        self,
        mode: str,
        backend: Backend | None = None,
        cassette_dir: str | Path | None = None,
        max_in_flight: int = 4,
        max_attempts: int = 3,
        backoff_base: float = 1.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown gateway mode {mode!r} (expected one of {MODES})")
        if mode in ("live", "record", "mock") and backend is None:
            raise ValueError(f"{mode} mode requires a backend")
        if mode in ("record", "replay") and cassette_dir is None:
            raise ValueError(f"{mode} mode requires a cassette directory")
        self.mode = mode
        self.backend = backend
        self.cassette_dir = Path(cassette_dir) if cassette_dir else None
        self.max_in_flight = max_in_flight
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self._sleep = sleep
        self._semaphore = threading.BoundedSemaphore(max_in_flight)
        self._cache_lock = threading.Lock()
        self._memory: dict[str, _CacheRecord] = {}
        self._calls_lock = threading.Lock()
        self.backend_calls = 0

    def complete(self, history: Sequence[Message], params: ModelParams) -> ModelResponse:
        """Send one request, honoring the gateway mode's cache semantics."""
        if not history:
            raise ValueError("history must be nonempty")
        if history[-1].role != "user":
            raise ValueError("last message must be authored by the user")
        digest = cache_key(params, history)

        if self.mode in ("record", "replay"):
            record = self._cache_get(digest)
            if record is not None:
                return ModelResponse(record.text, record.finish_reason, 0, True)
            if self.mode == "replay":
                raise CacheMissError("cache miss in replay mode", digest)

        text, finish, latency_ms = self._call_backend(history, params, digest)
        if self.mode == "record":
            self._cache_put(digest, params, history, text, finish)
        return ModelResponse(text, finish, latency_ms, False)

    def run_chain(
        self,
        chain: "PromptChain",
        params: ModelParams,
        on_step: Callable[[int, list[Message], ModelResponse], None] | None = None,
    ) -> list[ModelResponse]:
        """Execute a prompt chain as one growing conversation.

        Step i+1 is sent only after step i's response arrived; each step's
        user message plus the prior assistant replies form the request
        history. ``on_step`` receives (step_index, request_messages,
        response) after each step, e.g. for transcript writing.
        """
        history: list[Message] = []
        responses: list[ModelResponse] = []
        for i, step in enumerate(chain.steps):
            history.append(Message("user", step.rendered_text))
            try:
                response = self.complete(list(history), params)
            except GatewayError as exc:
                raise ChainStepError(
                    f"chain step {i} failed: {exc}", step_index=i, digest=exc.digest
                ) from exc
            responses.append(response)
            if on_step is not None:
                on_step(i, history[:], response)
            history.append(Message("assistant", response.text))
        return responses

    def _call_backend(
        self, history: Sequence[Message], params: ModelParams, digest: str
    ) -> tuple[str, FinishReason, int]:
        assert self.backend is not None
        last_error: TransportError | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                with self._semaphore:
                    with self._calls_lock:
                        self.backend_calls += 1
                    started = time.perf_counter()
                    text, finish = self.backend.send(history, params)
                    latency_ms = int((time.perf_counter() - started) * 1000)
                return text, finish, latency_ms
            except TransportError as exc:
                exc.digest = exc.digest or digest
                last_error = exc
                if attempt < self.max_attempts:
                    self._sleep(self.backoff_base * 2 ** (attempt - 1))
            except GatewayError as exc:
                exc.digest = exc.digest or digest
                raise
        assert last_error is not None
        raise TransportError(
            f"transport failure after {self.max_attempts} attempts: {last_error}", digest
        )

    def _cassette_path(self, digest: str) -> Path:
        assert self.cassette_dir is not None
        return self.cassette_dir / f"{digest}.json"

    def _cache_get(self, digest: str) -> _CacheRecord | None:
        with self._cache_lock:
            record = self._memory.get(digest)
            if record is not None:
                return record
            path = self._cassette_path(digest)
            if not path.exists():
                return None
            payload = json.loads(path.read_text(encoding="utf-8"))
            record = _CacheRecord(
                text=payload["response_text"],
                finish_reason=FinishReason(payload["finish_reason"]),
            )
            self._memory[digest] = record
            return record

    def _cache_put(
        self,
        digest: str,
        params: ModelParams,
        messages: Sequence[Message],
        text: str,
        finish: FinishReason,
    ) -> None:
        payload = {
            "digest": digest,
            "model_name": params.model_name,
            "params": {
                "temperature": params.temperature,
                "top_p": params.top_p,
                "max_tokens": params.max_tokens,
            },
            "messages": [{"role": m.role, "text": m.text} for m in messages],
            "response_text": text,
            "finish_reason": finish.value,
        }
        with self._cache_lock:
            self._memory[digest] = _CacheRecord(text, finish)
            path = self._cassette_path(digest)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(
                json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
                encoding="utf-8",
            )
