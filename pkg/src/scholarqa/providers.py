"""Provider-agnostic chat completion and text embedding.

Every model call in the package goes through the `LlmProvider` interface
defined here; no other module names a concrete vendor or wire schema.
Two implementations ship: `HttpProvider` speaks the de-facto standard
chat-completions / embeddings JSON schema over HTTP, and `MockProvider`
is fully deterministic and offline for tests and replay runs.
"""

from __future__ import annotations

import hashlib
import math
import string
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import requests

from .errors import DimensionMismatchError, EmptyReplyError, ProviderError
from .retry import RetryPolicy


@dataclass(frozen=True)
class SamplingParams:
    """Sampling knobs passed through to the provider.

    Temperature defaults to 0 for reproducibility.
    """

    temperature: float = 0.0
    max_tokens: int | None = None


@dataclass(frozen=True)
class ChatRequest:
    instruction: str
    user_content: str
    model_id: str = ""  # empty means the provider's configured default
    sampling: SamplingParams = SamplingParams()

    def __post_init__(self):
        if not self.instruction:
            raise ValueError("instruction must be non-empty")
        if not self.user_content:
            raise ValueError("user_content must be non-empty")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    model_id: str

    def __post_init__(self):
        if not self.values:
            raise ValueError("embedding must be non-empty")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("embedding contains non-finite values")


class LlmProvider(ABC):
    """Chat completion plus text embedding behind one interface."""

    def __init__(self):
        self._dims: dict[str, int] = {}
        self._dims_lock = threading.Lock()

    @abstractmethod
    def complete(self, request: ChatRequest) -> str:
        """Return the provider's text reply for a chat request."""

    @abstractmethod
    def embed(self, text: str, model_id: str = "") -> EmbeddingVector:
        """Return a finite, fixed-length vector for the text."""

    def _make_vector(self, model_id: str, values) -> EmbeddingVector:
        # Enforces a consistent dimension per model across the provider's
        # lifetime; a length-0 reply is always a mismatch.
        n = len(values)
        if n == 0:
            raise DimensionMismatchError(f"{model_id!r} returned an empty vector")
        with self._dims_lock:
            prior = self._dims.setdefault(model_id, n)
        if prior != n:
            raise DimensionMismatchError(
                f"{model_id!r} returned length {n}, expected {prior}"
            )
        try:
            return EmbeddingVector(tuple(float(v) for v in values), model_id)
        except (TypeError, ValueError) as exc:
            raise ProviderError(f"unusable embedding from {model_id!r}: {exc}") from exc


class TokenBucket:
    """Thread-safe token bucket; `acquire` blocks until admitted."""

    def __init__(self, rate: float, capacity: float | None = None, *,
                 clock=time.monotonic, sleep=time.sleep):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self.capacity = capacity if capacity is not None else rate
        self._tokens = self.capacity
        self._updated = clock()
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()

    def acquire(self, tokens: float = 1.0) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity,
                                   self._tokens + (now - self._updated) * self.rate)
                self._updated = now
                if self._tokens >= tokens:
                    self._tokens -= tokens
                    return
                wait = (tokens - self._tokens) / self.rate
            self._sleep(wait)


class HttpProvider(LlmProvider):
    """HTTP adapter for chat-completions / embeddings style APIs.

    Transient failures (connection errors, 429, 5xx) are retried with
    exponential backoff; auth and other 4xx fail immediately.
    """

    def __init__(self, base_url: str, api_key: str = "", *,
                 chat_model: str = "", embedding_model: str = "",
                 retry: RetryPolicy = RetryPolicy(),
                 rate_limiter: TokenBucket | None = None,
                 session: requests.Session | None = None,
                 timeout: float = 60.0, sleep=time.sleep):
        super().__init__()
        if not base_url:
            raise ValueError("base_url must be configured")
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.chat_model = chat_model
        self.embedding_model = embedding_model
        self.retry = retry
        self.rate_limiter = rate_limiter
        self.timeout = timeout
        self._session = session or requests.Session()
        self._sleep = sleep

    def complete(self, request: ChatRequest) -> str:
        body = {
            "model": request.model_id or self.chat_model,
            "messages": [
                {"role": "system", "content": request.instruction},
                {"role": "user", "content": request.user_content},
            ],
            "temperature": request.sampling.temperature,
        }
        if request.sampling.max_tokens is not None:
            body["max_tokens"] = request.sampling.max_tokens
        payload = self._post("/chat/completions", body)
        try:
            reply = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed chat response: {exc}") from exc
        if not isinstance(reply, str) or not reply.strip():
            raise EmptyReplyError("provider returned an empty reply")
        return reply

    def embed(self, text: str, model_id: str = "") -> EmbeddingVector:
        if not text:
            raise ValueError("text must be non-empty")
        model = model_id or self.embedding_model
        payload = self._post("/embeddings", {"model": model, "input": text})
        try:
            values = payload["data"][0]["embedding"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc
        return self._make_vector(model, values)

    def _post(self, path: str, body: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        url = self.base_url + path
        last_error: Exception | None = None
        for attempt in range(1, self.retry.max_attempts + 1):
            if self.rate_limiter is not None:
                self.rate_limiter.acquire()
            try:
                response = self._session.post(url, json=body, headers=headers,
                                              timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
            else:
                if response.status_code == 200:
                    try:
                        return response.json()
                    except ValueError as exc:
                        raise ProviderError(f"non-JSON response: {exc}") from exc
                if response.status_code == 429 or response.status_code >= 500:
                    last_error = ProviderError(
                        f"transient status {response.status_code}"
                    )
                else:
                    raise ProviderError(
                        f"status {response.status_code}: {response.text[:200]}"
                    )
            if attempt < self.retry.max_attempts:
                self._sleep(self.retry.delay(attempt))
        raise ProviderError(f"gave up after {self.retry.max_attempts} attempts: {last_error}")


_ALPHABET = string.ascii_lowercase
MOCK_EMBEDDING_MODEL = "mock-letter-histogram"


def prompt_key(instruction: str, user_content: str) -> str:
    """Stable hash of a (instruction, user content) pair, for reply tables."""
    digest = hashlib.sha256()
    digest.update(instruction.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(user_content.encode("utf-8"))
    return digest.hexdigest()


@dataclass
class MockProvider(LlmProvider):
    """Deterministic offline provider.

    Chat replies come from `script` (consumed in order; exceptions raise)
    when present, else from `reply_table` keyed by `prompt_key`, else
    `default_reply`. Embeddings are letter-frequency histograms over the
    26-letter lowercase alphabet, so identical inputs always embed
    identically and letter-disjoint inputs are orthogonal.
    """

    reply_table: dict[str, str] = field(default_factory=dict)
    default_reply: str | None = None
    script: list = field(default_factory=list)
    chat_calls: list = field(default_factory=list)

    embedding_model = MOCK_EMBEDDING_MODEL  # class attr, not a dataclass field

    def __post_init__(self):
        super().__init__()
        self._script_pos = 0

    def complete(self, request: ChatRequest) -> str:
        self.chat_calls.append(request)
        if self._script_pos < len(self.script):
            step = self.script[self._script_pos]
            self._script_pos += 1
            if isinstance(step, Exception):
                raise step
            reply = step
        else:
            key = prompt_key(request.instruction, request.user_content)
            if key in self.reply_table:
                reply = self.reply_table[key]
            elif self.default_reply is not None:
                reply = self.default_reply
            else:
                raise ProviderError("mock has no reply for this prompt")
        if not reply.strip():
            raise EmptyReplyError("mock reply is empty")
        return reply

    def embed(self, text: str, model_id: str = "") -> EmbeddingVector:
        if not text:
            raise ValueError("text must be non-empty")
        counts = [0.0] * len(_ALPHABET)
        for ch in text.lower():
            idx = _ALPHABET.find(ch)
            if idx >= 0:
                counts[idx] += 1.0
        return self._make_vector(model_id or MOCK_EMBEDDING_MODEL, counts)
