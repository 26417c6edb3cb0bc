"""Completion backends: a scripted mock and a generic remote chat endpoint.

Both speak the same two-type contract (CompletionRequest in, CompletionResult
out), so the pipeline never knows which one it is talking to. The mock replays
a fixed response sequence for deterministic tests and benchmark fixtures; the
HTTP backend posts a chat-completion style payload to whatever endpoint the
environment points it at.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field

import requests

ENV_URL = "RTLFORGE_LLM_URL"
ENV_KEY = "RTLFORGE_LLM_KEY"

DEFAULT_MAX_TOKENS = 4096


class ScriptExhausted(Exception):
    """Mock backend ran out of scripted responses."""


class TransportError(Exception):
    """Remote call failed after all retry attempts."""


def estimate_tokens(text: str) -> int:
    """Whitespace token count, used when the endpoint reports no usage."""
    return len(text.split())


@dataclass(frozen=True)
class CompletionRequest:
    system_prompt: str
    user_prompt: str
    temperature: float
    max_tokens: int = DEFAULT_MAX_TOKENS

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 1.0:
            raise ValueError(f"temperature must be in [0, 1], got {self.temperature}")
        if self.max_tokens <= 0:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    input_tokens: int
    output_tokens: int
    latency_s: float

    def __post_init__(self) -> None:
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ValueError("token counts must be >= 0")
        if self.latency_s < 0:
            raise ValueError("latency_s must be >= 0")


class MockBackend:
    """Replays a scripted list of response texts, one per complete() call.

    Requests are recorded in order so tests can assert each one was
    self-contained. Script consumption is locked: parallel pipeline runs
    sharing an instance each still consume exactly one entry per call.
    """

    def __init__(self, script: list[str] | tuple[str, ...]):
        self._script = list(script)
        self._cursor = 0
        self._lock = threading.Lock()
        self.requests: list[CompletionRequest] = []

    def complete(self, request: CompletionRequest) -> CompletionResult:
        with self._lock:
            if self._cursor >= len(self._script):
                raise ScriptExhausted(
                    f"mock script exhausted after {len(self._script)} responses"
                )
            text = self._script[self._cursor]
            self._cursor += 1
            self.requests.append(request)
        return CompletionResult(
            text=text,
            input_tokens=estimate_tokens(request.system_prompt)
            + estimate_tokens(request.user_prompt),
            output_tokens=estimate_tokens(text),
            latency_s=0.0,
        )

    @property
    def remaining(self) -> int:
        with self._lock:
            return len(self._script) - self._cursor


def _extract_text(data: dict) -> str:
    """Pull the completion text out of the common response shapes."""
    content = data.get("content")
    if isinstance(content, str):
        return content
    if isinstance(content, list):
        return "".join(
            block.get("text", "") for block in content if isinstance(block, dict)
        )
    choices = data.get("choices")
    if isinstance(choices, list) and choices:
        message = choices[0].get("message", {})
        if isinstance(message, dict) and isinstance(message.get("content"), str):
            return message["content"]
    completion = data.get("completion")
    if isinstance(completion, str):
        return completion
    raise TransportError(f"unrecognized response shape: keys={sorted(data)}")


@dataclass
class HttpBackend:
    """Generic chat-completion client.

    Configuration comes from the constructor or, when omitted, from the
    RTLFORGE_LLM_URL / RTLFORGE_LLM_KEY environment variables. Transport
    failures and 5xx responses are retried with exponential backoff; 4xx
    responses fail immediately since retrying cannot fix the request.
    """

    url: str | None = None
    api_key: str | None = None
    model_id: str = ""
    retries: int = 3
    backoff_s: float = 1.0
    timeout_s: float = 120.0
    session: requests.Session | None = None
    _sleep: object = field(default=time.sleep, repr=False)

    def __post_init__(self) -> None:
        if self.url is None:
            self.url = os.environ.get(ENV_URL)
        if self.api_key is None:
            self.api_key = os.environ.get(ENV_KEY)
        if not self.url:
            raise ValueError(
                f"no endpoint URL: pass url= or set {ENV_URL} in the environment"
            )
        if self.retries < 1:
            raise ValueError("retries must be >= 1")
        if self.session is None:
            self.session = requests.Session()

    def complete(self, request: CompletionRequest) -> CompletionResult:
        payload = {
            "model": self.model_id,
            "system": request.system_prompt,
            "messages": [{"role": "user", "content": request.user_prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"

        last_error: Exception | None = None
        for attempt in range(self.retries):
            if attempt:
                self._sleep(self.backoff_s * 2 ** (attempt - 1))
            start = time.monotonic()
            try:
                response = self.session.post(
                    self.url, json=payload, headers=headers, timeout=self.timeout_s
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = TransportError(
                    f"server error {response.status_code} from {self.url}"
                )
                continue
            if response.status_code >= 400:
                raise TransportError(
                    f"request rejected: {response.status_code} {response.text[:200]}"
                )
            latency = time.monotonic() - start
            data = response.json()
            text = _extract_text(data)
            usage = data.get("usage", {}) if isinstance(data, dict) else {}
            tokens_in = usage.get("input_tokens", usage.get("prompt_tokens"))
            tokens_out = usage.get("output_tokens", usage.get("completion_tokens"))
            if tokens_in is None:
                tokens_in = estimate_tokens(request.system_prompt) + estimate_tokens(
                    request.user_prompt
                )
            if tokens_out is None:
                tokens_out = estimate_tokens(text)
            return CompletionResult(
                text=text,
                input_tokens=int(tokens_in),
                output_tokens=int(tokens_out),
                latency_s=latency,
            )
        raise TransportError(
            f"completion failed after {self.retries} attempts: {last_error}"
        )
