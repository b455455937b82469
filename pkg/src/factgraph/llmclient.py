"""Minimal chat-completion client, fully mockable for offline runs.

The wire format is a plain JSON chat request with temperature pinned to 0 so
repeated calls with the same prompt are as deterministic as the service
allows. In mock mode the client replays an ordered transcript of canned
responses and never opens a socket.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from importlib import resources

import requests

from .errors import MockExhaustedError, TemplateError, TransportError

ENDPOINT_ENV = "FACTGRAPH_LLM_ENDPOINT"
API_KEY_ENV = "FACTGRAPH_LLM_API_KEY"
TIMEOUT_ENV = "FACTGRAPH_LLM_TIMEOUT"
DEFAULT_TIMEOUT = 30.0


@dataclass(frozen=True)
class PromptTemplate:
    """Named prompt text with `{placeholder}` slots; `{{` escapes a brace."""

    name: str
    body: str
    version: str = "1"


def render(template: PromptTemplate, bindings: dict) -> str:
    """Substitute placeholders; a missing binding raises naming the placeholder."""
    try:
        return template.body.format_map(dict(bindings))
    except KeyError as exc:
        name = exc.args[0]
        raise TemplateError(f"template '{template.name}' is missing binding '{name}'",
                            placeholder=str(name)) from exc
    except IndexError as exc:
        raise TemplateError(f"template '{template.name}' uses positional placeholders; "
                            "only named ones are supported") from exc


def load_template(filename: str) -> PromptTemplate:
    """Load a packaged template asset; the `_vN` filename suffix is its version."""
    body = resources.files("factgraph.templates").joinpath(filename).read_text("utf-8")
    stem = filename.rsplit(".", 1)[0]
    name, _, version = stem.rpartition("_v")
    return PromptTemplate(name=name or stem, body=body, version=version or "1")


class LLMClient:
    """Chat-completion client with bounded in-flight requests.

    Pass ``transcript`` (an ordered list of canned responses) to run in mock
    mode; each ``complete`` call pops the next entry and the network is never
    touched. Without a transcript, requests go to the configured endpoint.
    """

    def __init__(self, endpoint: str | None = None, model: str = "", timeout: float | None = None,
                 max_in_flight: int = 4, transcript=None, api_key: str | None = None,
                 session=None):
        self.endpoint = endpoint if endpoint is not None else os.environ.get(ENDPOINT_ENV, "")
        self.model = model
        if timeout is None:
            timeout = float(os.environ.get(TIMEOUT_ENV, DEFAULT_TIMEOUT))
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.timeout = timeout
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self._gate = threading.Semaphore(max_in_flight)
        self._session = session
        self._transcript = list(transcript) if transcript is not None else None
        self._transcript_lock = threading.Lock()

    @property
    def is_mock(self) -> bool:
        return self._transcript is not None

    def complete(self, prompt: str) -> str:
        if not prompt:
            raise ValueError("prompt is empty")
        if self._transcript is not None:
            with self._transcript_lock:
                if not self._transcript:
                    raise MockExhaustedError("mock transcript has no responses left")
                return self._transcript.pop(0)
        return self._complete_http(prompt)

    def _complete_http(self, prompt: str) -> str:
        if not self.endpoint:
            raise ValueError(f"no endpoint configured (set {ENDPOINT_ENV})")
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": 0,
        }
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        session = self._session or requests
        try:
            with self._gate:
                resp = session.post(self.endpoint, json=payload, headers=headers,
                                    timeout=self.timeout)
        except (requests.Timeout, requests.ConnectionError) as exc:
            raise TransportError(f"completion service unreachable: {exc}", retriable=True) from exc
        if not 200 <= resp.status_code < 300:
            raise TransportError(
                f"completion request failed {resp.status_code}: {resp.text[:500]}",
                retriable=False)
        try:
            data = resp.json()
        except ValueError as exc:
            raise TransportError(f"completion response is not JSON: {exc}", retriable=False) from exc
        if isinstance(data.get("content"), str):
            return data["content"]
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError("completion response has no content field", retriable=False) from exc
