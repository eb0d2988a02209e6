"""Chat-model backends: a remote chat-completion client and a scripted stand-in.

The scripted backend replays canned responses keyed by (role, call ordinal)
so multi-agent flows are exactly reproducible in tests and demos. A script
entry may also be ``{"$error": "..."}`` to simulate a backend failure.
"""

from __future__ import annotations

import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from .errors import BackendError, FormatError, ValidationError

ENDPOINT_ENV = "MATE_BACKEND_URL"
MODEL_ENV = "MATE_BACKEND_MODEL"
API_KEY_ENV = "MATE_API_KEY"

DEFAULT_ROLE = "default"


@dataclass(frozen=True)
class ChatBackendSpec:
    kind: str  # "remote_endpoint" | "scripted"
    endpoint_url: str | None = None
    model_name: str | None = None
    temperature: float = 0.7
    max_retries: int = 2
    timeout: float = 60.0
    # scripted only: role -> list of canned responses; loop cycles the list
    scripts: dict[str, list] = field(default_factory=dict)
    loop: bool = False

    def __post_init__(self):
        if self.kind not in ("remote_endpoint", "scripted"):
            raise ValidationError(f"unknown backend kind {self.kind!r}")
        if not (0.0 < self.temperature <= 1.0):
            raise ValidationError(f"temperature must be in (0, 1], got {self.temperature}")
        if self.kind == "remote_endpoint" and not (self.endpoint_url and self.model_name):
            raise ValidationError("remote_endpoint requires endpoint_url and model_name")


def spec_from_dict(raw: dict) -> ChatBackendSpec:
    try:
        return ChatBackendSpec(
            kind=raw.get("kind", "remote_endpoint"),
            endpoint_url=raw.get("endpoint_url") or os.environ.get(ENDPOINT_ENV),
            model_name=raw.get("model_name") or os.environ.get(MODEL_ENV),
            temperature=float(raw.get("temperature", 0.7)),
            max_retries=int(raw.get("max_retries", 2)),
            timeout=float(raw.get("timeout", 60.0)),
            scripts={str(k): list(v) for k, v in raw.get("scripts", {}).items()},
            loop=bool(raw.get("loop", False)),
        )
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed backend config: {exc}") from exc


def spec_from_file(path: str | Path) -> ChatBackendSpec:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise FormatError(f"{path}: backend config must be a JSON object")
    return spec_from_dict(raw)


class ScriptedBackend:
    """Replays canned responses per role; consumption is serialized."""

    def __init__(self, scripts: dict[str, list], loop: bool = False):
        self._scripts = {role: list(entries) for role, entries in scripts.items()}
        self._cursors: dict[str, int] = {role: 0 for role in self._scripts}
        self._loop = loop
        self._lock = threading.Lock()
        self.call_log: list[tuple[str, str]] = []  # (role, system_prompt)

    def complete(
        self,
        system_prompt: str,
        messages: list[dict[str, str]],
        temperature: float | None = None,
        role: str | None = None,
    ) -> str:
        key = role if role in self._scripts else DEFAULT_ROLE
        with self._lock:
            self.call_log.append((role or DEFAULT_ROLE, system_prompt))
            entries = self._scripts.get(key)
            if not entries:
                raise BackendError(f"no script for role {role!r}", retryable=False)
            cursor = self._cursors[key]
            if cursor >= len(entries):
                if self._loop:
                    cursor = cursor % len(entries)
                else:
                    raise BackendError(
                        f"script for role {role!r} exhausted after {len(entries)} calls",
                        retryable=False,
                    )
            self._cursors[key] = cursor + 1
            entry = entries[cursor]
        if isinstance(entry, dict) and "$error" in entry:
            raise BackendError(str(entry["$error"]), retryable=bool(entry.get("retryable")))
        return str(entry)

    def calls_for(self, role: str) -> int:
        with self._lock:
            return sum(1 for r, _ in self.call_log if r == role)


class RemoteBackend:
    """Chat-completion style HTTP client with bounded retries.

    Request body: {model, messages: [{role, content}...], temperature};
    the system prompt travels as the first message with role "system".
    Response body: {choices: [{message: {content}}]}.
    """

    def __init__(self, spec: ChatBackendSpec):
        self.spec = spec
        self._client = httpx.Client(timeout=spec.timeout)

    def complete(
        self,
        system_prompt: str,
        messages: list[dict[str, str]],
        temperature: float | None = None,
        role: str | None = None,
    ) -> str:
        body = {
            "model": self.spec.model_name,
            "messages": [{"role": "system", "content": system_prompt}, *messages],
            "temperature": self.spec.temperature if temperature is None else temperature,
        }
        headers = {}
        api_key = os.environ.get(API_KEY_ENV)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        url = self.spec.endpoint_url.rstrip("/") + "/chat/completions"
        last: Exception | None = None
        for attempt in range(self.spec.max_retries + 1):
            try:
                response = self._client.post(url, json=body, headers=headers)
                response.raise_for_status()
                payload = response.json()
                return payload["choices"][0]["message"]["content"]
            except (httpx.TransportError, httpx.HTTPStatusError) as exc:
                last = exc
                if attempt < self.spec.max_retries:
                    time.sleep(min(0.2 * (attempt + 1), 2.0))
            except (KeyError, IndexError, ValueError) as exc:
                raise BackendError(f"malformed completion response: {exc}") from exc
        raise BackendError(
            f"backend unreachable after {self.spec.max_retries + 1} attempts: {last}",
            retryable=False,
        )


ChatBackend = ScriptedBackend | RemoteBackend


def build_backend(spec: ChatBackendSpec) -> ChatBackend:
    if spec.kind == "scripted":
        return ScriptedBackend(spec.scripts, loop=spec.loop)
    return RemoteBackend(spec)


def chat(
    backend: ChatBackend,
    system_prompt: str,
    messages: list[dict[str, str]],
    temperature: float | None = None,
    role: str | None = None,
) -> str:
    """Run one completion against a built backend."""
    return backend.complete(system_prompt, messages, temperature=temperature, role=role)
