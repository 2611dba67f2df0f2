"""LLM clients.

Every client exposes ``generate(prompt, role) -> str`` where ``role`` is one
of ``decompose``, ``generate`` or ``refine``.  :class:`ScriptedLlm` replays a
transcript and is what the tests and the offline fixtures use.
"""

from __future__ import annotations

import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Protocol

from .errors import LlmError, TranscriptError

ROLES = ("decompose", "generate", "refine")
API_KEY_ENV = "AUTOCHECKER_API_KEY"


class LlmClient(Protocol):
    def generate(self, prompt: str, role: str) -> str: ...


@dataclass(frozen=True)
class TranscriptEntry:
    role: str
    response: Optional[str] = None
    error: Optional[str] = None  # simulated transport failure


def parse_transcript(records: list[dict]) -> list[TranscriptEntry]:
    entries = []
    for i, rec in enumerate(records):
        role = rec.get("role")
        if role not in ROLES:
            raise TranscriptError(f"transcript entry {i}: bad role {role!r}")
        if "response" not in rec and "error" not in rec:
            raise TranscriptError(f"transcript entry {i}: needs 'response' or 'error'")
        entries.append(TranscriptEntry(role, rec.get("response"), rec.get("error")))
    return entries


def load_transcript(path: str | Path) -> list[TranscriptEntry]:
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(json.loads(line))
    return parse_transcript(records)


@dataclass
class ScriptedLlm:
    """Pops transcript entries in order, checking that the roles line up."""

    entries: list[TranscriptEntry]
    calls: list[tuple[str, str]] = field(default_factory=list)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedLlm":
        return cls(load_transcript(path))

    @classmethod
    def from_pairs(cls, pairs) -> "ScriptedLlm":
        return cls([TranscriptEntry(role, response) for role, response in pairs])

    @property
    def remaining(self) -> int:
        return len(self.entries) - len(self.calls)

    def generate(self, prompt: str, role: str) -> str:
        index = len(self.calls)
        if index >= len(self.entries):
            raise TranscriptError(f"transcript exhausted: call {index + 1} asked for role {role!r}")
        entry = self.entries[index]
        if entry.role != role:
            raise TranscriptError(
                f"transcript entry {index}: expected role {entry.role!r}, engine asked for {role!r}"
            )
        self.calls.append((role, prompt))
        if entry.error is not None:
            raise LlmError(entry.error)
        return entry.response


class HttpLlm:
    """Client for an OpenAI-compatible chat-completion endpoint."""

    def __init__(self, endpoint: str, model: str, timeout: float = 120.0, temperature: float = 0.0):
        self.endpoint = endpoint
        self.model = model
        self.timeout = timeout
        self.temperature = temperature

    def generate(self, prompt: str, role: str) -> str:
        body = json.dumps(
            {
                "model": self.model,
                "temperature": self.temperature,
                "messages": [{"role": "user", "content": prompt}],
            }
        ).encode()
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(API_KEY_ENV)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        request = urllib.request.Request(self.endpoint, data=body, headers=headers)
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                payload = json.load(resp)
            return payload["choices"][0]["message"]["content"]
        except (urllib.error.URLError, OSError, ValueError, KeyError, IndexError, TypeError) as exc:
            raise LlmError(f"{role} request failed: {exc}") from exc
