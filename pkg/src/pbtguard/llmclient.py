"""LLM provider abstraction (live, replay, scripted) and test-source extraction.

Replay fixtures live in one directory, one JSON file per conversation::

    <fixture_dir>/<sha256 of the canonical conversation>.json
    {"digest": ..., "conversation": [{"role": ..., "text": ...}, ...],
     "response": "...", "provider_meta": {...}}

The digest covers only roles and texts, so model settings can change
without invalidating recorded responses.  A live provider given a
``fixture_dir`` records every exchange in exactly this format.
"""

from __future__ import annotations

import ast
import hashlib
import json
import os
import re
import threading
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import httpx

from .errors import ConfigurationError, ExtractionError, FixtureMissingError, ProviderError
from .promptkit import Conversation
from .records import PBTSource

PROVIDERS = ("live", "replay", "scripted")
DEFAULT_MODEL = "gemini-2.0-flash-lite-preview-02-05"
SCRIPT_FILE = "script.json"


@dataclass(frozen=True)
class ProviderConfig:
    provider: str = "replay"
    model_name: str = DEFAULT_MODEL
    temperature: float = 0.0
    sample_count: int = 1
    endpoint: Optional[str] = None
    api_key_env: Optional[str] = None
    fixture_dir: Optional[str] = None
    script: tuple = ()  # scripted responses, consumed in order
    request_timeout: float = 120.0

    def validate(self) -> "ProviderConfig":
        if self.provider not in PROVIDERS:
            raise ConfigurationError(f"provider must be one of {', '.join(PROVIDERS)}, got {self.provider!r}")
        if self.sample_count != 1:
            raise ConfigurationError("only sample_count = 1 is supported")
        if self.temperature < 0:
            raise ConfigurationError("temperature must be non-negative")
        if self.provider == "replay" and not self.fixture_dir:
            raise ConfigurationError("replay provider requires fixture_dir")
        if self.provider == "live" and not (self.endpoint and self.api_key_env):
            raise ConfigurationError("live provider requires endpoint and api_key_env")
        return self


@dataclass(frozen=True)
class LLMResponse:
    text: str
    provider_meta: dict = field(default_factory=dict)


def conversation_digest(conversation: Conversation) -> str:
    return hashlib.sha256(conversation.canonical()).hexdigest()


def fixture_record(conversation: Conversation, response: LLMResponse) -> dict:
    return {
        "digest": conversation_digest(conversation),
        "conversation": conversation.to_list(),
        "response": response.text,
        "provider_meta": response.provider_meta,
    }


def write_fixture(fixture_dir, conversation: Conversation, response: LLMResponse) -> Path:
    record = fixture_record(conversation, response)
    path = Path(fixture_dir) / f"{record['digest']}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record, indent=2, ensure_ascii=False, sort_keys=True) + "\n", encoding="utf-8")
    return path


class Provider:
    def __init__(self, config: ProviderConfig):
        self.config = config.validate()
        self.calls = 0

    def complete(self, conversation: Conversation) -> LLMResponse:
        if not len(conversation):
            raise ProviderError("conversation is empty")
        self.calls += 1
        return self._complete(conversation)

    def _complete(self, conversation: Conversation) -> LLMResponse:  # pragma: no cover
        raise NotImplementedError


class ReplayProvider(Provider):
    def _complete(self, conversation):
        digest = conversation_digest(conversation)
        path = Path(self.config.fixture_dir) / f"{digest}.json"
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise FixtureMissingError(digest) from None
        except (OSError, json.JSONDecodeError) as exc:
            raise ProviderError(f"unreadable fixture {path.name}: {exc}") from exc
        return LLMResponse(record["response"], dict(record.get("provider_meta") or {}, digest=digest))


class ScriptedProvider(Provider):
    """Test double returning queued responses in order."""

    def __init__(self, config: ProviderConfig, responses: Optional[Iterable[str]] = None):
        super().__init__(config)
        if responses is None:
            responses = config.script
            if not responses and config.fixture_dir:
                responses = load_script(config.fixture_dir)
        self._queue = deque(responses)
        self._lock = threading.Lock()

    def _complete(self, conversation):
        with self._lock:
            if not self._queue:
                raise FixtureMissingError(conversation_digest(conversation),
                                          "scripted provider has no responses left")
            text = self._queue.popleft()
        return LLMResponse(text, {"provider": "scripted"})


def load_script(fixture_dir) -> list:
    path = Path(fixture_dir) / SCRIPT_FILE
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigurationError(f"scripted provider needs {path}") from None
    if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
        raise ConfigurationError(f"{path} must hold a JSON list of response strings")
    return data


class LiveProvider(Provider):
    """OpenAI-style chat-completions adapter.

    Sends ``{"model", "messages", "temperature", "n"}`` and returns the first
    choice.  When ``fixture_dir`` is set every exchange is recorded.
    """

    def __init__(self, config: ProviderConfig, transport: Optional[httpx.BaseTransport] = None):
        super().__init__(config)
        self._transport = transport

    def _complete(self, conversation):
        key = os.environ.get(self.config.api_key_env or "")
        if not key:
            raise ProviderError(f"environment variable {self.config.api_key_env} is not set", status=401)
        payload = {
            "model": self.config.model_name,
            "messages": [{"role": m.role, "content": m.text} for m in conversation],
            "temperature": self.config.temperature,
            "n": self.config.sample_count,
        }
        try:
            with httpx.Client(transport=self._transport, timeout=self.config.request_timeout) as client:
                reply = client.post(self.config.endpoint, json=payload,
                                    headers={"Authorization": f"Bearer {key}"})
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport failure: {exc}") from exc
        if reply.status_code >= 400:
            raise ProviderError(f"provider returned HTTP {reply.status_code}: {reply.text[:500]}",
                                status=reply.status_code)
        try:
            body = reply.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed provider response: {exc}", status=reply.status_code) from exc
        meta = {"model": body.get("model", self.config.model_name)}
        response = LLMResponse(text or "", meta)
        if self.config.fixture_dir:
            write_fixture(self.config.fixture_dir, conversation, response)
        return response


def make_provider(config: ProviderConfig, **kwargs) -> Provider:
    config.validate()
    cls = {"live": LiveProvider, "replay": ReplayProvider, "scripted": ScriptedProvider}[config.provider]
    return cls(config, **kwargs)


def complete(provider, conversation: Conversation) -> LLMResponse:
    """Complete with a provider instance or a config (a fresh provider)."""
    if isinstance(provider, ProviderConfig):
        provider = make_provider(provider)
    return provider.complete(conversation)


# -- extraction ---------------------------------------------------------------

_FENCE = re.compile(r"^```[ \t]*([\w+-]*)[^\n]*\n(.*?)^```[ \t]*$", re.S | re.M)
_TEST_DEF = re.compile(r"^(?:async\s+)?def\s+(test\w*)\s*\(")


def code_blocks(text: str) -> list:
    blocks = [m.group(2) for m in _FENCE.finditer(text)]
    if not blocks and any(_TEST_DEF.match(line) for line in text.splitlines()):
        # an unfenced reply that is itself code
        blocks = [text]
    return blocks


def _test_spans_ast(lines: Sequence[str]):
    tree = ast.parse("\n".join(lines))
    spans = []
    for node in tree.body:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node.name.startswith("test"):
            start = min([node.lineno] + [d.lineno for d in node.decorator_list]) - 1
            spans.append((node.name, start, node.end_lineno))
    return spans


def _test_spans_lines(lines: Sequence[str]):
    """Fallback for blocks that do not parse: split at column-0 ``def test``."""
    spans = []
    tops = [i for i, line in enumerate(lines) if line[:1] not in ("", " ", "\t", "#", ")", "]", "}")]
    for i, line in enumerate(lines):
        m = _TEST_DEF.match(line)
        if not m:
            continue
        start = i
        # absorb the decorators above, including multi-line ones
        j = i - 1
        while j >= 0:
            if lines[j].startswith("@"):
                start = j
            elif not (lines[j][:1] in (" ", "\t", ")", "]", "}") and lines[j].strip()):
                break
            j -= 1
        later = [t for t in tops if t > i]
        end = later[0] if later else len(lines)
        # stop before a following decorator run or comment belonging to the next unit
        while end > i + 1 and (not lines[end - 1].strip() or lines[end - 1].startswith("#")):
            end -= 1
        spans.append((m.group(1), start, end))
    # decorators of the next test are top-level lines too; trim overlaps
    fixed = []
    for k, (name, start, end) in enumerate(spans):
        if k + 1 < len(spans):
            end = min(end, spans[k + 1][1])
            while end > start + 1 and (not lines[end - 1].strip() or lines[end - 1].startswith("#")):
                end -= 1
        fixed.append((name, start, end))
    return fixed


def _comment_above(lines, start):
    k = start
    while k > 0 and lines[k - 1].lstrip().startswith("#") and not lines[k - 1].startswith((" ", "\t")):
        k -= 1
    comment = [line.lstrip()[1:].strip() for line in lines[k:start]]
    return k, " ".join(c for c in comment if c)


def split_block(block: str) -> list:
    lines = block.splitlines()
    try:
        spans = _test_spans_ast(lines)
    except SyntaxError:
        spans = _test_spans_lines(lines)
    if not spans:
        return []
    owned = set()
    units = []
    for name, start, end in spans:
        top, comment = _comment_above(lines, start)
        owned.update(range(top, end))
        units.append((name, top, end, comment))
    preamble = "\n".join(line for i, line in enumerate(lines) if i not in owned).strip("\n")
    out = []
    for name, top, end, comment in units:
        body = "\n".join(lines[top:end]).strip("\n")
        source = (preamble + "\n\n\n" + body if preamble else body) + "\n"
        out.append(PBTSource(name, source, comment or name, property_flagged=not comment))
    return out


def extract_test_sources(response_text: str) -> list:
    """Cut a response into one runnable source unit per test function."""
    units = []
    for block in code_blocks(response_text):
        units.extend(split_block(block))
    if not units:
        raise ExtractionError("the response contains no test function")
    seen: dict[str, int] = {}
    named = []
    for unit in units:
        seen[unit.name] = seen.get(unit.name, 0) + 1
        if seen[unit.name] > 1:
            unit = PBTSource(f"{unit.name}__{seen[unit.name]}", unit.source, unit.property_text,
                             unit.property_flagged)
        named.append(unit)
    return named
