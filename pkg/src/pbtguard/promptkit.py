"""Prompt synthesis: the four-section initial prompt and improvement messages.

Both prompts are rendered from versioned template files in
``pbtguard/templates``.  A template is plain text split into named
sections by ``%% section NAME`` lines; other ``%%`` lines are comments.
Section text is filled with :class:`string.Template`, so ``$name`` marks a
slot and values are inserted without being re-scanned.
"""

from __future__ import annotations

import json
import string
import threading
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

from .bundle import InputBundle
from .errors import ConfigurationError, ContractError

ROLES = ("system", "user", "assistant")

# fixed section delimiters of the initial prompt
SECTION_NAMES = ("description", "code", "unit_tests", "instruction")
DELIMITERS = {
    "description": ("<<<BEGIN DESCRIPTION>>>", "<<<END DESCRIPTION>>>"),
    "code": ("<<<BEGIN SOURCE CODE>>>", "<<<END SOURCE CODE>>>"),
    "unit_tests": ("<<<BEGIN UNIT TESTS>>>", "<<<END UNIT TESTS>>>"),
    "instruction": ("<<<BEGIN INSTRUCTION>>>", "<<<END INSTRUCTION>>>"),
}
FILE_HEADER = "--- file: {path} ---"


@dataclass(frozen=True)
class Message:
    role: str
    text: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ContractError(f"unknown message role {self.role!r}")
        if not self.text:
            raise ContractError("message text must be non-empty")

    def to_dict(self) -> dict:
        return {"role": self.role, "text": self.text}


class Conversation:
    """Append-only message transcript."""

    def __init__(self, messages: Iterable[Message] = ()):
        self._messages: list[Message] = []
        self._lock = threading.Lock()
        for m in messages:
            self.append(m)

    @property
    def messages(self) -> tuple:
        return tuple(self._messages)

    def append(self, message: Message) -> "Conversation":
        if not isinstance(message, Message):
            raise ContractError("only Message objects can be appended")
        with self._lock:
            self._messages.append(message)
        return self

    def __len__(self):
        return len(self._messages)

    def __iter__(self):
        return iter(self.messages)

    def __eq__(self, other):
        return isinstance(other, Conversation) and self.messages == other.messages

    def to_list(self) -> list:
        return [m.to_dict() for m in self._messages]

    def canonical(self) -> bytes:
        """Fixed serialization of roles and texts (used for fixture digests)."""
        return json.dumps(self.to_list(), ensure_ascii=False, sort_keys=True,
                          separators=(",", ":")).encode("utf-8")

    @classmethod
    def from_list(cls, items: Sequence[dict]) -> "Conversation":
        return cls(Message(item["role"], item["text"]) for item in items)


@dataclass(frozen=True)
class Template:
    name: str
    version: str
    sections: tuple  # ((section name, text), ...)

    def section(self, name: str) -> str:
        for key, text in self.sections:
            if key == name:
                return text
        raise ConfigurationError(f"template {self.name!r} has no section {name!r}")


def parse_template(text: str, name: str = "<template>") -> Template:
    version = ""
    sections: list[tuple[str, list[str]]] = []
    for line in text.splitlines():
        if line.startswith("%%"):
            words = line[2:].split()
            if words[:1] == ["template"] and len(words) >= 3:
                version = words[2]
            elif words[:1] == ["section"] and len(words) == 2:
                sections.append((words[1], []))
            continue
        if not sections:
            if line.strip():
                raise ConfigurationError(f"{name}: text before the first section")
            continue
        sections[-1][1].append(line)
    if not sections:
        raise ConfigurationError(f"{name}: no sections")
    return Template(name, version, tuple((k, "\n".join(lines)) for k, lines in sections))


@lru_cache(maxsize=None)
def load_template(filename: str) -> Template:
    text = resources.files("pbtguard").joinpath("templates", filename).read_text(encoding="utf-8")
    return parse_template(text, filename)


def _fill(text: str, **values) -> str:
    try:
        return string.Template(text).substitute(**values)
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"template slot error: {exc}") from exc


def render_files(files: Sequence[tuple]) -> str:
    parts = []
    for path, text in files:
        body = text if text.endswith("\n") or not text else text + "\n"
        parts.append(FILE_HEADER.format(path=path) + "\n" + body)
    return "\n".join(parts).rstrip("\n")


def build_initial_prompt(bundle: InputBundle, template: str = "initial_prompt.txt") -> Conversation:
    tpl = load_template(template)
    values = {
        "description": bundle.description,
        "code": render_files(bundle.code_files),
        "unit_tests": render_files(bundle.unit_test_files),
    }
    blocks = [_fill(tpl.section(name), **values) for name in SECTION_NAMES]
    return Conversation([Message("user", "\n\n".join(blocks))])


def split_sections(prompt: str) -> dict:
    """Recover the text inside each delimited section of an initial prompt."""
    out = {}
    for name in SECTION_NAMES:
        begin, end = DELIMITERS[name]
        start = prompt.find(begin + "\n")
        stop = prompt.find("\n" + end, start)
        if start < 0 or stop < 0:
            raise ContractError(f"prompt lacks section {name!r}")
        out[name] = prompt[start + len(begin) + 1:stop]
    return out


def build_improvement_message(failures: Sequence[tuple],
                              template: str = "improvement_prompt.txt") -> Message:
    """One user message listing each failed test with its outcome and error.

    ``failures`` holds ``(pbt, report)`` pairs; ``pbt`` needs ``name`` and
    ``source`` attributes and ``report.outcome`` must not be a pass.
    """
    if not failures:
        raise ContractError("improvement message needs at least one failed test")
    tpl = load_template(template)
    blocks = [tpl.section("header")]
    for index, (pbt, report) in enumerate(failures, start=1):
        outcome = report.outcome
        if outcome.passed:
            raise ContractError(f"test {pbt.name!r} passed; only failures can be sent for improvement")
        blocks.append(_fill(
            tpl.section("failure"),
            index=index,
            name=pbt.name,
            outcome=outcome.cls.value,
            source=(pbt.source.rstrip("\n") or "(no test source was extracted)"),
            error=(outcome.message.rstrip("\n") or "(no error text)"),
        ))
    blocks.append(tpl.section("footer"))
    return Message("user", "\n\n".join(blocks))
