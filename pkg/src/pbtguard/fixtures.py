"""Versioned test data and its checksum manifest.

``data/fixtures/manifest.json`` lists every fixture file with a kind and a
sha256 checksum.  Paths are relative to the package directory so that
partition schemes living next to their subjects can be listed too.  The
file format is documented in ``data/fixtures/README.md``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .bundle import load_bundle
from .corpus import manifest_path, subjects
from .errors import ConfigurationError
from .llmclient import LLMResponse, conversation_digest, write_fixture
from .promptkit import build_initial_prompt

PACKAGE_DIR = Path(__file__).resolve().parent
FIXTURES_DIR = PACKAGE_DIR / "data" / "fixtures"
MANIFEST_PATH = FIXTURES_DIR / "manifest.json"
MANIFEST_FORMAT = "pbtguard-fixtures/1"

KINDS = ("conversation", "mapping", "patch", "failure-case", "partition-scheme",
         "pbt", "quality-table", "response", "script")
OK = "ok"
MISMATCH = "checksum-mismatch"
MISSING = "missing"


@dataclass(frozen=True)
class FixtureEntry:
    fixture_id: str
    kind: str
    path: str  # relative to the package directory
    checksum: str

    def to_dict(self) -> dict:
        return {"id": self.fixture_id, "kind": self.kind, "path": self.path, "sha256": self.checksum}


@dataclass(frozen=True)
class FixtureManifest:
    entries: tuple = ()
    base_dir: Path = PACKAGE_DIR

    def to_dict(self) -> dict:
        return {"format": MANIFEST_FORMAT, "entries": [e.to_dict() for e in self.entries]}


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def load_manifest(path=MANIFEST_PATH, base_dir: Optional[Path] = None) -> FixtureManifest:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read fixture manifest {path}: {exc}") from exc
    if data.get("format") != MANIFEST_FORMAT:
        raise ConfigurationError(f"{path}: unsupported manifest format {data.get('format')!r}")
    entries = []
    for raw in data.get("entries", []):
        if raw.get("kind") not in KINDS:
            raise ConfigurationError(f"{path}: unknown fixture kind {raw.get('kind')!r}")
        entries.append(FixtureEntry(raw["id"], raw["kind"], raw["path"], raw["sha256"]))
    return FixtureManifest(tuple(entries), Path(base_dir) if base_dir else PACKAGE_DIR)


def verify_fixtures(manifest: FixtureManifest) -> list:
    """Return ``[(fixture id, ok | checksum-mismatch | missing)]`` for every entry."""
    report = []
    for entry in manifest.entries:
        target = manifest.base_dir / entry.path
        if not target.is_file():
            report.append((entry.fixture_id, MISSING))
        elif sha256_file(target) != entry.checksum:
            report.append((entry.fixture_id, MISMATCH))
        else:
            report.append((entry.fixture_id, OK))
    return report


# -- rebuilding ----------------------------------------------------------------

def _kind_of(rel: Path) -> Optional[str]:
    parts = rel.parts
    if parts[-1] == "partitions.json":
        return "partition-scheme"
    if "__pycache__" in parts or len(parts) < 4 or parts[:2] != ("data", "fixtures"):
        return None
    group = parts[2]
    name = parts[-1]
    if group == "conversations" and name.endswith(".json"):
        return "conversation"
    if group == "responses" and name.endswith(".md"):
        return "response"
    if group == "mapping" and name.endswith(".csv"):
        return "mapping"
    if group == "failures" and name.endswith((".py", ".json")):
        return "failure-case"
    if group == "scripted" and name.endswith(".json"):
        return "script"
    if group == "effectiveness" and name.endswith(".py"):
        return "pbt"
    if group == "quality":
        if name.endswith(".diff"):
            return "patch"
        if name.endswith(".py"):
            return "pbt"
        if name.endswith(".csv"):
            return "quality-table"
    return None


def collect_entries(base_dir: Path = PACKAGE_DIR) -> list:
    files = sorted((base_dir / "data" / "fixtures").rglob("*")) + sorted(
        (base_dir / "corpus" / "subjects").glob("*/partitions.json"))
    entries = []
    for path in files:
        if not path.is_file():
            continue
        rel = path.relative_to(base_dir)
        kind = _kind_of(rel)
        if kind is None:
            continue
        fixture_id = rel.as_posix()
        for prefix in ("data/fixtures/", "corpus/subjects/"):
            fixture_id = fixture_id.removeprefix(prefix)
        entries.append(FixtureEntry(fixture_id, kind, rel.as_posix(), sha256_file(path)))
    return entries


def write_manifest(path=MANIFEST_PATH, base_dir: Path = PACKAGE_DIR) -> FixtureManifest:
    manifest = FixtureManifest(tuple(collect_entries(base_dir)), base_dir)
    Path(path).write_text(json.dumps(manifest.to_dict(), indent=2) + "\n", encoding="utf-8")
    return manifest


def response_subjects(fixtures_dir: Path = FIXTURES_DIR) -> list:
    return sorted(p.stem for p in (fixtures_dir / "responses").glob("*.md"))


def initial_digest(subject_id: str) -> str:
    """Digest of the first-round conversation for a subject's bundle."""
    return conversation_digest(build_initial_prompt(load_bundle(manifest_path(subject_id))))


def rebuild_conversations(fixtures_dir: Path = FIXTURES_DIR, subject_ids: Optional[Iterable[str]] = None) -> list:
    """Write one replay fixture per authored response; drop stale ones."""
    out_dir = fixtures_dir / "conversations"
    out_dir.mkdir(parents=True, exist_ok=True)
    known = set(subjects())
    written = []
    for subject_id in subject_ids or response_subjects(fixtures_dir):
        if subject_id not in known:
            raise ConfigurationError(f"response file for unknown subject {subject_id!r}")
        text = (fixtures_dir / "responses" / f"{subject_id}.md").read_text(encoding="utf-8")
        conversation = build_initial_prompt(load_bundle(manifest_path(subject_id)))
        meta = {"provider": "authored", "subject_id": subject_id}
        written.append(write_fixture(out_dir, conversation, LLMResponse(text, meta)))
    keep = {p.name for p in written}
    for stale in out_dir.glob("*.json"):
        if stale.name not in keep:
            stale.unlink()
    return written
