"""Loading of a subject's input bundle: description, source code and unit tests.

A bundle is described by a small JSON manifest listing every file
explicitly, relative to the manifest's ``root`` (default: the manifest's
own directory).  Nothing is auto-discovered, so the prompt built from a
bundle only changes when the manifest or the files do.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .errors import BundleError, BundleIOError

PathLike = Union[str, Path]


@dataclass(frozen=True)
class InputBundle:
    subject_id: str
    description: str
    code_files: tuple  # ((relative path, text), ...)
    unit_test_files: tuple

    def __post_init__(self):
        if not self.description.strip():
            raise BundleError("description required")
        if not self.code_files:
            raise BundleError("at least one code file required")
        if not self.unit_test_files:
            raise BundleError("unit test required")


def _read_text(path: Path) -> str:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise BundleIOError(path, exc.strerror or str(exc)) from exc
    try:
        # newline handling is left alone so the text is byte-for-byte the file
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise BundleIOError(path, "not valid UTF-8") from exc


def read_manifest(manifest_path: PathLike) -> dict:
    path = Path(manifest_path)
    raw = _read_text(path)
    try:
        manifest = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise BundleError(f"{path}: invalid manifest JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(manifest, dict):
        raise BundleError(f"{path}: manifest must be a JSON object")
    return manifest


def manifest_root(manifest_path: PathLike, manifest: dict) -> Path:
    base = Path(manifest_path).parent
    return (base / manifest.get("root", ".")).resolve()


def load_bundle(manifest_path: PathLike) -> InputBundle:
    """Read the files a manifest names and return a validated bundle."""
    manifest = read_manifest(manifest_path)
    subject_id = manifest.get("subject_id")
    if not subject_id:
        raise BundleError(f"{manifest_path}: subject_id required")
    root = manifest_root(manifest_path, manifest)

    description_path = manifest.get("description_path")
    if not description_path:
        raise BundleError("description required")
    unit_test_paths = list(manifest.get("unit_test_paths") or [])
    if not unit_test_paths:
        raise BundleError("unit test required")
    code_paths = list(manifest.get("code_paths") or [])
    if not code_paths:
        raise BundleError("at least one code file required")

    description = _read_text(root / description_path)
    code_files = tuple((p, _read_text(root / p)) for p in code_paths)
    unit_tests = tuple((p, _read_text(root / p)) for p in unit_test_paths)
    return InputBundle(subject_id, description, code_files, unit_tests)
