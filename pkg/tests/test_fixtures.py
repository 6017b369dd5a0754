import json
import shutil

import pytest

from pbtguard.errors import ConfigurationError
from pbtguard.fixtures import (
    MANIFEST_FORMAT,
    MANIFEST_PATH,
    MISMATCH,
    MISSING,
    OK,
    PACKAGE_DIR,
    collect_entries,
    initial_digest,
    load_manifest,
    response_subjects,
    verify_fixtures,
)


def test_pristine_manifest_verifies():
    report = verify_fixtures(load_manifest())
    assert report
    assert all(status == OK for _, status in report)


def test_manifest_is_current():
    # a stale manifest means tools/rebuild_fixtures.py was not rerun
    listed = {e.path: e.checksum for e in load_manifest().entries}
    on_disk = {e.path: e.checksum for e in collect_entries()}
    assert listed == on_disk


def test_every_kind_present():
    kinds = {e.kind for e in load_manifest().entries}
    assert {"conversation", "mapping", "patch", "failure-case", "partition-scheme"} <= kinds


@pytest.fixture()
def package_copy(tmp_path):
    manifest = load_manifest()
    for entry in manifest.entries:
        target = tmp_path / entry.path
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(PACKAGE_DIR / entry.path, target)
    return load_manifest(base_dir=tmp_path)


def test_corrupted_copy_flags_exactly_that_entry(package_copy):
    victim = package_copy.entries[3]
    path = package_copy.base_dir / victim.path
    path.write_bytes(path.read_bytes() + b"\n")
    report = dict(verify_fixtures(package_copy))
    assert report[victim.fixture_id] == MISMATCH
    assert [k for k, v in report.items() if v != OK] == [victim.fixture_id]


def test_missing_file_reported(package_copy):
    victim = package_copy.entries[0]
    (package_copy.base_dir / victim.path).unlink()
    report = dict(verify_fixtures(package_copy))
    assert report[victim.fixture_id] == MISSING
    assert sum(v != OK for v in report.values()) == 1


def test_empty_manifest(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"format": MANIFEST_FORMAT, "entries": []}), encoding="utf-8")
    assert verify_fixtures(load_manifest(path)) == []


def test_bad_format_rejected(tmp_path):
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"format": "other/9", "entries": []}), encoding="utf-8")
    with pytest.raises(ConfigurationError, match="format"):
        load_manifest(path)


def test_unknown_kind_rejected(tmp_path):
    data = json.loads(MANIFEST_PATH.read_text(encoding="utf-8"))
    data["entries"][0]["kind"] = "mystery"
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    with pytest.raises(ConfigurationError, match="kind"):
        load_manifest(path)


def test_unreadable_manifest(tmp_path):
    with pytest.raises(ConfigurationError):
        load_manifest(tmp_path / "absent.json")


@pytest.mark.parametrize("subject_id", response_subjects())
def test_response_has_current_conversation(fixtures_dir, subject_id):
    path = fixtures_dir / "conversations" / f"{initial_digest(subject_id)}.json"
    assert path.is_file(), f"rerun tools/rebuild_fixtures.py for {subject_id}"
