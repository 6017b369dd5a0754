from pathlib import Path

import pytest

from pbtguard.fixtures import FIXTURES_DIR


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def quality_dir(fixtures_dir) -> Path:
    return fixtures_dir / "quality"


@pytest.fixture(autouse=True)
def _fresh_pin_factory():
    from pbtguard.corpus.gpio import Device

    Device.pin_factory = None
    yield
    Device.pin_factory = None
