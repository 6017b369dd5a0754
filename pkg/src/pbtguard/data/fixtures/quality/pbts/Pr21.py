import pytest
from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory

from pbtguard.corpus.apps.presence_indicator import PresenceIndicator


@pytest.fixture
def indicator():
    Device.pin_factory = MockFactory()
    app = PresenceIndicator()
    yield app
    app.close()


# With ten or more people present at least one LED is lit.
@given(count=st.integers(min_value=10, max_value=39))
def test_one_shown_from_ten_people(indicator, count):
    indicator.update(count)
    assert indicator.lit_leds >= 1
