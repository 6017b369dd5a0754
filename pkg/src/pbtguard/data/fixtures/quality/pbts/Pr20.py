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


# The LEDs show the number of people present divided by 10.
@given(count=st.integers(min_value=0, max_value=39))
def test_leds_show_count_over_ten(indicator, count):
    indicator.update(count)
    assert indicator.lit_leds == count // 10
