import pytest
from hypothesis import given, strategies as st
from gpiozero import Device
from gpiozero.pins.mock import MockFactory

from pbtguard.corpus.apps.ultrasonic_theremin import UltrasonicTheremin


@pytest.fixture
def theremin():
    Device.pin_factory = MockFactory()
    app = UltrasonicTheremin()
    yield app
    app.close()


# The volume grows as the hand gets closer to the sensor.
@given(near=st.floats(min_value=0.0, max_value=3.0), far=st.floats(min_value=0.0, max_value=3.0))
def test_closer_is_louder(theremin, near, far):
    theremin.sensor.echo.drive_analog(near)
    near_volume = theremin.volume
    theremin.sensor.echo.drive_analog(far)
    if near < far:
        assert near_volume >= theremin.volume
