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


# The volume never gets too high or too low.
@given(distance=st.floats(min_value=0.0, max_value=3.0))
def test_volume_within_limits(theremin, distance):
    theremin.sensor.echo.drive_analog(distance)
    assert 0 <= theremin.volume <= 1
