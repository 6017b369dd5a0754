import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice, PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


# The pull_up argument decides whether the pin is pulled up or down.
@given(pull_up=st.booleans())
def test_pull_up_sets_pin_pull(factory, pull_up):
    with InputDevice(4, pull_up=pull_up) as device:
        assert device.pin.pull == ("up" if pull_up else "down")
