import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice, PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


# Closing the input device releases its pin.
@given(pull_up=st.booleans())
def test_close_releases_pin(factory, pull_up):
    device = InputDevice(4, pull_up=pull_up)
    pin = device.pin
    device.close()
    assert device.pin is None and not pin.in_use
