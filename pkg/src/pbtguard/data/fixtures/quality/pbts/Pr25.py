import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice, PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


# With a pull resistor the activation is the reverse of the pull direction.
@given(pull_up=st.booleans())
def test_pull_up_reverses_activation(factory, pull_up):
    led = factory.pin(4)
    led.function = "output"
    device = InputDevice(4, pull_up=pull_up)
    led.drive_up(1)
    assert device.is_active == (not pull_up)
    led.drive_up(0)
    assert device.is_active == pull_up
