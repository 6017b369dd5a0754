import pytest
from hypothesis import given, strategies as st
from gpiozero import Device, InputDevice, PinInvalidState
from gpiozero.pins.mock import MockFactory, MockPin


@pytest.fixture
def factory():
    Device.pin_factory = MockFactory(pin_class=MockPin)
    return Device.pin_factory


# A floating pin (pull_up=None) needs an explicit active_state.
@given(pin=st.integers(min_value=2, max_value=27))
def test_floating_pin_requires_active_state(factory, pin):
    with pytest.raises(PinInvalidState):
        InputDevice(pin, pull_up=None)
