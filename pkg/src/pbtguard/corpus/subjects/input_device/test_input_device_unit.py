import pytest

from pbtguard.corpus.gpio import Device, InputDevice, MockFactory, PinInvalidState


def test_pull_down_device_active_when_high():
    Device.pin_factory = MockFactory()
    with InputDevice(4) as device:
        assert device.pin.pull == "down"
        device.pin.drive_high()
        assert device.is_active


def test_floating_pin_needs_active_state():
    Device.pin_factory = MockFactory()
    with pytest.raises(PinInvalidState):
        InputDevice(4, pull_up=None)
