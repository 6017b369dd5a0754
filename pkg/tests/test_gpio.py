import pytest

from pbtguard.corpus.gpio import (LED, Device, GPIODeviceError, GPIOPinInUse, InputDevice, LEDBarGraph,
                                  MockFactory, Motor, PinInvalidFunction, PinInvalidState, reset_pin_factory)


def test_pin_reservation():
    factory = MockFactory()
    pin = factory.pin(4)
    with pytest.raises(GPIOPinInUse):
        factory.pin(4)
    factory.release(pin)
    assert factory.pin("GPIO4") is pin


def test_unknown_pin():
    with pytest.raises(GPIODeviceError):
        MockFactory().pin(99)


@pytest.mark.parametrize("pull_up, idle_active", [(True, False), (False, False)])
def test_input_device_pull_and_activation(pull_up, idle_active):
    with InputDevice(4, pull_up=pull_up, pin_factory=MockFactory()) as device:
        assert device.pin.pull == ("up" if pull_up else "down")
        assert device.is_active is idle_active
        device.pin.drive_high()
        assert device.is_active == (not pull_up)
        device.pin.drive_low()
        assert device.is_active == pull_up


def test_floating_pin_needs_active_state():
    factory = MockFactory()
    with pytest.raises(PinInvalidState):
        InputDevice(4, pull_up=None, pin_factory=factory)
    assert not factory.pins[4].in_use  # the failed constructor released the pin
    with InputDevice(4, pull_up=None, active_state=True, pin_factory=factory) as device:
        device.pin.drive_high()
        assert device.is_active


def test_active_state_with_pull_rejected():
    with pytest.raises(PinInvalidState):
        InputDevice(4, pull_up=True, active_state=True, pin_factory=MockFactory())


def test_close_releases_pin():
    device = InputDevice(4, pin_factory=MockFactory())
    pin = device.pin
    device.close()
    assert device.pin is None and device.closed and not pin.in_use
    with pytest.raises(GPIODeviceError):
        device.value


def test_output_pins_cannot_be_driven():
    led = LED(17, pin_factory=MockFactory())
    with pytest.raises(PinInvalidFunction):
        led.pin.drive_high()
    led.on()
    assert led.is_lit


def test_mock_pin_has_no_drive_up():
    assert not hasattr(MockFactory().pin(4), "drive_up")


def test_non_pwm_motor_speed_is_binary():
    motor = Motor(2, 3, pwm=False, pin_factory=MockFactory())
    motor.forward()
    assert motor.value == 1
    with pytest.raises(ValueError):
        motor.forward(0.5)


def test_pwm_motor_directions():
    motor = Motor(2, 3, pin_factory=MockFactory())
    motor.backward(0.25)
    assert motor.value == -0.25
    motor.stop()
    assert motor.value == 0


def test_bar_graph():
    bar = LEDBarGraph(5, 6, 13, pin_factory=MockFactory())
    bar.show(2)
    assert bar.lit_count == 2 and len(bar) == 3


def test_reset_pin_factory_installs_fresh_factory():
    first = reset_pin_factory()
    first.pin(4)
    second = reset_pin_factory()
    assert second is Device.pin_factory and second is not first
    assert second.pin(4).in_use
