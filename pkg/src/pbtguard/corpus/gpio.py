"""A small gpiozero-compatible pin layer backed entirely by mock pins.

Only the pieces the corpus applications need are provided: a mock pin
factory, the generic :class:`InputDevice`, a few digital/PWM output
devices, a motor, an LED bar and a distance sensor.  Names and call
signatures follow gpiozero so test code written against the real library
reads naturally here.
"""

from __future__ import annotations

import enum
from typing import Callable, Optional


class GPIOZeroError(Exception):
    pass


class GPIODeviceError(GPIOZeroError):
    pass


class GPIOPinInUse(GPIOZeroError):
    pass


class PinInvalidState(GPIOZeroError):
    pass


class PinInvalidFunction(GPIOZeroError):
    pass


class PinFunction(str, enum.Enum):
    INPUT = "input"
    OUTPUT = "output"


class Pull(str, enum.Enum):
    UP = "up"
    DOWN = "down"
    FLOATING = "floating"


class PinInfo:
    def __init__(self, number: int):
        self.number = number
        self.name = f"GPIO{number}"

    def __repr__(self):
        return self.name


class MockPin:
    """One simulated header pin.

    ``state`` is the electrical level (True = high).  Input pins settle to the
    level implied by their pull resistor until a test drives them.
    """

    def __init__(self, factory: "MockFactory", number: int):
        self.factory = factory
        self.number = number
        self.info = PinInfo(number)
        self._function = PinFunction.INPUT
        self._pull = Pull.FLOATING
        self._state = False
        self._frequency = None
        self.analog = 0.0
        self.in_use = False
        self._listeners: list[Callable[[bool], None]] = []

    def __repr__(self):
        return f"<MockPin {self.info.name} {self._function.value} pull={self._pull.value} state={int(self._state)}>"

    # -- configuration -------------------------------------------------
    @property
    def function(self) -> str:
        return self._function.value

    @function.setter
    def function(self, value):
        try:
            self._function = PinFunction(value)
        except ValueError:
            raise PinInvalidFunction(f"invalid function {value!r} for pin {self.info.name}") from None

    @property
    def pull(self) -> str:
        return self._pull.value

    @pull.setter
    def pull(self, value):
        if self._function is not PinFunction.INPUT:
            raise PinInvalidFunction(f"cannot set pull on non-input pin {self.info.name}")
        try:
            self._pull = Pull(value)
        except ValueError:
            raise PinInvalidState(f"invalid pull {value!r} for pin {self.info.name}") from None
        if self._pull is Pull.UP:
            self._change(True)
        elif self._pull is Pull.DOWN:
            self._change(False)

    @property
    def frequency(self):
        return self._frequency

    @frequency.setter
    def frequency(self, value):
        self._frequency = value

    # -- level ---------------------------------------------------------
    @property
    def state(self):
        return self._state

    @state.setter
    def state(self, value):
        if self._function is not PinFunction.OUTPUT:
            raise PinInvalidFunction(f"cannot set state of input pin {self.info.name}")
        self._change(value)

    def drive_high(self):
        self._drive(True)

    def drive_low(self):
        self._drive(False)

    def drive_analog(self, value: float):
        """Set the analog reading seen by sensors on this pin."""
        self.analog = float(value)
        for listener in list(self._listeners):
            listener(self._state)

    def _drive(self, level: bool):
        if self._function is not PinFunction.INPUT:
            raise PinInvalidFunction(f"cannot drive output pin {self.info.name}")
        self._change(level)

    def _change(self, level):
        old = self._state
        self._state = level
        if old != level:
            for listener in list(self._listeners):
                listener(bool(level) if isinstance(level, bool) else level)

    def add_listener(self, callback: Callable[[bool], None]):
        self._listeners.append(callback)

    def remove_listener(self, callback):
        if callback in self._listeners:
            self._listeners.remove(callback)

    def close(self):
        self._listeners.clear()
        self._function = PinFunction.INPUT
        self._pull = Pull.FLOATING
        self._state = False
        self.analog = 0.0
        self.in_use = False


class MockFactory:
    """Hands out :class:`MockPin` objects and tracks which are reserved."""

    def __init__(self, pin_class=MockPin, pin_count: int = 28):
        self.pin_class = pin_class
        self.pin_count = pin_count
        self.pins: dict[int, MockPin] = {}

    def _lookup(self, number) -> MockPin:
        if isinstance(number, str):
            number = int(number.upper().removeprefix("GPIO"))
        if not isinstance(number, int) or not 0 <= number < self.pin_count:
            raise GPIODeviceError(f"no such pin: {number!r}")
        if number not in self.pins:
            self.pins[number] = self.pin_class(self, number)
        return self.pins[number]

    def pin(self, number) -> MockPin:
        pin = self._lookup(number)
        if pin.in_use:
            raise GPIOPinInUse(f"pin {pin.info.name} is already in use")
        pin.in_use = True
        return pin

    def release(self, pin: MockPin):
        pin.close()

    def reset(self):
        for pin in self.pins.values():
            pin.close()
        self.pins.clear()

    def close(self):
        self.reset()


def reset_pin_factory() -> MockFactory:
    """Install a brand new mock factory, dropping every reserved pin."""
    old = Device.pin_factory
    if old is not None:
        old.reset()
    Device.pin_factory = MockFactory()
    return Device.pin_factory


class Device:
    pin_factory: Optional[MockFactory] = None

    def __init__(self, *, pin_factory=None):
        if pin_factory is None:
            if Device.pin_factory is None:
                Device.pin_factory = MockFactory()
            pin_factory = Device.pin_factory
        self.pin_factory = pin_factory

    def close(self):
        pass

    @property
    def closed(self) -> bool:
        return False

    @property
    def value(self):
        raise NotImplementedError

    @property
    def is_active(self) -> bool:
        return bool(self.value)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class GPIODevice(Device):
    def __init__(self, pin=None, *, pin_factory=None):
        super().__init__(pin_factory=pin_factory)
        if pin is None:
            raise GPIODeviceError("No pin given")
        self._pin = self.pin_factory.pin(pin)

    @property
    def pin(self):
        return self._pin

    @property
    def closed(self) -> bool:
        return self._pin is None

    def close(self):
        if self._pin is not None:
            self.pin_factory.release(self._pin)
            self._pin = None

    def _check_open(self):
        if self._pin is None:
            raise GPIODeviceError(f"{type(self).__name__} is closed or uninitialized")


class InputDevice(GPIODevice):
    """Generic input device.

    ``pull_up`` selects the internal resistor: True pulls the pin high, False
    pulls it low, None leaves it floating.  A floating pin has no natural
    idle level, so ``active_state`` must then say which level counts as
    active; with a pull resistor the active level is implied and
    ``active_state`` must stay None.  ``is_active`` is True when the pin sits
    at the active level, so a pulled-up device is active while driven low.
    """

    def __init__(self, pin=None, *, pull_up=False, active_state=None, pin_factory=None):
        super().__init__(pin, pin_factory=pin_factory)
        try:
            self.pin.function = "input"
            pull = {None: "floating", True: "up", False: "down"}[pull_up]
            if self.pin.pull != pull:
                self.pin.pull = pull
        except BaseException:
            self.close()
            raise
        if pull_up is None:
            if active_state is None:
                name = self.pin.info.name
                self.close()
                raise PinInvalidState(f'Pin {name} is defined as floating, but "active_state" is not defined')
            self._active_state = bool(active_state)
        else:
            if active_state is not None:
                name = self.pin.info.name
                self.close()
                raise PinInvalidState(f'Pin {name} is not floating, but "active_state" is not None')
            self._active_state = False if pull_up else True
        self._inactive_state = not self._active_state
        self.when_activated: Optional[Callable[[], None]] = None
        self.when_deactivated: Optional[Callable[[], None]] = None
        self.pin.add_listener(self._on_change)

    def _on_change(self, level):
        handler = self.when_activated if bool(level) == self._active_state else self.when_deactivated
        if handler is not None:
            handler()

    @property
    def pull_up(self):
        self._check_open()
        pull = self.pin.pull
        if pull == "floating":
            return None
        return pull == "up"

    @property
    def active_state(self) -> bool:
        return self._active_state

    @property
    def value(self) -> int:
        self._check_open()
        return int(bool(self.pin.state) == self._active_state)

    @property
    def is_active(self) -> bool:
        return bool(self.value)


class DigitalInputDevice(InputDevice):
    pass


class LineSensor(DigitalInputDevice):
    """Reflectance sensor; reads active while the pin is driven high."""


class LightSensor(DigitalInputDevice):
    """Light-dependent resistor circuit; active while light reaches it."""

    @property
    def light_detected(self) -> bool:
        return self.is_active


class DistanceSensor(Device):
    """Ultrasonic ranger reading its echo pin's analog value in metres."""

    def __init__(self, echo=None, trigger=None, *, max_distance=1.0, pin_factory=None):
        super().__init__(pin_factory=pin_factory)
        if echo is None or trigger is None:
            raise GPIODeviceError("echo and trigger pins are required")
        self.max_distance = float(max_distance)
        self.echo = self.pin_factory.pin(echo)
        self.trigger = self.pin_factory.pin(trigger)
        self.trigger.function = "output"

    @property
    def closed(self):
        return self.echo is None

    def close(self):
        for name in ("echo", "trigger"):
            pin = getattr(self, name)
            if pin is not None:
                self.pin_factory.release(pin)
                setattr(self, name, None)

    @property
    def distance(self) -> float:
        if self.echo is None:
            raise GPIODeviceError("DistanceSensor is closed")
        return min(max(self.echo.analog, 0.0), self.max_distance)

    @property
    def value(self) -> float:
        return self.distance / self.max_distance


class OutputDevice(GPIODevice):
    def __init__(self, pin=None, *, active_high=True, initial_value=False, pin_factory=None):
        super().__init__(pin, pin_factory=pin_factory)
        self.pin.function = "output"
        self.active_high = active_high
        self._value = 0.0
        self.value = initial_value

    @property
    def value(self):
        return self._value

    @value.setter
    def value(self, value):
        self._check_open()
        self._value = 1 if value else 0
        self.pin.state = bool(value) == self.active_high

    def on(self):
        self.value = 1

    def off(self):
        self.value = 0

    def toggle(self):
        self.value = not self._value


class DigitalOutputDevice(OutputDevice):
    pass


class LED(DigitalOutputDevice):
    @property
    def is_lit(self) -> bool:
        return self.is_active


class PWMOutputDevice(OutputDevice):
    def __init__(self, pin=None, *, active_high=True, initial_value=0, frequency=100, pin_factory=None):
        GPIODevice.__init__(self, pin, pin_factory=pin_factory)
        self.pin.function = "output"
        self.pin.frequency = frequency
        self.active_high = active_high
        self._value = 0.0
        self.value = initial_value

    @property
    def value(self) -> float:
        return self._value

    @value.setter
    def value(self, value):
        self._check_open()
        value = float(value)
        if not 0 <= value <= 1:
            raise ValueError("PWM value must be between 0 and 1")
        self._value = value
        self.pin.state = value if self.active_high else 1 - value


class Motor(Device):
    """Two-pin H-bridge motor; ``value`` is the signed speed in [-1, 1]."""

    def __init__(self, forward=None, backward=None, *, enable=None, pwm=True, pin_factory=None):
        super().__init__(pin_factory=pin_factory)
        if forward is None or backward is None:
            raise GPIODeviceError("forward and backward pins must be provided")
        cls = PWMOutputDevice if pwm else DigitalOutputDevice
        self.forward_device = cls(forward, pin_factory=self.pin_factory)
        self.backward_device = cls(backward, pin_factory=self.pin_factory)
        self.enable_device = None
        if enable is not None:
            self.enable_device = DigitalOutputDevice(enable, initial_value=True, pin_factory=self.pin_factory)
        self._pwm = pwm
        self._speed = 0.0

    @property
    def closed(self):
        return self.forward_device is None

    def close(self):
        for name in ("forward_device", "backward_device", "enable_device"):
            dev = getattr(self, name)
            if dev is not None:
                dev.close()
                setattr(self, name, None)

    @property
    def value(self) -> float:
        return self._speed

    @value.setter
    def value(self, value):
        value = float(value)
        if not -1 <= value <= 1:
            raise ValueError("Motor value must be between -1 and 1")
        if value > 0:
            self.forward(value)
        elif value < 0:
            self.backward(-value)
        else:
            self.stop()

    def forward(self, speed=1):
        self._check_speed(speed)
        self.backward_device.off()
        if self._pwm:
            self.forward_device.value = speed
        else:
            self.forward_device.on()
        self._speed = float(speed)

    def backward(self, speed=1):
        self._check_speed(speed)
        self.forward_device.off()
        if self._pwm:
            self.backward_device.value = speed
        else:
            self.backward_device.on()
        self._speed = -float(speed)

    def stop(self):
        self.forward_device.off()
        self.backward_device.off()
        self._speed = 0.0

    def _check_speed(self, speed):
        if self.forward_device is None:
            raise GPIODeviceError("Motor is closed")
        if not 0 <= speed <= 1:
            raise ValueError("speed must be between 0 and 1")
        if not self._pwm and speed not in (0, 1):
            raise ValueError("non-PWM motors only accept speed 0 or 1")


class LEDBarGraph(Device):
    """A row of LEDs lit from the first pin onwards."""

    def __init__(self, *pins, pin_factory=None):
        super().__init__(pin_factory=pin_factory)
        self.leds = [LED(p, pin_factory=self.pin_factory) for p in pins]

    def __len__(self):
        return len(self.leds)

    @property
    def closed(self):
        return not self.leds

    def close(self):
        for led in self.leds:
            led.close()
        self.leds = []

    @property
    def lit_count(self) -> int:
        return sum(1 for led in self.leds if led.is_lit)

    @property
    def value(self):
        return tuple(led.value for led in self.leds)

    def show(self, count: int):
        for i, led in enumerate(self.leds):
            led.value = i < count

    def off(self):
        self.show(0)
