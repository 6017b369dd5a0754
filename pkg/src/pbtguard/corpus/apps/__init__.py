"""Raspberry Pi style applications built on the mock pin layer."""

from __future__ import annotations

import math

from ...errors import ConfigurationError, DomainError
from ..gpio import MockFactory, Motor
from .laser_tripwire import LaserTripwire, TripwireState
from .line_following_robot import LineFollowingRobot, RobotState
from .presence_indicator import PresenceIndicator, PresenceState
from .ultrasonic_theremin import ThereminState, UltrasonicTheremin

APP_IDS = ("laser_tripwire", "line_following_robot", "ultrasonic_theremin", "presence_indicator")


def _step_tripwire(factory, light_present: bool):
    with LaserTripwire(4, pin_factory=factory, output=lambda _msg: None) as app:
        if light_present:
            app.ldr.pin.drive_high()
        else:
            app.ldr.pin.drive_low()
        fired = app.check()
    return TripwireState(bool(light_present), fired)


def _step_robot(factory, left_sensor: bool, right_sensor: bool, speed: float = 0.5):
    if not 0 <= speed <= 1:
        raise DomainError("speed must be within [0, 1]")
    left = Motor(2, 3, pin_factory=factory)
    right = Motor(5, 6, pin_factory=factory)
    with LineFollowingRobot(left, right, 17, 27, speed, pin_factory=factory) as robot:
        if left_sensor:
            robot.left_sensor.pin.drive_high()
        if right_sensor:
            robot.right_sensor.pin.drive_high()
        return RobotState(bool(left_sensor), bool(right_sensor), left.value, right.value)


def _step_theremin(factory, distance: float):
    if not math.isfinite(distance) or distance < 0:
        raise DomainError(f"distance must be a non-negative finite number, got {distance!r}")
    with UltrasonicTheremin(pin_factory=factory) as app:
        app.sensor.echo.drive_analog(distance)
        return ThereminState(distance, app.volume)


def _step_presence(factory, present_count: int):
    if present_count < 0:
        raise DomainError(f"present_count must be non-negative, got {present_count!r}")
    with PresenceIndicator(pin_factory=factory) as app:
        app.update(present_count)
        return PresenceState(present_count, app.lit_leds)


_STEPS = {
    "laser_tripwire": _step_tripwire,
    "line_following_robot": _step_robot,
    "ultrasonic_theremin": _step_theremin,
    "presence_indicator": _step_presence,
}


def app_step(app_id: str, **inputs):
    """Build the app on a private mock factory, apply ``inputs``, and
    return the observable state."""
    try:
        step = _STEPS[app_id]
    except KeyError:
        raise ConfigurationError(f"unknown app {app_id!r}") from None
    return step(MockFactory(), **inputs)


__all__ = [
    "APP_IDS", "app_step", "LaserTripwire", "LineFollowingRobot", "UltrasonicTheremin",
    "PresenceIndicator", "TripwireState", "RobotState", "ThereminState", "PresenceState",
]
