"""Two-motor robot steering along a line with a pair of line sensors.

A sensor reads "on" when its pin is driven high.  When only the left
sensor sees the line the robot pivots left (left motor backwards, right
forwards); the right sensor mirrors this; otherwise both motors drive
forward at the configured speed.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..gpio import LineSensor, Motor


@dataclass(frozen=True)
class RobotState:
    left_sensor: bool
    right_sensor: bool
    left_motor: float
    right_motor: float


class LineFollowingRobot:
    def __init__(self, left_motor: Motor, right_motor: Motor, left_sensor_pin=17, right_sensor_pin=27,
                 speed=0.5, *, pin_factory=None):
        if not 0 <= speed <= 1:
            raise ValueError("speed must be between 0 and 1")
        self.left_motor = left_motor
        self.right_motor = right_motor
        self.speed = speed
        self.left_sensor = LineSensor(left_sensor_pin, pin_factory=pin_factory)
        self.right_sensor = LineSensor(right_sensor_pin, pin_factory=pin_factory)
        for sensor in (self.left_sensor, self.right_sensor):
            sensor.when_activated = self.update
            sensor.when_deactivated = self.update
        self.update()

    def update(self):
        left_on = self.left_sensor.is_active
        right_on = self.right_sensor.is_active
        s = self.speed
        if left_on and not right_on:
            self.left_motor.value, self.right_motor.value = -s, s
        elif right_on and not left_on:
            self.left_motor.value, self.right_motor.value = s, -s
        else:
            self.left_motor.value, self.right_motor.value = s, s

    def close(self):
        for dev in (self.left_sensor, self.right_sensor, self.left_motor, self.right_motor):
            dev.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
