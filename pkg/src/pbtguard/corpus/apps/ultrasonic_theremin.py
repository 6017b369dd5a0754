"""Ultrasonic theremin: a buzzer whose volume rises as a hand approaches
the distance sensor."""

from __future__ import annotations

from dataclasses import dataclass

from ..gpio import DistanceSensor, PWMOutputDevice

MAX_RANGE = 2.0


def volume_for(distance: float, max_range: float = MAX_RANGE) -> float:
    return min(max(1.0 - distance / max_range, 0.0), 1.0)


@dataclass(frozen=True)
class ThereminState:
    distance: float
    volume: float


class UltrasonicTheremin:
    def __init__(self, echo_pin=17, trigger_pin=4, buzzer_pin=18, *, max_range=MAX_RANGE, pin_factory=None):
        self.max_range = max_range
        self.sensor = DistanceSensor(echo=echo_pin, trigger=trigger_pin, max_distance=max_range,
                                     pin_factory=pin_factory)
        self.buzzer = PWMOutputDevice(buzzer_pin, pin_factory=pin_factory)
        self.sensor.echo.add_listener(lambda _level: self.update())
        self.update()

    @property
    def volume(self) -> float:
        return self.buzzer.value

    def update(self) -> float:
        self.buzzer.value = volume_for(self.sensor.distance, self.max_range)
        return self.buzzer.value

    def close(self):
        self.sensor.close()
        self.buzzer.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
