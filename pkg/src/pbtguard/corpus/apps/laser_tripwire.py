"""Laser tripwire: an LDR watches a laser beam and raises the alarm when
the beam is interrupted."""

from __future__ import annotations

from dataclasses import dataclass

from ..gpio import LightSensor

ALARM_TEXT = "INTRUDER"


@dataclass(frozen=True)
class TripwireState:
    light_present: bool
    intruder_printed: bool


class LaserTripwire:
    def __init__(self, ldr_pin=4, *, pin_factory=None, output=print):
        self.ldr = LightSensor(ldr_pin, pin_factory=pin_factory)
        self.output = output
        self.messages: list[str] = []

    def check(self) -> bool:
        """Print the alarm if the beam is broken; return True when it fired."""
        if self.ldr.light_detected:
            return False
        self.messages.append(ALARM_TEXT)
        self.output(ALARM_TEXT)
        return True

    def close(self):
        self.ldr.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
