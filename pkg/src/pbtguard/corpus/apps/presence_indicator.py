"""Presence indicator: a bar of LEDs showing how many people are present,
one LED per ten people."""

from __future__ import annotations

from dataclasses import dataclass

from ..gpio import LEDBarGraph

PEOPLE_PER_LED = 10
DEFAULT_LED_PINS = (5, 6, 13, 19)


def leds_for(count: int, led_count: int = len(DEFAULT_LED_PINS)) -> int:
    return min(count // PEOPLE_PER_LED, led_count)


@dataclass(frozen=True)
class PresenceState:
    present_count: int
    lit_leds: int


class PresenceIndicator:
    def __init__(self, led_pins=DEFAULT_LED_PINS, *, pin_factory=None):
        self.leds = LEDBarGraph(*led_pins, pin_factory=pin_factory)
        self.count = 0

    def update(self, count: int):
        if count < 0:
            raise ValueError("people count cannot be negative")
        self.count = count
        self.leds.show(leds_for(count, len(self.leds)))

    @property
    def lit_leds(self) -> int:
        return self.leds.lit_count

    def close(self):
        self.leds.off()
        self.leds.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
