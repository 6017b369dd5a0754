"""Pneumatic control system: a horizontal cylinder A and a vertical
cylinder B performing a pick-and-place cycle.

Positions run from 0 to 2.  The vertical cylinder is raised at 0 and
lowered at 2; the horizontal cylinder starts on the left (0) and places
objects on the right (2).  Cylinders travel at one position unit per
second.  A mock sensor layer samples the cylinders every ``mock_interval``
and the controller, running every ``controller_interval``, commands at
most one cylinder per decision:

    B down, B up, A right, B down, B up, A left, (repeat)

The plant ticks every ``cylinder_interval`` and records one
:class:`SystemState` per tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional

from ..errors import ConfigurationError
from .clock import VirtualClock, as_time

SPEED = Fraction(1)
MIN_POS = Fraction(0)
MAX_POS = Fraction(2)
RAISED = MIN_POS
LOWERED = MAX_POS
LEFT = MIN_POS
RIGHT = MAX_POS

CYCLE = (
    ("b", LOWERED),
    ("b", RAISED),
    ("a", RIGHT),
    ("b", LOWERED),
    ("b", RAISED),
    ("a", LEFT),
)


@dataclass(frozen=True)
class PCSConfig:
    total_time: float = 40
    cylinder_interval: float = 1
    controller_interval: float = 1
    mock_interval: float = 1
    seed: int = 0

    def validate(self) -> "PCSConfig":
        for name in ("total_time", "cylinder_interval", "controller_interval", "mock_interval"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigurationError(f"{name} must be a finite number, got {value!r}")
        if self.total_time < 0:
            raise ConfigurationError("total_time must be non-negative")
        for name in ("cylinder_interval", "controller_interval", "mock_interval"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        return self


@dataclass(frozen=True)
class SystemState:
    tick: int
    time: float
    cylinder_a_loc: float
    cylinder_b_location: float
    a_moving: bool
    b_moving: bool


PCSState = SystemState
STATE_FIELDS = ("tick", "time", "cylinder_a_loc", "cylinder_b_location", "a_moving", "b_moving")


@dataclass(frozen=True)
class CylinderCommand:
    """Targets held by the two valves on a plant tick (None = stopped)."""

    a_target: Optional[Fraction] = None
    b_target: Optional[Fraction] = None
    force: tuple = ()


COMMAND_FIELDS = ("a_target", "b_target")
SAFE_COMMAND = CylinderCommand(None, None)


class Cylinder:
    def __init__(self, name: str, location=MIN_POS):
        self.name = name
        self.location = Fraction(location)
        self.target: Optional[Fraction] = None

    def command(self, target):
        self.target = Fraction(target)

    def stop(self):
        self.target = None

    @property
    def idle(self) -> bool:
        return self.target is None


def _advance(location: Fraction, target: Optional[Fraction], dt: Fraction):
    """Return (new location, moved?, remaining target)."""
    location = min(max(location, MIN_POS), MAX_POS)
    if target is None:
        return location, False, None
    target = min(max(as_time(target), MIN_POS), MAX_POS)
    step = min(SPEED * dt, abs(target - location))
    new = location + step if target > location else location - step
    return new, step > 0, (None if new == target else target)


class SensorMock:
    """Periodically copies the cylinders' positions for the controller."""

    def __init__(self, a: Cylinder, b: Cylinder):
        self.a, self.b = a, b
        self.view = {}
        self.sample()

    def sample(self, _i=None):
        self.view = {
            "a": (self.a.location, self.a.idle),
            "b": (self.b.location, self.b.idle),
        }


class Controller:
    def __init__(self, sensors: SensorMock, cylinders: dict):
        self.sensors = sensors
        self.cylinders = cylinders
        self.phase = 0
        self.commands_issued: list[tuple[int, str]] = []

    def control_step(self, i=None):
        name, target = CYCLE[self.phase]
        location, idle = self.sensors.view[name]
        if idle and location == target:
            self.phase = (self.phase + 1) % len(CYCLE)
            name, target = CYCLE[self.phase]
            location, idle = self.sensors.view[name]
        if idle and location != target:
            self.cylinders[name].command(target)
            self.commands_issued.append((i, name))


CommandChannel = Callable[[int, CylinderCommand, Callable[[CylinderCommand], SystemState]], CylinderCommand]


class MockSystem:
    def __init__(self, total_time, cylinder_interval, controller_interval, mock_interval, seed=0,
                 tamper=None):
        self.config = PCSConfig(total_time, cylinder_interval, controller_interval, mock_interval, seed).validate()
        self.total_time = total_time
        self.cylinder_interval = cylinder_interval
        self.controller_interval = controller_interval
        self.mock_interval = mock_interval
        self.cylinder_a = Cylinder("a", LEFT)
        self.cylinder_b = Cylinder("b", RAISED)
        self.sensors = SensorMock(self.cylinder_a, self.cylinder_b)
        self.controller = Controller(self.sensors, {"a": self.cylinder_a, "b": self.cylinder_b})
        self.tamper = tamper
        self._dt = as_time(cylinder_interval)

    @classmethod
    def from_config(cls, config: PCSConfig, tamper=None) -> "MockSystem":
        return cls(config.total_time, config.cylinder_interval, config.controller_interval,
                   config.mock_interval, config.seed, tamper=tamper)

    @property
    def command(self) -> CylinderCommand:
        return CylinderCommand(self.cylinder_a.target, self.cylinder_b.target)

    def _outcome(self, command: CylinderCommand):
        a = _advance(self.cylinder_a.location, command.a_target, self._dt)
        b = _advance(self.cylinder_b.location, command.b_target, self._dt)
        return a, b

    def predict(self, tick: int, command: CylinderCommand) -> SystemState:
        (a_loc, a_moved, _), (b_loc, b_moved, _) = self._outcome(command)
        state = SystemState(tick, float(tick * self._dt), float(a_loc), float(b_loc), a_moved, b_moved)
        if command.force:
            state = replace(state, **dict(command.force))
        return state

    def _apply(self, tick: int, command: CylinderCommand) -> SystemState:
        state = self.predict(tick, command)
        (a_loc, _, a_target), (b_loc, _, b_target) = self._outcome(command)
        forced = dict(command.force)
        self.cylinder_a.location = as_time(forced.get("cylinder_a_loc", a_loc))
        self.cylinder_b.location = as_time(forced.get("cylinder_b_location", b_loc))
        self.cylinder_a.target = a_target
        self.cylinder_b.target = b_target
        return state

    def execute_scenario(self, channel: Optional[CommandChannel] = None) -> list[SystemState]:
        clock = VirtualClock()
        total = as_time(self.total_time)
        counts = {
            "mock": math.floor(total / as_time(self.mock_interval)),
            "controller": math.floor(total / as_time(self.controller_interval)),
            "cylinder": math.floor(total / self._dt),
        }
        collected_states: list[SystemState] = []

        def plant_step(i: int):
            command = self.command
            if self.tamper is not None:
                command = self.tamper(i, command)
            if channel is not None:
                command = channel(i, command, lambda c, _i=i: self.predict(_i, c))
            collected_states.append(self._apply(i, command))

        clock.every(self.mock_interval, counts["mock"], self.sensors.sample)
        clock.every(self.controller_interval, counts["controller"], self.controller.control_step)
        clock.every(self._dt, counts["cylinder"], plant_step)
        clock.run()
        return collected_states


def pcs_execute_scenario(config: PCSConfig) -> list[SystemState]:
    return MockSystem.from_config(config.validate()).execute_scenario()
