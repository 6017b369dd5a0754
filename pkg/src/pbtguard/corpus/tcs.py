"""Temperature control system: a room, a sensor, a heater/cooler unit and a
controller that keeps the room between 21 and 23 degrees.

The components run as periodic tasks on a :class:`VirtualClock`.  Every
whole second the room records a :class:`SystemState` and integrates
``temp + outside_air_temp + heater_value - cooler_value``.
"""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass, replace
from typing import Callable, Optional

from ..errors import ConfigurationError, DomainError
from .clock import VirtualClock, as_time
from .gpio import MockFactory, PWMOutputDevice

LOW_SETPOINT = 21
HIGH_SETPOINT = 23
OUTSIDE_AIR_DELTAS = (-1, 0, 1)


class Decision(str, enum.Enum):
    HEAT = "heat"
    COOL = "cool"
    OFF = "off"


def tcs_decide(temp) -> Decision:
    """Map a sensed temperature to the controller's actuation decision."""
    if not math.isfinite(temp):
        raise DomainError(f"temperature must be finite, got {temp!r}")
    if LOW_SETPOINT <= temp <= HIGH_SETPOINT:
        return Decision.OFF
    if temp < LOW_SETPOINT:
        return Decision.HEAT
    return Decision.COOL


@dataclass(frozen=True)
class TCSConfig:
    total_time: float = 20
    sensor_interval: float = 1
    control_interval: float = 1
    initial_temp: Optional[int] = None
    seed: int = 0

    def validate(self) -> "TCSConfig":
        for name in ("total_time", "sensor_interval", "control_interval"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigurationError(f"{name} must be a finite number, got {value!r}")
        if self.total_time < 0:
            raise ConfigurationError("total_time must be non-negative")
        if self.sensor_interval <= 0 or self.control_interval <= 0:
            raise ConfigurationError("sensor_interval and control_interval must be positive")
        # a zero-length scenario is allowed regardless of the intervals
        if self.total_time > 0 and self.total_time < max(self.sensor_interval, self.control_interval):
            raise ConfigurationError("total_time must be at least max(sensor_interval, control_interval)")
        if self.initial_temp is not None and not math.isfinite(self.initial_temp):
            raise ConfigurationError("initial_temp must be finite")
        return self


@dataclass(frozen=True)
class SystemState:
    """One recorded tick.  ``sensed_temp`` is the reading the controller
    last acted on (None before its first decision)."""

    tick: int
    temp: float
    heater_value: float
    cooler_value: float
    outside_air_temp: int
    sensed_temp: Optional[float] = None

    # names used by the original room model
    @property
    def heater_state(self):
        return self.heater_value

    @property
    def cooler_state(self):
        return self.cooler_value


TCSState = SystemState
STATE_FIELDS = ("tick", "temp", "heater_value", "cooler_value", "outside_air_temp", "sensed_temp")


@dataclass(frozen=True)
class Actuation:
    """Command reaching the heater/cooler unit on a plant tick.

    ``force`` pins state fields to given values (used by fault injection).
    """

    heater_value: float = 0.0
    cooler_value: float = 0.0
    force: tuple = ()


COMMAND_FIELDS = ("heater_value", "cooler_value")
SAFE_COMMAND = Actuation(0.0, 0.0)


class Environment:
    def __init__(self, initial_temp: Optional[int] = None, rng: Optional[random.Random] = None):
        self.rng = rng or random.Random(0)
        self.temp = initial_temp if initial_temp is not None else self.rng.randint(20, 24)

    def fetch_temp(self):
        return self.temp

    def set_temp(self, temp):
        self.temp = temp

    def get_outside_air_temp(self) -> int:
        return self.rng.choice(OUTSIDE_AIR_DELTAS)


class TempSensor:
    def __init__(self, env: Environment):
        self.env = env
        self.temp = self.env.fetch_temp()

    def sample(self, _i=None):
        self.temp = self.env.fetch_temp()


class HCUnit:
    def __init__(self, pin_factory: Optional[MockFactory] = None):
        factory = pin_factory or MockFactory()
        self.heater = PWMOutputDevice(12, pin_factory=factory)
        self.cooler = PWMOutputDevice(13, pin_factory=factory)

    def activate_heater(self):
        self.heater.on()
        self.cooler.off()

    def activate_cooler(self):
        self.cooler.on()
        self.heater.off()

    def deactivate(self):
        self.heater.off()
        self.cooler.off()

    def apply(self, command: Actuation):
        self.heater.value = command.heater_value
        self.cooler.value = command.cooler_value

    @property
    def command(self) -> Actuation:
        return Actuation(self.heater.value, self.cooler.value)


class Controller:
    def __init__(self, temp_sensor: TempSensor, hc_unit: HCUnit):
        self.temp_sensor = temp_sensor
        self.hc_unit = hc_unit
        self.last_sensed: Optional[float] = None

    def control_step(self, _i=None):
        temperature = self.temp_sensor.temp
        self.last_sensed = float(temperature)
        decision = tcs_decide(temperature)
        if decision is Decision.OFF:
            self.hc_unit.deactivate()
        elif decision is Decision.HEAT:
            self.hc_unit.activate_heater()
        else:
            self.hc_unit.activate_cooler()


# (tick, proposed command, predict) -> command actually applied
CommandChannel = Callable[[int, Actuation, Callable[[Actuation], SystemState]], Actuation]


class MockRoom:
    """Wires the room components onto a virtual clock for one scenario."""

    def __init__(self, total_time, sensor_interval, control_interval, initial_temp=None, seed=0,
                 tamper=None):
        self.config = TCSConfig(total_time, sensor_interval, control_interval, initial_temp, seed).validate()
        self.rng = random.Random(seed)
        self.env = Environment(initial_temp=initial_temp, rng=self.rng)
        self.total_time = total_time
        self.sensor_interval = sensor_interval
        self.control_interval = control_interval
        self.temp_sensor = TempSensor(self.env)
        self.hc_unit = HCUnit()
        self.controller = Controller(self.temp_sensor, self.hc_unit)
        self.tamper = tamper
        self._outside = 0

    @classmethod
    def from_config(cls, config: TCSConfig, tamper=None) -> "MockRoom":
        return cls(config.total_time, config.sensor_interval, config.control_interval,
                   config.initial_temp, config.seed, tamper=tamper)

    def predict(self, tick: int, command: Actuation) -> SystemState:
        """State recorded for ``tick`` if ``command`` drives the actuators."""
        state = SystemState(
            tick=tick,
            temp=float(self.env.temp),
            heater_value=float(command.heater_value),
            cooler_value=float(command.cooler_value),
            outside_air_temp=self._outside,
            sensed_temp=self.controller.last_sensed,
        )
        if command.force:
            state = replace(state, **dict(command.force))
        return state

    def execute_scenario(self, channel: Optional[CommandChannel] = None) -> list[SystemState]:
        clock = VirtualClock()
        total = as_time(self.total_time)
        sensor_count = math.floor(total / as_time(self.sensor_interval))
        control_count = math.floor(total / as_time(self.control_interval))
        plant_count = math.floor(total)
        collected_states: list[SystemState] = []

        def plant_step(i: int):
            self._outside = self.env.get_outside_air_temp()
            command = self.hc_unit.command
            if self.tamper is not None:
                command = self.tamper(i, command)
            if channel is not None:
                command = channel(i, command, lambda c, _i=i: self.predict(_i, c))
            self.hc_unit.apply(Actuation(command.heater_value, command.cooler_value))
            state = self.predict(i, command)
            collected_states.append(state)
            self.env.set_temp(state.temp + state.outside_air_temp + state.heater_value - state.cooler_value)

        clock.every(self.sensor_interval, sensor_count, self.temp_sensor.sample)
        clock.every(self.control_interval, control_count, self.controller.control_step)
        clock.every(1, plant_count, plant_step)
        clock.run()
        return collected_states


def tcs_execute_scenario(config: TCSConfig) -> list[SystemState]:
    return MockRoom.from_config(config.validate()).execute_scenario()
