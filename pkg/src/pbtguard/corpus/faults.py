"""Fault injection for the scenario simulators.

A fault tampers with the command travelling from the controller to the
plant.  Faults naming an actuation field (``cooler_value``, ``a_target``
...) overwrite that part of the command; faults naming a state field
(``cylinder_a_loc``, ``temp`` ...) force the plant into that value on the
affected tick.  A fault without a tick is active on every tick.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

from ..errors import ConfigurationError, UnknownFieldError
from . import get_subject

NAMED_FAULTS = {
    "disable_cooler": ("tcs", "cooler_value=0"),
    "disable_heater": ("tcs", "heater_value=0"),
    "stuck_heater": ("tcs", "heater_value=1"),
}


@dataclass(frozen=True)
class FaultDescriptor:
    field: str
    value: Any
    tick: Optional[int] = None

    def active(self, tick: int) -> bool:
        return self.tick is None or self.tick == tick

    def __str__(self):
        text = f"{self.field}={_format_value(self.value)}"
        return text if self.tick is None else f"{text}@{self.tick}"


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value)


def _parse_value(text: str):
    low = text.strip().lower()
    if low in ("true", "false"):
        return low == "true"
    if low == "none":
        return None
    try:
        return int(low)
    except ValueError:
        pass
    try:
        return float(low)
    except ValueError:
        raise ConfigurationError(f"cannot parse fault value {text!r}") from None


def parse_faults(text: Optional[str]) -> tuple[FaultDescriptor, ...]:
    """Parse ``field=value[@tick]`` items separated by commas.

    Named faults such as ``disable_cooler`` expand to their definition.
    An empty or None string means no fault.
    """
    if not text or not text.strip():
        return ()
    faults = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if item in NAMED_FAULTS:
            faults.extend(parse_faults(NAMED_FAULTS[item][1]))
            continue
        spec, _, tick = item.partition("@")
        name, sep, value = spec.partition("=")
        if not sep or not name.strip():
            raise ConfigurationError(f"fault {item!r} is not of the form field=value[@tick]")
        try:
            tick_value = int(tick) if tick else None
        except ValueError:
            raise ConfigurationError(f"fault tick must be an integer in {item!r}") from None
        faults.append(FaultDescriptor(name.strip(), _parse_value(value), tick_value))
    return tuple(faults)


def make_tamper(subject_id: str, faults: Sequence[FaultDescriptor]) -> Optional[Callable]:
    """Build the command-tampering hook for a scenario, or None for no faults."""
    subject = get_subject(subject_id)
    if subject.scenario_cls is None:
        raise ConfigurationError(f"subject {subject_id!r} has no scenario executor")
    forceable = set(subject.state_fields) - {"tick", "time"}
    for fault in faults:
        if fault.field not in subject.command_fields and fault.field not in forceable:
            raise UnknownFieldError(f"subject {subject_id!r} has no field {fault.field!r}")
    if not faults:
        return None
    faults = tuple(faults)

    def tamper(tick: int, command):
        changes, force = {}, dict(command.force)
        for fault in faults:
            if not fault.active(tick):
                continue
            if fault.field in subject.command_fields:
                changes[fault.field] = fault.value
            else:
                force[fault.field] = fault.value
        if force:
            changes["force"] = tuple(sorted(force.items()))
        return dataclasses.replace(command, **changes) if changes else command

    return tamper


def inject_fault(subject_id: str, faults) -> Callable:
    """Return an executor ``config -> trace`` with ``faults`` applied.

    ``faults`` may be a sequence of :class:`FaultDescriptor` or the textual
    form accepted by :func:`parse_faults`.
    """
    if isinstance(faults, str) or faults is None:
        faults = parse_faults(faults)
    subject = get_subject(subject_id)
    tamper = make_tamper(subject_id, faults)

    def execute(config=None):
        config = (config or subject.default_config()).validate()
        return subject.scenario_cls.from_config(config, tamper=tamper).execute_scenario()

    return execute
