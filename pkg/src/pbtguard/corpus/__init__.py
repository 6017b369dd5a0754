"""Subject programs under test and their registry.

Each subject ships a manifest under ``corpus/subjects/<id>/`` naming its
description, source files, example unit tests, state schema, safe command
and partition scheme.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

from ..errors import UnknownSubjectError

SUBJECTS_DIR = Path(__file__).parent / "subjects"


@dataclass(frozen=True)
class Subject:
    subject_id: str
    program_id: str
    name: str
    import_module: str
    state_fields: tuple
    command_fields: tuple = ()
    scenario_cls: Optional[type] = None
    config_cls: Optional[type] = None
    safe_command: Any = None
    # config field holding the plant tick length (None = one second)
    tick_field: Optional[str] = None

    @property
    def manifest_path(self) -> Path:
        return SUBJECTS_DIR / self.subject_id / "manifest.json"

    @property
    def partition_scheme_path(self) -> Optional[Path]:
        data = json.loads(self.manifest_path.read_text(encoding="utf-8"))
        rel = data.get("partition_scheme_path")
        if not rel:
            return None
        return (self.manifest_path.parent / data.get("root", ".") / rel).resolve()

    def default_config(self):
        if self.config_cls is None:
            raise UnknownSubjectError(f"subject {self.subject_id!r} has no scenario configuration")
        return self.config_cls()

    def config_for_ticks(self, ticks: int, **overrides):
        """Default configuration lengthened to exactly ``ticks`` plant ticks."""
        config = self.default_config()
        fields = {k: v for k, v in vars(config).items()}
        fields.update(overrides)
        interval = fields[self.tick_field] if self.tick_field else 1
        fields["total_time"] = ticks * interval
        return self.config_cls(**fields)


def _build_registry() -> dict[str, Subject]:
    from . import pcs, tcs

    return {
        "tcs": Subject("tcs", "P1", "Temperature Control System", "pbtguard.corpus.tcs", tcs.STATE_FIELDS,
                       tcs.COMMAND_FIELDS, tcs.MockRoom, tcs.TCSConfig, tcs.SAFE_COMMAND),
        "pcs": Subject("pcs", "P2", "Pneumatic Control System", "pbtguard.corpus.pcs", pcs.STATE_FIELDS,
                       pcs.COMMAND_FIELDS, pcs.MockSystem, pcs.PCSConfig, pcs.SAFE_COMMAND,
                       tick_field="cylinder_interval"),
        "laser_tripwire": Subject("laser_tripwire", "P3", "Laser Tripwire",
                                  "pbtguard.corpus.apps.laser_tripwire", ("light_present", "intruder_printed")),
        "line_following_robot": Subject("line_following_robot", "P4", "Line Following Robot",
                                        "pbtguard.corpus.apps.line_following_robot",
                                        ("left_sensor", "right_sensor", "left_motor", "right_motor")),
        "ultrasonic_theremin": Subject("ultrasonic_theremin", "P5", "Ultrasonic Theremin",
                                       "pbtguard.corpus.apps.ultrasonic_theremin", ("distance", "volume")),
        "presence_indicator": Subject("presence_indicator", "P8", "Presence Indicator",
                                      "pbtguard.corpus.apps.presence_indicator", ("present_count", "lit_leds")),
        "input_device": Subject("input_device", "P9", "gpiozero InputDevice", "pbtguard.corpus.gpio",
                                ("pin", "pull", "level", "in_use", "is_active")),
    }


_REGISTRY: Optional[dict[str, Subject]] = None


def subjects() -> dict[str, Subject]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = _build_registry()
    return _REGISTRY


def get_subject(subject_id: str) -> Subject:
    try:
        return subjects()[subject_id]
    except KeyError:
        raise UnknownSubjectError(f"unknown subject {subject_id!r}; known: {', '.join(subjects())}") from None


def manifest_path(subject_id: str) -> Path:
    return get_subject(subject_id).manifest_path


def state_record(state) -> dict:
    """Ordered plain-dict view of a state record (schema order)."""
    from dataclasses import fields

    return {f.name: getattr(state, f.name) for f in fields(state)}


ScenarioExecutor = Callable[[Any], list]
