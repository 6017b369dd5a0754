"""Records passed between the generation, analysis and guard stages."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Optional


class OutcomeClass(str, enum.Enum):
    PASS = "pass"
    SYNTAX_ERROR = "syntax_error"
    COLLECTION_ERROR = "collection_error"
    RUNTIME_EXCEPTION = "runtime_exception"
    ASSERTION_FAILURE = "assertion_failure"
    TIMEOUT = "timeout"
    NO_TEST_PRODUCED = "no_test_produced"


class Status(str, enum.Enum):
    VERIFIED = "verified"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class PBTSource:
    """One test function cut out of a model response.

    ``source`` is a complete module: the response's import preamble followed
    by the property comment, decorators and the function itself.
    """

    name: str
    source: str
    property_text: str
    property_flagged: bool = False  # True when no comment was found


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # keep pytest from collecting this class

    cls: OutcomeClass
    message: str = ""
    duration: float = 0.0

    @property
    def passed(self) -> bool:
        return self.cls is OutcomeClass.PASS


@dataclass(frozen=True)
class PBTReport:
    pbt_id: str
    outcome: TestOutcome
    subject_id: str
    attempt: int = 0
    # input vectors recorded by the harness (effectiveness runs only)
    inputs: tuple = field(default=(), compare=False)

    def to_dict(self, with_duration: bool = True) -> dict:
        out = {
            "pbt_id": self.pbt_id,
            "subject_id": self.subject_id,
            "attempt": self.attempt,
            "outcome": self.outcome.cls.value,
            "message": self.outcome.message,
        }
        if with_duration:
            out["duration"] = self.outcome.duration
        return out


@dataclass
class GeneratedPBT:
    pbt_id: str
    name: str
    source: str
    property_text: str
    attempts_used: int = 0
    final_report: Optional[PBTReport] = None
    property_flagged: bool = False

    @property
    def status(self) -> Status:
        if self.final_report is not None and self.final_report.outcome.passed:
            return Status.VERIFIED
        return Status.UNRESOLVED

    def sidecar(self) -> dict:
        """Metadata written next to the source file (no timings)."""
        report = self.final_report
        return {
            "pbt_id": self.pbt_id,
            "test_name": self.name,
            "property_text": self.property_text,
            "property_flagged": self.property_flagged,
            "status": self.status.value,
            "attempts_used": self.attempts_used,
            "outcome": report.outcome.cls.value if report else None,
            "message": report.outcome.message if report else None,
        }


def as_plain(obj) -> dict:
    return asdict(obj)
