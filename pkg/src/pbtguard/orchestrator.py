"""Phase one: prompt the model, run every extracted test, and feed failures
back until the tests pass or the attempt budget runs out.

Session directory written by :func:`write_session`::

    <out>/pbts/<test name>.py     final source of each generated test
    <out>/pbts/<test name>.json   sidecar: property text, status, attempts, outcome
    <out>/ledger.json             every sidecar plus extraction failures and totals
    <out>/transcript.json         the full conversation
    <out>/timings.json            wall-clock durations (the only non-reproducible file)
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .analyzer import DEFAULT_TIMEOUT, run_pbt
from .bundle import InputBundle
from .errors import ConfigurationError, ExtractionError, ProviderError
from .llmclient import Provider, ProviderConfig, extract_test_sources, make_provider
from .promptkit import Conversation, Message, build_improvement_message, build_initial_prompt
from .records import GeneratedPBT, OutcomeClass, PBTReport, PBTSource, Status, TestOutcome

log = logging.getLogger(__name__)

RESPONSE_PSEUDO_NAME = "model_response"


@dataclass(frozen=True)
class LoopConfig:
    max_attempts: int = 3
    timeout: float = DEFAULT_TIMEOUT
    provider: ProviderConfig = field(default_factory=ProviderConfig)

    def validate(self) -> "LoopConfig":
        if not isinstance(self.max_attempts, int) or self.max_attempts < 0:
            raise ConfigurationError("max_attempts must be a non-negative integer")
        if self.timeout <= 0:
            raise ConfigurationError("timeout must be positive")
        self.provider.validate()
        return self


@dataclass
class GenerationResult:
    subject_id: str
    pbts: list
    transcript: Conversation
    extraction_failures: list  # PBTReports with outcome no_test_produced
    llm_calls: int

    @property
    def verified(self) -> list:
        return [p for p in self.pbts if p.status is Status.VERIFIED]

    @property
    def unresolved(self) -> list:
        return [p for p in self.pbts if p.status is Status.UNRESOLVED]


Runner = Callable[..., PBTReport]


def _no_test_report(subject_id: str, attempt: int, exc: ExtractionError) -> PBTReport:
    return PBTReport(f"{subject_id}.response-{attempt}", TestOutcome(OutcomeClass.NO_TEST_PRODUCED, str(exc)),
                     subject_id, attempt)


def generate_pbts(bundle: InputBundle, loop_config: LoopConfig, provider: Optional[Provider] = None,
                  runner: Runner = run_pbt) -> GenerationResult:
    loop_config.validate()
    provider = provider or make_provider(loop_config.provider)
    subject_id = bundle.subject_id
    conversation = build_initial_prompt(bundle)
    pbts: dict[str, GeneratedPBT] = {}
    extraction_failures: list[PBTReport] = []
    calls = 0

    def ask() -> str:
        nonlocal calls
        calls += 1
        try:
            response = provider.complete(conversation)
        except ProviderError as exc:
            exc.transcript = conversation
            raise
        conversation.append(Message("assistant", response.text or "(empty response)"))
        return response.text

    def analyse(source: PBTSource, attempt: int) -> PBTReport:
        return runner(source, subject_id, loop_config.timeout, pbt_id=f"{subject_id}.{source.name}",
                      attempt=attempt)

    def absorb(text: str, attempt: int) -> Optional[PBTReport]:
        try:
            sources = extract_test_sources(text)
        except ExtractionError as exc:
            failure = _no_test_report(subject_id, attempt, exc)
            extraction_failures.append(failure)
            return failure
        for source in sources:
            existing = pbts.get(source.name)
            if existing is not None and existing.status is Status.VERIFIED:
                log.info("ignoring a rewrite of verified test %s", source.name)
                continue
            report = analyse(source, attempt)
            pbts[source.name] = GeneratedPBT(
                pbt_id=f"{subject_id}.{source.name}",
                name=source.name,
                source=source.source,
                property_text=source.property_text,
                attempts_used=attempt,
                final_report=report,
                property_flagged=source.property_flagged,
            )
        return None

    pending = absorb(ask(), 0)
    for attempt in range(1, loop_config.max_attempts + 1):
        failing = [(p, p.final_report) for p in pbts.values() if p.status is Status.UNRESOLVED]
        if pending is not None:
            placeholder = PBTSource(RESPONSE_PSEUDO_NAME, "", "")
            failing.append((placeholder, pending))
        if not failing:
            break
        conversation.append(build_improvement_message(failing))
        pending = absorb(ask(), attempt)

    return GenerationResult(subject_id, list(pbts.values()), conversation, extraction_failures, calls)


def ledger(result: GenerationResult) -> dict:
    return {
        "subject_id": result.subject_id,
        "llm_calls": result.llm_calls,
        "verified": len(result.verified),
        "unresolved": len(result.unresolved),
        "pbts": [p.sidecar() for p in result.pbts],
        "extraction_failures": [r.to_dict(with_duration=False) for r in result.extraction_failures],
    }


def _dump(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def write_session(out_dir, result: GenerationResult) -> Path:
    out = Path(out_dir)
    (out / "pbts").mkdir(parents=True, exist_ok=True)
    for pbt in result.pbts:
        (out / "pbts" / f"{pbt.name}.py").write_text(pbt.source, encoding="utf-8")
        _dump(out / "pbts" / f"{pbt.name}.json", pbt.sidecar())
    _dump(out / "ledger.json", ledger(result))
    _dump(out / "transcript.json", result.transcript.to_list())
    timings = {p.name: p.final_report.outcome.duration for p in result.pbts if p.final_report}
    _dump(out / "timings.json", timings)
    return out


def write_transcript(out_dir, conversation: Conversation) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _dump(out / "transcript.json", conversation.to_list())
    return out / "transcript.json"


def load_generated(session_dir) -> list:
    """Read back the generated tests of a session directory."""
    root = Path(session_dir) / "pbts"
    out = []
    for sidecar in sorted(root.glob("*.json")):
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
        source = sidecar.with_suffix(".py").read_text(encoding="utf-8")
        report = None
        if meta.get("outcome"):
            report = PBTReport(meta["pbt_id"], TestOutcome(OutcomeClass(meta["outcome"]), meta.get("message") or ""),
                               meta["pbt_id"].split(".")[0], meta.get("attempts_used", 0))
        out.append(GeneratedPBT(meta["pbt_id"], meta["test_name"], source, meta["property_text"],
                                meta.get("attempts_used", 0), report, meta.get("property_flagged", False)))
    return out
