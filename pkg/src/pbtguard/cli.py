"""Command line entry points.

Every command prints a delimited report: a ``== pbtguard <command> ==``
header, tab-separated ``key<TAB>value`` lines and an ``== end ==`` footer.
File outputs (session files, traces, event logs, reports, figures) are
written under ``--out`` only.

Settings resolve as: command-line flag, then the JSON ``--config`` file,
then ``PBTGUARD_*`` environment variables, then the built-in default.

Exit codes:
    0  success (guard: clean trace)
    2  usage error
    3  bundle error
    4  provider error, including a missing replay fixture
    5  guard extraction error or a PBT that cannot become a guard
    6  configuration error
    7  evaluation error (inconsistent mapping, uncovered input, bad patch)
    8  fixture verification found mismatched or missing files
   10  guard run with warnings
   11  guard run with blocked commands
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .analyzer import DEFAULT_TIMEOUT, run_pbt
from .bundle import load_bundle
from .corpus import get_subject, manifest_path
from .errors import (BundleError, ClassificationError, ConfigurationError, ContractError, DomainError,
                     GuardExtractionError, MappingConsistencyError, ProviderError, SchemeCoverageError,
                     UnknownFieldError)
from .evalkit import (compute_relevance, evaluate_executability, level_counts, load_mapping,
                      load_quality_table, load_scheme, measure_effectiveness, summarize_effectiveness)
from .fixtures import FIXTURES_DIR, MANIFEST_PATH, OK, load_manifest, verify_fixtures
from .guardrail import MonitorPolicy, compile_guards, load_guards, run_monitored, save_guards
from .llmclient import DEFAULT_MODEL, ProviderConfig, split_block
from .orchestrator import LoopConfig, generate_pbts, ledger, write_session, write_transcript
from .records import GeneratedPBT, OutcomeClass, PBTReport, Status, TestOutcome

log = logging.getLogger("pbtguard")

EXIT_OK = 0
EXIT_BUNDLE = 3
EXIT_PROVIDER = 4
EXIT_GUARD = 5
EXIT_CONFIG = 6
EXIT_EVAL = 7
EXIT_FIXTURES = 8
EXIT_WARNED = 10
EXIT_BLOCKED = 11
GUARD_EXIT = {"clean": EXIT_OK, "warned": EXIT_WARNED, "blocked": EXIT_BLOCKED}

DEFAULT_CONVERSATIONS = FIXTURES_DIR / "conversations"
DEFAULT_MAPPING = FIXTURES_DIR / "mapping" / "table2.csv"
DEFAULT_QUALITY = FIXTURES_DIR / "quality" / "table3.csv"
ENV_PREFIX = "PBTGUARD_"


@dataclass
class CommandResult:
    exit_code: int
    summary: str
    rows: list = field(default_factory=list)  # (key, value) pairs for the delimited report


class Settings:
    """Flag > config file > environment > default lookup."""

    def __init__(self, args: argparse.Namespace, config: dict, environ=os.environ):
        self.args = args
        self.config = config
        self.environ = environ

    def get(self, name: str, default=None, cast=None):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.config.get(name)
        if value is None:
            value = self.environ.get(ENV_PREFIX + name.upper())
        if value is None:
            return default
        try:
            return cast(value) if cast else value
        except (TypeError, ValueError):
            raise ConfigurationError(f"invalid value for {name}: {value!r}") from None


def load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"config {path} must hold a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _dump(path: Path, data) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    return path


def _require_out(settings: Settings) -> Path:
    out = settings.get("out")
    if not out:
        raise ConfigurationError("--out is required")
    return Path(out)


# -- generate ------------------------------------------------------------------

def provider_config(settings: Settings) -> ProviderConfig:
    kind = settings.get("provider", "replay")
    fixtures = settings.get("fixtures")
    if kind == "replay" and not fixtures:
        fixtures = str(DEFAULT_CONVERSATIONS)
    return ProviderConfig(
        provider=kind,
        model_name=settings.get("model", DEFAULT_MODEL),
        temperature=settings.get("temperature", 0.0, float),
        endpoint=settings.get("endpoint"),
        api_key_env=settings.get("api_key_env"),
        fixture_dir=fixtures,
        request_timeout=settings.get("request_timeout", 120.0, float),
    )


def cmd_generate(settings: Settings) -> CommandResult:
    bundle_path = settings.get("bundle")
    subject = settings.get("subject")
    if not bundle_path:
        if not subject:
            raise ConfigurationError("generate needs --bundle or --subject")
        bundle_path = manifest_path(subject)
    out = _require_out(settings)
    loop = LoopConfig(settings.get("max_attempts", 3, int), settings.get("timeout", DEFAULT_TIMEOUT, float),
                      provider_config(settings)).validate()
    bundle = load_bundle(bundle_path)
    try:
        result = generate_pbts(bundle, loop)
    except ProviderError as exc:
        transcript = getattr(exc, "transcript", None)
        if transcript is not None:
            write_transcript(out, transcript)
        raise
    write_session(out, result)
    data = ledger(result)
    rows = [("subject", bundle.subject_id), ("llm_calls", data["llm_calls"]), ("verified", data["verified"]),
            ("unresolved", data["unresolved"])]
    for pbt in result.pbts:
        outcome = pbt.final_report.outcome.cls.value if pbt.final_report else "-"
        rows.append((f"pbt:{pbt.name}", f"{pbt.status.value}\t{outcome}\tattempts={pbt.attempts_used}"))
    rows.append(("out", str(out)))
    return CommandResult(EXIT_OK, f"{data['verified']} verified, {data['unresolved']} unresolved", rows)


# -- guard ---------------------------------------------------------------------

def _verified_pbt(path: Path, subject_id: str, timeout: float) -> GeneratedPBT:
    """A PBT file becomes a guard only once it is verified.  A session
    sidecar next to the file is trusted; otherwise the PBT is run here."""
    source = path.read_text(encoding="utf-8")
    sidecar = path.with_suffix(".json")
    name = path.stem
    if sidecar.is_file():
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
        outcome = OutcomeClass(meta.get("outcome") or "runtime_exception")
        report = PBTReport(meta.get("pbt_id", name), TestOutcome(outcome, meta.get("message") or ""), subject_id)
        property_text = meta.get("property_text", "")
    else:
        report = run_pbt(source, subject_id, timeout, pbt_id=name)
        units = split_block(source)
        property_text = units[0].property_text if units else ""
    pbt = GeneratedPBT(f"{subject_id}.{name}", name, source, property_text, final_report=report)
    if pbt.status is not Status.VERIFIED:
        raise ContractError(f"{path.name} is not verified ({report.outcome.cls.value}); "
                            "only passing PBTs become guards")
    return pbt


def cmd_guard(settings: Settings) -> CommandResult:
    source = settings.get("pbt") or settings.get("guards")
    if not source:
        raise ConfigurationError("guard needs --pbt or --guards")
    source = Path(source)
    subject_id = settings.get("subject")
    out = _require_out(settings)
    if source.suffix == ".json":
        file_subject, guards = load_guards(source)
        subject_id = subject_id or file_subject
        if not subject_id:
            raise ConfigurationError("guard file names no subject; pass --subject")
        if file_subject and file_subject != subject_id:
            raise ConfigurationError(f"guard file is for {file_subject}, not {subject_id}")
    else:
        if not subject_id:
            raise ConfigurationError("--subject is required with --pbt")
        pbt = _verified_pbt(source, subject_id, settings.get("timeout", DEFAULT_TIMEOUT, float))
        guards = compile_guards(pbt, subject_id)
    policy = MonitorPolicy.parse(settings.get("policy", "warn"))
    ticks = settings.get("ticks", 20, int)
    fault = settings.get("fault")
    result = run_monitored(subject_id, guards, policy, ticks, fault, out_dir=out)
    save_guards(out / "guards.json", subject_id, guards)

    from .plotting import plot_guard_trace

    fields = sorted({f for g in guards for f in g.fields()})
    figure = plot_guard_trace(result.trace, result.events, fields, out / "trace.png",
                              f"{subject_id} ({policy.mode.value})")
    rows = [("subject", subject_id), ("policy", policy.mode.value), ("ticks", len(result.trace)),
            ("fault", fault or "none"), ("guards", len(guards)), ("status", result.status),
            ("events", len(result.events))]
    for guard in guards:
        rows.append((f"guard:{guard.guard_id}", " and ".join(c.render() for c in guard.constraints)))
    for event in result.events:
        rows.append((f"event:{event.tick}", f"{event.action}\t{event.guard_id}\t{event.detail}"))
    rows += [("trace", str(out / "trace.jsonl")), ("events_log", str(out / "events.jsonl")),
             ("figure", str(figure))]
    return CommandResult(GUARD_EXIT[result.status], result.status, rows)


# -- eval ----------------------------------------------------------------------

def eval_relevance(settings: Settings) -> CommandResult:
    out = _require_out(settings)
    mapping = load_mapping(settings.get("mapping", str(DEFAULT_MAPPING)))
    report = compute_relevance(mapping)
    _dump(out / "relevance.json", report.to_dict())

    from .plotting import plot_relevance

    figure = plot_relevance(report.precision.value, report.recall.value, out / "relevance.png")
    rows = [("precision", str(report.precision)), ("recall", str(report.recall))]
    rows += [(f"count:{k}", v) for k, v in report.counts.items()]
    rows += [("report", str(out / "relevance.json")), ("figure", str(figure))]
    return CommandResult(EXIT_OK, f"precision {report.precision}, recall {report.recall}", rows)


def eval_executability(settings: Settings) -> CommandResult:
    out = _require_out(settings)
    table = Path(settings.get("quality_table", str(DEFAULT_QUALITY)))
    rows_in = load_quality_table(table)
    results = evaluate_executability(rows_in, table.parent, timeout=settings.get("timeout", DEFAULT_TIMEOUT, float),
                                     workers=settings.get("workers", 4, int))
    counts = level_counts(r.level for r in results.values())
    detail = {pid: {"level": r.level.value, "unmodified": r.unmodified, "patched": r.patched,
                    "touched": r.touched, "reason": r.reason} for pid, r in results.items()}
    mismatched = [r.property_id for r in rows_in if results[r.property_id].level.value != r.expected_executability]
    _dump(out / "executability.json", {"counts": counts, "rows": detail, "mismatched": mismatched})

    from .plotting import plot_level_counts

    figure = plot_level_counts(counts, "Executability", out / "executability.png")
    rows = [(lv, n) for lv, n in counts.items()] + [("total", len(rows_in))]
    rows += [(f"pbt:{pid}", f"{d['level']}\t{d['reason']}") for pid, d in detail.items()]
    rows += [("mismatched", ",".join(mismatched) or "none"), ("report", str(out / "executability.json")),
             ("figure", str(figure))]
    summary = ", ".join(f"{n} {lv}" for lv, n in counts.items())
    return CommandResult(EXIT_OK, summary, rows)


def eval_effectiveness(settings: Settings) -> CommandResult:
    out = _require_out(settings)

    from .plotting import plot_cells, plot_level_counts

    pbt_path = settings.get("pbt")
    if not pbt_path:
        table = Path(settings.get("quality_table", str(DEFAULT_QUALITY)))
        summary = summarize_effectiveness(load_quality_table(table))
        _dump(out / "effectiveness.json", summary)
        figure = plot_level_counts(summary["counts"], "Effectiveness", out / "effectiveness.png")
        rows = [(lv, n) for lv, n in summary["counts"].items()]
        rows += [("total", summary["total"]), ("high_percent", summary["high_percent"]),
                 ("report", str(out / "effectiveness.json")), ("figure", str(figure))]
        return CommandResult(EXIT_OK, f"{summary['counts']['HIGH']}/{summary['total']} HIGH "
                                      f"= {summary['high_percent']}%", rows)

    subject_id = settings.get("subject")
    if not subject_id:
        raise ConfigurationError("--subject is required with --pbt")
    subject = get_subject(subject_id)
    scheme_path = settings.get("partitions") or subject.partition_scheme_path
    if not scheme_path:
        raise ConfigurationError(f"subject {subject_id} ships no partition scheme; pass --partitions")
    scheme = load_scheme(scheme_path)
    path = Path(pbt_path)
    pbt = GeneratedPBT(f"{subject_id}.{path.stem}", path.stem, path.read_text(encoding="utf-8"), path.stem)
    result = measure_effectiveness(pbt, scheme, settings.get("samples", 200, int), settings.get("seed", 0, int),
                                   subject_id=subject_id, timeout=settings.get("timeout", 600.0, float))
    hit = {f"{p}={c}": 1 for p, c in result.hit}
    cells = {f"{d.parameter}={c.name}": hit.get(f"{d.parameter}={c.name}", 0)
             for d in scheme.dimensions for c in d.cells}
    data = {"cells_hit": result.cells_hit, "cells_total": result.cells_total, "level": result.level.value,
            "samples": result.samples, "hit": [list(h) for h in result.hit]}
    _dump(out / "effectiveness.json", data)
    figure = plot_cells(cells, f"Partition cells hit ({result.level.value})", out / "effectiveness.png")
    rows = [("cells", f"{result.cells_hit}/{result.cells_total}"), ("level", result.level.value),
            ("samples", result.samples)]
    rows += [(f"cell:{name}", "hit" if n else "miss") for name, n in cells.items()]
    rows += [("report", str(out / "effectiveness.json")), ("figure", str(figure))]
    return CommandResult(EXIT_OK, f"{result.cells_hit}/{result.cells_total} cells, {result.level.value}", rows)


EVAL_KINDS = {"relevance": eval_relevance, "executability": eval_executability, "effectiveness": eval_effectiveness}


def cmd_eval(settings: Settings) -> CommandResult:
    return EVAL_KINDS[settings.args.kind](settings)


# -- fixtures ------------------------------------------------------------------

def cmd_verify_fixtures(settings: Settings) -> CommandResult:
    manifest = load_manifest(settings.get("manifest", str(MANIFEST_PATH)))
    report = verify_fixtures(manifest)
    bad = [(fid, status) for fid, status in report if status != OK]
    rows = [("entries", len(report)), ("ok", len(report) - len(bad))] + [(f"fixture:{f}", s) for f, s in bad]
    return CommandResult(EXIT_FIXTURES if bad else EXIT_OK, f"{len(report) - len(bad)}/{len(report)} ok", rows)


# -- wiring --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbtguard", description="Generate property-based tests for CPS "
                                     "programs, turn them into runtime guards, and evaluate them.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file with default settings")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate and verify PBTs for a subject bundle")
    gen.add_argument("--bundle", help="bundle manifest (JSON)")
    gen.add_argument("--subject", help="use a shipped subject's bundle")
    gen.add_argument("--provider", choices=("live", "replay", "scripted"))
    gen.add_argument("--fixtures", help="fixture directory for replay or scripted providers")
    gen.add_argument("--model", help="model name for the live provider")
    gen.add_argument("--endpoint", help="chat completions URL for the live provider")
    gen.add_argument("--api-key-env", dest="api_key_env", help="environment variable holding the API key")
    gen.add_argument("--max-attempts", dest="max_attempts", type=int)
    gen.add_argument("--timeout", type=float, help="seconds per PBT run")
    gen.add_argument("--out", help="session output directory")

    guard = sub.add_parser("guard", help="run a subject under guards lifted from a PBT")
    guard.add_argument("--subject")
    src = guard.add_mutually_exclusive_group()
    src.add_argument("--pbt", help="verified PBT source file")
    src.add_argument("--guards", help="guard file written by an earlier run")
    guard.add_argument("--policy", choices=("warn", "block"))
    guard.add_argument("--ticks", type=int)
    guard.add_argument("--fault", help="field=value[@tick],... or a named fault")
    guard.add_argument("--timeout", type=float, help="seconds for verifying --pbt")
    guard.add_argument("--out")

    ev = sub.add_parser("eval", help="relevance, executability or effectiveness reports")
    ev.add_argument("kind", choices=sorted(EVAL_KINDS))
    ev.add_argument("--mapping", help="mapping table CSV (relevance)")
    ev.add_argument("--quality-table", dest="quality_table", help="quality table CSV")
    ev.add_argument("--pbt", help="PBT source to instrument (effectiveness)")
    ev.add_argument("--subject")
    ev.add_argument("--partitions", help="partition scheme JSON (effectiveness)")
    ev.add_argument("--samples", type=int)
    ev.add_argument("--seed", type=int)
    ev.add_argument("--timeout", type=float)
    ev.add_argument("--workers", type=int)
    ev.add_argument("--out")

    fx = sub.add_parser("verify-fixtures", help="check fixture checksums")
    fx.add_argument("--manifest")
    return parser


COMMANDS = {"generate": cmd_generate, "guard": cmd_guard, "eval": cmd_eval, "verify-fixtures": cmd_verify_fixtures}


def render(command: str, result: CommandResult) -> str:
    lines = [f"== pbtguard {command} =="]
    lines += [f"{key}\t{value}" for key, value in result.rows]
    lines += [f"summary\t{result.summary}", f"exit\t{result.exit_code}", "== end =="]
    return "\n".join(lines) + "\n"


def run(argv: Optional[Sequence[str]] = None, environ=os.environ) -> CommandResult:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        settings = Settings(args, load_config(args.config), environ)
        return COMMANDS[args.command](settings)
    except BundleError as exc:
        return CommandResult(EXIT_BUNDLE, f"bundle error: {exc}")
    except OSError as exc:
        return CommandResult(EXIT_BUNDLE if args.command == "generate" else EXIT_CONFIG, f"error: {exc}")
    except ProviderError as exc:
        return CommandResult(EXIT_PROVIDER, f"provider error: {exc}")
    except (GuardExtractionError, ContractError) as exc:
        return CommandResult(EXIT_GUARD, f"guard error: {exc}")
    except (MappingConsistencyError, SchemeCoverageError, ClassificationError) as exc:
        return CommandResult(EXIT_EVAL, f"evaluation error: {exc}")
    except (ConfigurationError, UnknownFieldError, DomainError) as exc:
        return CommandResult(EXIT_CONFIG, f"configuration error: {exc}")


def command_label(argv: Sequence[str]) -> str:
    words = [a for a in argv if not a.startswith("-")]
    for i, word in enumerate(words):
        if word in COMMANDS:
            if word == "eval" and i + 1 < len(words) and words[i + 1] in EVAL_KINDS:
                return f"eval {words[i + 1]}"
            return word
    return "pbtguard"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = list(sys.argv[1:] if argv is None else argv)
    result = run(args)
    sys.stdout.write(render(command_label(args), result))
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
