"""Runs a candidate PBT in a fresh child process and classifies the outcome.

Scratch directory layout (removed after every run)::

    <tmp>/pbtguard-XXXX/
        test_generated.py   the candidate source, verbatim
        conftest.py         copy of harness_plugin.py
        harness.json        settings for the plugin
        subject.py          re-exports the subject's import module
        gpiozero/           shim exposing the mock pin layer under gpiozero names
        report.json         written by the plugin
        inputs.jsonl        recorded input vectors (when requested)

Child exit codes follow pytest (0 passed, 1 failures, 2 interrupted,
5 nothing collected).  A missing report.json means the child died before
pytest finished and is classified from the exit code and captured output.
"""

from __future__ import annotations

import ast
import json
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional, Sequence, Union

from ..corpus import get_subject
from ..errors import ConfigurationError
from ..records import OutcomeClass, PBTReport, PBTSource, TestOutcome

DEFAULT_TIMEOUT = 60.0
OUTPUT_CAP = 64 * 1024
TEST_FILE = "test_generated.py"
SCRATCH_MARK = "<scratch>"

_PLUGIN = Path(__file__).with_name("harness_plugin.py")
_PACKAGE_PARENT = Path(__file__).resolve().parents[2]

GPIOZERO_SHIM = {
    "gpiozero/__init__.py": (
        "import pbtguard.corpus.gpio as _gpio\n"
        "globals().update({k: v for k, v in vars(_gpio).items() if not k.startswith('__')})\n"
    ),
    "gpiozero/pins/__init__.py": "",
    "gpiozero/pins/mock.py": "from pbtguard.corpus.gpio import MockFactory, MockPin\n",
}


def _subject_shim(module: str) -> str:
    return (f"import {module} as _subject\n"
            "globals().update({k: v for k, v in vars(_subject).items() if not k.startswith('__')})\n")


def _cap(text: str, limit: int) -> str:
    if len(text) <= limit:
        return text
    return text[:limit] + f"\n[output truncated at {limit} bytes]"


def _read_capped(handle, limit: int) -> str:
    handle.flush()
    handle.seek(0)
    data = handle.read(limit + 1)
    text = data.decode("utf-8", "replace")
    return _cap(text, limit)


def _scrub(text: str, scratch: Path) -> str:
    for form in {str(scratch), os.path.realpath(scratch)}:
        text = text.replace(form + os.sep, "").replace(form, SCRATCH_MARK)
    return text


def _has_test_function(tree: ast.Module) -> bool:
    return any(isinstance(n, (ast.FunctionDef, ast.AsyncFunctionDef)) and n.name.startswith("test")
               for n in tree.body)


def _syntax_message(exc: SyntaxError) -> str:
    line = (exc.text or "").rstrip("\n")
    where = f"line {exc.lineno}" + (f", column {exc.offset}" if exc.offset else "")
    text = f"SyntaxError: {exc.msg} ({TEST_FILE}, {where})"
    return text + (f"\n    {line.strip()}" if line.strip() else "")


def _classify(report: Optional[dict], returncode: int, output: str) -> tuple:
    if report is None:
        detail = output.strip() or "no output"
        return OutcomeClass.RUNTIME_EXCEPTION, f"test process exited with code {returncode}\n{detail}"
    if report["collect_errors"]:
        return OutcomeClass.COLLECTION_ERROR, "\n".join(e["message"] for e in report["collect_errors"])
    failed = [t for t in report["tests"] if t["outcome"] == "failed"]
    for entry in failed:
        if entry.get("fixture_lookup"):
            return OutcomeClass.COLLECTION_ERROR, entry["message"]
    for entry in failed:
        if not entry.get("assertion"):
            return OutcomeClass.RUNTIME_EXCEPTION, entry["message"]
    if failed:
        return OutcomeClass.ASSERTION_FAILURE, "\n".join(t["message"] for t in failed)
    if report.get("collected", 0) == 0:
        return OutcomeClass.NO_TEST_PRODUCED, "pytest collected no test from the source"
    if not any(t["outcome"] == "passed" for t in report["tests"]):
        return OutcomeClass.NO_TEST_PRODUCED, "every collected test was skipped"
    return OutcomeClass.PASS, ""


def _read_inputs(path: Path) -> tuple:
    if not path.exists():
        return ()
    rows = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rows.append(json.loads(line))
    return tuple(rows)


def run_pbt(source: Union[PBTSource, str], subject_id: str, timeout: float = DEFAULT_TIMEOUT, *,
            pbt_id: Optional[str] = None, attempt: int = 0, record_inputs: bool = False,
            max_examples: Optional[int] = None, seeds: Optional[Sequence[int]] = None,
            output_cap: int = OUTPUT_CAP) -> PBTReport:
    """Execute one candidate test against a corpus subject and classify it."""
    subject = get_subject(subject_id)
    if not timeout or timeout <= 0:
        raise ConfigurationError("timeout must be positive")
    if isinstance(source, PBTSource):
        text = source.source
        pbt_id = pbt_id or source.name
    else:
        text = source
    pbt_id = pbt_id or "pbt"

    def report(cls, message, duration, inputs=()):
        return PBTReport(pbt_id, TestOutcome(cls, _cap(message, output_cap), round(duration, 3)),
                         subject_id, attempt, inputs)

    started = time.monotonic()
    try:
        tree = ast.parse(text, filename=TEST_FILE)
        compile(tree, TEST_FILE, "exec")
    except SyntaxError as exc:
        return report(OutcomeClass.SYNTAX_ERROR, _syntax_message(exc), time.monotonic() - started)
    if not _has_test_function(tree):
        return report(OutcomeClass.NO_TEST_PRODUCED, "the source defines no test function",
                      time.monotonic() - started)

    scratch = Path(tempfile.mkdtemp(prefix="pbtguard-"))
    try:
        (scratch / TEST_FILE).write_text(text, encoding="utf-8")
        shutil.copyfile(_PLUGIN, scratch / "conftest.py")
        (scratch / "subject.py").write_text(_subject_shim(subject.import_module), encoding="utf-8")
        for rel, body in GPIOZERO_SHIM.items():
            target = scratch / rel
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(body, encoding="utf-8")
        config = {"test_file": TEST_FILE, "record_inputs": record_inputs,
                  "max_examples": max_examples, "seeds": list(seeds) if seeds is not None else None}
        (scratch / "harness.json").write_text(json.dumps(config), encoding="utf-8")

        env = dict(os.environ)
        env["PYTHONPATH"] = os.pathsep.join([str(scratch), str(_PACKAGE_PARENT)])
        env["PYTHONHASHSEED"] = "0"
        env["PYTHONDONTWRITEBYTECODE"] = "1"
        env.pop("PYTEST_ADDOPTS", None)
        cmd = [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", "--rootdir", str(scratch),
               "-o", "addopts=", "-o", "testpaths=", TEST_FILE]
        with tempfile.TemporaryFile() as out:
            proc = subprocess.Popen(cmd, cwd=scratch, env=env, stdin=subprocess.DEVNULL, stdout=out,
                                    stderr=subprocess.STDOUT, start_new_session=True)
            try:
                returncode = proc.wait(timeout=timeout)
            except subprocess.TimeoutExpired:
                try:
                    os.killpg(proc.pid, signal.SIGKILL)
                except ProcessLookupError:
                    pass
                proc.wait()
                return report(OutcomeClass.TIMEOUT, f"test exceeded the {timeout:g} s time limit",
                              time.monotonic() - started)
            output = _read_capped(out, output_cap)
        duration = time.monotonic() - started
        report_path = scratch / "report.json"
        result = json.loads(report_path.read_text(encoding="utf-8")) if report_path.exists() else None
        cls, message = _classify(result, returncode, _scrub(output, scratch))
        inputs = _read_inputs(scratch / "inputs.jsonl") if record_inputs else ()
        return report(cls, _scrub(message, scratch), duration, inputs)
    finally:
        shutil.rmtree(scratch, ignore_errors=True)


__all__ = ["run_pbt", "DEFAULT_TIMEOUT", "OUTPUT_CAP", "TEST_FILE"]
