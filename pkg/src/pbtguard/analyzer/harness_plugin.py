"""pytest plugin copied into every scratch directory as ``conftest.py``.

It runs inside the child process only.  Settings come from
``harness.json`` next to this file; results go to ``report.json`` and, when
input recording is on, ``inputs.jsonl``.
"""

import functools
import json
import traceback
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

HERE = Path(__file__).resolve().parent
CONFIG = json.loads((HERE / "harness.json").read_text(encoding="utf-8"))
TEST_FILE = CONFIG.get("test_file", "test_generated.py")
SEEDS = CONFIG.get("seeds")
SAMPLES = CONFIG.get("max_examples")

settings.register_profile(
    "pbtguard",
    deadline=None,
    database=None,
    derandomize=SEEDS is None,
    print_blob=False,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pbtguard")

RESULTS = {"collect_errors": [], "tests": []}
_inputs_file = open(HERE / "inputs.jsonl", "w", encoding="utf-8") if CONFIG.get("record_inputs") else None
_run = {"index": 0}


def _reset_hardware():
    try:
        from pbtguard.corpus.gpio import reset_pin_factory
    except ImportError:  # pragma: no cover
        return
    reset_pin_factory()


def _plain(value):
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return repr(value)


def _record(kwargs):
    if _inputs_file is None:
        return
    row = {"run": _run["index"], "inputs": {k: _plain(v) for k, v in sorted(kwargs.items())}}
    _inputs_file.write(json.dumps(row) + "\n")


def _wrap_inner(test):
    handle = getattr(test, "hypothesis", None)
    if handle is None or getattr(handle, "_pbtguard_wrapped", False):
        return

    inner = handle.inner_test

    @functools.wraps(inner)
    def per_example(*args, _inner=inner, **kwargs):
        # every generated case starts from fresh mock hardware
        _reset_hardware()
        _record(kwargs)
        return _inner(*args, **kwargs)

    handle.inner_test = per_example
    handle._pbtguard_wrapped = True
    if SAMPLES:
        current = getattr(test, "_hypothesis_internal_use_settings", settings.default)
        test._hypothesis_internal_use_settings = settings(current, max_examples=int(SAMPLES))


def pytest_collection_modifyitems(session, config, items):
    for item in items:
        _wrap_inner(getattr(item, "obj", None))


@pytest.hookimpl(tryfirst=True)
def pytest_pyfunc_call(pyfuncitem):
    if not SEEDS or getattr(pyfuncitem.obj, "hypothesis", None) is None:
        _reset_hardware()
        return None
    names = pyfuncitem._fixtureinfo.argnames
    funcargs = {name: pyfuncitem.funcargs[name] for name in names}
    for index, seed in enumerate(SEEDS):
        _run["index"] = index
        pyfuncitem.obj._hypothesis_internal_use_seed = seed
        pyfuncitem.obj(**funcargs)
    return True


def _leaves(exc):
    subs = getattr(exc, "exceptions", None)
    if subs:
        out = []
        for sub in subs:
            out.extend(_leaves(sub))
        return out
    return [exc]


def _location(exc):
    frames = [f for f in traceback.extract_tb(exc.__traceback__) if Path(f.filename).name == TEST_FILE]
    if not frames:
        return ""
    return f"{TEST_FILE}:{frames[-1].lineno}"


def _describe(exc):
    parts = []
    for leaf in _leaves(exc):
        text = f"{type(leaf).__name__}: {leaf}".rstrip()
        where = _location(leaf)
        if where:
            text += f"\n  at {where}"
        parts.append(text)
    notes = [n for n in getattr(exc, "__notes__", ()) or () if n.strip()]
    return "\n".join(parts + notes)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if call.when != "call" and not rep.failed:
        return
    entry = {"nodeid": rep.nodeid, "when": call.when, "outcome": rep.outcome}
    if call.excinfo is not None and rep.failed:
        exc = call.excinfo.value
        leaves = _leaves(exc)
        entry["exc_type"] = type(exc).__name__
        entry["assertion"] = all(isinstance(leaf, AssertionError) for leaf in leaves)
        entry["fixture_lookup"] = type(exc).__name__ == "FixtureLookupError"
        entry["message"] = _describe(exc) if not entry["fixture_lookup"] else str(rep.longreprtext)
    RESULTS["tests"].append(entry)


def pytest_collectreport(report):
    if report.failed:
        RESULTS["collect_errors"].append({"nodeid": report.nodeid, "message": str(report.longreprtext)})


def pytest_sessionfinish(session, exitstatus):
    RESULTS["exitstatus"] = int(exitstatus)
    RESULTS["collected"] = session.testscollected
    if _inputs_file is not None:
        _inputs_file.close()
    (HERE / "report.json").write_text(json.dumps(RESULTS), encoding="utf-8")
