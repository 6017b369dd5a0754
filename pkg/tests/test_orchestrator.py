import json

import pytest

from pbtguard.bundle import load_bundle
from pbtguard.corpus import manifest_path
from pbtguard.errors import ConfigurationError, FixtureMissingError
from pbtguard.llmclient import ProviderConfig, ScriptedProvider
from pbtguard.orchestrator import LoopConfig, generate_pbts, ledger, load_generated, write_session
from pbtguard.records import OutcomeClass, PBTReport, Status, TestOutcome

GOOD = "```python\ndef test_a():\n    assert True\n```"
BAD = "```python\ndef test_a():\n    assert False\n```"
TWO = "```python\ndef test_a():\n    assert True\n\n\ndef test_b():\n    assert False\n```"


def fake_runner(source, subject_id, timeout, *, pbt_id=None, attempt=0, **_):
    text = getattr(source, "source", source)
    cls = OutcomeClass.ASSERTION_FAILURE if "assert False" in text else OutcomeClass.PASS
    return PBTReport(pbt_id, TestOutcome(cls, "AssertionError" if cls is not OutcomeClass.PASS else ""),
                     subject_id, attempt)


@pytest.fixture(scope="module")
def bundle():
    return load_bundle(manifest_path("tcs"))


def _run(bundle, responses, attempts=3):
    config = LoopConfig(attempts, 10, ProviderConfig("scripted"))
    provider = ScriptedProvider(config.provider, responses)
    return generate_pbts(bundle, config, provider=provider, runner=fake_runner)


def test_first_round_pass_makes_one_call(bundle):
    result = _run(bundle, [GOOD])
    assert result.llm_calls == 1 and result.pbts[0].status is Status.VERIFIED


def test_repair_round(bundle):
    result = _run(bundle, [BAD, GOOD])
    assert result.llm_calls == 2
    assert result.pbts[0].status is Status.VERIFIED and result.pbts[0].attempts_used == 1
    roles = [m.role for m in result.transcript]
    assert roles == ["user", "assistant", "user", "assistant"]


def test_budget_bounds_calls(bundle):
    result = _run(bundle, [BAD] * 10, attempts=2)
    assert result.llm_calls == 3 and result.pbts[0].status is Status.UNRESOLVED


def test_zero_attempts_skips_loop(bundle):
    result = _run(bundle, [BAD], attempts=0)
    assert result.llm_calls == 1 and result.unresolved


def test_verified_tests_are_not_resent(bundle):
    result = _run(bundle, [TWO, GOOD.replace("test_a", "test_b")])
    improvement = result.transcript.messages[2].text
    assert "test_b" in improvement and "FAILED TEST 2" not in improvement
    assert {p.name: p.status for p in result.pbts} == {"test_a": Status.VERIFIED, "test_b": Status.VERIFIED}


def test_rewrite_of_verified_test_is_ignored(bundle):
    result = _run(bundle, [TWO, TWO.replace("assert False", "assert 1")])
    a = next(p for p in result.pbts if p.name == "test_a")
    assert a.attempts_used == 0


def test_response_without_tests_is_sent_back(bundle):
    result = _run(bundle, ["I would rather not.", GOOD])
    assert result.extraction_failures[0].outcome.cls is OutcomeClass.NO_TEST_PRODUCED
    assert "model_response" in result.transcript.messages[2].text
    assert result.verified


def test_provider_error_keeps_transcript(bundle):
    with pytest.raises(FixtureMissingError) as info:
        _run(bundle, [BAD])
    assert len(info.value.transcript) == 3


def test_invalid_loop_config(bundle):
    with pytest.raises(ConfigurationError):
        LoopConfig(-1).validate()


def test_session_round_trip(bundle, tmp_path):
    result = _run(bundle, [TWO, GOOD.replace("test_a", "test_b")])
    write_session(tmp_path, result)
    data = json.loads((tmp_path / "ledger.json").read_text())
    assert data == ledger(result)
    assert "duration" not in json.dumps(data)
    loaded = {p.name: p for p in load_generated(tmp_path)}
    assert set(loaded) == {"test_a", "test_b"} and loaded["test_b"].status is Status.VERIFIED
    assert (tmp_path / "pbts" / "test_a.py").read_text().startswith("def test_a")
