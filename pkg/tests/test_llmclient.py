import json

import httpx
import pytest

from pbtguard.errors import ConfigurationError, ExtractionError, FixtureMissingError, ProviderError
from pbtguard.llmclient import (LiveProvider, LLMResponse, ProviderConfig, ScriptedProvider, code_blocks,
                                complete, conversation_digest, extract_test_sources, make_provider, split_block,
                                write_fixture)
from pbtguard.promptkit import Conversation, Message


def _conv(text="hello"):
    return Conversation([Message("user", text)])


def test_config_validation():
    with pytest.raises(ConfigurationError):
        ProviderConfig("replay").validate()
    with pytest.raises(ConfigurationError):
        ProviderConfig("live", endpoint="http://x").validate()
    with pytest.raises(ConfigurationError):
        ProviderConfig("scripted", sample_count=2).validate()
    with pytest.raises(ConfigurationError):
        ProviderConfig("carrier-pigeon").validate()
    assert ProviderConfig().temperature == 0 and ProviderConfig().sample_count == 1


def test_replay_round_trip(tmp_path):
    conv = _conv()
    write_fixture(tmp_path, conv, LLMResponse("reply", {"model": "m"}))
    response = complete(ProviderConfig("replay", fixture_dir=str(tmp_path)), conv)
    assert response.text == "reply" and response.provider_meta["digest"] == conversation_digest(conv)


def test_replay_miss_names_digest(tmp_path):
    conv = _conv("never recorded")
    with pytest.raises(FixtureMissingError) as info:
        complete(ProviderConfig("replay", fixture_dir=str(tmp_path)), conv)
    assert info.value.digest == conversation_digest(conv)
    assert conversation_digest(conv) in str(info.value)


def test_fixture_file_is_reviewable(tmp_path):
    path = write_fixture(tmp_path, _conv(), LLMResponse("r"))
    record = json.loads(path.read_text())
    assert record["conversation"] == [{"role": "user", "text": "hello"}] and record["response"] == "r"


def test_scripted_exhaustion():
    provider = make_provider(ProviderConfig("scripted", script=("a", "b")))
    assert [provider.complete(_conv()).text for _ in range(2)] == ["a", "b"]
    with pytest.raises(FixtureMissingError):
        provider.complete(_conv())


def test_scripted_reads_script_file(tmp_path):
    (tmp_path / "script.json").write_text(json.dumps(["x"]))
    assert ScriptedProvider(ProviderConfig("scripted", fixture_dir=str(tmp_path))).complete(_conv()).text == "x"


def test_empty_conversation_rejected():
    with pytest.raises(ProviderError):
        make_provider(ProviderConfig("scripted", script=("a",))).complete(Conversation())


def _live(tmp_path, handler, monkeypatch, key="secret"):
    if key:
        monkeypatch.setenv("TEST_LLM_KEY", key)
    else:
        monkeypatch.delenv("TEST_LLM_KEY", raising=False)
    config = ProviderConfig("live", endpoint="https://llm.invalid/v1/chat/completions", api_key_env="TEST_LLM_KEY",
                            fixture_dir=str(tmp_path))
    return LiveProvider(config, transport=httpx.MockTransport(handler))


def test_live_records_what_replay_reads(tmp_path, monkeypatch):
    seen = {}

    def handler(request):
        seen["auth"] = request.headers["authorization"]
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json={"model": "m", "choices": [{"message": {"content": "pong"}}]})

    conv = _conv("ping")
    assert _live(tmp_path, handler, monkeypatch).complete(conv).text == "pong"
    assert seen["auth"] == "Bearer secret"
    assert seen["body"]["temperature"] == 0 and seen["body"]["n"] == 1
    assert complete(ProviderConfig("replay", fixture_dir=str(tmp_path)), conv).text == "pong"


def test_live_http_error_carries_status(tmp_path, monkeypatch):
    provider = _live(tmp_path, lambda r: httpx.Response(503, text="busy"), monkeypatch)
    with pytest.raises(ProviderError) as info:
        provider.complete(_conv())
    assert info.value.status == 503


def test_live_missing_key(tmp_path, monkeypatch):
    provider = _live(tmp_path, lambda r: httpx.Response(200), monkeypatch, key=None)
    with pytest.raises(ProviderError) as info:
        provider.complete(_conv())
    assert info.value.status == 401


def test_live_malformed_body(tmp_path, monkeypatch):
    provider = _live(tmp_path, lambda r: httpx.Response(200, json={"nope": 1}), monkeypatch)
    with pytest.raises(ProviderError):
        provider.complete(_conv())


RESPONSE = '''Here you go.

```python
import math
from hypothesis import given, strategies as st


# Squares are never negative.
@given(st.integers())
def test_square(x):
    assert x * x >= 0


@given(st.integers())
def test_abs(x):
    assert math.fabs(x) >= 0
```
'''


def test_extract_splits_tests_with_shared_preamble():
    first, second = extract_test_sources(RESPONSE)
    assert first.name == "test_square" and first.property_text == "Squares are never negative."
    assert first.source.startswith("import math\nfrom hypothesis")
    assert "test_abs" not in first.source
    assert second.property_flagged and second.property_text == "test_abs"


def test_extract_handles_unparseable_block():
    text = "```python\nfrom hypothesis import given\n\n@given(\ndef test_a(x):\n    assert x\n\ndef test_b():\n    pass\n```"
    names = [u.name for u in extract_test_sources(text)]
    assert names == ["test_a", "test_b"]


def test_extract_unfenced_reply():
    assert [u.name for u in extract_test_sources("def test_x():\n    assert True\n")] == ["test_x"]


def test_extract_no_tests():
    with pytest.raises(ExtractionError):
        extract_test_sources("I cannot help with that.")
    assert code_blocks("no code") == []
    assert split_block("x = 1\n") == []


def test_duplicate_names_are_suffixed():
    block = "```python\ndef test_a():\n    pass\n```\n```python\ndef test_a():\n    pass\n```"
    assert [u.name for u in extract_test_sources(block)] == ["test_a", "test_a__2"]
