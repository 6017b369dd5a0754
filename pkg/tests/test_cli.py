import argparse
import json
import shutil

import pytest

from pbtguard import cli
from pbtguard.errors import ConfigurationError
from pbtguard.fixtures import MANIFEST_PATH, load_manifest


def invoke(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def rows(out):
    body = out.splitlines()[1:-1]
    return dict(line.split("\t", 1) for line in body)


def test_report_is_delimited(capsys, tmp_path):
    code, out = invoke(capsys, "eval", "relevance", "--out", str(tmp_path))
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "== pbtguard eval relevance =="
    assert lines[-1] == "== end =="
    data = rows(out)
    assert data["precision"] == "0.7200 (18/25)"
    assert data["recall"] == "0.9474 (18/19)"
    assert data["exit"] == "0"


def test_outputs_only_under_out(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    out = tmp_path / "report"
    invoke(capsys, "eval", "relevance", "--out", str(out))
    assert sorted(p.name for p in tmp_path.iterdir()) == ["report"]
    assert sorted(p.name for p in out.iterdir()) == ["relevance.json", "relevance.png"]


def test_reports_are_deterministic(capsys, tmp_path):
    for name in ("a", "b"):
        invoke(capsys, "eval", "effectiveness", "--out", str(tmp_path / name))
    for name in ("effectiveness.json", "effectiveness.png"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["eval", "nonsense"])
    assert exc.value.code == 2


def test_missing_out_is_configuration_error(capsys):
    code, out = invoke(capsys, "eval", "relevance")
    assert code == 6
    assert "--out is required" in rows(out)["summary"]


def test_bad_config_file(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text("[1, 2]", encoding="utf-8")
    code, _ = invoke(capsys, "--config", str(path), "eval", "relevance", "--out", str(tmp_path / "o"))
    assert code == 6
    path.write_text("{not json", encoding="utf-8")
    assert invoke(capsys, "--config", str(path), "verify-fixtures")[0] == 6


def test_settings_precedence():
    args = argparse.Namespace(samples=None, seed=3)
    config = {"samples": 50, "seed": 4, "timeout": 9}
    env = {"PBTGUARD_SAMPLES": "70", "PBTGUARD_SEED": "5", "PBTGUARD_TIMEOUT": "8", "PBTGUARD_WORKERS": "2"}
    s = cli.Settings(args, config, env)
    assert s.get("seed", 0, int) == 3  # flag
    assert s.get("samples", 0, int) == 50  # config beats env
    assert s.get("workers", 4, int) == 2  # env beats default
    assert s.get("policy", "warn") == "warn"  # default
    with pytest.raises(ConfigurationError):
        cli.Settings(argparse.Namespace(), {}, {"PBTGUARD_TICKS": "many"}).get("ticks", 1, int)


def test_env_and_config_reach_commands(capsys, tmp_path, monkeypatch):
    broken = tmp_path / "broken.csv"
    broken.write_text("ID,Program ID,Program,Ground-truth Property,Extracted Property,Group,Note\n"
                      "Pr1,P1,X,g,e,partial,\n", encoding="utf-8")
    monkeypatch.setenv("PBTGUARD_MAPPING", str(broken))
    assert invoke(capsys, "eval", "relevance", "--out", str(tmp_path / "o"))[0] == 7
    good = tmp_path / "c.json"
    good.write_text(json.dumps({"mapping": str(cli.DEFAULT_MAPPING)}), encoding="utf-8")
    assert invoke(capsys, "--config", str(good), "eval", "relevance", "--out", str(tmp_path / "o"))[0] == 0


def test_verify_fixtures(capsys, tmp_path):
    code, out = invoke(capsys, "verify-fixtures")
    assert code == 0
    n = len(load_manifest().entries)
    assert rows(out)["summary"] == f"{n}/{n} ok"

    # a manifest whose first checksum is wrong
    data = json.loads(MANIFEST_PATH.read_text(encoding="utf-8"))
    data["entries"][0]["sha256"] = "0" * 64
    bad = tmp_path / "manifest.json"  # entry paths stay relative to the package
    bad.write_text(json.dumps(data), encoding="utf-8")
    code, out = invoke(capsys, "verify-fixtures", "--manifest", str(bad))
    assert code == 8
    assert rows(out)[f"fixture:{data['entries'][0]['id']}"] == "checksum-mismatch"


def test_generate_replay(capsys, tmp_path):
    code, out = invoke(capsys, "generate", "--subject", "tcs", "--out", str(tmp_path))
    assert code == 0
    assert rows(out)["verified"] == "3"
    assert (tmp_path / "ledger.json").is_file()
    assert len(list((tmp_path / "pbts").glob("*.py"))) == 3


def test_generate_missing_fixture_exits_4(capsys, tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()
    code, out = invoke(capsys, "generate", "--subject", "tcs", "--fixtures", str(empty), "--out", str(tmp_path / "o"))
    assert code == 4
    assert "provider error" in rows(out)["summary"]


def test_generate_bad_bundle_exits_3(capsys, tmp_path):
    path = tmp_path / "bundle.json"
    path.write_text("{}", encoding="utf-8")
    assert invoke(capsys, "generate", "--bundle", str(path), "--out", str(tmp_path / "o"))[0] == 3


def test_live_key_never_printed(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("PBTGUARD_TEST_KEY", raising=False)
    code, out = invoke(capsys, "generate", "--subject", "tcs", "--provider", "live", "--api-key-env",
                       "PBTGUARD_TEST_KEY", "--endpoint", "http://127.0.0.1:9/v1", "--out", str(tmp_path))
    assert code == 4
    assert "PBTGUARD_TEST_KEY is not set" in out


@pytest.mark.parametrize("policy,fault,code,status", [
    ("warn", None, 0, "clean"),
    ("warn", "cylinder_a_loc=3@5", 10, "warned"),
    ("block", "cylinder_a_loc=3@5", 11, "blocked"),
])
def test_guard_exit_codes(capsys, tmp_path, quality_dir, policy, fault, code, status):
    argv = ["guard", "--subject", "pcs", "--pbt", str(quality_dir / "pbts" / "Pr7.py"), "--policy", policy,
            "--out", str(tmp_path)]
    if fault:
        argv += ["--fault", fault]
    got, out = invoke(capsys, *argv)
    assert got == code
    assert rows(out)["status"] == status
    assert sorted(p.name for p in tmp_path.iterdir()) == ["events.jsonl", "guards.json", "trace.jsonl", "trace.png"]


def test_guard_reuses_guard_file(capsys, tmp_path, quality_dir):
    invoke(capsys, "guard", "--subject", "pcs", "--pbt", str(quality_dir / "pbts" / "Pr7.py"),
           "--out", str(tmp_path / "first"))
    code, out = invoke(capsys, "guard", "--guards", str(tmp_path / "first" / "guards.json"), "--policy", "block",
                       "--fault", "cylinder_a_loc=3@5", "--out", str(tmp_path / "second"))
    assert code == 11
    assert rows(out)["subject"] == "pcs"


def test_guard_refuses_failing_pbt(capsys, tmp_path, quality_dir):
    pbt = tmp_path / "Pr10.py"
    shutil.copyfile(quality_dir / "pbts" / "Pr10.py", pbt)
    code, out = invoke(capsys, "guard", "--subject", "line_following_robot", "--pbt", str(pbt),
                       "--out", str(tmp_path / "o"))
    assert code == 5
    assert "not verified" in rows(out)["summary"]


def test_guard_needs_subject_for_pbt(capsys, tmp_path, quality_dir):
    code, _ = invoke(capsys, "guard", "--pbt", str(quality_dir / "pbts" / "Pr7.py"), "--out", str(tmp_path))
    assert code == 6


def test_effectiveness_summary(capsys, tmp_path):
    code, out = invoke(capsys, "eval", "effectiveness", "--out", str(tmp_path))
    assert code == 0
    assert rows(out)["summary"] == "18/21 HIGH = 85%"


def test_effectiveness_of_constant_pbt(capsys, tmp_path, fixtures_dir):
    code, out = invoke(capsys, "eval", "effectiveness", "--subject", "tcs", "--pbt",
                       str(fixtures_dir / "effectiveness" / "constant_tcs.py"), "--out", str(tmp_path))
    assert code == 0
    assert rows(out)["level"] == "LOW"
    assert rows(out)["cells"] == "1/5"


def test_generate_replay_line_following_without_repair(capsys, tmp_path):
    code, out = invoke(capsys, "generate", "--subject", "line_following_robot", "--max-attempts", "0",
                       "--out", str(tmp_path))
    assert code == 0
    data = rows(out)
    assert (data["verified"], data["unresolved"], data["llm_calls"]) == ("0", "1", "1")
    assert all(v.split("\t")[:2] == ["unresolved", "runtime_exception"] for k, v in data.items()
               if k.startswith("pbt:"))


def test_generate_replay_input_device_flags_missing_comments(capsys, tmp_path):
    code, out = invoke(capsys, "generate", "--subject", "input_device", "--out", str(tmp_path))
    assert code == 0
    assert rows(out)["verified"] == "2"
    sidecars = [json.loads(p.read_text()) for p in sorted((tmp_path / "pbts").glob("*.json"))]
    assert len(sidecars) == 2
    assert all(s["property_flagged"] and s["property_text"] == s["test_name"] for s in sidecars)
