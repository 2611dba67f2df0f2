import json

import pytest

from autochecker.cli import main
from autochecker.config import DEFAULTS, load_config
from autochecker.errors import ConfigError

from scenarios import RULESET, SAMPLE_RULE, ground_truth_checker


def write_config(tmp_path, doc):
    path = tmp_path / "autochecker.json"
    path.write_text(json.dumps(doc))
    return path


# -- config ----------------------------------------------------------------------------------


def test_defaults():
    cfg = load_config()
    assert cfg.section("thresholds") == {"meta": 0.85, "full": 0.80}
    assert cfg.section("tdcd")["max_retry_times"] == 5
    assert cfg.path("template").name == "template.check" and cfg.path("template").is_file()
    assert cfg.transcript_for(SAMPLE_RULE) == SAMPLE_RULE / "transcript.jsonl"
    assert cfg.to_json() == DEFAULTS


def test_file_values_and_relative_paths(tmp_path):
    path = write_config(tmp_path, {"version": "1", "thresholds": {"meta": 0.9}, "paths": {"db_dir": "db"}})
    cfg = load_config(path)
    assert cfg.section("thresholds") == {"meta": 0.9, "full": 0.80}
    assert cfg.path("db_dir") == tmp_path / "db"


def test_overrides_win(tmp_path):
    path = write_config(tmp_path, {"version": "1", "thresholds": {"meta": 0.9}})
    assert load_config(path, {"thresholds.meta": 0.7, "thresholds.full": None}).section("thresholds")["meta"] == 0.7


@pytest.mark.parametrize(
    "doc",
    [
        {"version": "2"},
        {},
        {"version": "1", "llm": {"mode": "http"}},
        {"version": "1", "llm": {"mode": "carrier-pigeon"}},
        {"version": "1", "embedder": {"mode": "http"}},
        {"version": "1", "thresholds": {"meta": 0}},
        {"version": "1", "thresholds": {"full": 1.2}},
        {"version": "1", "tdcd": {"max_retry_times": 0}},
        {"version": "1", "tdcd": {"round_cap_factor": True}},
        {"version": "1", "tdcd": {"feedback_in_retry": "yes"}},
        {"version": "1", "colour": "blue"},
        {"version": "1", "llm": "http"},
        [1, 2],
    ],
)
def test_invalid_configs(tmp_path, doc):
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, doc))


@pytest.mark.parametrize("where", [{"api_key": "x"}, {"llm": {"token": "x"}}, {"llm": {"API_KEY": "x"}}])
def test_credentials_rejected(tmp_path, where):
    with pytest.raises(ConfigError, match="AUTOCHECKER_API_KEY"):
        load_config(write_config(tmp_path, {"version": "1", **where}))


def test_unreadable_config(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_rule_dir_placeholder_needs_rule():
    with pytest.raises(ConfigError):
        load_config().transcript_for(None)


# -- CLI -------------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def db_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("db")
    assert main(["build-db", "--db-dir", str(d)]) == 0
    return d


def test_build_db_files(db_dir, capsys):
    assert sorted(p.name for p in db_dir.iterdir()) == ["full_api.jsonl", "meta_api.jsonl", "unresolved.jsonl"]
    assert (db_dir / "unresolved.jsonl").read_text() == ""


def test_build_db_pending(tmp_path, capsys):
    ops = tmp_path / "ops.jsonl"
    ops.write_text(json.dumps({"text": "Count the lambdas in a stream", "category": "Java Feature"}) + "\n")
    empty = tmp_path / "snips.jsonl"
    empty.write_text("")
    code = main(["build-db", "--db-dir", str(tmp_path / "db"), "--metaops", str(ops), "--snippets", str(empty)])
    assert code == 2
    assert "Count the lambdas" in capsys.readouterr().out


def test_gen_full_pass(db_dir, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["gen", "--db-dir", str(db_dir), "--rule-dir", str(SAMPLE_RULE), "--out", str(out)]) == 0
    report = json.loads((out / "report").read_text())
    assert report["pr_f"] == "1" and report["rounds"] == 2
    assert (out / "checker.check").read_text().endswith(ground_truth_checker().split("\n\n", 1)[1])
    events = [json.loads(x)["event"] for x in (out / "replay.log").read_text().splitlines()]
    assert events.count("retrieve") == 2


def test_gen_partial(db_dir, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["gen", "--db-dir", str(db_dir), "--rule-dir", str(SAMPLE_RULE), "--out", str(out),
                 "--transcript", str(SAMPLE_RULE / "transcript_skip.jsonl")])
    assert code == 3
    assert json.loads((out / "report").read_text())["skipped"] == ["02_static_final"]
    assert "skipped: 02_static_final" in capsys.readouterr().out


def test_gen_round_cap_flag(db_dir, tmp_path):
    out = tmp_path / "out"
    code = main(["gen", "--db-dir", str(db_dir), "--rule-dir", str(SAMPLE_RULE), "--out", str(out), "--round-cap", "1"])
    assert code == 3
    assert json.loads((out / "report").read_text())["round_cap_reached"] is True


def test_validate(tmp_path, capsys):
    checker = tmp_path / "c.check"
    checker.write_text(ground_truth_checker())
    assert main(["validate", "--checker", str(checker), "--rule-dir", str(SAMPLE_RULE)]) == 0
    assert "pr=1.0" in capsys.readouterr().out
    checker.write_text(ground_truth_checker().replace("isStatic", "jjtIsStatic"))
    assert main(["validate", "--checker", str(checker), "--rule-dir", str(SAMPLE_RULE)]) == 3


def test_retrieve_and_decompose(db_dir, capsys):
    test = SAMPLE_RULE / "tests" / "01_static_counter.minisrc"
    assert main(["retrieve", "--db-dir", str(db_dir), "--rule", str(SAMPLE_RULE), "--test", str(test)]) == 0
    out = capsys.readouterr().out
    assert "FieldDecl: boolean isStatic()" in out
    assert main(["decompose", "--rule", str(SAMPLE_RULE / "rule.json"), "--test", str(test)]) == 0
    assert capsys.readouterr().out.startswith("1. ")


def test_eval(db_dir, tmp_path, capsys):
    out = tmp_path / "eval"
    assert main(["eval", "--db-dir", str(db_dir), "--ruleset", str(RULESET), "--out", str(out), "--jobs", "2"]) == 0
    doc = json.loads((out / "eval.json").read_text())
    assert doc["metrics"]["tpr_avg"] == "1" and doc["metrics"]["rules"] == 3
    assert "TPR_avg=100.00%" in (out / "eval.txt").read_text()


def test_errors_exit_1(tmp_path, capsys):
    assert main(["gen", "--db-dir", str(tmp_path / "nothing"), "--rule-dir", str(SAMPLE_RULE), "--out", str(tmp_path)]) == 1
    cfg = write_config(tmp_path, {"version": "9"})
    assert main(["build-db", "--config", str(cfg), "--db-dir", str(tmp_path / "db")]) == 1
    assert main(["build-db", "--db-dir", str(tmp_path / "db"), "--manifest", str(tmp_path / "none.jsonl")]) == 1
    assert "error:" in capsys.readouterr().err


def test_help(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for command in ("build-db", "gen", "validate", "retrieve", "decompose", "eval"):
        assert command in out
