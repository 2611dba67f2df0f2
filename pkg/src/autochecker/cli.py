"""Command-line entry point.

Exit codes: 0 success, 1 error, 2 DB built but some meta-ops still need a
snippet, 3 finished with a partial result (some tests still failing).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .catalog import (
    FullApiDb,
    MetaApiDb,
    build_full_db,
    build_meta_db,
    ingest_manifest,
    load_metaops,
    load_snippets,
    read_jsonl,
    write_jsonl,
)
from .config import Config, load_config
from .embedding import make_embedder
from .errors import AutoCheckerError
from .harness import format_table, load_rule, load_suite, run_eval, validate_checker
from .harness.suite import TestCase
from .llm import HttpLlm, ScriptedLlm
from .minilint import MiniLint, load_template
from .minisrc import parse_source
from .retrieval import RetrievalConfig, Retriever, decompose_rule
from .tdcd import TdcdConfig, TdcdDeps, run_tdcd

EXIT_OK, EXIT_ERROR, EXIT_PENDING, EXIT_PARTIAL = 0, 1, 2, 3

FULL_DB_FILE = "full_api.jsonl"
META_DB_FILE = "meta_api.jsonl"
UNRESOLVED_FILE = "unresolved.jsonl"


def _abs(p: Optional[str]) -> Optional[str]:
    return None if p is None else str(Path(p).resolve())


def _config(args) -> Config:
    overrides = {
        "paths.db_dir": _abs(getattr(args, "db_dir", None)),
        "paths.manifest": _abs(getattr(args, "manifest", None)),
        "paths.metaops": _abs(getattr(args, "metaops", None)),
        "paths.snippets": _abs(getattr(args, "snippets", None)),
        "paths.template": _abs(getattr(args, "template", None)),
        "llm.transcript_path": _abs(getattr(args, "transcript", None)),
        "llm.mode": getattr(args, "llm_mode", None),
        "llm.endpoint": getattr(args, "llm_endpoint", None),
        "llm.model": getattr(args, "llm_model", None),
        "thresholds.meta": getattr(args, "meta_threshold", None),
        "thresholds.full": getattr(args, "full_threshold", None),
        "tdcd.max_retry_times": getattr(args, "max_retry_times", None),
        "tdcd.feedback_in_retry": True if getattr(args, "feedback", False) else None,
    }
    return load_config(args.config, overrides)


def _embedder(cfg: Config):
    emb = cfg.section("embedder")
    return make_embedder(emb["mode"], emb["endpoint"] or "", emb["model"] or "")


def _llm(cfg: Config, rule_dir: Optional[Path]):
    llm = cfg.section("llm")
    if llm["mode"] == "http":
        return HttpLlm(llm["endpoint"], llm["model"] or "")
    return ScriptedLlm.from_file(cfg.transcript_for(rule_dir))


def _load_dbs(cfg: Config) -> tuple[FullApiDb, MetaApiDb]:
    db_dir = cfg.path("db_dir")
    full, meta = db_dir / FULL_DB_FILE, db_dir / META_DB_FILE
    if not full.is_file() or not meta.is_file():
        raise AutoCheckerError(f"no API DBs in {db_dir}; run 'autochecker build-db' first")
    return FullApiDb.load(full), MetaApiDb.load(meta)


def _retriever(cfg: Config, llm) -> Retriever:
    full, meta = _load_dbs(cfg)
    th = cfg.section("thresholds")
    return Retriever(
        full, meta, load_metaops(read_jsonl(cfg.path("metaops"))), llm, _embedder(cfg),
        RetrievalConfig(th["meta"], th["full"]),
    )


def _tdcd_config(cfg: Config, suite_size: int, round_cap: Optional[int] = None) -> TdcdConfig:
    t = cfg.section("tdcd")
    cap = round_cap if round_cap is not None else t["round_cap_factor"] * suite_size
    return TdcdConfig(t["max_retry_times"], cap, t["feedback_in_retry"])


def _print_json(doc) -> None:
    print(json.dumps(doc, indent=2, sort_keys=True))


def _single_test(rule_path: Path, test_path: Path):
    rule_dir = rule_path if rule_path.is_dir() else rule_path.parent
    rule = load_rule(rule_dir)
    source = test_path.read_text(encoding="utf-8")
    test = TestCase(test_path.stem, 1, source, 0, ())
    return rule_dir, rule, test


# -- commands -----------------------------------------------------------------------


def cmd_build_db(args) -> int:
    cfg = _config(args)
    embedder = _embedder(cfg)
    catalog = ingest_manifest(read_jsonl(cfg.path("manifest")))
    metaops = load_metaops(read_jsonl(cfg.path("metaops")))
    snippets_path = cfg.path("snippets")
    snippets = load_snippets(read_jsonl(snippets_path)) if snippets_path and snippets_path.is_file() else {}
    full = build_full_db(catalog, embedder)
    meta, unresolved = build_meta_db(metaops, full, snippets, embedder, cfg.section("thresholds")["meta"])
    db_dir = cfg.path("db_dir")
    db_dir.mkdir(parents=True, exist_ok=True)
    full.save(db_dir / FULL_DB_FILE)
    meta.save(db_dir / META_DB_FILE)
    write_jsonl(db_dir / UNRESOLVED_FILE, [{"text": op.text, "category": op.category} for op in unresolved])
    print(f"full API DB: {len(full.entries)} contexts -> {db_dir / FULL_DB_FILE}")
    print(f"meta API DB: {len(meta.entries)} contexts -> {db_dir / META_DB_FILE}")
    if unresolved:
        print(f"{len(unresolved)} meta-op(s) need a hand-written snippet:")
        for op in unresolved:
            print(f"  [{op.category}] {op.text}")
        return EXIT_PENDING
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = _config(args)
    rule_dir = Path(args.rule_dir)
    rule, suite = load_suite(rule_dir)
    llm = _llm(cfg, rule_dir)
    deps = TdcdDeps(_retriever(cfg, llm), MiniLint(), llm, load_template(cfg.path("template")))
    initial = Path(args.initial_checker).read_text(encoding="utf-8") if args.initial_checker else None
    outcome = run_tdcd(rule, suite, deps, _tdcd_config(cfg, len(suite), args.round_cap), initial)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if outcome.final_checker is not None:
        (out / "checker.check").write_text(outcome.final_checker.source, encoding="utf-8")
    (out / "replay.log").write_text(outcome.replay_text(), encoding="utf-8")
    report = {"rule": rule.name, **outcome.to_json()}
    (out / "report").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"rule {rule.name}: pr_f={outcome.pr_f} ({float(outcome.pr_f):.2%}) in {len(outcome.rounds)} round(s)")
    if outcome.skipped:
        print(f"skipped: {', '.join(outcome.skipped)}")
    if outcome.round_cap_reached:
        print("round cap reached")
    print(f"artifacts written to {out}")
    return EXIT_OK if outcome.pr_f == 1 else EXIT_PARTIAL


def cmd_validate(args) -> int:
    if args.config:
        _config(args)
    _, suite = load_suite(args.rule_dir)
    source = Path(args.checker).read_text(encoding="utf-8")
    report = validate_checker(source, suite, MiniLint())
    _print_json(report.to_json())
    print(f"pr={float(report.pr)} ({report.pr})")
    return EXIT_OK if report.pr == 1 else EXIT_PARTIAL


def cmd_decompose(args) -> int:
    cfg = _config(args)
    rule_dir, rule, test = _single_test(Path(args.rule), Path(args.test))
    llm = _llm(cfg, rule_dir)
    subops = decompose_rule(rule, test, load_metaops(read_jsonl(cfg.path("metaops"))), llm)
    for op in subops:
        print(f"{op.index + 1}. {op.text}")
    return EXIT_OK


def cmd_retrieve(args) -> int:
    cfg = _config(args)
    rule_dir, rule, test = _single_test(Path(args.rule), Path(args.test))
    retriever = _retriever(cfg, _llm(cfg, rule_dir))
    result = retriever.retrieve(rule, test, parse_source(test.source))
    width = max([len("sub-operation")] + [len(h.subop.text) for h in result.per_subop])
    print(f"{'sub-operation':<{width}}  hit   score   payload")
    for h in result.per_subop:
        score = "-" if h.score is None else f"{h.score:.4f}"
        payload = "-" if h.context is None else h.context.payload.splitlines()[0]
        print(f"{h.subop.text:<{width}}  {h.hit:<4}  {score:<6}  {payload}")
    print()
    _print_json(result.to_json())
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _config(args)
    ruleset = Path(args.ruleset)
    full, meta = _load_dbs(cfg)
    metaops = load_metaops(read_jsonl(cfg.path("metaops")))
    template = load_template(cfg.path("template"))
    th = cfg.section("thresholds")

    def make_deps(rule_dir: Path, run: int) -> TdcdDeps:
        per_run = rule_dir / "transcripts" / f"run{run}.jsonl"
        if cfg.section("llm")["mode"] == "scripted" and per_run.is_file():
            llm = ScriptedLlm.from_file(per_run)
        else:
            llm = _llm(cfg, rule_dir)
        retriever = Retriever(full, meta, metaops, llm, _embedder(cfg), RetrievalConfig(th["meta"], th["full"]))
        return TdcdDeps(retriever, MiniLint(), llm, template)

    t = cfg.section("tdcd")
    tdcd_config = TdcdConfig(t["max_retry_times"], None, t["feedback_in_retry"], t["round_cap_factor"])
    result = run_eval(ruleset, make_deps, args.runs, tdcd_config, args.jobs)
    table = format_table(result.metrics)
    print(table, end="")
    errors = {n: r["error"] for n, r in result.rules.items() if r["error"]}
    for name, err in errors.items():
        print(f"rule {name} failed: {err}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "eval.json").write_text(json.dumps(result.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        (out / "eval.txt").write_text(table, encoding="utf-8")
    return EXIT_OK if result.metrics.rule_pat == len(result.rules) else EXIT_PARTIAL


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autochecker", description="Test-driven generation of AST checkers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, db=True):
        p.add_argument("--config", help="JSON config file (version \"1\")")
        if db:
            p.add_argument("--db-dir", help="directory holding the API DBs")

    def llm_flags(p):
        p.add_argument("--transcript", help="scripted LLM transcript (JSONL)")
        p.add_argument("--llm-mode", choices=["scripted", "http"])
        p.add_argument("--llm-endpoint", help="chat-completion endpoint for http mode")
        p.add_argument("--llm-model")

    def thresholds(p):
        p.add_argument("--meta-threshold", type=float, help="Meta-API DB match threshold (default 0.85)")
        p.add_argument("--full-threshold", type=float, help="Full-API DB match threshold (default 0.80)")

    p = sub.add_parser("build-db", help="build the Full-API and Meta-API DBs")
    common(p)
    p.add_argument("--manifest", help="API manifest (JSONL)")
    p.add_argument("--metaops", help="meta-op set (JSONL)")
    p.add_argument("--snippets", help="hand-written meta-op snippets (JSONL)")
    p.add_argument("--meta-threshold", type=float, help="meta-op alignment threshold (default 0.85)")
    p.set_defaults(func=cmd_build_db)

    p = sub.add_parser("gen", help="develop a checker for one rule")
    common(p)
    llm_flags(p)
    thresholds(p)
    p.add_argument("--rule-dir", required=True, help="rule directory (rule.json + tests/)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--template", help="checker template file")
    p.add_argument("--metaops", help="meta-op set (JSONL)")
    p.add_argument("--initial-checker", help="existing checker to refine (incremental mode)")
    p.add_argument("--max-retry-times", type=int, help="attempts per round (default 5)")
    p.add_argument("--round-cap", type=int, help="maximum rounds (default 3 x number of tests)")
    p.add_argument("--feedback", action="store_true", help="include failure feedback in retry prompts")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("validate", help="validate a checker against a rule's test suite")
    common(p, db=False)
    p.add_argument("--checker", required=True, help="checker file (.check)")
    p.add_argument("--rule-dir", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("retrieve", help="show API-context retrieval for one test")
    common(p)
    llm_flags(p)
    thresholds(p)
    p.add_argument("--rule", required=True, help="rule.json or rule directory")
    p.add_argument("--test", required=True, help="test source file")
    p.add_argument("--metaops", help="meta-op set (JSONL)")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("decompose", help="decompose a rule into sub-operations")
    common(p, db=False)
    llm_flags(p)
    p.add_argument("--rule", required=True, help="rule.json or rule directory")
    p.add_argument("--test", required=True, help="test source file")
    p.add_argument("--metaops", help="meta-op set (JSONL)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("eval", help="evaluate a whole ruleset")
    common(p)
    llm_flags(p)
    thresholds(p)
    p.add_argument("--ruleset", required=True, help="directory of rule directories")
    p.add_argument("--runs", type=int, default=1, help="runs per rule; the best run is reported")
    p.add_argument("--jobs", type=int, default=1, help="rules evaluated in parallel")
    p.add_argument("--out", help="write eval.json and eval.txt here")
    p.add_argument("--template", help="checker template file")
    p.add_argument("--metaops", help="meta-op set (JSONL)")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (AutoCheckerError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
