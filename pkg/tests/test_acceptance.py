"""Acceptance suite: criteria 1-9, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import math
import os
import random
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from autochecker.catalog import (
    NODE,
    SIGNATURE,
    SNIPPET,
    ApiContext,
    ApiEntry,
    FullApiDb,
    MetaApiDb,
    MetaOp,
    build_full_db,
    build_meta_db,
    gen_description,
    ingest_manifest,
    render_signature,
)
from autochecker.embedding import LexicalEmbedder, similarity
from autochecker.errors import CompileError
from autochecker.harness import CheckerRule, TestCase, ValidationReport, compute_metrics, load_suite, tpr
from autochecker.llm import ScriptedLlm
from autochecker.minilint import compile_checker, export_manifest
from autochecker.minisrc import node_types_present, parse_source
from autochecker.retrieval import (
    FULL,
    META,
    NONE,
    RetrievalConfig,
    Retriever,
    SubOperation,
    edge_contexts,
    retrieve_for_subop,
)
from autochecker.tdcd import run_tdcd

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from scenarios import (  # noqa: E402
    SAMPLE_RULE,
    SCENARIOS,
    SUBSET_RULE,
    AliasEmbedder,
    RandomLlm,
    dbs,
    ground_truth_checker,
    inject,
    make_deps,
    random_program,
    run_scenario,
    subset_suite,
)

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}", flush=True)
    assert ok, detail


# -- 1: loop equivalence with hand simulation -----------------------------------------------


def criterion_1() -> tuple[bool, str, bytes]:
    mismatches, blob = [], b""
    for name in sorted(SCENARIOS):
        n, rounds, config, expected, numerator = SCENARIOS[name]
        outcome, _ = run_scenario(n, rounds, config)
        if outcome.trajectory() != expected or outcome.pr_f != Fraction(numerator, n):
            mismatches.append(name)
        blob += outcome.replay_text().encode() + json.dumps(outcome.to_json(), sort_keys=True).encode()
    ok = not mismatches and len(SCENARIOS) >= 5
    return ok, f"{len(SCENARIOS) - len(mismatches)}/{len(SCENARIOS)} scenarios match", blob


def test_criterion_1_trajectories():
    ok, detail, _ = criterion_1()
    record(1, ok, detail)


# -- 2: state-set algebra ------------------------------------------------------------------------


def check_state_algebra(outcome, all_ids) -> list[str]:
    problems = []
    t_a = set(all_ids)
    prev_passed, prev_skipped = set(), set()
    for r in outcome.rounds:
        t_c, t_p, t_s = set(r.candidates), set(r.passed), set(r.skipped_set)
        if t_c & t_p:
            problems.append(f"round {r.round}: T_c and T_p overlap")
        if t_c & t_s:
            problems.append(f"round {r.round}: T_c and T_s overlap")
        if t_p | t_c | t_s != t_a:
            problems.append(f"round {r.round}: union is not T_a")
        if not prev_skipped <= t_s:
            problems.append(f"round {r.round}: T_s shrank")
        if r.accepted and not (prev_passed | {r.selected}) <= t_p:
            problems.append(f"round {r.round}: accepted without T_p growth")
        prev_passed, prev_skipped = t_p, t_s
    return problems


def test_criterion_2_state_algebra():
    cases, violations, accepted_rounds, skip_rounds = 1000, [], 0, 0
    for seed in range(cases):
        rng = random.Random(seed)
        n = rng.randint(1, 6)
        llm = RandomLlm(n, seed)
        suite = subset_suite(n)
        outcome = run_tdcd(SUBSET_RULE, suite, make_deps(llm))
        problems = check_state_algebra(outcome, suite.ids)
        violations += [f"seed {seed}: {p}" for p in problems]
        accepted_rounds += sum(r.accepted for r in outcome.rounds)
        skip_rounds += sum(r.skipped for r in outcome.rounds)
    ok = not violations and accepted_rounds > 0 and skip_rounds > 0
    detail = (f"{cases} random runs, {accepted_rounds} accepted and {skip_rounds} skipped rounds, "
              f"{len(violations)} violations")
    if violations:
        detail += f" (first: {violations[0]})"
    record(2, ok, detail)


# -- 3: descriptive text ---------------------------------------------------------------------------


def test_criterion_3_descriptions():
    e = ApiEntry("ASTStringLiteral#isEmpty", NODE, "ASTStringLiteral", "isEmpty", (), "boolean",
                 comment="True if the constant value is empty.")
    literal_desc = gen_description(e) == "Check whether string literal is empty //True if the constant value is empty."
    literal_sig = render_signature(e) == "ASTStringLiteral: boolean isEmpty() //True if the constant value is empty."

    full_entry = ApiEntry("ASTClassOrInterfaceDeclaration#getSimpleName", NODE, "ASTClassOrInterfaceDeclaration",
                          "getSimpleName", (), "java.lang.String")
    embedder = AliasEmbedder({"Get the name of class": gen_description(full_entry)})
    full = build_full_db([full_entry], embedder)
    snippet = 'if (method.getReturnTypeName() == "int") { ... }'
    ops = [MetaOp("Get the name of class", "Class"), MetaOp("Check whether the return type of method is int", "Method")]
    meta, unresolved = build_meta_db(ops, full, {ops[1].text: snippet}, embedder)
    got = [(c.description, c.category, c.payload_kind, c.payload) for c in meta.entries]
    want = [
        ("Get the name of class", "Class", SIGNATURE, "ASTClassOrInterfaceDeclaration: java.lang.String getSimpleName()"),
        ("Check whether the return type of method is int", "Method", SNIPPET, snippet),
    ]
    ok = literal_desc and literal_sig and got == want and not unresolved
    record(3, ok, f"string-literal description {'exact' if literal_desc and literal_sig else 'WRONG'}, "
                  f"meta-op pairings {'exact' if got == want else 'WRONG'}")


# -- 4: tiers and thresholds -------------------------------------------------------------------


EMB = LexicalEmbedder()


def _ctx(desc, payload, kind=NODE, owners=("ClassDecl",)):
    return ApiContext(desc, SIGNATURE, payload, EMB.embed(desc), api_kind=kind, owner_types=owners)


def _lookup(query, meta, full):
    return retrieve_for_subop(SubOperation(query, 0), MetaApiDb(meta, EMB.embedder_id),
                              FullApiDb(full, EMB.embedder_id), RetrievalConfig(), EMB)


def criterion_4() -> tuple[bool, str, bytes]:
    q = "get name class"
    hand = {
        "get the name of class": 3 / math.sqrt(15),
        "get simple name of class decl": 3 / math.sqrt(18),
        "get name of class": 3 / math.sqrt(12),
    }
    cos_ok = all(abs(similarity(EMB.embed(q), EMB.embed(t)) - v) <= 1e-6 for t, v in hand.items())
    words = "alpha bravo charlie delta echo foxtrot golf hotel india".split()
    near_q, near_meta, near_full = " ".join(words), " ".join(words[:8] + ["juliet", "kilo"]), \
        " ".join(words[:8] + ["lima", "mike", "november"])
    cos_ok &= abs(similarity(EMB.embed(near_q), EMB.embed(near_meta)) - 8 / math.sqrt(90)) <= 1e-6
    cos_ok &= abs(similarity(EMB.embed(near_q), EMB.embed(near_full)) - 8 / math.sqrt(99)) <= 1e-6

    cases = [
        ("meta hit", _lookup("check whether field is static", [_ctx("check whether field is static", "M")], []),
         (META, "M", 1.0)),
        ("full fallback", _lookup(q, [_ctx("get the name of class", "M")], [_ctx("get name of class", "F")]),
         (FULL, "F", 3 / math.sqrt(12))),
        ("near-threshold fallback", _lookup(near_q, [_ctx(near_meta, "M")], [_ctx(near_full, "F")]),
         (FULL, "F", 8 / math.sqrt(99))),
        ("none", _lookup(q, [_ctx("get the name of class", "M")], [_ctx("get simple name of class decl", "F")]),
         (NONE, None, None)),
    ]
    failed = []
    blob = b""
    for label, (hit, ctx, score), (want_hit, want_payload, want_score) in cases:
        payload = None if ctx is None else ctx.payload
        good = hit == want_hit and payload == want_payload
        good &= (score is None) == (want_score is None)
        if score is not None:
            good &= abs(score - want_score) <= 1e-6
        if not good:
            failed.append(label)
        blob += json.dumps([label, hit, payload, None if score is None else round(score, 9)]).encode() + b"\n"
    ok = cos_ok and not failed
    detail = f"{len(cases) - len(failed)}/{len(cases)} tier fixtures, hand cosines {'match' if cos_ok else 'DIFFER'} to 1e-6"
    return ok, detail, blob


def test_criterion_4_tiers():
    ok, detail, _ = criterion_4()
    record(4, ok, detail)


# -- 5: edge superset and filter soundness ------------------------------------------------------------


def test_criterion_5_edges_and_filter():
    full, meta, metaops = dbs()
    edges = edge_contexts(full)
    queries = [op.text for op in metaops] + [c.description for c in full.entries]
    cases, bad, node_hits = 500, [], 0
    for seed in range(cases):
        rng = random.Random(10_000 + seed)
        source = random_program(rng)
        ast = parse_source(source)
        present = node_types_present(ast)
        subops = rng.sample(queries, rng.randint(1, 6))
        if rng.random() < 0.2:
            subops.append("shuffle " + " ".join(rng.sample("lorem ipsum dolor sit amet".split(), 3)))
        llm = ScriptedLlm.from_pairs([("decompose", "".join(f"{i + 1}. {s}\n" for i, s in enumerate(subops)))])
        rule = CheckerRule(f"r{seed}", "Random rule " + str(seed))
        result = Retriever(full, meta, metaops, llm).retrieve(rule, TestCase("t", 1, source, 0, ()), ast)
        payloads = {c.payload for c in result.contexts}
        if any(e.payload not in payloads for e in edges):
            bad.append(f"seed {seed}: edge context missing")
        for c in result.contexts:
            if c.api_kind == NODE:
                node_hits += 1
                if not set(c.owner_types) & present:
                    bad.append(f"seed {seed}: {c.payload} owned by types absent from the AST")
    ok = not bad and node_hits > 0
    detail = f"{cases} random fixtures, {node_hits} node contexts checked, {len(bad)} violations"
    if bad:
        detail += f" (first: {bad[0]})"
    record(5, ok, detail)


# -- 6: hallucinated identifiers -----------------------------------------------------------------


def test_criterion_6_hallucinations():
    catalog = ingest_manifest(export_manifest())
    canonical = 'use ClassDecl;\non ClassDecl as c {\n  if (c.jjtGetNumChildren() > 0) {\n    report(c, "x");\n  }\n}\n'
    try:
        compile_checker(canonical, catalog)
        canonical_ok = False
    except CompileError as exc:
        canonical_ok = ("jjtGetNumChildren", 3) in exc.unknown_names
    base = ground_truth_checker()
    compile_checker(base, catalog)
    cases, caught = 500, 0
    for seed in range(cases):
        rng = random.Random(20_000 + seed)
        src, injected = inject(base, rng, rng.randint(1, 3))
        try:
            compile_checker(src, catalog)
        except CompileError as exc:
            if set(injected) <= {name for name, _ in exc.unknown_names}:
                caught += 1
    ok = canonical_ok and caught == cases
    record(6, ok, f"{caught}/{cases} injected checkers rejected naming every injected identifier; "
                  f"jjtGetNumChildren {'named' if canonical_ok else 'MISSED'}")


# -- 7: sample rule end to end ---------------------------------------------------------------------


def criterion_7() -> tuple[bool, str, bytes]:
    rule, suite = load_suite(SAMPLE_RULE)
    llm = ScriptedLlm.from_file(SAMPLE_RULE / "transcript.jsonl")
    outcome = run_tdcd(rule, suite, make_deps(llm))
    retrieves = [r["round"] for r in outcome.replay if r["event"] == "retrieve"]
    one_per_round = retrieves == [r.round for r in outcome.rounds]
    ok = (outcome.pr_f == 1 and len(suite) == 6 and one_per_round
          and rule.description == "Assignment to non-final static fields in constructors is unsafe.")
    detail = (f"pr_f={outcome.pr_f} over {len(suite)} tests in {len(outcome.rounds)} rounds, "
              f"{len(retrieves)} retrieval records")
    blob = outcome.replay_text().encode() + json.dumps(outcome.to_json(), sort_keys=True).encode()
    return ok, detail, blob


def test_criterion_7_sample_rule():
    ok, detail, _ = criterion_7()
    record(7, ok, detail)


# -- 8: metrics ----------------------------------------------------------------------------------------


def _rep(ok, n_pass, n_fail):
    return ValidationReport(ok, [f"p{i}" for i in range(n_pass)], [f"f{i}" for i in range(n_fail)])


def test_criterion_8_metrics():
    fixture = {"a": _rep(True, 3, 0), "b": _rep(True, 1, 3), "c": _rep(True, 0, 2), "d": _rep(False, 0, 5)}
    m = compute_metrics(fixture)
    hand_ok = (m.rule_pc, m.rule_pot, m.rule_pat, m.tc_pass, m.tc_total) == (3, 2, 1, 4, 14)
    hand_ok &= m.tpr_avg == Fraction(5, 16) and isinstance(m.tpr_avg, Fraction)
    formula_ok = all(tpr(r) == (Fraction(len(r.passed), r.total) if r.total else 0) for r in fixture.values())
    chain_bad = 0
    for seed in range(300):
        rng = random.Random(30_000 + seed)
        reports = {}
        for k in range(rng.randint(1, 8)):
            ok = rng.random() < 0.8
            n = rng.randint(1, 6)
            p = rng.randint(0, n) if ok else 0
            reports[f"r{k}"] = _rep(ok, p, n - p)
        mm = compute_metrics(reports)
        mean = sum((Fraction(len(r.passed), r.total) for r in reports.values()), Fraction(0)) / len(reports)
        if not (mm.rule_pat <= mm.rule_pot <= mm.rule_pc <= len(reports)) or mm.tpr_avg != mean:
            chain_bad += 1
        formula_ok &= all(mm.tpr_per_rule[k] == Fraction(len(r.passed), r.total) for k, r in reports.items())
    ok = hand_ok and formula_ok and chain_bad == 0
    record(8, ok, f"hand fixture TPR_avg={m.tpr_avg} {'exact' if hand_ok else 'WRONG'}, "
                  f"300 random sets with {chain_bad} chain violations")


# -- 9: determinism ----------------------------------------------------------------------------------------


def artifacts() -> bytes:
    return criterion_1()[2] + b"\x00" + criterion_4()[2] + b"\x00" + criterion_7()[2]


def _artifacts_in_subprocess(hash_seed: str) -> bytes:
    env = dict(os.environ, PYTHONHASHSEED=hash_seed)
    out = subprocess.run(
        [sys.executable, __file__, "--artifacts"], env=env, capture_output=True, check=True, cwd=str(HERE)
    )
    return out.stdout


def test_criterion_9_determinism():
    first, second = artifacts(), artifacts()
    other_a = _artifacts_in_subprocess("1")
    other_b = _artifacts_in_subprocess("4242")
    same = first == second == other_a == other_b
    record(9, same and len(first) > 0,
           f"criteria 1, 4 and 7 repeated in-process and under two hash seeds: "
           f"{'byte-identical' if same else 'DIFFERENT'} ({len(first)} bytes)")


if __name__ == "__main__":
    if sys.argv[1:] == ["--artifacts"]:
        sys.stdout.buffer.write(artifacts())
        sys.exit(0)
    sys.exit(pytest.main([__file__, "-q"]))
