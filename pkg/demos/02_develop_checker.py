# Replay a full checker-development run for the sample rule and walk through
# the rounds: which test was picked, how many attempts it took, and the pools.

# %%
from importlib import resources
from pathlib import Path

from autochecker.catalog import build_full_db, build_meta_db, ingest_manifest, load_metaops, load_snippets, read_jsonl
from autochecker.embedding import LexicalEmbedder
from autochecker.harness import load_suite
from autochecker.llm import ScriptedLlm
from autochecker.minilint import MiniLint, default_template, export_manifest
from autochecker.retrieval import Retriever
from autochecker.tdcd import TdcdDeps, run_tdcd

data = Path(str(resources.files("autochecker").joinpath("data")))
embedder = LexicalEmbedder()
full = build_full_db(ingest_manifest(export_manifest()), embedder)
metaops = load_metaops(read_jsonl(data / "metaops.jsonl"))
meta, _ = build_meta_db(metaops, full, load_snippets(read_jsonl(data / "snippets.jsonl")), embedder)

rule_dir = data / "ruleset" / "assignment_to_non_final_static"
rule, suite = load_suite(rule_dir)


def develop(transcript):
    llm = ScriptedLlm.from_file(rule_dir / transcript)
    deps = TdcdDeps(Retriever(full, meta, metaops, llm, embedder), MiniLint(), llm, default_template())
    return run_tdcd(rule, suite, deps)


# %%
outcome = develop("transcript.jsonl")
for r in outcome.rounds:
    verdict = "accepted" if r.accepted else "skipped"
    print(f"round {r.round}: {r.selected} {verdict} after {r.attempts} attempt(s)")
    print("   T_c", list(r.candidates), " T_p", list(r.passed), " T_s", list(r.skipped_set))
print("pass rate", outcome.pr_f)

# %%
# what the compiler said about each attempt
for rec in outcome.replay:
    if rec["event"] == "attempt":
        print(rec["round"], rec["attempt"], rec["kind"], rec["compile"], rec.get("compile_error") or "")

# %%
body = outcome.final_checker.source
print(body[body.index("\non ") + 1:])

# %%
# a second transcript where the model never gets `static final` right
stuck = develop("transcript_skip.jsonl")
print("skipped", stuck.skipped, "pass rate", stuck.pr_f)
