# Build both API databases in memory and look at what retrieval hands the LLM
# for the first test of the shipped sample rule.

# %%
from importlib import resources
from pathlib import Path

from autochecker.catalog import build_full_db, build_meta_db, ingest_manifest, load_metaops, load_snippets, read_jsonl
from autochecker.embedding import LexicalEmbedder
from autochecker.harness import load_suite
from autochecker.llm import ScriptedLlm
from autochecker.minilint import export_manifest
from autochecker.retrieval import Retriever

data = Path(str(resources.files("autochecker").joinpath("data")))
embedder = LexicalEmbedder()

# %%
catalog = ingest_manifest(export_manifest())
full = build_full_db(catalog, embedder)
metaops = load_metaops(read_jsonl(data / "metaops.jsonl"))
meta, unresolved = build_meta_db(metaops, full, load_snippets(read_jsonl(data / "snippets.jsonl")), embedder)
print(len(full.entries), "full contexts,", len(meta.entries), "meta contexts,", len(unresolved), "unresolved")

for ctx in full.entries[:3]:
    print(" ", ctx.description, "->", ctx.payload)

# %%
# the decomposition comes from the recorded transcript, not a live model
rule_dir = data / "ruleset" / "assignment_to_non_final_static"
rule, suite = load_suite(rule_dir)
llm = ScriptedLlm.from_file(rule_dir / "transcript.jsonl")
test = suite.tests[0]
print(test.source)

result = Retriever(full, meta, metaops, llm).retrieve(rule, test, suite.ast(test.id))
for hit in result.per_subop:
    score = "-" if hit.score is None else f"{hit.score:.3f}"
    print(f"{hit.hit:<4} {score:>6}  {hit.subop.text}")
    if hit.context is not None:
        print("            ", hit.context.payload.splitlines()[0])

# %%
print(len(result.contexts), "contexts in the prompt, edge APIs first")
