# Evaluate every shipped rule and print the summary table.  Each rule is
# driven by its own recorded transcript.

# %%
from importlib import resources
from pathlib import Path

from autochecker.catalog import build_full_db, build_meta_db, ingest_manifest, load_metaops, load_snippets, read_jsonl
from autochecker.embedding import LexicalEmbedder
from autochecker.harness import format_table, run_eval
from autochecker.llm import ScriptedLlm
from autochecker.minilint import MiniLint, default_template, export_manifest
from autochecker.retrieval import Retriever
from autochecker.tdcd import TdcdDeps

data = Path(str(resources.files("autochecker").joinpath("data")))
embedder = LexicalEmbedder()
full = build_full_db(ingest_manifest(export_manifest()), embedder)
metaops = load_metaops(read_jsonl(data / "metaops.jsonl"))
meta, _ = build_meta_db(metaops, full, load_snippets(read_jsonl(data / "snippets.jsonl")), embedder)


def make_deps(rule_dir, run):
    llm = ScriptedLlm.from_file(rule_dir / "transcript.jsonl")
    return TdcdDeps(Retriever(full, meta, metaops, llm, embedder), MiniLint(), llm, default_template())


# %%
result = run_eval(data / "ruleset", make_deps)
print(format_table(result.metrics))
for name, entry in result.rules.items():
    print(name, entry["rounds"], "round(s)")
