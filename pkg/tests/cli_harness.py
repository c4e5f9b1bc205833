"""Helpers for driving the CLI in-process across test modules."""

import json
from pathlib import Path

from disparse.cli import main


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
    return path


def synth_spec_doc(num_trees=8, seed=0, rules=(), tags=None, base=0.3):
    tags = tags or ["CounterArgument", "Clarification", "Answer", "Sarcasm", "Positive"]
    ruled = {r["child_tag"] for r in rules}
    return {
        "num_trees": num_trees,
        "branching": {"1": 0.5, "2": 0.5},
        "depth": {"4": 0.5, "5": 0.5},
        "cue_words": {t: f"cue{t.lower()}" for t in tags},
        "base_rates": {t: (0.0 if t in ruled else base) for t in tags},
        "dependency_rules": list(rules),
        "seed": seed,
    }


def make_corpus(tmp_path, name="corpus", **kwargs) -> Path:
    """Generate a small corpus via the synth subcommand; returns the ndjson."""
    spec_path = write_json(tmp_path / f"{name}_spec.json", synth_spec_doc(**kwargs))
    out = tmp_path / name
    assert run_cli("synth", "--spec", spec_path, "--out", out) == 0
    return out / "trees.ndjson"


def bow_config_doc(dimension=40, history=0, collocation=False, scaling="none"):
    return {
        "bow": {"dimension": dimension, "weighting": "binary", "context": 1},
        "label_sequence_depth": history,
        "use_collocation": collocation,
        "scaling": scaling,
    }


def fast_model_doc(kind="logreg", epochs=15):
    return {"kind": kind, "epochs": epochs}


def dir_snapshot(root) -> dict[str, bytes]:
    root = Path(root)
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }
