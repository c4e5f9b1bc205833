"""disparse: command-line entry point.

Subcommands: ingest, stats, analytics, train, parse, eval, ablate,
noise, synth.  Every run is seeded (flag, else DISPARSE_SEED, else 0),
emits machine reports (JSON + CSV) with an embedded manifest, and writes
files atomically.  Exit codes: 0 ok, 1 validation/data failure, 2 usage
error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from pathlib import Path

from . import analytics as _analytics
from . import bundle as _bundle
from .corpus import (
    corpus_statistics,
    extract_branches,
    labeled_nodes,
    load_trees,
    split_trees,
    write_trees,
)
from .errors import ConfigError, DisparseError
from .evaluation import (
    NoiseSpec,
    cross_validate,
    noise_experiment,
    run_ablation,
)
from .features import (
    CategoryLexicon,
    FeatureConfig,
    PdtbSidecar,
    WordVectors,
    default_pdtb_inventory,
    load_demo_lexicon,
    load_pdtb_inventory,
)
from .evaluation import evaluate_stack
from .manifest import (
    RunManifest,
    atomic_write_text,
    dumps_canonical,
    write_csv_report,
    write_json_report,
)
from .models import ModelSpec, predict_tree, train_stack
from .synthetic import SyntheticSpec, corpus_manifest, generate
from .tagset import TAGS


def _default_seed() -> int:
    return int(os.environ.get("DISPARSE_SEED", "0"))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=_default_seed(),
                        help="random seed (default: $DISPARSE_SEED or 0)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="max parallel fold/grid workers")


def _add_resources(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lexicon", help="category lexicon file (default: bundled demo)")
    parser.add_argument("--vectors", help="word-vector text file")
    parser.add_argument("--pdtb", help="PDTB sidecar (newline-delimited JSON)")
    parser.add_argument("--pdtb-inventory", help="PDTB tag inventory file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="disparse",
        description="Discourse parsing toolkit for non-convergent discussions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a tree file")
    p.add_argument("--input", required=True)
    p.add_argument("--validate", action="store_true",
                   help="validate structure (always on; flag kept for clarity)")
    _add_common(p)

    p = sub.add_parser("stats", help="dataset statistics table")
    p.add_argument("--input", required=True)
    p.add_argument("--out", help="directory for report.json/report.csv")
    _add_common(p)

    p = sub.add_parser("analytics", help="tag priors, PMI, transitions")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("train", help="train a per-tag model stack")
    p.add_argument("--input", required=True)
    p.add_argument("--features", "--config", dest="features", required=True,
                   help="feature config JSON")
    p.add_argument("--model-spec", help="model hyperparameter JSON")
    p.add_argument("--out", required=True)
    _add_resources(p)
    _add_common(p)

    p = sub.add_parser("parse", help="label a tree file with a trained stack")
    p.add_argument("--model", required=True, help="model bundle directory")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=["gold", "predicted"], default="predicted")
    p.add_argument("--pdtb", help="PDTB sidecar for the input trees")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("eval", help="held-out evaluation with cross-validation")
    p.add_argument("--input", required=True)
    p.add_argument("--features", "--config", dest="features", required=True)
    p.add_argument("--model-spec")
    p.add_argument("--holdout", type=int, default=15,
                   help="trees set aside for testing")
    p.add_argument("--test-ids", help="file of tree ids overriding random holdout")
    p.add_argument("--folds", type=int, default=5,
                   help="cross-validation folds on the training side (0 = skip)")
    p.add_argument("--out", required=True)
    _add_resources(p)
    _add_common(p)

    p = sub.add_parser("ablate", help="run a feature-config ablation grid")
    p.add_argument("--input", required=True)
    p.add_argument("--grid", required=True, help='JSON: {"configs": [...]}')
    p.add_argument("--model-spec")
    p.add_argument("--holdout", type=int, default=15)
    p.add_argument("--test-ids")
    p.add_argument("--out", required=True)
    _add_resources(p)
    _add_common(p)

    p = sub.add_parser("noise", help="label-noise robustness experiment")
    p.add_argument("--input", required=True)
    p.add_argument("--features", "--config", dest="features", required=True)
    p.add_argument("--noise-grid", required=True, help='JSON: {"noise": [...]}')
    p.add_argument("--model-spec")
    p.add_argument("--holdout", type=int, default=15)
    p.add_argument("--test-ids")
    p.add_argument("--out", required=True)
    _add_resources(p)
    _add_common(p)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--spec", required=True, help="synthetic corpus spec JSON")
    p.add_argument("--out", required=True)
    _add_common(p)

    return parser


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------

def _load_model_specs(path: str | None):
    """A single spec, or {"default": ..., "per_tag": {tag: ...}}."""
    if path is None:
        return ModelSpec()
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if "per_tag" in obj or "default" in obj:
        default = ModelSpec.from_dict(obj.get("default", {}))
        per_tag = {t: ModelSpec.from_dict(s) for t, s in obj.get("per_tag", {}).items()}
        return {t: per_tag.get(t, default) for t in TAGS}
    return ModelSpec.from_dict(obj)


def _load_resources(args, config: FeatureConfig):
    lexicon = None
    if config.lexicon_context:
        lexicon = (
            CategoryLexicon.load(args.lexicon) if args.lexicon else load_demo_lexicon()
        )
    vectors = None
    if config.embeddings_context:
        if not args.vectors:
            raise ConfigError("config enables embeddings: pass --vectors")
        vectors = WordVectors.load(args.vectors)
    pdtb = None
    if config.pdtb_unigram_context or config.pdtb_bigram_context:
        inventory = (
            load_pdtb_inventory(args.pdtb_inventory)
            if args.pdtb_inventory
            else default_pdtb_inventory()
        )
        if args.pdtb:
            pdtb = PdtbSidecar.load(args.pdtb, inventory_source_list(inventory))
        else:
            print("note: no PDTB sidecar given; PDTB blocks will be zero",
                  file=sys.stderr)
            pdtb = PdtbSidecar.empty(inventory)
    return lexicon, vectors, pdtb


def inventory_source_list(inventory):
    """Adapter so a parsed inventory can be reused as a load source."""
    return io.StringIO("\n".join(inventory) + "\n")


def _split(args, trees):
    test_ids = None
    if getattr(args, "test_ids", None):
        test_ids = [
            ln.strip()
            for ln in Path(args.test_ids).read_text(encoding="utf-8").splitlines()
            if ln.strip()
        ]
    return split_trees(trees, args.holdout, args.seed, test_tree_ids=test_ids)


def _manifest(args, command: str, inputs: dict[str, str],
              config: dict | None = None, outputs: list[str] | None = None):
    present = {k: v for k, v in inputs.items() if v}
    return RunManifest.create(command, args.seed, present, config=config,
                              outputs=outputs)


# ---------------------------------------------------------------------------
# Subcommand implementations
# ---------------------------------------------------------------------------

def _cmd_ingest(args) -> int:
    trees = load_trees(args.input)
    nodes = sum(len(t.nodes) for t in trees)
    labeled = len(labeled_nodes(trees))
    branches = sum(len(extract_branches(t)) for t in trees)
    print(f"OK: {len(trees)} trees, {nodes} nodes ({labeled} labeled), "
          f"{branches} branches")
    return 0


def _cmd_stats(args) -> int:
    trees = load_trees(args.input)
    stats = corpus_statistics(trees)
    print(f"{'Variable':<28}{'Value':>12}{'STD':>10}")
    for name, value, std in stats.rows():
        val = f"{value:.1f}" if isinstance(value, float) else str(value)
        print(f"{name:<28}{val:>12}{'--' if std is None else f'{std:.1f}':>10}")
    if args.out:
        manifest = _manifest(args, "stats", {"input": args.input},
                             outputs=["report.json", "report.csv"])
        write_json_report(Path(args.out) / "report.json", stats.to_dict(), manifest)
        rows = [["Variable", "Value", "STD"]]
        rows += [[n, v, "" if s is None else s] for n, v, s in stats.rows()]
        write_csv_report(Path(args.out) / "report.csv", rows)
    return 0


def _cmd_analytics(args) -> int:
    trees = load_trees(args.input)
    nodes = labeled_nodes(trees)
    priors = _analytics.tag_priors(nodes)
    pmi = _analytics.pmi_matrix(nodes)
    transitions = _analytics.transition_matrix(trees)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    _analytics.priors_to_csv(priors, buf)
    atomic_write_text(out / "priors.csv", buf.getvalue())
    for name, matrix in (("pmi.csv", pmi), ("transitions.csv", transitions)):
        buf = io.StringIO()
        matrix.to_csv(buf)
        atomic_write_text(out / name, buf.getvalue())
    manifest = _manifest(args, "analytics", {"input": args.input},
                         outputs=["priors.csv", "pmi.csv", "transitions.csv",
                                  "manifest.json"])
    atomic_write_text(out / "manifest.json", dumps_canonical(manifest.to_dict()))
    print(f"wrote priors.csv, pmi.csv, transitions.csv to {out}")
    return 0


def _cmd_train(args) -> int:
    trees = load_trees(args.input)
    config = FeatureConfig.load(args.features)
    specs = _load_model_specs(args.model_spec)
    lexicon, vectors, pdtb = _load_resources(args, config)
    stack = train_stack(
        trees, config, specs, seed=args.seed,
        lexicon=lexicon, word_vectors=vectors, pdtb=pdtb,
    )
    _bundle.save_stack(stack, args.out)
    bundle_files = sorted(
        str(p.relative_to(args.out)) for p in Path(args.out).rglob("*") if p.is_file()
    )
    manifest = _manifest(
        args, "train",
        {"input": args.input, "features": args.features,
         "model_spec": args.model_spec or "", "lexicon": args.lexicon or "",
         "vectors": args.vectors or "", "pdtb": args.pdtb or ""},
        config=config.to_dict(),
        outputs=bundle_files + ["manifest.json"],
    )
    atomic_write_text(Path(args.out) / "manifest.json",
                      dumps_canonical(manifest.to_dict()))
    print(f"trained {len(stack.tags)} tag models on {len(trees)} trees -> {args.out}")
    return 0


def _cmd_parse(args) -> int:
    stack = _bundle.load_stack(args.model)
    trees = load_trees(args.input)
    if args.pdtb and stack.assembler.pdtb is not None:
        stack.assembler.replace_pdtb(
            PdtbSidecar.load(args.pdtb,
                             inventory_source_list(stack.assembler.pdtb.inventory))
        )
    mode = "gold_context" if args.mode == "gold" else "predicted_context"
    lines = []
    n = 0
    for tree in trees:
        preds = predict_tree(stack, tree, mode=mode)
        for nid in tree.iter_ids():
            lines.append(json.dumps(
                {"tree_id": tree.tree_id, "node_id": nid,
                 "labels": sorted(preds[nid])},
                sort_keys=True,
            ))
            n += 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    atomic_write_text(out / "predictions.ndjson", "\n".join(lines) + "\n")
    manifest = _manifest(args, "parse", {"model": str(Path(args.model) / "stack.json"),
                                         "input": args.input},
                         outputs=["predictions.ndjson", "manifest.json"])
    atomic_write_text(out / "manifest.json", dumps_canonical(manifest.to_dict()))
    print(f"parsed {n} posts in {len(trees)} trees ({args.mode} context) -> {out}")
    return 0


def _cmd_eval(args) -> int:
    trees = load_trees(args.input)
    config = FeatureConfig.load(args.features)
    specs = _load_model_specs(args.model_spec)
    lexicon, vectors, pdtb = _load_resources(args, config)
    train_trees, test_trees = _split(args, trees)
    if not test_trees:
        raise ConfigError("evaluation needs at least one held-out tree")

    payload: dict = {"config": config.to_dict(), "holdout_trees": len(test_trees)}
    if args.folds >= 2:
        cv = cross_validate(
            train_trees, config, specs, k=args.folds, seed=args.seed,
            lexicon=lexicon, word_vectors=vectors, pdtb=pdtb, jobs=args.jobs,
        )
        payload["cv"] = cv.to_dict()
        for key, (mean, std) in cv.summary.items():
            print(f"cv {key}: {mean:.3f} +- {std:.3f}")

    stack = train_stack(
        train_trees, config, specs, seed=args.seed,
        lexicon=lexicon, word_vectors=vectors, pdtb=pdtb,
    )
    report = evaluate_stack(stack, test_trees,
                            metadata={"split": "held_out", "seed": args.seed})
    payload["held_out"] = report.to_dict()
    for key, value in report.headline().items():
        print(f"held-out {key}: {value:.3f}")

    manifest = _manifest(args, "eval",
                         {"input": args.input, "features": args.features,
                          "model_spec": args.model_spec or ""},
                         config=config.to_dict(),
                         outputs=["report.json", "report.csv"])
    out = Path(args.out)
    write_json_report(out / "report.json", payload, manifest)
    write_csv_report(out / "report.csv", report.csv_rows())
    return 0


def _cmd_ablate(args) -> int:
    trees = load_trees(args.input)
    with open(args.grid, "r", encoding="utf-8") as fh:
        grid_doc = json.load(fh)
    if "configs" not in grid_doc or not grid_doc["configs"]:
        raise ConfigError('grid JSON needs a non-empty "configs" list')
    grid = [FeatureConfig.from_dict(c) for c in grid_doc["configs"]]
    specs = _load_model_specs(args.model_spec)

    needs_lex = any(c.lexicon_context for c in grid)
    needs_vec = any(c.embeddings_context for c in grid)
    needs_pdtb = any(c.pdtb_unigram_context or c.pdtb_bigram_context for c in grid)
    lexicon = (CategoryLexicon.load(args.lexicon) if args.lexicon
               else load_demo_lexicon()) if needs_lex else None
    vectors = WordVectors.load(args.vectors) if needs_vec and args.vectors else None
    if needs_vec and vectors is None:
        raise ConfigError("grid enables embeddings: pass --vectors")
    pdtb = None
    if needs_pdtb:
        inventory = (load_pdtb_inventory(args.pdtb_inventory)
                     if args.pdtb_inventory else default_pdtb_inventory())
        pdtb = (PdtbSidecar.load(args.pdtb, inventory_source_list(inventory))
                if args.pdtb else PdtbSidecar.empty(inventory))

    train_trees, test_trees = _split(args, trees)
    rows = run_ablation(
        train_trees, test_trees, grid, specs, seed=args.seed,
        lexicon=lexicon, word_vectors=vectors, pdtb=pdtb, jobs=args.jobs,
    )
    csv_rows = [["config", "w.P", "w.R", "w.F1", "m.F1"]]
    for row in rows:
        h = row.report.headline()
        csv_rows.append([row.config.label(), h["w.P"], h["w.R"], h["w.F1"], h["m.F1"]])
        print(f"{row.config.label():<40} w.F1={h['w.F1']:.3f} m.F1={h['m.F1']:.3f}")
    manifest = _manifest(args, "ablate", {"input": args.input, "grid": args.grid},
                         outputs=["report.json", "report.csv"])
    out = Path(args.out)
    write_json_report(out / "report.json", {"rows": [r.to_dict() for r in rows]},
                      manifest)
    write_csv_report(out / "report.csv", csv_rows)
    return 0


def _cmd_noise(args) -> int:
    trees = load_trees(args.input)
    config = FeatureConfig.load(args.features)
    specs = _load_model_specs(args.model_spec)
    lexicon, vectors, pdtb = _load_resources(args, config)
    with open(args.noise_grid, "r", encoding="utf-8") as fh:
        noise_doc = json.load(fh)
    if "noise" not in noise_doc or not noise_doc["noise"]:
        raise ConfigError('noise grid JSON needs a non-empty "noise" list')
    grid = [
        NoiseSpec.from_dict({"seed": args.seed, **spec}) for spec in noise_doc["noise"]
    ]

    train_trees, test_trees = _split(args, trees)
    rows = noise_experiment(
        train_trees, test_trees, config, specs, grid, seed=args.seed,
        lexicon=lexicon, word_vectors=vectors, pdtb=pdtb,
    )
    csv_rows = [["noise", "w.P", "w.R", "w.F1", "m.F1"]]
    for row in rows:
        h = row.report.headline()
        label = "clean" if row.noise is None else row.noise.label()
        csv_rows.append([label, h["w.P"], h["w.R"], h["w.F1"], h["m.F1"]])
        print(f"{label:<28} w.F1={h['w.F1']:.3f}")
    manifest = _manifest(args, "noise",
                         {"input": args.input, "features": args.features,
                          "noise_grid": args.noise_grid},
                         config=config.to_dict(),
                         outputs=["report.json", "report.csv"])
    out = Path(args.out)
    write_json_report(out / "report.json", {"rows": [r.to_dict() for r in rows]},
                      manifest)
    write_csv_report(out / "report.csv", csv_rows)
    return 0


def _cmd_synth(args) -> int:
    spec = SyntheticSpec.load(args.spec)
    trees = generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    write_trees(trees, buf)
    atomic_write_text(out / "trees.ndjson", buf.getvalue())
    doc = corpus_manifest(spec, trees)
    doc["manifest"] = _manifest(args, "synth", {"spec": args.spec},
                                outputs=["trees.ndjson", "manifest.json"]).to_dict()
    atomic_write_text(out / "manifest.json", dumps_canonical(doc))
    nodes = doc["num_nodes"]
    print(f"generated {len(trees)} trees, {nodes} nodes -> {out}")
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "stats": _cmd_stats,
    "analytics": _cmd_analytics,
    "train": _cmd_train,
    "parse": _cmd_parse,
    "eval": _cmd_eval,
    "ablate": _cmd_ablate,
    "noise": _cmd_noise,
    "synth": _cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DisparseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
