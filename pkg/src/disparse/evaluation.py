"""Scoring, cross-validation, ablation grids, and label-noise experiments.

Per-tag metrics are one-vs-rest confusion counts over unique labeled
nodes.  Macro averages are unweighted means over tags with nonzero gold
support; weighted averages weight by gold support.  Precision, recall
and F1 are zero whenever their denominators vanish.

Noise perturbs only the label inputs at evaluation time, never the
training data: it simulates a sub-optimal upstream prediction of the
preceding and collocated tags.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import ConversationTree, labeled_nodes, make_folds
from .errors import ConfigError
from .features import FeatureConfig
from .models import ModelSpec, TagStack, predict_tree, train_stack
from .tagset import CATEGORIES, TAGS


@dataclass(frozen=True)
class TagMetrics:
    """One-vs-rest confusion counts and derived scores for one tag."""

    tag: str
    tp: int
    fp: int
    fn: int
    precision: float
    recall: float
    f1: float
    prior: float

    @property
    def support(self) -> int:
        return self.tp + self.fn

    @classmethod
    def from_counts(cls, tag: str, tp: int, fp: int, fn: int, n_nodes: int) -> "TagMetrics":
        precision = tp / (tp + fp) if tp + fp > 0 else 0.0
        recall = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = (
            2.0 * precision * recall / (precision + recall)
            if precision + recall > 0
            else 0.0
        )
        prior = (tp + fn) / n_nodes if n_nodes > 0 else 0.0
        return cls(tag=tag, tp=tp, fp=fp, fn=fn,
                   precision=precision, recall=recall, f1=f1, prior=prior)

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "support": self.support,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "prior": self.prior,
        }


@dataclass
class EvalReport:
    """Per-tag metrics plus category and overall aggregates."""

    n_nodes: int
    per_tag: dict[str, TagMetrics]
    metadata: dict = field(default_factory=dict)

    def _selected(self, tags: Iterable[str] | None) -> list[TagMetrics]:
        chosen = self.per_tag.values() if tags is None else (self.per_tag[t] for t in tags)
        return [m for m in chosen if m.support > 0]

    def macro(self, tags: Iterable[str] | None = None) -> tuple[float, float, float]:
        """(precision, recall, f1) averaged evenly over supported tags."""
        metrics = self._selected(tags)
        if not metrics:
            return (0.0, 0.0, 0.0)
        return (
            float(np.mean([m.precision for m in metrics])),
            float(np.mean([m.recall for m in metrics])),
            float(np.mean([m.f1 for m in metrics])),
        )

    def weighted(self, tags: Iterable[str] | None = None) -> tuple[float, float, float]:
        """(precision, recall, f1) weighted by gold support."""
        metrics = self._selected(tags)
        total = sum(m.support for m in metrics)
        if total == 0:
            return (0.0, 0.0, 0.0)
        return (
            sum(m.precision * m.support for m in metrics) / total,
            sum(m.recall * m.support for m in metrics) / total,
            sum(m.f1 * m.support for m in metrics) / total,
        )

    def headline(self) -> dict[str, float]:
        wp, wr, wf1 = self.weighted()
        _, _, mf1 = self.macro()
        return {"w.P": wp, "w.R": wr, "w.F1": wf1, "m.F1": mf1}

    def to_dict(self) -> dict:
        categories = {}
        for cat, tags in CATEGORIES.items():
            mp, mr, mf = self.macro(tags)
            wp, wr, wf = self.weighted(tags)
            categories[cat] = {
                "macro": {"precision": mp, "recall": mr, "f1": mf},
                "weighted": {"precision": wp, "recall": wr, "f1": wf},
            }
        return {
            "n_nodes": self.n_nodes,
            "per_tag": {t: m.to_dict() for t, m in self.per_tag.items()},
            "categories": categories,
            "headline": self.headline(),
            "macro_includes_zero_support_tags": False,
            "metadata": self.metadata,
        }

    def csv_rows(self) -> list[list]:
        """Flat rows: per-tag lines grouped by category plus averages."""
        rows: list[list] = [["Tag", "Prec", "Rec", "F1-score", "Prior"]]
        for cat, tags in CATEGORIES.items():
            for tag in tags:
                m = self.per_tag[tag]
                rows.append([tag, m.precision, m.recall, m.f1, m.prior])
            mp, mr, mf = self.macro(tags)
            wp, wr, wf = self.weighted(tags)
            sup = [self.per_tag[t] for t in tags if self.per_tag[t].support > 0]
            prior_m = float(np.mean([m.prior for m in sup])) if sup else 0.0
            total = sum(m.support for m in sup)
            prior_w = (
                sum(m.prior * m.support for m in sup) / total if total else 0.0
            )
            rows.append([f"{cat} macro avg.", mp, mr, mf, prior_m])
            rows.append([f"{cat} w.avg", wp, wr, wf, prior_w])
        mp, mr, mf = self.macro()
        wp, wr, wf = self.weighted()
        rows.append(["Total macro avg.", mp, mr, mf, ""])
        rows.append(["Total w.avg", wp, wr, wf, ""])
        return rows


def score(
    predictions: Sequence[frozenset[str]],
    gold: Sequence[frozenset[str]],
    tags: Sequence[str] = TAGS,
    metadata: dict | None = None,
) -> EvalReport:
    """Score aligned prediction/gold label sets over the same nodes."""
    if len(predictions) != len(gold):
        raise ConfigError(
            f"{len(predictions)} predictions vs {len(gold)} gold nodes"
        )
    n = len(gold)
    per_tag = {}
    for tag in tags:
        tp = sum(1 for p, g in zip(predictions, gold) if tag in p and tag in g)
        fp = sum(1 for p, g in zip(predictions, gold) if tag in p and tag not in g)
        fn = sum(1 for p, g in zip(predictions, gold) if tag not in p and tag in g)
        per_tag[tag] = TagMetrics.from_counts(tag, tp, fp, fn, n)
    return EvalReport(n_nodes=n, per_tag=per_tag, metadata=metadata or {})


# ---------------------------------------------------------------------------
# Label noise
# ---------------------------------------------------------------------------

NOISE_MODES = ("mask", "substitute", "add")
NOISE_TARGETS = ("both", "collocated", "preceding")


@dataclass(frozen=True)
class NoiseSpec:
    """How to corrupt label inputs at evaluation time."""

    mode: str
    fraction: float
    targets: str = "both"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in NOISE_MODES:
            raise ConfigError(f"unknown noise mode {self.mode!r}")
        if self.targets not in NOISE_TARGETS:
            raise ConfigError(f"unknown noise targets {self.targets!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ConfigError("noise fraction must lie in [0, 1]")

    def label(self) -> str:
        return f"{self.mode}-{self.fraction:g}-{self.targets}"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "fraction": self.fraction,
            "targets": self.targets,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "NoiseSpec":
        return cls(**obj)


def _draw_substitute(
    tag: str, priors: dict[str, float], rng: np.random.Generator
) -> str:
    """A replacement tag drawn by prior, never the original tag."""
    others = [t for t in TAGS if t != tag]
    weights = np.array([priors.get(t, 0.0) for t in others])
    if weights.sum() <= 0:
        weights = np.ones(len(others))
    return others[rng.choice(len(others), p=weights / weights.sum())]


def perturb_label_set(
    labels: frozenset[str],
    noise: NoiseSpec,
    priors: dict[str, float],
    rng: np.random.Generator,
) -> frozenset[str]:
    """Perturb one label set; tags are visited in canonical order."""
    if noise.fraction == 0.0:
        return labels
    if noise.mode == "mask":
        return frozenset(
            t for t in sorted(labels, key=TAGS.index)
            if rng.random() >= noise.fraction
        )
    if noise.mode == "substitute":
        out = set()
        for t in sorted(labels, key=TAGS.index):
            if rng.random() < noise.fraction:
                out.add(_draw_substitute(t, priors, rng))
            else:
                out.add(t)
        return frozenset(out)
    # add: each absent tag appears with probability fraction * prior(tag)
    out = set(labels)
    for t in TAGS:
        if t not in labels and rng.random() < noise.fraction * priors.get(t, 0.0):
            out.add(t)
    return frozenset(out)


def perturb_labels(
    label_sets: Sequence[frozenset[str]],
    noise: NoiseSpec,
    priors: dict[str, float],
    rng: np.random.Generator | None = None,
) -> list[frozenset[str]]:
    """Perturb a label context; deterministic given the noise seed."""
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    return [perturb_label_set(ls, noise, priors, rng) for ls in label_sets]


def noise_map(
    trees: Sequence[ConversationTree],
    noise: NoiseSpec,
    priors: dict[str, float],
) -> dict[str, frozenset[str]]:
    """One perturbed label set per labeled node, drawn once per node.

    A noisy upstream predictor emits a single label set per post, so the
    same draw serves every place the node's labels are consumed.
    """
    rng = np.random.default_rng(noise.seed)
    out = {}
    for tree in trees:
        for nid in tree.iter_ids():
            node = tree.nodes[nid]
            if node.is_labeled:
                out[nid] = perturb_label_set(node.labels, noise, priors, rng)
    return out


# ---------------------------------------------------------------------------
# Stack evaluation over trees
# ---------------------------------------------------------------------------

def evaluate_stack(
    stack: TagStack,
    trees: Sequence[ConversationTree],
    mode: str = "gold_context",
    noise: NoiseSpec | None = None,
    priors: dict[str, float] | None = None,
    metadata: dict | None = None,
) -> EvalReport:
    """Predict every unique labeled node and score against gold."""
    overrides: dict[str, dict[str, frozenset[str]] | None] = {
        "preceding": None,
        "collocated": None,
    }
    if noise is not None:
        if priors is None:
            raise ConfigError("noise evaluation needs tag priors")
        perturbed = noise_map(trees, noise, priors)
        if noise.targets in ("preceding", "both"):
            overrides["preceding"] = perturbed
        if noise.targets in ("collocated", "both"):
            overrides["collocated"] = perturbed

    predictions = []
    gold = []
    for tree in trees:
        tree_preds = predict_tree(
            stack,
            tree,
            mode=mode,
            preceding_override=overrides["preceding"],
            collocation_override=overrides["collocated"],
        )
        for nid in tree.iter_ids():
            node = tree.nodes[nid]
            if node.is_labeled:
                predictions.append(tree_preds[nid])
                gold.append(node.labels)

    meta = dict(metadata or {})
    meta["mode"] = mode
    if noise is not None:
        meta["noise"] = noise.to_dict()
    return score(predictions, gold, tags=stack.tags, metadata=meta)


# ---------------------------------------------------------------------------
# Cross-validation
# ---------------------------------------------------------------------------

@dataclass
class CVResult:
    """Per-fold reports, a pooled report, and mean/std headline metrics."""

    fold_reports: list[EvalReport]
    pooled: EvalReport
    summary: dict[str, tuple[float, float]]

    def to_dict(self) -> dict:
        return {
            "folds": [r.to_dict() for r in self.fold_reports],
            "pooled": self.pooled.to_dict(),
            "summary": {k: list(v) for k, v in self.summary.items()},
        }


def _pool_reports(reports: Sequence[EvalReport], tags: Sequence[str]) -> EvalReport:
    n = sum(r.n_nodes for r in reports)
    per_tag = {}
    for tag in tags:
        tp = sum(r.per_tag[tag].tp for r in reports)
        fp = sum(r.per_tag[tag].fp for r in reports)
        fn = sum(r.per_tag[tag].fn for r in reports)
        per_tag[tag] = TagMetrics.from_counts(tag, tp, fp, fn, n)
    return EvalReport(n_nodes=n, per_tag=per_tag, metadata={"pooled_folds": len(reports)})


def _summarize(reports: Sequence[EvalReport]) -> dict[str, tuple[float, float]]:
    keys = ("w.P", "w.R", "w.F1", "m.F1")
    table = {k: np.array([r.headline()[k] for r in reports]) for k in keys}
    return {k: (float(v.mean()), float(v.std())) for k, v in table.items()}


def _cv_fold_worker(args) -> EvalReport:
    (train_trees, test_trees, config, specs, seed, fold_index,
     lexicon, word_vectors, pdtb, tags, mode) = args
    stack = train_stack(
        train_trees, config, specs, seed=seed,
        lexicon=lexicon, word_vectors=word_vectors, pdtb=pdtb, tags=tags,
    )
    return evaluate_stack(
        stack, test_trees, mode=mode, metadata={"fold": fold_index}
    )


def cross_validate(
    trees: Sequence[ConversationTree],
    config: FeatureConfig,
    specs: ModelSpec | dict[str, ModelSpec],
    k: int,
    seed: int = 0,
    *,
    lexicon=None,
    word_vectors=None,
    pdtb=None,
    tags: Sequence[str] = TAGS,
    mode: str = "gold_context",
    jobs: int = 1,
) -> CVResult:
    """k-fold cross-validation at tree granularity.

    Resources and models are refitted per fold on the k-1 training
    groups; the held-out group is scored in the requested mode.
    """
    folds = make_folds(trees, k, seed)
    jobs_args = []
    for i, fold in enumerate(folds):
        held_ids = {t.tree_id for t in fold}
        train_trees = [t for t in trees if t.tree_id not in held_ids]
        jobs_args.append(
            (train_trees, fold, config, specs, seed, i,
             lexicon, word_vectors, pdtb, tuple(tags), mode)
        )
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_cv_fold_worker, jobs_args))
    else:
        reports = [_cv_fold_worker(a) for a in jobs_args]
    return CVResult(
        fold_reports=reports,
        pooled=_pool_reports(reports, tuple(tags)),
        summary=_summarize(reports),
    )


# ---------------------------------------------------------------------------
# Ablation grid
# ---------------------------------------------------------------------------

@dataclass
class AblationRow:
    config: FeatureConfig
    report: EvalReport

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "label": self.config.label(),
            **self.report.headline(),
        }


def _ablation_worker(args) -> AblationRow:
    (train_trees, test_trees, config, specs, seed,
     lexicon, word_vectors, pdtb, tags, mode) = args
    stack = train_stack(
        train_trees, config, specs, seed=seed,
        lexicon=lexicon, word_vectors=word_vectors, pdtb=pdtb, tags=tags,
    )
    report = evaluate_stack(stack, test_trees, mode=mode)
    return AblationRow(config=config, report=report)


def run_ablation(
    train_trees: Sequence[ConversationTree],
    test_trees: Sequence[ConversationTree],
    grid: Sequence[FeatureConfig],
    specs: ModelSpec | dict[str, ModelSpec],
    seed: int = 0,
    *,
    lexicon=None,
    word_vectors=None,
    pdtb=None,
    tags: Sequence[str] = TAGS,
    mode: str = "gold_context",
    jobs: int = 1,
) -> list[AblationRow]:
    """Train and score one run per grid row, in grid order."""
    if not grid:
        raise ConfigError("empty ablation grid")
    jobs_args = [
        (train_trees, test_trees, config, specs, seed,
         lexicon, word_vectors, pdtb, tuple(tags), mode)
        for config in grid
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_ablation_worker, jobs_args))
    return [_ablation_worker(a) for a in jobs_args]


# ---------------------------------------------------------------------------
# Noise experiment
# ---------------------------------------------------------------------------

@dataclass
class NoiseRow:
    noise: NoiseSpec | None
    report: EvalReport

    def to_dict(self) -> dict:
        return {
            "noise": None if self.noise is None else self.noise.to_dict(),
            "label": "clean" if self.noise is None else self.noise.label(),
            **self.report.headline(),
        }


def noise_experiment(
    train_trees: Sequence[ConversationTree],
    test_trees: Sequence[ConversationTree],
    config: FeatureConfig,
    specs: ModelSpec | dict[str, ModelSpec],
    noise_grid: Sequence[NoiseSpec],
    seed: int = 0,
    *,
    lexicon=None,
    word_vectors=None,
    pdtb=None,
    tags: Sequence[str] = TAGS,
) -> list[NoiseRow]:
    """Evaluate one trained stack under increasingly corrupted label input.

    The stack is trained once on clean data; a clean baseline row comes
    first, then one row per noise spec.  Priors for substitution and
    addition come from the training trees.
    """
    if not config.uses_labels():
        raise ConfigError("noise experiments need label features enabled")
    from .analytics import tag_priors

    stack = train_stack(
        train_trees, config, specs, seed=seed,
        lexicon=lexicon, word_vectors=word_vectors, pdtb=pdtb, tags=tags,
    )
    priors = tag_priors(labeled_nodes(train_trees))
    rows = [NoiseRow(noise=None, report=evaluate_stack(stack, test_trees))]
    for noise in noise_grid:
        rows.append(
            NoiseRow(
                noise=noise,
                report=evaluate_stack(stack, test_trees, noise=noise, priors=priors),
            )
        )
    return rows
