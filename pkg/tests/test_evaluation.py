"""Metrics, cross-validation, ablation rows, and label noise."""

import numpy as np
import pytest

from disparse.corpus import ConversationTree, PostNode
from disparse.errors import ConfigError
from disparse.evaluation import (
    NoiseSpec,
    cross_validate,
    noise_experiment,
    perturb_label_set,
    perturb_labels,
    run_ablation,
    score,
)
from disparse.features import BowConfig, FeatureConfig, PdtbSidecar
from disparse.models import ModelSpec
from disparse.synthetic import DependencyRule, SyntheticSpec, generate
from disparse.tagset import TAGS

def fs(*tags):
    return frozenset(tags)


class TestScore:
    def test_perfect_predictions(self):
        gold = [fs("Answer"), fs("Sarcasm", "BAD"), fs("Answer")]
        report = score(gold, gold)
        for tag in ("Answer", "Sarcasm", "BAD"):
            assert report.per_tag[tag].f1 == 1.0
        assert report.headline()["w.F1"] == 1.0

    def test_predict_everything(self):
        gold = [fs("Answer"), fs("Answer", "BAD"), fs("Sarcasm"), fs()]
        everything = [frozenset(TAGS)] * 4
        report = score(everything, gold)
        for tag in ("Answer", "BAD", "Sarcasm"):
            m = report.per_tag[tag]
            assert m.recall == 1.0
            assert m.precision == pytest.approx(m.prior)

    def test_six_node_manual_confusion_oracle(self):
        gold = [
            fs("Answer"),
            fs("Answer", "Sarcasm"),
            fs("Sarcasm"),
            fs("BAD"),
            fs(),
            fs("Answer"),
        ]
        pred = [
            fs("Answer", "BAD"),
            fs("Sarcasm"),
            fs("Sarcasm"),
            fs(),
            fs("BAD"),
            fs("Answer"),
        ]
        report = score(pred, gold)

        # hand-counted confusion per tag
        def oracle(tag):
            tp = sum(1 for p, g in zip(pred, gold) if tag in p and tag in g)
            fp = sum(1 for p, g in zip(pred, gold) if tag in p and tag not in g)
            fn = sum(1 for p, g in zip(pred, gold) if tag not in p and tag in g)
            prec = tp / (tp + fp) if tp + fp else 0.0
            rec = tp / (tp + fn) if tp + fn else 0.0
            f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
            return tp, fp, fn, prec, rec, f1

        for tag in ("Answer", "Sarcasm", "BAD"):
            m = report.per_tag[tag]
            tp, fp, fn, prec, rec, f1 = oracle(tag)
            assert (m.tp, m.fp, m.fn) == (tp, fp, fn)
            assert m.precision == pytest.approx(prec, abs=1e-9)
            assert m.recall == pytest.approx(rec, abs=1e-9)
            assert m.f1 == pytest.approx(f1, abs=1e-9)

    def test_weighted_average_identity(self):
        rng = np.random.default_rng(0)
        gold = [
            frozenset(t for t in TAGS if rng.random() < 0.2) or fs("BAD")
            for _ in range(30)
        ]
        pred = [
            frozenset(t for t in TAGS if rng.random() < 0.2) for _ in range(30)
        ]
        report = score(pred, gold)
        supported = [m for m in report.per_tag.values() if m.support > 0]
        total = sum(m.support for m in supported)
        expected = sum(m.f1 * m.support for m in supported) / total
        assert report.weighted()[2] == pytest.approx(expected, abs=1e-12)

    def test_constant_negative_predictor(self):
        gold = [fs("Answer"), fs("BAD")]
        report = score([fs(), fs()], gold)
        for tag in ("Answer", "BAD"):
            assert report.per_tag[tag].recall == 0.0
            assert report.per_tag[tag].f1 == 0.0

    def test_alignment_mismatch(self):
        with pytest.raises(ConfigError):
            score([fs()], [fs(), fs()])

    def test_node_order_invariance(self):
        gold = [fs("Answer"), fs("BAD"), fs("Sarcasm")]
        pred = [fs("Answer"), fs(), fs("BAD")]
        a = score(pred, gold)
        b = score(list(reversed(pred)), list(reversed(gold)))
        assert a.per_tag == b.per_tag


class TestPerturbLabels:
    def test_fraction_zero_is_identity(self):
        priors = {t: 1 / 31 for t in TAGS}
        sets = [fs("Answer", "BAD"), fs(), fs("Sarcasm")]
        for mode in ("mask", "substitute", "add"):
            noise = NoiseSpec(mode=mode, fraction=0.0, seed=3)
            assert perturb_labels(sets, noise, priors) == sets

    def test_full_mask_empties_everything(self):
        priors = {t: 1 / 31 for t in TAGS}
        noise = NoiseSpec(mode="mask", fraction=1.0, seed=0)
        out = perturb_labels([fs("Answer", "BAD"), fs("Sarcasm")], noise, priors)
        assert out == [fs(), fs()]

    def test_substitute_never_keeps_the_tag(self):
        priors = {t: 1 / 31 for t in TAGS}
        noise = NoiseSpec(mode="substitute", fraction=1.0, seed=1)
        rng = np.random.default_rng(1)
        for _ in range(50):
            out = perturb_label_set(fs("Answer"), noise, priors, rng)
            assert "Answer" not in out
            assert len(out) == 1

    def test_mask_empirical_fraction(self):
        priors = {t: 1 / 31 for t in TAGS}
        noise = NoiseSpec(mode="mask", fraction=0.5, seed=7)
        rng = np.random.default_rng(7)
        kept = 0
        for _ in range(10_000):
            kept += len(perturb_label_set(fs("Answer"), noise, priors, rng))
        removed = 1.0 - kept / 10_000
        assert abs(removed - 0.5) <= 0.02

    def test_substitute_empirical_fraction(self):
        priors = {t: 1 / 31 for t in TAGS}
        noise = NoiseSpec(mode="substitute", fraction=0.2, seed=9)
        rng = np.random.default_rng(9)
        replaced = 0
        for _ in range(10_000):
            out = perturb_label_set(fs("Answer"), noise, priors, rng)
            replaced += "Answer" not in out
        assert abs(replaced / 10_000 - 0.2) <= 0.02

    def test_add_rate_tracks_prior(self):
        priors = dict.fromkeys(TAGS, 0.0)
        priors["Sarcasm"] = 0.4
        noise = NoiseSpec(mode="add", fraction=0.5, seed=11)
        rng = np.random.default_rng(11)
        added = 0
        for _ in range(10_000):
            added += "Sarcasm" in perturb_label_set(fs(), noise, priors, rng)
        assert abs(added / 10_000 - 0.2) <= 0.02

    def test_reproducible_bit_for_bit(self):
        priors = {t: 1 / 31 for t in TAGS}
        sets = [fs("Answer", "BAD"), fs("Sarcasm"), fs("Positive", "AgreeBut")]
        noise = NoiseSpec(mode="substitute", fraction=0.5, seed=21)
        assert perturb_labels(sets, noise, priors) == perturb_labels(
            sets, noise, priors
        )

    def test_invalid_spec(self):
        with pytest.raises(ConfigError):
            NoiseSpec(mode="scramble", fraction=0.5)
        with pytest.raises(ConfigError):
            NoiseSpec(mode="mask", fraction=1.5)


def _cue_spec(num_trees, seed=0, rules=(), base=0.3):
    tags = ("CounterArgument", "Clarification", "Answer", "Sarcasm", "Positive")
    ruled_children = {r.child_tag for r in rules}
    return SyntheticSpec(
        num_trees=num_trees,
        branching={1: 0.4, 2: 0.6},
        depth={4: 0.5, 5: 0.5},
        cue_words={t: f"cue{t.lower()}" for t in tags},
        base_rates={t: 0.0 if t in ruled_children else base for t in tags},
        dependency_rules=tuple(rules),
        seed=seed,
    )


class TestCrossValidate:
    def test_two_trees_two_single_tree_folds(self):
        trees = generate(_cue_spec(2))
        cfg = FeatureConfig(bow=BowConfig(dimension=30, context=1))
        result = cross_validate(trees, cfg, ModelSpec(epochs=10), k=2, seed=0)
        assert len(result.fold_reports) == 2
        fold_sizes = [r.n_nodes for r in result.fold_reports]
        tree_sizes = sorted(len(t.nodes) for t in trees)
        assert sorted(fold_sizes) == tree_sizes

    def test_planted_cues_score_high(self):
        trees = generate(_cue_spec(10))
        cfg = FeatureConfig(bow=BowConfig(dimension=60, context=1))
        result = cross_validate(
            trees, cfg, ModelSpec(kind="logreg", epochs=120), k=5, seed=0
        )
        mean_wf1, _ = result.summary["w.F1"]
        assert mean_wf1 >= 0.9

    def test_id_renaming_invariance(self):
        trees = generate(_cue_spec(6))
        renamed = []
        for t in trees:
            nodes = [
                PostNode(
                    node_id="x" + n.node_id,
                    parent_id=None if n.parent_id is None else "x" + n.parent_id,
                    author=n.author,
                    text=n.text,
                    timestamp=n.timestamp,
                    labels=n.labels,
                )
                for n in t.nodes.values()
            ]
            renamed.append(ConversationTree.build("x" + t.tree_id, nodes))
        cfg = FeatureConfig(bow=BowConfig(dimension=40, context=1))
        a = cross_validate(trees, cfg, ModelSpec(epochs=15), k=3, seed=4)
        b = cross_validate(renamed, cfg, ModelSpec(epochs=15), k=3, seed=4)
        assert a.summary == b.summary

    def test_parallel_matches_serial(self):
        trees = generate(_cue_spec(4))
        cfg = FeatureConfig(bow=BowConfig(dimension=30, context=1))
        serial = cross_validate(trees, cfg, ModelSpec(epochs=10), k=2, seed=0, jobs=1)
        parallel = cross_validate(trees, cfg, ModelSpec(epochs=10), k=2, seed=0, jobs=2)
        assert serial.summary == parallel.summary


class TestRunAblation:
    def test_zero_width_extra_block_changes_nothing(self):
        trees = generate(_cue_spec(8))
        train, test = trees[:6], trees[6:]
        base = FeatureConfig(bow=BowConfig(dimension=40, context=1))
        padded = FeatureConfig(
            bow=BowConfig(dimension=40, context=1), pdtb_bigram_context=1
        )
        rows = run_ablation(
            train, test, [base, padded], ModelSpec(kind="logreg", epochs=20),
            seed=0, pdtb=PdtbSidecar.empty(("X", "Y")),
        )
        assert rows[0].report.headline() == rows[1].report.headline()

    def test_rows_in_grid_order(self):
        trees = generate(_cue_spec(4))
        grid = [
            FeatureConfig(bow=BowConfig(dimension=10, context=1)),
            FeatureConfig(bow=BowConfig(dimension=20, context=1)),
        ]
        rows = run_ablation(trees[:3], trees[3:], grid, ModelSpec(epochs=5), seed=0)
        assert [r.config for r in rows] == grid

    def test_empty_grid_rejected(self):
        trees = generate(_cue_spec(3))
        with pytest.raises(ConfigError):
            run_ablation(trees[:2], trees[2:], [], ModelSpec(), seed=0)


class TestNoiseExperiment:
    def test_substitution_degrades_label_dependent_tags(self):
        rules = [DependencyRule("CounterArgument", "Clarification", 0.9)]
        trees = generate(_cue_spec(24, rules=rules, base=0.4))
        train, test = trees[:16], trees[16:]
        cfg = FeatureConfig(
            bow=BowConfig(dimension=50, context=1), label_sequence_depth=1
        )
        spec = ModelSpec(kind="logreg", epochs=60)

        clean_scores, lo_scores, hi_scores = [], [], []
        for noise_seed in range(5):
            grid = [
                NoiseSpec(mode="substitute", fraction=0.1, seed=noise_seed),
                NoiseSpec(mode="substitute", fraction=0.5, seed=noise_seed),
            ]
            rows = noise_experiment(train, test, cfg, spec, grid, seed=0)
            clean_scores.append(rows[0].report.headline()["w.F1"])
            lo_scores.append(rows[1].report.headline()["w.F1"])
            hi_scores.append(rows[2].report.headline()["w.F1"])
        assert np.mean(clean_scores) >= np.mean(lo_scores) >= np.mean(hi_scores)

    def test_requires_label_features(self):
        trees = generate(_cue_spec(4))
        cfg = FeatureConfig(bow=BowConfig(dimension=10, context=1))
        with pytest.raises(ConfigError):
            noise_experiment(
                trees[:3], trees[3:], cfg, ModelSpec(),
                [NoiseSpec(mode="mask", fraction=0.1)], seed=0,
            )
