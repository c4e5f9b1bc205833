"""Cross-validation, feature ablation, and label-noise robustness.

The experiment battery: k-fold cross-validation at tree granularity,
an ablation grid over feature configurations, and evaluation under
corrupted label inputs (simulating a sub-optimal upstream predictor).

Run: python3 demos/05_experiments.py   (about a minute)
"""

from disparse import (
    BowConfig,
    DependencyRule,
    FeatureConfig,
    ModelSpec,
    NoiseSpec,
    SyntheticSpec,
    cross_validate,
    generate,
    noise_experiment,
    run_ablation,
    split_trees,
)

TAGS_USED = ("CounterArgument", "RequestClarification", "Clarification",
             "Sarcasm", "Positive", "Answer")


def make_corpus(seed=0):
    spec = SyntheticSpec(
        num_trees=40,
        branching={1: 0.4, 2: 0.6},
        depth={5: 0.5, 6: 0.5},
        cue_words={t: f"cue{t.lower()}" for t in TAGS_USED},
        base_rates={
            "CounterArgument": 0.4,
            "RequestClarification": 0.3,
            "Clarification": 0.0,
            "Sarcasm": 0.2,
            "Positive": 0.2,
            "Answer": 0.2,
        },
        dependency_rules=(
            DependencyRule("RequestClarification", "Clarification", 0.9),
        ),
        seed=seed,
    )
    return generate(spec)


def main():
    trees = make_corpus()
    train_trees, test_trees = split_trees(trees, 8, seed=0)
    lr = ModelSpec(kind="logreg", epochs=80)

    text_only = FeatureConfig(bow=BowConfig(dimension=60, context=1))
    with_labels = FeatureConfig(
        bow=BowConfig(dimension=60, context=1),
        label_sequence_depth=2,
        use_collocation=True,
    )

    print("5-fold cross-validation on the training trees:")
    for label, config in (("text only", text_only), ("with labels", with_labels)):
        cv = cross_validate(train_trees, config, lr, k=5, seed=0)
        mean, std = cv.summary["w.F1"]
        print(f"  {label:<12} w.F1 = {mean:.3f} +- {std:.3f}")

    print("\nablation on the held-out trees:")
    grid = [
        text_only,
        FeatureConfig(bow=BowConfig(dimension=60, context=2)),
        FeatureConfig(bow=BowConfig(dimension=60, context=1),
                      label_sequence_depth=2),
        with_labels,
    ]
    for row in run_ablation(train_trees, test_trees, grid, lr, seed=0):
        h = row.report.headline()
        print(f"  {row.config.label():<16} w.F1 = {h['w.F1']:.3f}"
              f"   m.F1 = {h['m.F1']:.3f}")

    print("\nlabel noise at evaluation time (best config, trained once):")
    rows = noise_experiment(
        train_trees, test_trees, with_labels, lr,
        [
            NoiseSpec(mode="mask", fraction=0.1),
            NoiseSpec(mode="substitute", fraction=0.1),
            NoiseSpec(mode="substitute", fraction=0.5),
        ],
        seed=0,
    )
    for row in rows:
        label = "clean" if row.noise is None else row.noise.label()
        print(f"  {label:<24} w.F1 = {row.report.headline()['w.F1']:.3f}")
    print("\ncorrupting more of the label input costs more F1, as it should")


if __name__ == "__main__":
    main()
