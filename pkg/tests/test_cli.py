"""End-to-end subcommand behavior: round trips, reports, exit codes."""

import json

import pytest

from disparse.tagset import TAGS

from cli_harness import (
    bow_config_doc,
    dir_snapshot,
    fast_model_doc,
    make_corpus,
    run_cli,
    synth_spec_doc,
    write_json,
)


class TestSynthAndStats:
    def test_round_trip_counts(self, tmp_path, capsys):
        spec_path = write_json(tmp_path / "spec.json", synth_spec_doc(num_trees=6))
        out = tmp_path / "synth"
        assert run_cli("synth", "--spec", spec_path, "--out", out) == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["num_trees"] == 6

        assert run_cli("stats", "--input", out / "trees.ndjson",
                       "--out", tmp_path / "stats") == 0
        captured = capsys.readouterr().out
        assert "Num of trees" in captured
        assert "Avg. branch length" in captured
        report = json.loads((tmp_path / "stats" / "report.json").read_text())
        assert report["num_trees"] == 6
        assert report["total_nodes"] == manifest["num_nodes"]
        assert "manifest" in report
        assert (tmp_path / "stats" / "report.csv").exists()

    def test_stats_seed_independent_counts(self, tmp_path):
        corpus = make_corpus(tmp_path, num_trees=4)
        assert run_cli("stats", "--input", corpus) == 0


class TestIngest:
    def test_valid_corpus(self, tmp_path, capsys):
        corpus = make_corpus(tmp_path, num_trees=3)
        assert run_cli("ingest", "--input", corpus, "--validate") == 0
        assert "OK:" in capsys.readouterr().out

    def test_broken_corpus_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.ndjson"
        bad.write_text('{"tree_id": "t", "node_id": "a", "parent_id": "ghost"}\n')
        assert run_cli("ingest", "--input", bad) == 1
        assert "error" in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path):
        assert run_cli("ingest", "--input", tmp_path / "nope.ndjson") == 1

    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("ingest", "--input", "x", "--frobnicate")
        assert exc.value.code == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("explode")
        assert exc.value.code == 2


class TestAnalytics:
    def test_emits_three_csvs(self, tmp_path):
        corpus = make_corpus(tmp_path, num_trees=5)
        out = tmp_path / "analytics"
        assert run_cli("analytics", "--input", corpus, "--out", out) == 0
        for name in ("priors.csv", "pmi.csv", "transitions.csv"):
            lines = (out / name).read_text().splitlines()
            assert len(lines) == 32  # header + 31 tags
        header = (out / "pmi.csv").read_text().splitlines()[0]
        assert header.split(",")[1:] == list(TAGS)
        assert (out / "manifest.json").exists()


class TestTrainAndParse:
    def test_round_trip(self, tmp_path):
        corpus = make_corpus(tmp_path, num_trees=6)
        features = write_json(tmp_path / "features.json",
                              bow_config_doc(history=1, collocation=True))
        model = write_json(tmp_path / "model.json", fast_model_doc())
        bundle = tmp_path / "bundle"
        assert run_cli("train", "--input", corpus, "--features", features,
                       "--model-spec", model, "--out", bundle) == 0
        assert (bundle / "stack.json").exists()
        assert len(list((bundle / "models").glob("*.bin"))) == 31

        out = tmp_path / "parsed"
        assert run_cli("parse", "--model", bundle, "--input", corpus,
                       "--mode", "predicted", "--out", out) == 0
        lines = (out / "predictions.ndjson").read_text().splitlines()
        records = [json.loads(l) for l in lines]
        corpus_lines = corpus.read_text().splitlines()
        assert len(records) == len(corpus_lines)
        for rec in records:
            assert set(rec) == {"tree_id", "node_id", "labels"}
            assert set(rec["labels"]) <= set(TAGS)

    def test_loaded_stack_reproduces_training_predictions(self, tmp_path):
        corpus = make_corpus(tmp_path, num_trees=5)
        features = write_json(tmp_path / "f.json", bow_config_doc(scaling="minmax"))
        model = write_json(tmp_path / "m.json", fast_model_doc(epochs=25))
        bundle = tmp_path / "bundle"
        run_cli("train", "--input", corpus, "--features", features,
                "--model-spec", model, "--out", bundle)

        out1, out2 = tmp_path / "p1", tmp_path / "p2"
        run_cli("parse", "--model", bundle, "--input", corpus, "--out", out1)
        run_cli("parse", "--model", bundle, "--input", corpus, "--out", out2)
        assert (out1 / "predictions.ndjson").read_bytes() == (
            out2 / "predictions.ndjson"
        ).read_bytes()


class TestEval:
    def test_report_files(self, tmp_path, capsys):
        corpus = make_corpus(tmp_path, num_trees=8)
        features = write_json(tmp_path / "f.json", bow_config_doc())
        model = write_json(tmp_path / "m.json", fast_model_doc())
        out = tmp_path / "eval"
        assert run_cli("eval", "--input", corpus, "--features", features,
                       "--model-spec", model, "--holdout", "2", "--folds", "2",
                       "--out", out) == 0
        report = json.loads((out / "report.json").read_text())
        assert "cv" in report and "held_out" in report and "manifest" in report
        assert set(report["held_out"]["headline"]) == {"w.P", "w.R", "w.F1", "m.F1"}
        csv_text = (out / "report.csv").read_text()
        assert csv_text.startswith("Tag,Prec,Rec,F1-score,Prior")
        assert "held-out w.F1" in capsys.readouterr().out

    def test_holdout_must_leave_test_trees(self, tmp_path):
        corpus = make_corpus(tmp_path, num_trees=3)
        features = write_json(tmp_path / "f.json", bow_config_doc())
        assert run_cli("eval", "--input", corpus, "--features", features,
                       "--holdout", "0", "--folds", "0",
                       "--out", tmp_path / "e") == 1


class TestAblate:
    def test_grid_rows(self, tmp_path):
        corpus = make_corpus(tmp_path, num_trees=6)
        grid = write_json(tmp_path / "grid.json", {"configs": [
            bow_config_doc(dimension=20),
            bow_config_doc(dimension=20, history=1),
        ]})
        model = write_json(tmp_path / "m.json", fast_model_doc())
        out = tmp_path / "ablate"
        assert run_cli("ablate", "--input", corpus, "--grid", grid,
                       "--model-spec", model, "--holdout", "2", "--out", out) == 0
        report = json.loads((out / "report.json").read_text())
        assert len(report["rows"]) == 2
        assert report["rows"][0]["label"] == "bow1"
        assert report["rows"][1]["label"] == "bow1+hist1"
        lines = (out / "report.csv").read_text().splitlines()
        assert lines[0] == "config,w.P,w.R,w.F1,m.F1"
        assert len(lines) == 3


class TestNoise:
    def test_noise_rows(self, tmp_path):
        rules = [{"parent_tag": "CounterArgument", "child_tag": "Clarification",
                  "prob": 0.9}]
        corpus = make_corpus(tmp_path, num_trees=8, rules=rules)
        features = write_json(tmp_path / "f.json",
                              bow_config_doc(history=1, collocation=True))
        noise_grid = write_json(tmp_path / "n.json", {"noise": [
            {"mode": "mask", "fraction": 0.1},
            {"mode": "substitute", "fraction": 0.5},
        ]})
        model = write_json(tmp_path / "m.json", fast_model_doc())
        out = tmp_path / "noise"
        assert run_cli("noise", "--input", corpus, "--features", features,
                       "--noise-grid", noise_grid, "--model-spec", model,
                       "--holdout", "2", "--out", out) == 0
        report = json.loads((out / "report.json").read_text())
        labels = [row["label"] for row in report["rows"]]
        assert labels[0] == "clean"
        assert len(labels) == 3


class TestSeedEnvFallback:
    def test_disparse_seed_env_used(self, tmp_path, monkeypatch):
        spec_path = write_json(tmp_path / "spec.json", synth_spec_doc(num_trees=3))
        monkeypatch.setenv("DISPARSE_SEED", "21")
        env_out = tmp_path / "env_out"
        assert run_cli("synth", "--spec", spec_path, "--out", env_out) == 0
        monkeypatch.delenv("DISPARSE_SEED")
        flag_out = tmp_path / "flag_out"
        assert run_cli("synth", "--spec", spec_path, "--out", flag_out,
                       "--seed", "21") == 0
        manifests = [
            json.loads((out / "manifest.json").read_text())["manifest"]["seed"]
            for out in (env_out, flag_out)
        ]
        assert manifests == [21, 21]


class TestDeterminism:
    def test_stats_and_analytics_byte_identical(self, tmp_path):
        corpus = make_corpus(tmp_path, num_trees=4)
        for cmd in (["stats", "--input", corpus],
                    ["analytics", "--input", corpus]):
            a, b = tmp_path / f"{cmd[0]}_a", tmp_path / f"{cmd[0]}_b"
            assert run_cli(*cmd, "--out", a, "--seed", "5") == 0
            assert run_cli(*cmd, "--out", b, "--seed", "5") == 0
            assert dir_snapshot(a) == dir_snapshot(b)

    def test_train_byte_identical(self, tmp_path):
        corpus = make_corpus(tmp_path, num_trees=4)
        features = write_json(tmp_path / "f.json",
                              bow_config_doc(history=1, scaling="minmax"))
        model = write_json(tmp_path / "m.json", fast_model_doc(epochs=8))
        a, b = tmp_path / "bundle_a", tmp_path / "bundle_b"
        for out in (a, b):
            assert run_cli("train", "--input", corpus, "--features", features,
                           "--model-spec", model, "--out", out, "--seed", "3") == 0
        assert dir_snapshot(a) == dir_snapshot(b)
