"""Priors, PMI, and transition probabilities against brute-force oracles."""

import io
import math

import numpy as np
import pytest

from disparse.analytics import pmi_matrix, tag_priors, transition_matrix
from disparse.corpus import EmptyCorpusError
from disparse.tagset import TAG_INDEX, TAGS

from conftest import node, tree


def nodes_from_label_sets(label_sets):
    return [node(f"n{i}", labels=ls) for i, ls in enumerate(label_sets)]


# --- independent oracles (nested loops, no shared code with the library) ---

def pmi_oracle(label_sets):
    """PMI(a,b) = log2(P(a,b) / (P(a)P(b))), add-one smoothed counts."""
    labeled = [s for s in label_sets if s]
    n = len(labeled)
    out = {}
    for a in TAGS:
        for b in TAGS:
            joint = sum(1 for s in labeled if a in s and b in s)
            ca = sum(1 for s in labeled if a in s)
            cb = sum(1 for s in labeled if b in s)
            p_ab = (joint + 1) / (n + 1)
            p_a = (ca + 1) / (n + 1)
            p_b = (cb + 1) / (n + 1)
            out[(a, b)] = math.log2(p_ab / (p_a * p_b))
    return out


def transition_oracle(edge_label_pairs):
    """Row-normalized (parent tag, child tag) counts over explicit edges."""
    counts = {}
    for parent_labels, child_labels in edge_label_pairs:
        for a in parent_labels:
            for b in child_labels:
                counts[(a, b)] = counts.get((a, b), 0) + 1
    rows = {}
    for a in TAGS:
        total = sum(counts.get((a, b), 0) for b in TAGS)
        for b in TAGS:
            rows[(a, b)] = counts.get((a, b), 0) / total if total else 0.0
    return rows


class TestTagPriors:
    def test_degenerate_corpus(self):
        nodes = nodes_from_label_sets([{"Answer"}] * 4)
        priors = tag_priors(nodes)
        assert priors["Answer"] == 1.0
        assert sum(priors.values()) == 1.0

    def test_direct_count(self):
        nodes = nodes_from_label_sets(
            [{"Sarcasm"}, {"Sarcasm", "Answer"}, {"Answer"}, {"Positive"}]
        )
        assert tag_priors(nodes)["Sarcasm"] == 0.5

    def test_unlabeled_nodes_excluded(self):
        nodes = nodes_from_label_sets([{"Answer"}, set(), set()])
        assert tag_priors(nodes)["Answer"] == 1.0

    def test_empty_input(self):
        with pytest.raises(EmptyCorpusError):
            tag_priors(nodes_from_label_sets([set()]))

    def test_values_in_unit_interval(self):
        rng = np.random.default_rng(0)
        sets = [
            {t for t in TAGS if rng.random() < 0.2} or {"BAD"} for _ in range(50)
        ]
        priors = tag_priors(nodes_from_label_sets(sets))
        assert all(0.0 <= v <= 1.0 for v in priors.values())


class TestPmiMatrix:
    def test_always_cooccurring_pair(self):
        # 4 of 10 nodes carry both tags; nothing else does.
        sets = [{"Ridicule", "RephraseAttack"}] * 4 + [{"Answer"}] * 6
        m = pmi_matrix(nodes_from_label_sets(sets))
        got = m.values[TAG_INDEX["Ridicule"], TAG_INDEX["RephraseAttack"]]
        assert got == pytest.approx(-math.log2(5 / 11), abs=1e-12)

    def test_disjoint_halves_strongly_negative(self):
        sets = [{"Aggressive"}] * 20 + [{"Positive"}] * 20
        m = pmi_matrix(nodes_from_label_sets(sets))
        assert m.values[TAG_INDEX["Aggressive"], TAG_INDEX["Positive"]] < -2.0

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(11)
        sets = [
            {t for t in TAGS if rng.random() < 0.25} or {"Answer"}
            for _ in range(18)
        ]
        m = pmi_matrix(nodes_from_label_sets(sets))
        oracle = pmi_oracle(sets)
        for a in TAGS:
            for b in TAGS:
                got = m.values[TAG_INDEX[a], TAG_INDEX[b]]
                assert got == pytest.approx(oracle[(a, b)], abs=1e-9)

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        sets = [
            {t for t in TAGS if rng.random() < 0.3} or {"BAD"} for _ in range(40)
        ]
        m = pmi_matrix(nodes_from_label_sets(sets))
        assert np.abs(m.values - m.values.T).max() < 1e-9

    def test_support_is_cooccurrence_count(self):
        sets = [{"Answer", "Sarcasm"}] * 3 + [{"Answer"}] * 2
        m = pmi_matrix(nodes_from_label_sets(sets))
        assert m.support[TAG_INDEX["Answer"], TAG_INDEX["Sarcasm"]] == 3
        assert m.support[TAG_INDEX["Answer"], TAG_INDEX["Answer"]] == 5


def _edge_chain(tree_id, labels_by_level):
    nodes = []
    prev = None
    for i, labels in enumerate(labels_by_level):
        nid = f"{tree_id}n{i}"
        nodes.append(node(nid, prev, labels=labels))
        prev = nid
    return tree(tree_id, nodes)


class TestTransitionMatrix:
    def test_deterministic_corpus(self):
        trees = [
            _edge_chain(f"t{i}", [{"RequestClarification"}, {"Clarification"}])
            for i in range(5)
        ]
        m = transition_matrix(trees)
        row = m.values[TAG_INDEX["RequestClarification"]]
        assert row[TAG_INDEX["Clarification"]] == 1.0
        assert row.sum() == pytest.approx(1.0)

    def test_matches_edge_enumeration_oracle(self):
        t1 = _edge_chain("t1", [{"Answer"}, {"Sarcasm", "Answer"}, {"BAD"}])
        t2 = _edge_chain("t2", [{"Sarcasm"}, {"Answer"}])
        t3 = _edge_chain("t3", [{"Answer", "BAD"}, {"Sarcasm"}])
        m = transition_matrix([t1, t2, t3])
        edges = [
            ({"Answer"}, {"Sarcasm", "Answer"}),
            ({"Sarcasm", "Answer"}, {"BAD"}),
            ({"Sarcasm"}, {"Answer"}),
            ({"Answer", "BAD"}, {"Sarcasm"}),
        ]
        oracle = transition_oracle(edges)
        for a in TAGS:
            for b in TAGS:
                got = m.values[TAG_INDEX[a], TAG_INDEX[b]]
                assert got == pytest.approx(oracle[(a, b)], abs=1e-9)

    def test_edges_counted_once_despite_shared_prefix(self):
        # root -> mid, then mid -> two leaves: the root edge is on 2 branches
        t = tree("t", [
            node("r", labels={"Answer"}),
            node("m", "r", labels={"Sarcasm"}),
            node("a", "m", labels={"BAD"}),
            node("b", "m", labels={"Positive"}),
        ])
        m = transition_matrix([t])
        assert m.support[TAG_INDEX["Answer"], TAG_INDEX["Sarcasm"]] == 1

    def test_unlabeled_endpoints_skipped(self):
        t = _edge_chain("t", [{"Answer"}, set(), {"BAD"}])
        m = transition_matrix([t])
        assert m.support.sum() == 0
        assert m.zero_support_rows == TAGS

    def test_rows_with_support_sum_to_one(self):
        rng = np.random.default_rng(3)
        trees = []
        for i in range(6):
            levels = [
                {t for t in TAGS if rng.random() < 0.2} or {"Answer"}
                for _ in range(4)
            ]
            trees.append(_edge_chain(f"t{i}", levels))
        m = transition_matrix(trees)
        sums = m.values.sum(axis=1)
        support = m.support.sum(axis=1)
        for s, total in zip(sums, support):
            if total > 0:
                assert s == pytest.approx(1.0, abs=1e-9)
            else:
                assert s == 0.0

    def test_invariant_to_tree_order(self):
        t1 = _edge_chain("t1", [{"Answer"}, {"Sarcasm"}])
        t2 = _edge_chain("t2", [{"Sarcasm"}, {"BAD"}])
        a = transition_matrix([t1, t2])
        b = transition_matrix([t2, t1])
        np.testing.assert_array_equal(a.values, b.values)


def test_matrix_csv_round_shape():
    sets = [{"Answer"}] * 3
    m = pmi_matrix(nodes_from_label_sets(sets))
    buf = io.StringIO()
    m.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert len(lines) == 32
    assert lines[0].split(",")[1:] == list(TAGS)
