"""Tag analytics: priors, collocation PMI, and transition probabilities.

All quantities are computed over unique labeled nodes (or unique tree
edges), so they are invariant to branch enumeration order and to how
often a shared prefix is traversed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import ConversationTree, EmptyCorpusError, PostNode
from .tagset import TAG_INDEX, TAGS


@dataclass(frozen=True)
class TagMatrix:
    """A square tag-by-tag matrix with its raw co-occurrence support.

    ``kind`` is "pmi" or "transition".  For PMI the diagonal is reported
    but degenerate (self-collocation); for transitions, rows with zero
    support are all-zero and listed by ``zero_support_rows``.
    """

    kind: str
    tags: tuple[str, ...]
    values: np.ndarray
    support: np.ndarray

    @property
    def zero_support_rows(self) -> tuple[str, ...]:
        row_support = self.support.sum(axis=1)
        return tuple(t for t, s in zip(self.tags, row_support) if s == 0)

    def to_csv(self, target) -> None:
        """Write the matrix with tag-name headers, full float precision."""
        if isinstance(target, (str, Path)):
            with open(target, "w", encoding="utf-8", newline="") as fh:
                self.to_csv(fh)
            return
        writer = csv.writer(target, lineterminator="\n")
        writer.writerow(["tag", *self.tags])
        for i, tag in enumerate(self.tags):
            writer.writerow([tag, *[repr(v) for v in self.values[i].tolist()]])


def _require_labeled(nodes: Sequence[PostNode]) -> list[PostNode]:
    labeled = [n for n in nodes if n.is_labeled]
    if not labeled:
        raise EmptyCorpusError("no labeled nodes")
    return labeled


def tag_priors(nodes: Sequence[PostNode]) -> dict[str, float]:
    """Fraction of labeled nodes carrying each tag.

    Multi-labeling means the priors need not sum to one.
    """
    labeled = _require_labeled(nodes)
    counts = dict.fromkeys(TAGS, 0)
    for node in labeled:
        for tag in node.labels:
            counts[tag] += 1
    n = len(labeled)
    return {tag: counts[tag] / n for tag in TAGS}


def pmi_matrix(nodes: Sequence[PostNode]) -> TagMatrix:
    """Pointwise mutual information of tag collocation.

    PMI(a, b) = log2(P(a, b) / (P(a) P(b))) with probabilities estimated
    over unique labeled nodes.  Counts are add-one smoothed (marginals
    included, so the matrix is finite even for absent tags):
    P(x) = (C(x) + 1) / (N + 1).
    """
    labeled = _require_labeled(nodes)
    n = len(labeled)
    k = len(TAGS)
    joint = np.zeros((k, k), dtype=np.int64)
    for node in labeled:
        idx = sorted(TAG_INDEX[t] for t in node.labels)
        for a in idx:
            for b in idx:
                joint[a, b] += 1

    marginal = joint.diagonal().astype(np.float64)
    p_joint = (joint + 1.0) / (n + 1.0)
    p_marg = (marginal + 1.0) / (n + 1.0)
    values = np.log2(p_joint / np.outer(p_marg, p_marg))
    return TagMatrix(kind="pmi", tags=TAGS, values=values, support=joint)


def transition_matrix(trees: Iterable[ConversationTree]) -> TagMatrix:
    """Tag transition probabilities over unique parent->child edges.

    Each edge whose two endpoints are labeled contributes one count per
    (parent tag, child tag) pair; counting by unique edge (not per
    branch) keeps shared prefixes from multiplying early transitions.
    Rows are normalized by their own sum; zero-support rows stay zero.
    """
    k = len(TAGS)
    counts = np.zeros((k, k), dtype=np.int64)
    for tree in trees:
        for parent, child in tree.edges():
            if not (parent.is_labeled and child.is_labeled):
                continue
            for a in parent.labels:
                for b in child.labels:
                    counts[TAG_INDEX[a], TAG_INDEX[b]] += 1

    values = np.zeros((k, k), dtype=np.float64)
    row_sums = counts.sum(axis=1)
    nonzero = row_sums > 0
    values[nonzero] = counts[nonzero] / row_sums[nonzero, None]
    return TagMatrix(kind="transition", tags=TAGS, values=values, support=counts)


def priors_to_csv(priors: dict[str, float], target) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            priors_to_csv(priors, fh)
        return
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(["tag", "prior"])
    for tag in TAGS:
        writer.writerow([tag, repr(priors[tag])])
