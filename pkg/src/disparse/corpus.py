"""Conversation trees, branches, and dataset statistics.

A discussion is a tree of posts.  The unit of online parsing is a
*branch*: the ordered root-to-leaf sequence of posts.  Branches of one
tree share prefixes, so statistics and training examples are always
computed over unique nodes, never over branch-expanded copies.

Trees are immutable after loading; every operation here is a pure
function over them.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DisparseError, IntegrityError, ParseError
from .tagset import UnknownTagError, make_label_set
from .text import tokenize


class EmptyCorpusError(DisparseError):
    """An operation that needs data was given an empty corpus."""


@dataclass(frozen=True)
class PostNode:
    """One post: the unit of annotation and prediction.

    An empty label set means the post is unlabeled; unlabeled posts stay
    in branches as context but are never prediction targets.
    """

    node_id: str
    parent_id: str | None
    author: str
    text: str
    timestamp: int | None = None
    labels: frozenset[str] = frozenset()

    @property
    def is_labeled(self) -> bool:
        return len(self.labels) > 0


def _child_sort_key(node: PostNode):
    # Timestamped posts first in time order; missing timestamps sort last.
    # node_id breaks all ties so ordering is deterministic either way.
    if node.timestamp is None:
        return (1, 0, node.node_id)
    return (0, node.timestamp, node.node_id)


@dataclass(frozen=True)
class ConversationTree:
    """A validated discussion tree with deterministic child ordering."""

    tree_id: str
    nodes: dict[str, PostNode]
    root_id: str
    _children: dict[str, tuple[str, ...]] = field(repr=False, compare=False, default_factory=dict)

    @classmethod
    def build(cls, tree_id: str, nodes: Sequence[PostNode]) -> "ConversationTree":
        """Validate node records and assemble a tree.

        Raises IntegrityError on duplicate ids, dangling parents, missing
        or multiple roots, and nodes unreachable from the root (cycles).
        """
        by_id: dict[str, PostNode] = {}
        for node in nodes:
            if node.node_id in by_id:
                raise IntegrityError(
                    f"tree {tree_id!r}: duplicate node_id {node.node_id!r}"
                )
            by_id[node.node_id] = node

        roots = [n.node_id for n in nodes if n.parent_id is None]
        if not roots:
            raise IntegrityError(f"tree {tree_id!r}: no root node")
        if len(roots) > 1:
            raise IntegrityError(
                f"tree {tree_id!r}: multiple roots {sorted(roots)!r}"
            )

        children: dict[str, list[PostNode]] = {nid: [] for nid in by_id}
        for node in nodes:
            if node.parent_id is None:
                continue
            if node.parent_id not in by_id:
                raise IntegrityError(
                    f"tree {tree_id!r}: node {node.node_id!r} has dangling "
                    f"parent_id {node.parent_id!r}"
                )
            children[node.parent_id].append(node)

        ordered = {
            nid: tuple(c.node_id for c in sorted(kids, key=_child_sort_key))
            for nid, kids in children.items()
        }

        tree = cls(tree_id=tree_id, nodes=by_id, root_id=roots[0], _children=ordered)
        reachable = set(tree.iter_ids())
        if len(reachable) != len(by_id):
            stranded = sorted(set(by_id) - reachable)
            raise IntegrityError(
                f"tree {tree_id!r}: nodes unreachable from root (cycle?): {stranded!r}"
            )
        return tree

    def children(self, node_id: str) -> tuple[str, ...]:
        return self._children[node_id]

    def iter_ids(self) -> Iterable[str]:
        """Depth-first preorder node ids, following child order."""
        stack = [self.root_id]
        while stack:
            nid = stack.pop()
            yield nid
            stack.extend(reversed(self._children[nid]))

    def path_to_root(self, node_id: str) -> list[PostNode]:
        """Posts from the root down to ``node_id`` inclusive."""
        path = []
        cur: str | None = node_id
        while cur is not None:
            node = self.nodes[cur]
            path.append(node)
            cur = node.parent_id
        path.reverse()
        return path

    def leaf_ids(self) -> list[str]:
        return sorted(nid for nid in self.nodes if not self._children[nid])

    def depth(self) -> int:
        """Longest root-to-leaf path, counted in posts."""
        return max(len(self.path_to_root(leaf)) for leaf in self.leaf_ids())

    def edges(self) -> list[tuple[PostNode, PostNode]]:
        """Unique parent->child pairs in deterministic order."""
        out = []
        for nid in self.iter_ids():
            for cid in self._children[nid]:
                out.append((self.nodes[nid], self.nodes[cid]))
        return out


@dataclass(frozen=True)
class Branch:
    """An ordered root-to-leaf post sequence: one discussion."""

    tree_id: str
    node_ids: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.node_ids)


class MeanStd(NamedTuple):
    mean: float
    std: float


@dataclass(frozen=True)
class CorpusStats:
    """Dataset statistics over unique nodes (std is population std)."""

    num_trees: int
    total_users: int
    total_branches: int
    total_nodes: int
    total_labeled_nodes: int
    total_labels: int
    total_tokens: int
    avg_branches_per_tree: MeanStd
    avg_nodes_per_tree: MeanStd
    avg_branch_length: MeanStd
    avg_tree_depth: MeanStd
    avg_users_per_branch: MeanStd
    avg_users_per_tree: MeanStd
    avg_nodes_per_user: MeanStd
    avg_tokens_per_post: MeanStd

    def rows(self) -> list[tuple[str, float, float | None]]:
        """(name, value, std) rows for the summary table."""
        return [
            ("Num of trees", self.num_trees, None),
            ("Total users", self.total_users, None),
            ("Total branches", self.total_branches, None),
            ("Total nodes", self.total_nodes, None),
            ("Total labeled nodes", self.total_labeled_nodes, None),
            ("Total labels for all nodes", self.total_labels, None),
            ("Total tokens", self.total_tokens, None),
            ("Avg. branches per tree", *self.avg_branches_per_tree),
            ("Avg. nodes per tree", *self.avg_nodes_per_tree),
            ("Avg. branch length", *self.avg_branch_length),
            ("Avg. tree depth", *self.avg_tree_depth),
            ("Avg. users per branch", *self.avg_users_per_branch),
            ("Avg. users per tree", *self.avg_users_per_tree),
            ("Avg. nodes per user", *self.avg_nodes_per_user),
            ("Avg. tokens per post", *self.avg_tokens_per_post),
        ]

    def to_dict(self) -> dict:
        out: dict = {}
        for key, value in self.__dict__.items():
            out[key] = list(value) if isinstance(value, MeanStd) else value
        return out


# ---------------------------------------------------------------------------
# Loading and writing the newline-delimited JSON tree format
# ---------------------------------------------------------------------------

_REQUIRED_FIELDS = ("tree_id", "node_id")


def _parse_record(obj: dict, line_no: int) -> tuple[str, PostNode]:
    for field_name in _REQUIRED_FIELDS:
        if field_name not in obj or not isinstance(obj[field_name], str):
            raise ParseError(f"missing or non-string field {field_name!r}", line_no)
    parent = obj.get("parent_id")
    if parent is not None and not isinstance(parent, str):
        raise ParseError("parent_id must be a string or null", line_no)
    timestamp = obj.get("timestamp")
    if timestamp is not None and not isinstance(timestamp, int):
        raise ParseError("timestamp must be an integer or null", line_no)
    raw_labels = obj.get("labels", [])
    if not isinstance(raw_labels, list):
        raise ParseError("labels must be an array of tag names", line_no)
    try:
        labels = make_label_set(raw_labels)
    except UnknownTagError as exc:
        raise ParseError(str(exc), line_no) from exc
    node = PostNode(
        node_id=obj["node_id"],
        parent_id=parent,
        author=str(obj.get("author", "")),
        text=str(obj.get("text", "")),
        timestamp=timestamp,
        labels=labels,
    )
    return obj["tree_id"], node


def load_trees(source) -> list[ConversationTree]:
    """Load conversation trees from a newline-delimited JSON file.

    ``source`` may be a path or a readable text/byte stream.  Records of
    different trees may interleave; grouping is by ``tree_id`` in first
    appearance order.  Malformed records raise ParseError with the line
    number; structural problems raise IntegrityError.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return load_trees(fh)
    if isinstance(source, io.TextIOBase):
        lines = source.read().splitlines()
    else:
        lines = source.read().decode("utf-8").splitlines()

    grouped: dict[str, list[PostNode]] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", line_no) from exc
        if not isinstance(obj, dict):
            raise ParseError("record must be a JSON object", line_no)
        tree_id, node = _parse_record(obj, line_no)
        grouped.setdefault(tree_id, []).append(node)

    if not grouped:
        raise EmptyCorpusError("no records in input")
    return [ConversationTree.build(tid, nodes) for tid, nodes in grouped.items()]


def node_to_record(tree_id: str, node: PostNode) -> dict:
    return {
        "tree_id": tree_id,
        "node_id": node.node_id,
        "parent_id": node.parent_id,
        "author": node.author,
        "text": node.text,
        "timestamp": node.timestamp,
        "labels": sorted(node.labels),
    }


def write_trees(trees: Sequence[ConversationTree], target) -> None:
    """Write trees in the newline-delimited JSON format (DFS node order)."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as fh:
            write_trees(trees, fh)
        return
    for tree in trees:
        for nid in tree.iter_ids():
            record = node_to_record(tree.tree_id, tree.nodes[nid])
            target.write(json.dumps(record, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Branch extraction and statistics
# ---------------------------------------------------------------------------

def extract_branches(tree: ConversationTree) -> list[Branch]:
    """One branch per leaf, ordered by leaf node_id ascending."""
    return [
        Branch(tree.tree_id, tuple(n.node_id for n in tree.path_to_root(leaf)))
        for leaf in tree.leaf_ids()
    ]


def labeled_nodes(trees: Iterable[ConversationTree]) -> list[PostNode]:
    """Unique labeled nodes across the corpus, in deterministic order."""
    return [
        tree.nodes[nid]
        for tree in trees
        for nid in tree.iter_ids()
        if tree.nodes[nid].is_labeled
    ]


def _mean_std(values: Sequence[float]) -> MeanStd:
    arr = np.asarray(values, dtype=np.float64)
    return MeanStd(float(arr.mean()), float(arr.std()))


def corpus_statistics(trees: Sequence[ConversationTree]) -> CorpusStats:
    """Dataset statistics table.

    Token counts use the canonical tokenizer, and every per-node quantity
    is computed once per unique node even though nodes are shared by many
    branches.
    """
    if not trees:
        raise EmptyCorpusError("cannot compute statistics of an empty corpus")

    branches_per_tree = []
    branch_lengths: list[int] = []
    users_per_branch: list[int] = []
    nodes_per_tree = []
    users_per_tree = []
    depths = []
    tokens_per_post: list[int] = []
    nodes_per_user: dict[str, int] = {}
    total_labeled = 0
    total_labels = 0

    for tree in trees:
        branches = extract_branches(tree)
        branches_per_tree.append(len(branches))
        nodes_per_tree.append(len(tree.nodes))
        depths.append(tree.depth())
        users_per_tree.append(len({n.author for n in tree.nodes.values()}))
        for branch in branches:
            branch_lengths.append(len(branch))
            users_per_branch.append(
                len({tree.nodes[nid].author for nid in branch.node_ids})
            )
        for node in tree.nodes.values():
            tokens_per_post.append(len(tokenize(node.text)))
            nodes_per_user[node.author] = nodes_per_user.get(node.author, 0) + 1
            if node.is_labeled:
                total_labeled += 1
                total_labels += len(node.labels)

    per_user_counts = [nodes_per_user[u] for u in sorted(nodes_per_user)]
    return CorpusStats(
        num_trees=len(trees),
        total_users=len(nodes_per_user),
        total_branches=int(sum(branches_per_tree)),
        total_nodes=int(sum(nodes_per_tree)),
        total_labeled_nodes=total_labeled,
        total_labels=total_labels,
        total_tokens=int(sum(tokens_per_post)),
        avg_branches_per_tree=_mean_std(branches_per_tree),
        avg_nodes_per_tree=_mean_std(nodes_per_tree),
        avg_branch_length=_mean_std(branch_lengths),
        avg_tree_depth=_mean_std(depths),
        avg_users_per_branch=_mean_std(users_per_branch),
        avg_users_per_tree=_mean_std(users_per_tree),
        avg_nodes_per_user=_mean_std(per_user_counts),
        avg_tokens_per_post=_mean_std(tokens_per_post),
    )


# ---------------------------------------------------------------------------
# Tree-level partitioning (never branch- or node-level, to avoid leakage
# through shared branch prefixes)
# ---------------------------------------------------------------------------

def split_trees(
    trees: Sequence[ConversationTree],
    held_out_count: int,
    seed: int,
    test_tree_ids: Iterable[str] | None = None,
) -> tuple[list[ConversationTree], list[ConversationTree]]:
    """Partition trees into (train, test) at tree granularity.

    Held-out trees are chosen uniformly at random, deterministically in
    ``seed``.  Passing ``test_tree_ids`` overrides random selection with
    an explicit list.  Input order is preserved on both sides.
    """
    if test_tree_ids is not None:
        wanted = set(test_tree_ids)
        missing = wanted - {t.tree_id for t in trees}
        if missing:
            raise IntegrityError(f"unknown test tree ids: {sorted(missing)!r}")
        test = [t for t in trees if t.tree_id in wanted]
        train = [t for t in trees if t.tree_id not in wanted]
        return train, test

    if not 0 <= held_out_count < len(trees):
        raise EmptyCorpusError(
            f"held_out_count {held_out_count} out of range for {len(trees)} trees"
        )
    rng = np.random.default_rng(seed)
    test_idx = set(rng.permutation(len(trees))[:held_out_count].tolist())
    train = [t for i, t in enumerate(trees) if i not in test_idx]
    test = [t for i, t in enumerate(trees) if i in test_idx]
    return train, test


def make_folds(
    trees: Sequence[ConversationTree], k: int, seed: int
) -> list[list[ConversationTree]]:
    """Partition trees into k groups with sizes differing by at most one."""
    if k < 2 or k > len(trees):
        raise EmptyCorpusError(f"k={k} out of range for {len(trees)} trees")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(trees))
    folds = []
    for chunk in np.array_split(perm, k):
        folds.append([trees[i] for i in sorted(chunk.tolist())])
    return folds
