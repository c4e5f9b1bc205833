"""Synthetic corpus generator for tests and demos.

Each tag gets a dedicated cue word; a node's text contains the cues of
its planted-cue tags plus filler words, so tags are recoverable from
text alone.  Dependency rules add child tags conditioned on parent tags;
rules without a planted cue create tags recoverable only from the
preceding labels, which is exactly what label-history features should
pick up.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import ConversationTree, PostNode
from .errors import ConfigError
from .tagset import TAGS, canonical_tag


@dataclass(frozen=True)
class DependencyRule:
    """If the parent carries ``parent_tag``, the child gets ``child_tag``
    with probability ``prob``; the cue word is planted only on request."""

    parent_tag: str
    child_tag: str
    prob: float
    plant_cue: bool = False

    def __post_init__(self):
        object.__setattr__(self, "parent_tag", canonical_tag(self.parent_tag))
        object.__setattr__(self, "child_tag", canonical_tag(self.child_tag))
        if not 0.0 <= self.prob <= 1.0:
            raise ConfigError("dependency rule probability must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "parent_tag": self.parent_tag,
            "child_tag": self.child_tag,
            "prob": self.prob,
            "plant_cue": self.plant_cue,
        }


def _check_distribution(name: str, dist: dict[int, float]) -> None:
    if not dist:
        raise ConfigError(f"{name} distribution is empty")
    if any(k < 1 for k in dist):
        raise ConfigError(f"{name} distribution keys must be positive")
    if any(p < 0 for p in dist.values()):
        raise ConfigError(f"{name} distribution has negative mass")
    if abs(sum(dist.values()) - 1.0) > 1e-9:
        raise ConfigError(f"{name} distribution must sum to 1")


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape, vocabulary and label dynamics of a generated corpus."""

    num_trees: int
    branching: dict[int, float]            # children per internal node
    depth: dict[int, float]                # levels per tree, root is level 1
    cue_words: dict[str, str]              # tag -> cue token
    base_rates: dict[str, float]           # tag -> spontaneous probability
    dependency_rules: tuple[DependencyRule, ...] = ()
    filler_vocab: int = 50
    fillers_per_post: tuple[int, int] = (3, 8)
    num_authors: int = 12
    seed: int = 0

    def __post_init__(self):
        if self.num_trees < 1:
            raise ConfigError("num_trees must be positive")
        _check_distribution("branching", self.branching)
        _check_distribution("depth", self.depth)
        cues = {}
        for tag, cue in self.cue_words.items():
            tag = canonical_tag(tag)
            cue = cue.lower()
            if cue in cues.values():
                raise ConfigError(f"cue word {cue!r} used by more than one tag")
            cues[tag] = cue
        object.__setattr__(self, "cue_words", cues)
        rates = {}
        for tag, rate in self.base_rates.items():
            tag = canonical_tag(tag)
            if not 0.0 <= rate <= 1.0:
                raise ConfigError(f"base rate of {tag} must lie in [0, 1]")
            rates[tag] = rate
        object.__setattr__(self, "base_rates", rates)
        for rule in self.dependency_rules:
            if rule.child_tag not in self.cue_words:
                raise ConfigError(
                    f"rule child tag {rule.child_tag} has no cue word"
                )
        missing = set(self.base_rates) - set(self.cue_words)
        if missing:
            raise ConfigError(f"tags with base rates but no cue: {sorted(missing)}")
        lo, hi = self.fillers_per_post
        if not 0 <= lo <= hi:
            raise ConfigError("fillers_per_post must be a (low, high) range")

    @property
    def tags(self) -> tuple[str, ...]:
        return tuple(t for t in TAGS if t in self.cue_words)

    def to_dict(self) -> dict:
        return {
            "num_trees": self.num_trees,
            "branching": {str(k): v for k, v in self.branching.items()},
            "depth": {str(k): v for k, v in self.depth.items()},
            "cue_words": dict(sorted(self.cue_words.items())),
            "base_rates": dict(sorted(self.base_rates.items())),
            "dependency_rules": [r.to_dict() for r in self.dependency_rules],
            "filler_vocab": self.filler_vocab,
            "fillers_per_post": list(self.fillers_per_post),
            "num_authors": self.num_authors,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SyntheticSpec":
        return cls(
            num_trees=int(obj["num_trees"]),
            branching={int(k): float(v) for k, v in obj["branching"].items()},
            depth={int(k): float(v) for k, v in obj["depth"].items()},
            cue_words=dict(obj["cue_words"]),
            base_rates={k: float(v) for k, v in obj.get("base_rates", {}).items()},
            dependency_rules=tuple(
                DependencyRule(**r) for r in obj.get("dependency_rules", ())
            ),
            filler_vocab=int(obj.get("filler_vocab", 50)),
            fillers_per_post=tuple(obj.get("fillers_per_post", (3, 8))),
            num_authors=int(obj.get("num_authors", 12)),
            seed=int(obj.get("seed", 0)),
        )

    @classmethod
    def load(cls, source) -> "SyntheticSpec":
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        return cls.from_dict(json.load(source))


def _sample_key(dist: dict[int, float], rng: np.random.Generator) -> int:
    keys = sorted(dist)
    probs = np.array([dist[k] for k in keys])
    return keys[rng.choice(len(keys), p=probs / probs.sum())]


def generate(spec: SyntheticSpec) -> list[ConversationTree]:
    """Generate conversation trees; deterministic in the spec's seed."""
    rng = np.random.default_rng(spec.seed)
    fillers = [f"filler{i:03d}" for i in range(spec.filler_vocab)]
    tag_list = list(spec.tags)
    # Rule-only tags (base rate zero) never appear spontaneously, so the
    # fallback draw for otherwise-unlabeled nodes skips them.
    fallback = [t for t in tag_list if spec.base_rates.get(t, 0.0) > 0] or tag_list
    trees = []
    stamp = 0

    for t in range(spec.num_trees):
        depth = _sample_key(spec.depth, rng)
        nodes: list[PostNode] = []
        counter = 0

        def make_node(parent: PostNode | None) -> PostNode:
            nonlocal counter, stamp
            base = {
                tag for tag in tag_list
                if rng.random() < spec.base_rates.get(tag, 0.0)
            }
            induced_cue: set[str] = set()
            induced_plain: set[str] = set()
            if parent is not None:
                for rule in spec.dependency_rules:
                    if rule.parent_tag in parent.labels and rng.random() < rule.prob:
                        (induced_cue if rule.plant_cue else induced_plain).add(
                            rule.child_tag
                        )
            if not base and not induced_cue and not induced_plain:
                base = {fallback[rng.integers(len(fallback))]}
            labels = base | induced_cue | induced_plain
            planted = base | induced_cue

            lo, hi = spec.fillers_per_post
            n_fill = int(rng.integers(lo, hi + 1))
            words = [fillers[rng.integers(len(fillers))] for _ in range(n_fill)]
            words += sorted(spec.cue_words[tag] for tag in planted)
            rng.shuffle(words)

            node = PostNode(
                node_id=f"t{t:03d}n{counter:04d}",
                parent_id=None if parent is None else parent.node_id,
                author=f"user{rng.integers(spec.num_authors):03d}",
                text=" ".join(words),
                timestamp=stamp,
                labels=frozenset(labels),
            )
            counter += 1
            stamp += 1
            return node

        root = make_node(None)
        nodes.append(root)
        level_nodes = [root]
        for _level in range(2, depth + 1):
            next_level = []
            for parent in level_nodes:
                for _ in range(_sample_key(spec.branching, rng)):
                    child = make_node(parent)
                    nodes.append(child)
                    next_level.append(child)
            level_nodes = next_level
            if not level_nodes:
                break

        trees.append(ConversationTree.build(f"tree{t:03d}", nodes))
    return trees


def corpus_manifest(spec: SyntheticSpec, trees: Sequence[ConversationTree]) -> dict:
    """Ground-truth record of what was generated."""
    tag_counts = dict.fromkeys(spec.tags, 0)
    total = 0
    for tree in trees:
        for node in tree.nodes.values():
            total += 1
            for tag in node.labels:
                tag_counts[tag] += 1
    return {
        "spec": spec.to_dict(),
        "num_trees": len(trees),
        "num_nodes": total,
        "tag_counts": tag_counts,
    }
