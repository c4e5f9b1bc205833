"""Shared fixtures: tiny hand-built corpora used across test modules."""

import json

import pytest

from disparse.corpus import ConversationTree, PostNode


def node(nid, parent=None, labels=(), text="", author="u", ts=None):
    return PostNode(
        node_id=nid,
        parent_id=parent,
        author=author,
        text=text,
        timestamp=ts,
        labels=frozenset(labels),
    )


def tree(tree_id, nodes):
    return ConversationTree.build(tree_id, nodes)


def write_ndjson(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


@pytest.fixture
def chain_tree():
    """root -> a -> b, all labeled."""
    return tree("t0", [
        node("r", labels={"CounterArgument"}, text="zero one two three four"),
        node("a", "r", labels={"Clarification"}, text="zero one two three four"),
        node("b", "a", labels={"Answer"}, text="zero one two three four"),
    ])


@pytest.fixture
def fork_tree():
    """root with two childless children."""
    return tree("t1", [
        node("r", labels={"CounterArgument"}, text="root text"),
        node("x", "r", labels={"Answer"}, text="left reply", ts=2),
        node("y", "r", labels={"Sarcasm"}, text="right reply", ts=1),
    ])
