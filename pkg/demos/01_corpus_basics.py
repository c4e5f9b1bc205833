"""Loading discussions, walking branches, and reading the statistics table.

A discussion is a tree of posts; the unit of online parsing is a branch,
the root-to-leaf sequence of posts. This demo builds a tiny annotated
corpus inline, loads it through the newline-delimited JSON reader, and
prints what the toolkit sees.

Run: python3 demos/01_corpus_basics.py
"""

import io
import json

from disparse import corpus_statistics, extract_branches, load_trees

RECORDS = [
    # A discussion that recovers: sarcasm answered with a plain clarification.
    {"tree_id": "racism", "node_id": "p1", "parent_id": None, "author": "op",
     "text": "My view is that shutting down racist speech helps nobody.",
     "timestamp": 1, "labels": ["CounterArgument"]},
    {"tree_id": "racism", "node_id": "p2", "parent_id": "p1", "author": "b",
     "text": "So why are we even discussing this? Shouldn't you be elsewhere?",
     "timestamp": 2, "labels": ["RequestClarification", "Sarcasm"]},
    {"tree_id": "racism", "node_id": "p3", "parent_id": "p2", "author": "op",
     "text": "I never said not interfering. I said it is not worth my time.",
     "timestamp": 3, "labels": ["Clarification"]},
    {"tree_id": "racism", "node_id": "p4", "parent_id": "p3", "author": "b",
     "text": "That's a fair point, but there are opportunities to help people change.",
     "timestamp": 4, "labels": ["CounterArgument", "Positive", "Softening"]},
    # A second reply to p1 starts another branch of the same tree.
    {"tree_id": "racism", "node_id": "p5", "parent_id": "p1", "author": "c",
     "text": "Source? I would like to see the evidence for that.",
     "timestamp": 5, "labels": ["AttackValidity"]},
    # A discussion that deteriorates.
    {"tree_id": "potluck", "node_id": "q1", "parent_id": None, "author": "op",
     "text": "Bringing meat to a potluck with vegetarians is fine.",
     "timestamp": 1, "labels": ["CounterArgument"]},
    {"tree_id": "potluck", "node_id": "q2", "parent_id": "q1", "author": "d",
     "text": "Nothing physically prevents them eating meat.",
     "timestamp": 2, "labels": ["NegTransformation", "Ridicule"]},
    {"tree_id": "potluck", "node_id": "q3", "parent_id": "q2", "author": "op",
     "text": "Sure, if you want to be an abrasive aggressive jerk you could say that.",
     "timestamp": 3, "labels": ["CounterArgument", "Aggressive"]},
]


def main():
    stream = io.StringIO("\n".join(json.dumps(r) for r in RECORDS))
    trees = load_trees(stream)
    print(f"loaded {len(trees)} trees")

    for tree in trees:
        print(f"\ntree {tree.tree_id!r}: {len(tree.nodes)} posts,"
              f" depth {tree.depth()}")
        for branch in extract_branches(tree):
            chain = " -> ".join(branch.node_ids)
            print(f"  branch: {chain}")

    print("\ndataset statistics (the same table the `disparse stats` command prints):")
    stats = corpus_statistics(trees)
    for name, value, std in stats.rows():
        std_text = "" if std is None else f"  (std {std:.2f})"
        print(f"  {name:<28}{value:>8.1f}{std_text}")


if __name__ == "__main__":
    main()
