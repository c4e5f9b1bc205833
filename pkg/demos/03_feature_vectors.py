"""From an utterance in context to a numeric feature vector.

The feature vector of a post is a concatenation of independent blocks:
bag of words over the current (and optionally earlier) posts, category
lexicon weights, label vectors of preceding posts, and the post's own
collocated tags. This demo fits the resources on a toy corpus and walks
the block map of one assembled vector.

Run: python3 demos/03_feature_vectors.py
"""

import io
import json

from disparse import (
    BowConfig,
    FeatureAssembler,
    FeatureConfig,
    load_demo_lexicon,
    load_trees,
    tokenize,
)

RECORDS = [
    {"tree_id": "t", "node_id": "p1", "parent_id": None, "author": "a",
     "text": "I think we should always cite sources, see https://example.org",
     "timestamp": 1, "labels": ["CounterArgument", "Sources"]},
    {"tree_id": "t", "node_id": "p2", "parent_id": "p1", "author": "b",
     "text": "> always cite sources\nThat seems wrong and, honestly, stupid.",
     "timestamp": 2, "labels": ["DirectNo", "Aggressive"]},
    {"tree_id": "t", "node_id": "p3", "parent_id": "p2", "author": "a",
     "text": "Maybe. But name-calling will not convince me you are right.",
     "timestamp": 3, "labels": ["Complaint", "WQualifiers"]},
]


def main():
    trees = load_trees(io.StringIO("\n".join(json.dumps(r) for r in RECORDS)))
    tree = trees[0]

    print("tokenizer at work (note the QUOTE and URL sentinels):")
    for nid in tree.iter_ids():
        print(f"  {nid}: {tokenize(tree.nodes[nid].text)}")

    config = FeatureConfig(
        bow=BowConfig(dimension=12, weighting="tfidf", context=2),
        lexicon_context=1,
        label_sequence_depth=2,
        use_collocation=True,
        scaling="minmax",
    )
    assembler = FeatureAssembler.fit(config, trees, lexicon=load_demo_lexicon())

    print(f"\nvocabulary ({len(assembler.vocabulary.terms)} terms):"
          f" {assembler.vocabulary.terms}")

    path = tree.path_to_root("p3")
    fv = assembler.assemble_feature_vector(path)
    print(f"\nfeature vector for p3: width {len(fv.values)}, blocks:")
    for block in fv.blocks:
        chunk = fv.values[block.offset : block.offset + block.width]
        nonzero = int((chunk != 0).sum())
        print(f"  {block.name:<18} offset {block.offset:>4}  width {block.width:>4}"
              f"  nonzero {nonzero}")

    hist = fv.block("label_history:1")
    print("\nlabel history block 1 encodes p2's gold tags"
          f" (sum {hist.sum():.0f} bits set)")
    root_vec = assembler.assemble([tree.nodes['p1']])
    print(f"at the root there is no history: the same blocks are zero padded"
          f" (width still {len(root_vec)})")


if __name__ == "__main__":
    main()
