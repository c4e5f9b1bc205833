"""Feature extraction: from an utterance in its branch context to a vector.

Feature blocks (bag of words, category lexicon, embedding average, PDTB
relation counts, label history, label collocation) are concatenated in a
fixed order.  Context blocks are laid out newest-to-oldest and padded
with zeros near the branch start.  Everything a vector depends on sits
in the post's root-to-post path: features never look at descendants or
later siblings, which is what makes online parsing possible.

Resources (vocabulary, scaler) are fitted on training trees only and are
immutable afterwards.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import ConversationTree, PostNode
from .errors import ConfigError, ParseError
from .tagset import TAGS, label_vector
from .text import tokenize

_DATA_DIR = Path(__file__).parent / "data"

MAX_CONTEXT = 4          # context length including the current post
MAX_LABEL_HISTORY = 3    # previous posts whose labels can be features


# ---------------------------------------------------------------------------
# Bag of words
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vocabulary:
    """Top-d terms by document frequency, fitted on training posts.

    ``dimension`` is the layout width; when the training data has fewer
    distinct terms, the trailing columns stay zero.
    """

    terms: tuple[str, ...]
    weighting: str                     # "binary" | "tfidf"
    dimension: int
    doc_freq: tuple[int, ...]
    n_docs: int

    def __post_init__(self):
        if self.weighting not in ("binary", "tfidf"):
            raise ConfigError(f"unknown BOW weighting {self.weighting!r}")

    @classmethod
    def build(
        cls, documents: Iterable[Sequence[str]], dimension: int, weighting: str
    ) -> "Vocabulary":
        """Select the ``dimension`` most document-frequent terms.

        Ties are broken lexicographically so the vocabulary is a pure
        function of the training documents.
        """
        if dimension < 1:
            raise ConfigError("BOW dimension must be positive")
        df: dict[str, int] = {}
        n_docs = 0
        for tokens in documents:
            n_docs += 1
            for term in set(tokens):
                df[term] = df.get(term, 0) + 1
        if n_docs == 0:
            raise ConfigError("cannot build a vocabulary from zero documents")
        ranked = sorted(df.items(), key=lambda kv: (-kv[1], kv[0]))[:dimension]
        return cls(
            terms=tuple(t for t, _ in ranked),
            weighting=weighting,
            dimension=dimension,
            doc_freq=tuple(c for _, c in ranked),
            n_docs=n_docs,
        )

    @property
    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def idf(self) -> np.ndarray:
        """Smoothed idf, defined for the tfidf weighting."""
        out = np.zeros(self.dimension, dtype=np.float64)
        df = np.asarray(self.doc_freq, dtype=np.float64)
        out[: len(self.terms)] = np.log((1.0 + self.n_docs) / (1.0 + df)) + 1.0
        return out


def vectorize_bow(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Binary presence or L2-normalized tf-idf over the vocabulary."""
    vec = np.zeros(vocab.dimension, dtype=np.float64)
    index = vocab.index
    for tok in tokens:
        i = index.get(tok)
        if i is not None:
            vec[i] += 1.0
    if vocab.weighting == "binary":
        return (vec > 0).astype(np.float64)
    vec *= vocab.idf()
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


# ---------------------------------------------------------------------------
# Category lexicon (open LIWC-style format: "category<TAB>pattern")
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CategoryLexicon:
    """Named word-pattern categories; patterns may end in ``*`` (prefix)."""

    categories: tuple[str, ...]
    exact: dict[str, frozenset[str]]
    prefixes: dict[str, tuple[str, ...]]

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[str, str]]) -> "CategoryLexicon":
        categories: list[str] = []
        exact: dict[str, set[str]] = {}
        prefixes: dict[str, set[str]] = {}
        for category, pattern in entries:
            pattern = pattern.strip().lower()
            if not pattern:
                continue
            if category not in exact:
                categories.append(category)
                exact[category] = set()
                prefixes[category] = set()
            if pattern.endswith("*"):
                prefixes[category].add(pattern[:-1])
            else:
                exact[category].add(pattern)
        if not categories:
            raise ConfigError("lexicon has no categories")
        return cls(
            categories=tuple(categories),
            exact={c: frozenset(v) for c, v in exact.items()},
            # Longest prefix first: matching stops at the most specific pattern.
            prefixes={
                c: tuple(sorted(v, key=lambda p: (-len(p), p)))
                for c, v in prefixes.items()
            },
        )

    @classmethod
    def load(cls, source) -> "CategoryLexicon":
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8") as fh:
                return cls.load(fh)
        entries = []
        for line_no, line in enumerate(source.read().splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'category<TAB>pattern'", line_no)
            entries.append((parts[0].strip(), parts[1]))
        return cls.from_entries(entries)

    def entries(self) -> list[tuple[str, str]]:
        out = []
        for cat in self.categories:
            for pat in sorted(self.exact[cat]):
                out.append((cat, pat))
            for pre in self.prefixes[cat]:
                out.append((cat, pre + "*"))
        return out

    def _matches(self, category: str, token: str) -> bool:
        if token in self.exact[category]:
            return True
        return any(token.startswith(p) for p in self.prefixes[category])

    def categorize(self, tokens: Sequence[str], weights: str = "proportion") -> np.ndarray:
        """Per-category matched-token weight.

        "proportion" divides the matched count by the token count (zero
        for an empty post); "count" keeps raw counts.
        """
        vec = np.zeros(len(self.categories), dtype=np.float64)
        for tok in tokens:
            for i, cat in enumerate(self.categories):
                if self._matches(cat, tok):
                    vec[i] += 1.0
        if weights == "proportion" and tokens:
            vec /= len(tokens)
        return vec


def load_demo_lexicon() -> CategoryLexicon:
    """The small bundled category lexicon (open stand-in for LIWC)."""
    return CategoryLexicon.load(_DATA_DIR / "demo_lexicon.tsv")


# ---------------------------------------------------------------------------
# Pre-trained word vectors, averaged per post
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WordVectors:
    """word -> row of ``matrix``; all vectors share one dimension."""

    dimension: int
    words: tuple[str, ...]
    matrix: np.ndarray

    @classmethod
    def load(cls, source) -> "WordVectors":
        """Parse the text format: ``word v1 v2 ... vD`` per line."""
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8") as fh:
                return cls.load(fh)
        words: list[str] = []
        rows: list[list[float]] = []
        dim: int | None = None
        for line_no, line in enumerate(source.read().splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ParseError("expected 'word v1 ... vD'", line_no)
            values = [float(v) for v in parts[1:]]
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise ParseError(
                    f"vector of length {len(values)}, expected {dim}", line_no
                )
            words.append(parts[0])
            rows.append(values)
        if dim is None:
            raise ParseError("empty word-vector file")
        return cls(dimension=dim, words=tuple(words), matrix=np.asarray(rows))

    @property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.words)}


def embed_average(tokens: Sequence[str], vectors: WordVectors) -> np.ndarray:
    """Mean vector of in-vocabulary tokens; zeros when none match."""
    index = vectors.index
    rows = [index[t] for t in tokens if t in index]
    if not rows:
        return np.zeros(vectors.dimension, dtype=np.float64)
    return vectors.matrix[rows].mean(axis=0)


# ---------------------------------------------------------------------------
# PDTB relation sidecar (tags are consumed, never produced here)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PdtbSidecar:
    """Per-post sequences of discourse-relation tags between sentences."""

    inventory: tuple[str, ...]
    tags: dict[str, tuple[str, ...]]

    @classmethod
    def load(cls, sidecar_source, inventory_source) -> "PdtbSidecar":
        inventory = load_pdtb_inventory(inventory_source)
        legal = set(inventory)
        if isinstance(sidecar_source, (str, Path)):
            with open(sidecar_source, "r", encoding="utf-8") as fh:
                return cls._load_records(fh, inventory, legal)
        return cls._load_records(sidecar_source, inventory, legal)

    @classmethod
    def _load_records(cls, fh, inventory, legal) -> "PdtbSidecar":
        tags: dict[str, tuple[str, ...]] = {}
        for line_no, line in enumerate(fh.read().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", line_no) from exc
            if "node_id" not in obj or "tags" not in obj:
                raise ParseError("record needs 'node_id' and 'tags'", line_no)
            for tag in obj["tags"]:
                if tag not in legal:
                    raise ParseError(f"unknown PDTB tag {tag!r}", line_no)
            tags[obj["node_id"]] = tuple(obj["tags"])
        return cls(inventory=inventory, tags=tags)

    @classmethod
    def empty(cls, inventory: Sequence[str]) -> "PdtbSidecar":
        return cls(inventory=tuple(inventory), tags={})

    def unigram_vector(self, node_id: str) -> np.ndarray:
        k = len(self.inventory)
        vec = np.zeros(k, dtype=np.float64)
        idx = {t: i for i, t in enumerate(self.inventory)}
        for tag in self.tags.get(node_id, ()):
            vec[idx[tag]] += 1.0
        return vec

    def bigram_vector(self, node_id: str) -> np.ndarray:
        k = len(self.inventory)
        vec = np.zeros(k * k, dtype=np.float64)
        idx = {t: i for i, t in enumerate(self.inventory)}
        seq = self.tags.get(node_id, ())
        for a, b in zip(seq, seq[1:]):
            vec[idx[a] * k + idx[b]] += 1.0
        return vec


def load_pdtb_inventory(source) -> tuple[str, ...]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_pdtb_inventory(fh)
    tags = [ln.strip() for ln in source.read().splitlines() if ln.strip()]
    if len(set(tags)) != len(tags):
        raise ParseError("duplicate tags in PDTB inventory")
    return tuple(tags)


def default_pdtb_inventory() -> tuple[str, ...]:
    return load_pdtb_inventory(_DATA_DIR / "pdtb_inventory.txt")


# ---------------------------------------------------------------------------
# Feature configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BowConfig:
    dimension: int = 300
    weighting: str = "binary"
    context: int = 1


@dataclass(frozen=True)
class FeatureConfig:
    """Declarative selection of feature blocks.

    Context lengths count the current post (1..4).  The label history
    depth counts previous posts only (0..3).  Collocation adds the
    current post's other tags as a feature block; each per-tag model
    masks its own coordinate there, so no model ever sees its own target.
    """

    bow: BowConfig | None = None
    lexicon_context: int | None = None
    embeddings_context: int | None = None
    pdtb_unigram_context: int | None = None
    pdtb_bigram_context: int | None = None
    label_sequence_depth: int = 0
    use_collocation: bool = False
    scaling: str = "none"              # "none" | "minmax"
    lexicon_weights: str = "proportion"  # "proportion" | "count"

    def __post_init__(self):
        for name, ctx in (
            ("bow", self.bow.context if self.bow else None),
            ("lexicon", self.lexicon_context),
            ("embeddings", self.embeddings_context),
            ("pdtb_unigrams", self.pdtb_unigram_context),
            ("pdtb_bigrams", self.pdtb_bigram_context),
        ):
            if ctx is not None and not 1 <= ctx <= MAX_CONTEXT:
                raise ConfigError(f"{name} context must be in 1..{MAX_CONTEXT}")
        if not 0 <= self.label_sequence_depth <= MAX_LABEL_HISTORY:
            raise ConfigError(
                f"label_sequence_depth must be in 0..{MAX_LABEL_HISTORY}"
            )
        if self.scaling not in ("none", "minmax"):
            raise ConfigError(f"unknown scaling {self.scaling!r}")
        if self.lexicon_weights not in ("proportion", "count"):
            raise ConfigError(f"unknown lexicon weights {self.lexicon_weights!r}")
        if self.bow is not None and self.bow.dimension < 1:
            raise ConfigError("BOW dimension must be positive")
        if not self.enabled_blocks():
            raise ConfigError("feature config enables no blocks")

    def enabled_blocks(self) -> list[str]:
        names = []
        if self.bow:
            names.append("bow")
        if self.lexicon_context:
            names.append("lexicon")
        if self.embeddings_context:
            names.append("embedding")
        if self.pdtb_unigram_context:
            names.append("pdtb_unigrams")
        if self.pdtb_bigram_context:
            names.append("pdtb_bigrams")
        if self.label_sequence_depth:
            names.append("label_history")
        if self.use_collocation:
            names.append("collocation")
        return names

    def uses_labels(self) -> bool:
        return self.label_sequence_depth > 0 or self.use_collocation

    def label(self) -> str:
        """Compact human-readable block summary for report rows."""
        parts = []
        if self.bow:
            parts.append(f"bow{self.bow.context}")
        if self.lexicon_context:
            parts.append(f"lex{self.lexicon_context}")
        if self.embeddings_context:
            parts.append(f"emb{self.embeddings_context}")
        if self.pdtb_unigram_context:
            parts.append(f"pdtbU{self.pdtb_unigram_context}")
        if self.pdtb_bigram_context:
            parts.append(f"pdtbB{self.pdtb_bigram_context}")
        if self.label_sequence_depth:
            parts.append(f"hist{self.label_sequence_depth}")
        if self.use_collocation:
            parts.append("colloc")
        return "+".join(parts)

    def to_dict(self) -> dict:
        return {
            "bow": None
            if self.bow is None
            else {
                "dimension": self.bow.dimension,
                "weighting": self.bow.weighting,
                "context": self.bow.context,
            },
            "lexicon": _ctx_dict(self.lexicon_context),
            "embeddings": _ctx_dict(self.embeddings_context),
            "pdtb_unigrams": _ctx_dict(self.pdtb_unigram_context),
            "pdtb_bigrams": _ctx_dict(self.pdtb_bigram_context),
            "label_sequence_depth": self.label_sequence_depth,
            "use_collocation": self.use_collocation,
            "scaling": self.scaling,
            "lexicon_weights": self.lexicon_weights,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "FeatureConfig":
        known = {
            "bow", "lexicon", "embeddings", "pdtb_unigrams", "pdtb_bigrams",
            "label_sequence_depth", "use_collocation", "scaling",
            "lexicon_weights",
        }
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown feature config keys: {sorted(unknown)!r}")
        bow = None
        if obj.get("bow") is not None:
            raw = obj["bow"]
            bow = BowConfig(
                dimension=int(raw.get("dimension", 300)),
                weighting=raw.get("weighting", "binary"),
                context=int(raw.get("context", 1)),
            )
        return cls(
            bow=bow,
            lexicon_context=_ctx_value(obj.get("lexicon")),
            embeddings_context=_ctx_value(obj.get("embeddings")),
            pdtb_unigram_context=_ctx_value(obj.get("pdtb_unigrams")),
            pdtb_bigram_context=_ctx_value(obj.get("pdtb_bigrams")),
            label_sequence_depth=int(obj.get("label_sequence_depth", 0)),
            use_collocation=bool(obj.get("use_collocation", False)),
            scaling=obj.get("scaling", "none"),
            lexicon_weights=obj.get("lexicon_weights", "proportion"),
        )

    @classmethod
    def load(cls, source) -> "FeatureConfig":
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        return cls.from_dict(json.load(source))


def _ctx_dict(ctx: int | None) -> dict | None:
    return None if ctx is None else {"context": ctx}


def _ctx_value(obj) -> int | None:
    if obj is None:
        return None
    if isinstance(obj, dict):
        return int(obj["context"])
    return int(obj)


# ---------------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinMaxScaler:
    """Per-column min-max scaling, fitted on training vectors only.

    Transformed values are clipped to [0, 1]; constant columns map to 0.
    """

    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def fit(cls, matrix: np.ndarray) -> "MinMaxScaler":
        return cls(mins=matrix.min(axis=0), maxs=matrix.max(axis=0))

    def transform(self, x: np.ndarray) -> np.ndarray:
        span = self.maxs - self.mins
        safe = np.where(span > 0, span, 1.0)
        out = (x - self.mins) / safe
        out = np.where(span > 0, out, 0.0)
        return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Block:
    name: str
    offset: int
    width: int


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    blocks: tuple[Block, ...]

    def block(self, name: str) -> np.ndarray:
        for b in self.blocks:
            if b.name == name:
                return self.values[b.offset : b.offset + b.width]
        raise KeyError(name)


def iter_training_paths(
    trees: Iterable[ConversationTree],
) -> Iterator[list[PostNode]]:
    """Root-to-node path for every unique labeled node, in tree order.

    Unlabeled nodes never become examples but do appear inside paths as
    context.
    """
    for tree in trees:
        for nid in tree.iter_ids():
            if tree.nodes[nid].is_labeled:
                yield tree.path_to_root(nid)


@dataclass
class FeatureAssembler:
    """Fitted feature resources plus the block layout they induce.

    ``assemble`` is a pure function of (path, label context, collocation
    labels): identical inputs give bitwise-identical vectors.
    """

    config: FeatureConfig
    vocabulary: Vocabulary | None = None
    lexicon: CategoryLexicon | None = None
    word_vectors: WordVectors | None = None
    pdtb: PdtbSidecar | None = None
    scaler: MinMaxScaler | None = None
    _token_cache: dict[PostNode, list[str]] = field(
        default_factory=dict, repr=False, compare=False
    )

    @classmethod
    def fit(
        cls,
        config: FeatureConfig,
        train_trees: Sequence[ConversationTree],
        lexicon: CategoryLexicon | None = None,
        word_vectors: WordVectors | None = None,
        pdtb: PdtbSidecar | None = None,
    ) -> "FeatureAssembler":
        """Fit vocabulary and scaler on the training trees.

        The scaler sees exactly the vectors of the training examples
        (unique labeled nodes with their gold label context).
        """
        if config.lexicon_context and lexicon is None:
            raise ConfigError("config enables lexicon features but no lexicon given")
        if config.embeddings_context and word_vectors is None:
            raise ConfigError("config enables embeddings but no word vectors given")
        if (config.pdtb_unigram_context or config.pdtb_bigram_context) and pdtb is None:
            raise ConfigError("config enables PDTB features but no sidecar given")

        assembler = cls(
            config=config,
            lexicon=lexicon,
            word_vectors=word_vectors,
            pdtb=pdtb,
        )
        if config.bow:
            docs = (
                assembler._tokens(tree.nodes[nid])
                for tree in train_trees
                for nid in tree.iter_ids()
            )
            assembler.vocabulary = Vocabulary.build(
                docs, config.bow.dimension, config.bow.weighting
            )
        if config.scaling == "minmax":
            rows = [
                assembler.assemble(path, scaled=False)
                for path in iter_training_paths(train_trees)
            ]
            if not rows:
                raise ConfigError("cannot fit a scaler without labeled nodes")
            assembler.scaler = MinMaxScaler.fit(np.vstack(rows))
        return assembler

    # -- layout ------------------------------------------------------------

    def block_widths(self) -> list[tuple[str, int]]:
        cfg = self.config
        out: list[tuple[str, int]] = []
        if cfg.bow:
            for i in range(cfg.bow.context):
                out.append((f"bow:{i}", cfg.bow.dimension))
        if cfg.lexicon_context:
            for i in range(cfg.lexicon_context):
                out.append((f"lexicon:{i}", len(self.lexicon.categories)))
        if cfg.embeddings_context:
            for i in range(cfg.embeddings_context):
                out.append((f"embedding:{i}", self.word_vectors.dimension))
        if cfg.pdtb_unigram_context:
            for i in range(cfg.pdtb_unigram_context):
                out.append((f"pdtb_unigrams:{i}", len(self.pdtb.inventory)))
        if cfg.pdtb_bigram_context:
            for i in range(cfg.pdtb_bigram_context):
                out.append((f"pdtb_bigrams:{i}", len(self.pdtb.inventory) ** 2))
        for j in range(1, cfg.label_sequence_depth + 1):
            out.append((f"label_history:{j}", len(TAGS)))
        if cfg.use_collocation:
            out.append(("collocation", len(TAGS)))
        return out

    @property
    def blocks(self) -> tuple[Block, ...]:
        out = []
        offset = 0
        for name, width in self.block_widths():
            out.append(Block(name, offset, width))
            offset += width
        return tuple(out)

    @property
    def width(self) -> int:
        return sum(w for _, w in self.block_widths())

    @property
    def collocation_offset(self) -> int | None:
        for b in self.blocks:
            if b.name == "collocation":
                return b.offset
        return None

    # -- assembly ----------------------------------------------------------

    def _tokens(self, post: PostNode) -> list[str]:
        cached = self._token_cache.get(post)
        if cached is None:
            cached = tokenize(post.text)
            self._token_cache[post] = cached
        return cached

    def assemble(
        self,
        path: Sequence[PostNode],
        label_context: Sequence[frozenset[str]] | None = None,
        collocation: frozenset[str] | None = None,
        scaled: bool = True,
    ) -> np.ndarray:
        """Feature vector of the last post of ``path``.

        ``path`` is the root-to-post sequence (ancestors first); only
        the trailing context window is used.  ``label_context`` overrides
        the posts' own (gold) labels for the label-history block, and
        ``collocation`` overrides the current post's gold labels for the
        collocation block; both default to gold.
        """
        if not path:
            raise ConfigError("assemble needs at least the current post")
        if label_context is not None and len(label_context) != len(path):
            raise ConfigError("label_context must align with path")
        cfg = self.config
        parts: list[np.ndarray] = []

        def post_back(i: int) -> PostNode | None:
            return path[-1 - i] if i < len(path) else None

        def labels_back(j: int) -> frozenset[str]:
            if j >= len(path):
                return frozenset()
            if label_context is not None:
                return label_context[-1 - j]
            return path[-1 - j].labels

        if cfg.bow:
            for i in range(cfg.bow.context):
                post = post_back(i)
                if post is None:
                    parts.append(np.zeros(cfg.bow.dimension))
                else:
                    parts.append(vectorize_bow(self._tokens(post), self.vocabulary))
        if cfg.lexicon_context:
            width = len(self.lexicon.categories)
            for i in range(cfg.lexicon_context):
                post = post_back(i)
                if post is None:
                    parts.append(np.zeros(width))
                else:
                    parts.append(
                        self.lexicon.categorize(
                            self._tokens(post), cfg.lexicon_weights
                        )
                    )
        if cfg.embeddings_context:
            for i in range(cfg.embeddings_context):
                post = post_back(i)
                if post is None:
                    parts.append(np.zeros(self.word_vectors.dimension))
                else:
                    parts.append(embed_average(self._tokens(post), self.word_vectors))
        if cfg.pdtb_unigram_context:
            for i in range(cfg.pdtb_unigram_context):
                post = post_back(i)
                if post is None:
                    parts.append(np.zeros(len(self.pdtb.inventory)))
                else:
                    parts.append(self.pdtb.unigram_vector(post.node_id))
        if cfg.pdtb_bigram_context:
            for i in range(cfg.pdtb_bigram_context):
                post = post_back(i)
                if post is None:
                    parts.append(np.zeros(len(self.pdtb.inventory) ** 2))
                else:
                    parts.append(self.pdtb.bigram_vector(post.node_id))
        for j in range(1, cfg.label_sequence_depth + 1):
            parts.append(label_vector(labels_back(j)))
        if cfg.use_collocation:
            colloc = path[-1].labels if collocation is None else collocation
            parts.append(label_vector(colloc))

        vec = np.concatenate(parts) if parts else np.zeros(0)
        if scaled and self.scaler is not None:
            vec = self.scaler.transform(vec)
        return vec

    def assemble_feature_vector(self, path, **kwargs) -> FeatureVector:
        return FeatureVector(values=self.assemble(path, **kwargs), blocks=self.blocks)

    def replace_pdtb(self, pdtb: PdtbSidecar) -> None:
        """Swap in a sidecar for new data; the inventory must not change."""
        if self.pdtb is not None and pdtb.inventory != self.pdtb.inventory:
            raise ConfigError("PDTB inventory differs from the fitted one")
        self.pdtb = pdtb
