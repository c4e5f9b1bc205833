"""Per-tag binary classifiers and the stacked online branch parser.

One binary model per tag; the stack shares a single feature layout.
Logistic regression and the feed-forward network are trained by
mini-batch gradient descent on L2-regularized cross-entropy with an
analytic gradient (exposed for finite-difference checks); naive Bayes
uses add-alpha smoothing over binarized features; the decision tree
splits on information gain with deterministic tie-breaking.

Training with the collocation block masks, for each tag's model, that
tag's own coordinate: a model never sees its own target bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .corpus import ConversationTree, PostNode
from .errors import ConfigError, GoldContextError
from .features import FeatureAssembler, FeatureConfig, iter_training_paths
from .tagset import TAG_INDEX, TAGS

MODEL_KINDS = ("logreg", "naive_bayes", "decision_tree", "feedforward")


@dataclass(frozen=True)
class ModelSpec:
    """Hyperparameters for one binary classifier."""

    kind: str = "logreg"
    learning_rate: float = 0.5
    l2: float = 1e-4
    epochs: int = 100
    batch_size: int = 64
    hidden: tuple[int, ...] = (64, 32, 16)
    alpha: float = 1.0           # naive Bayes smoothing
    max_depth: int = 12
    min_leaf: int = 1
    threshold: float = 0.5
    class_weight: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        for name in ("learning_rate", "l2", "alpha"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        for name in ("epochs", "batch_size", "max_depth", "min_leaf"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must lie in [0, 1]")
        if len(self.hidden) != 3:
            raise ConfigError("feed-forward nets use exactly three hidden layers")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "hidden": list(self.hidden),
            "alpha": self.alpha,
            "max_depth": self.max_depth,
            "min_leaf": self.min_leaf,
            "threshold": self.threshold,
            "class_weight": self.class_weight,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelSpec":
        kwargs = dict(obj)
        if "hidden" in kwargs:
            kwargs["hidden"] = tuple(kwargs["hidden"])
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------

def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softplus(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))


def lr_loss_and_grad(
    theta: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    l2: float,
    sample_weight: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """L2-regularized mean cross-entropy of logistic regression.

    ``theta`` packs [bias, weights]; the bias is not regularized.
    """
    b, w = theta[0], theta[1:]
    z = X @ w + b
    ce = _softplus(z) - y * z
    s = np.ones_like(y) if sample_weight is None else sample_weight
    n = len(y)
    loss = float((s * ce).sum() / n + 0.5 * l2 * (w @ w))
    err = s * (sigmoid(z) - y)
    grad = np.concatenate(([err.sum() / n], X.T @ err / n + l2 * w))
    return loss, grad


def ff_init(width: int, hidden: Sequence[int], rng: np.random.Generator) -> list[np.ndarray]:
    """[W1, b1, ..., WL, bL] with 1/sqrt(fan_in)-scaled gaussian weights."""
    sizes = [width, *hidden, 1]
    params: list[np.ndarray] = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        params.append(rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, fan_out)))
        params.append(np.zeros(fan_out))
    return params


def ff_pack(params: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate([p.ravel() for p in params])


def ff_unpack(theta: np.ndarray, width: int, hidden: Sequence[int]) -> list[np.ndarray]:
    sizes = [width, *hidden, 1]
    params = []
    pos = 0
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        params.append(theta[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out))
        pos += fan_in * fan_out
        params.append(theta[pos : pos + fan_out])
        pos += fan_out
    return params


def _ff_forward(params: Sequence[np.ndarray], X: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Returns output logits and per-layer tanh activations."""
    activations = [X]
    a = X
    n_layers = len(params) // 2
    for layer in range(n_layers - 1):
        a = np.tanh(a @ params[2 * layer] + params[2 * layer + 1])
        activations.append(a)
    z = a @ params[-2] + params[-1]
    return z[:, 0], activations


def ff_loss_and_grad(
    theta: np.ndarray,
    width: int,
    hidden: Sequence[int],
    X: np.ndarray,
    y: np.ndarray,
    l2: float,
    sample_weight: np.ndarray | None = None,
) -> tuple[float, np.ndarray]:
    """Loss and flat gradient of the tanh feed-forward network.

    Regularization covers weight matrices, not biases.
    """
    params = ff_unpack(theta, width, hidden)
    z, activations = _ff_forward(params, X)
    s = np.ones_like(y) if sample_weight is None else sample_weight
    n = len(y)
    reg = sum(float((W * W).sum()) for W in params[::2])
    loss = float((s * (_softplus(z) - y * z)).sum() / n + 0.5 * l2 * reg)

    grads = [np.zeros_like(p) for p in params]
    delta = (s * (sigmoid(z) - y) / n)[:, None]
    n_layers = len(params) // 2
    for layer in reversed(range(n_layers)):
        a_prev = activations[layer]
        grads[2 * layer] = a_prev.T @ delta + l2 * params[2 * layer]
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ params[2 * layer].T) * (1.0 - activations[layer] ** 2)
    return loss, ff_pack(grads)


def _sample_weights(y: np.ndarray, enabled: bool) -> np.ndarray | None:
    """Inverse-prior example weights, mean-normalized; None when disabled."""
    if not enabled:
        return None
    n = len(y)
    n_pos = int(y.sum())
    n_neg = n - n_pos
    w = np.where(y > 0, n / (2.0 * n_pos), n / (2.0 * n_neg))
    return w


def _minibatches(n: int, batch_size: int, epochs: int, rng: np.random.Generator):
    for _ in range(epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            yield order[start : start + batch_size]


# ---------------------------------------------------------------------------
# The binary model
# ---------------------------------------------------------------------------

@dataclass
class BinaryModel:
    """A trained one-vs-rest classifier for a single tag."""

    spec: ModelSpec
    kind: str                    # spec.kind, or "constant" for degenerate fits
    input_width: int
    params: dict[str, np.ndarray | float]
    degenerate: bool = False

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.input_width:
            raise ConfigError(
                f"feature width {X.shape[1]} does not match model width "
                f"{self.input_width}"
            )
        if self.kind == "constant":
            return np.full(len(X), float(self.params["p"]))
        if self.kind == "logreg":
            return sigmoid(X @ self.params["weights"] + self.params["bias"])
        if self.kind == "feedforward":
            z, _ = _ff_forward(self.params["layers"], X)
            return sigmoid(z)
        if self.kind == "naive_bayes":
            return _nb_proba(self.params, X)
        if self.kind == "decision_tree":
            return _tree_proba(self.params, X)
        raise ConfigError(f"unknown model kind {self.kind!r}")

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_proba(X) >= self.spec.threshold


def train_binary(X: np.ndarray, y: np.ndarray, spec: ModelSpec) -> BinaryModel:
    """Train one binary classifier; degenerate single-class sets yield a
    constant-prior model with the ``degenerate`` flag set."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(X) != len(y):
        raise ConfigError("X must be (n, d) aligned with y")
    width = X.shape[1]
    n_pos = int(y.sum())
    if n_pos == 0 or n_pos == len(y):
        return BinaryModel(
            spec=spec,
            kind="constant",
            input_width=width,
            params={"p": n_pos / len(y)},
            degenerate=True,
        )
    if spec.kind == "logreg":
        params = _fit_logreg(X, y, spec)
    elif spec.kind == "feedforward":
        params = _fit_feedforward(X, y, spec)
    elif spec.kind == "naive_bayes":
        params = _fit_naive_bayes(X, y, spec)
    elif spec.kind == "decision_tree":
        params = _fit_tree(X, y, spec)
    else:
        raise ConfigError(f"unknown model kind {spec.kind!r}")
    return BinaryModel(spec=spec, kind=spec.kind, input_width=width, params=params)


def _fit_logreg(X, y, spec: ModelSpec) -> dict:
    rng = np.random.default_rng(spec.seed)
    s = _sample_weights(y, spec.class_weight)
    theta = np.zeros(X.shape[1] + 1)
    for batch in _minibatches(len(y), spec.batch_size, spec.epochs, rng):
        sw = None if s is None else s[batch]
        _, grad = lr_loss_and_grad(theta, X[batch], y[batch], spec.l2, sw)
        theta -= spec.learning_rate * grad
    return {"bias": float(theta[0]), "weights": theta[1:]}


def _fit_feedforward(X, y, spec: ModelSpec) -> dict:
    rng = np.random.default_rng(spec.seed)
    s = _sample_weights(y, spec.class_weight)
    width = X.shape[1]
    theta = ff_pack(ff_init(width, spec.hidden, rng))
    for batch in _minibatches(len(y), spec.batch_size, spec.epochs, rng):
        sw = None if s is None else s[batch]
        _, grad = ff_loss_and_grad(theta, width, spec.hidden, X[batch], y[batch], spec.l2, sw)
        theta -= spec.learning_rate * grad
    return {"layers": ff_unpack(theta, width, spec.hidden), "hidden": np.asarray(spec.hidden)}


def _fit_naive_bayes(X, y, spec: ModelSpec) -> dict:
    """Bernoulli naive Bayes over binarized (x > 0) features."""
    Xb = (X > 0).astype(np.float64)
    pos = y > 0
    n = len(y)
    a = spec.alpha
    counts = np.vstack([Xb[~pos].sum(axis=0), Xb[pos].sum(axis=0)])
    class_n = np.array([float((~pos).sum()), float(pos.sum())])
    theta = (counts + a) / (class_n[:, None] + 2.0 * a)
    return {
        "log_prior": np.log(class_n / n),
        "log_theta": np.log(theta),
        "log_one_minus_theta": np.log1p(-theta),
    }


def _nb_proba(params: dict, X: np.ndarray) -> np.ndarray:
    Xb = (X > 0).astype(np.float64)
    joint = (
        params["log_prior"][None, :]
        + Xb @ params["log_theta"].T
        + (1.0 - Xb) @ params["log_one_minus_theta"].T
    )
    m = joint.max(axis=1, keepdims=True)
    norm = m[:, 0] + np.log(np.exp(joint - m).sum(axis=1))
    return np.exp(joint[:, 1] - norm)


def _entropy(p: np.ndarray) -> np.ndarray:
    """Binary entropy in bits, with 0 log 0 = 0."""
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    for q in (p, 1.0 - p):
        nz = q > 0
        out[nz] -= q[nz] * np.log2(q[nz])
    return out


def _fit_tree(X, y, spec: ModelSpec) -> dict:
    """Grow an information-gain tree with deterministic tie-breaking.

    Splits compare candidate thresholds (midpoints between distinct
    sorted values); equal gains resolve to the lowest feature index,
    then the lowest threshold.
    """
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def best_split(idx: np.ndarray) -> tuple[float, int, float] | None:
        yi = y[idx]
        n = len(idx)
        pos = yi.sum()
        parent = _entropy(np.array([pos / n]))[0]
        best: tuple[float, int, float] | None = None
        for j in range(X.shape[1]):
            xj = X[idx, j]
            order = np.argsort(xj, kind="stable")
            xs, ys = xj[order], yi[order]
            cuts = np.nonzero(xs[1:] > xs[:-1])[0] + 1
            if len(cuts) == 0:
                continue
            cum_pos = np.cumsum(ys)
            n_l = cuts.astype(np.float64)
            n_r = n - n_l
            ok = (n_l >= spec.min_leaf) & (n_r >= spec.min_leaf)
            if not ok.any():
                continue
            cuts, n_l, n_r = cuts[ok], n_l[ok], n_r[ok]
            pos_l = cum_pos[cuts - 1]
            pos_r = pos - pos_l
            gain = parent - (n_l / n) * _entropy(pos_l / n_l) - (n_r / n) * _entropy(pos_r / n_r)
            k = int(np.argmax(gain))
            if gain[k] > 1e-12 and (best is None or gain[k] > best[0] + 1e-12):
                cut = cuts[k]
                best = (float(gain[k]), j, float((xs[cut - 1] + xs[cut]) / 2.0))
        return best

    def grow(idx: np.ndarray, depth: int) -> int:
        node = new_node()
        yi = y[idx]
        value[node] = float(yi.mean())
        if (
            depth >= spec.max_depth
            or len(idx) < 2 * spec.min_leaf
            or yi.min() == yi.max()
        ):
            return node
        split = best_split(idx)
        if split is None:
            return node
        _, j, t = split
        feature[node] = j
        threshold[node] = t
        mask = X[idx, j] <= t
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    grow(np.arange(len(y)), 0)
    return {
        "feature": np.asarray(feature, dtype=np.int64),
        "threshold": np.asarray(threshold, dtype=np.float64),
        "left": np.asarray(left, dtype=np.int64),
        "right": np.asarray(right, dtype=np.int64),
        "value": np.asarray(value, dtype=np.float64),
    }


def _tree_proba(params: dict, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X))
    feature = params["feature"]
    for i, x in enumerate(X):
        node = 0
        while feature[node] >= 0:
            if x[feature[node]] <= params["threshold"][node]:
                node = int(params["left"][node])
            else:
                node = int(params["right"][node])
        out[i] = params["value"][node]
    return out


# ---------------------------------------------------------------------------
# The per-tag stack
# ---------------------------------------------------------------------------

@dataclass
class TagStack:
    """One binary model per tag plus the shared fitted feature assembler."""

    tags: tuple[str, ...]
    models: dict[str, BinaryModel]
    assembler: FeatureAssembler
    metadata: dict = field(default_factory=dict)

    @property
    def config(self) -> FeatureConfig:
        return self.assembler.config

    def score_vector(self, vec: np.ndarray) -> dict[str, float]:
        """Per-tag probabilities for one assembled feature vector.

        With collocation enabled, each tag's model sees the vector with
        its own collocation coordinate zeroed.
        """
        colloc = self.assembler.collocation_offset
        scores = {}
        row = vec[None, :]
        for tag in self.tags:
            if colloc is None:
                scores[tag] = float(self.models[tag].predict_proba(row)[0])
            else:
                masked = row.copy()
                masked[0, colloc + TAG_INDEX[tag]] = 0.0
                scores[tag] = float(self.models[tag].predict_proba(masked)[0])
        return scores

    def predict_set(self, vec: np.ndarray) -> frozenset[str]:
        scores = self.score_vector(vec)
        return frozenset(
            t for t in self.tags if scores[t] >= self.models[t].spec.threshold
        )


def _resolve_specs(
    specs: ModelSpec | dict[str, ModelSpec], tags: Sequence[str]
) -> dict[str, ModelSpec]:
    if isinstance(specs, ModelSpec):
        return {t: specs for t in tags}
    missing = [t for t in tags if t not in specs]
    if missing:
        raise ConfigError(f"no model spec for tags {missing!r}")
    return dict(specs)


def training_matrix(
    assembler: FeatureAssembler, trees: Sequence[ConversationTree]
) -> tuple[np.ndarray, list[frozenset[str]]]:
    """Scaled feature matrix and gold label sets of the training examples."""
    rows = []
    golds = []
    for path in iter_training_paths(trees):
        rows.append(assembler.assemble(path))
        golds.append(path[-1].labels)
    if not rows:
        raise ConfigError("no labeled nodes to train on")
    return np.vstack(rows), golds


def train_stack(
    train_trees: Sequence[ConversationTree],
    config: FeatureConfig,
    specs: ModelSpec | dict[str, ModelSpec],
    seed: int = 0,
    *,
    lexicon=None,
    word_vectors=None,
    pdtb=None,
    tags: Sequence[str] = TAGS,
) -> TagStack:
    """Fit resources and one model per tag on the training trees.

    Gold labels of context posts feed the label blocks during training.
    Each tag's training seed is derived from ``seed`` and the tag index
    so runs are reproducible end to end.
    """
    tags = tuple(tags)
    per_tag = _resolve_specs(specs, tags)
    assembler = FeatureAssembler.fit(
        config, train_trees, lexicon=lexicon, word_vectors=word_vectors, pdtb=pdtb
    )
    X, golds = training_matrix(assembler, train_trees)
    colloc = assembler.collocation_offset

    models: dict[str, BinaryModel] = {}
    for tag in tags:
        spec = replace(per_tag[tag], seed=seed * 1009 + TAG_INDEX[tag])
        y = np.array([tag in g for g in golds], dtype=np.float64)
        if colloc is None:
            models[tag] = train_binary(X, y, spec)
        else:
            col = colloc + TAG_INDEX[tag]
            saved = X[:, col].copy()
            X[:, col] = 0.0
            try:
                models[tag] = train_binary(X, y, spec)
            finally:
                X[:, col] = saved

    return TagStack(
        tags=tags,
        models=models,
        assembler=assembler,
        metadata={
            "seed": seed,
            "num_examples": len(golds),
            "num_training_trees": len(train_trees),
            "config_label": config.label(),
        },
    )


# ---------------------------------------------------------------------------
# Online parsing
# ---------------------------------------------------------------------------

def predict_tree(
    stack: TagStack,
    tree: ConversationTree,
    mode: str = "gold_context",
    preceding_override: dict[str, frozenset[str]] | None = None,
    collocation_override: dict[str, frozenset[str]] | None = None,
) -> dict[str, frozenset[str]]:
    """Predict label sets for every node of a tree, parents first.

    gold_context feeds gold labels into the label blocks: the held-out
    evaluation protocol.  The override maps substitute (e.g. perturbed)
    labels when a node appears as a preceding post or as the source of
    its own collocation block.  predicted_context feeds back earlier
    predictions instead and fills the collocation block in two passes
    (first without it, then with the first pass's output).  Neither mode
    ever looks past the current post.
    """
    if mode not in ("gold_context", "predicted_context"):
        raise ConfigError(f"unknown parse mode {mode!r}")
    if (
        mode == "gold_context"
        and stack.config.uses_labels()
        and not any(n.is_labeled for n in tree.nodes.values())
    ):
        raise GoldContextError(
            f"tree {tree.tree_id!r} carries no labels; gold_context needs them"
        )

    def preceding(node: PostNode) -> frozenset[str]:
        if preceding_override is not None and node.node_id in preceding_override:
            return preceding_override[node.node_id]
        return node.labels

    def collocation(node: PostNode) -> frozenset[str]:
        if collocation_override is not None and node.node_id in collocation_override:
            return collocation_override[node.node_id]
        return node.labels

    predictions: dict[str, frozenset[str]] = {}
    for nid in tree.iter_ids():
        path = tree.path_to_root(nid)
        if mode == "gold_context":
            context = [preceding(p) for p in path]
            vec = stack.assembler.assemble(
                path, label_context=context, collocation=collocation(path[-1])
            )
            predictions[nid] = stack.predict_set(vec)
        else:
            context = [predictions[p.node_id] for p in path[:-1]] + [frozenset()]
            vec = stack.assembler.assemble(
                path, label_context=context, collocation=frozenset()
            )
            first = stack.predict_set(vec)
            if stack.config.use_collocation:
                vec = stack.assembler.assemble(
                    path, label_context=context, collocation=first
                )
                predictions[nid] = stack.predict_set(vec)
            else:
                predictions[nid] = first
    return predictions


def parse_branch(
    posts: Sequence[PostNode], stack: TagStack, mode: str = "gold_context"
) -> list[frozenset[str]]:
    """Parse one branch (root-to-leaf post sequence) online.

    Returns one predicted label set per post, in order.  Predictions for
    a prefix never depend on anything after it.
    """
    if mode not in ("gold_context", "predicted_context"):
        raise ConfigError(f"unknown parse mode {mode!r}")
    if (
        mode == "gold_context"
        and stack.config.uses_labels()
        and not any(p.is_labeled for p in posts)
    ):
        raise GoldContextError("branch carries no labels; gold_context needs them")

    out: list[frozenset[str]] = []
    for i in range(len(posts)):
        path = list(posts[: i + 1])
        if mode == "gold_context":
            vec = stack.assembler.assemble(path)
            out.append(stack.predict_set(vec))
        else:
            context = out + [frozenset()]
            vec = stack.assembler.assemble(
                path, label_context=context, collocation=frozenset()
            )
            first = stack.predict_set(vec)
            if stack.config.use_collocation:
                vec = stack.assembler.assemble(
                    path, label_context=context, collocation=first
                )
                out.append(stack.predict_set(vec))
            else:
                out.append(first)
    return out
