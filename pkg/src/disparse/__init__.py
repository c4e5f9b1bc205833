"""disparse: parsing contentious, non-convergent online discussions.

The toolkit ingests conversation trees, computes tag analytics (priors,
PMI collocation, transitions), extracts per-utterance feature vectors
from the post and its branch context, trains per-tag binary classifier
stacks, and evaluates them online: a post's labels are predicted from
preceding posts only, never later ones.
"""

from .analytics import TagMatrix, pmi_matrix, tag_priors, transition_matrix
from .bundle import load_stack, save_stack
from .corpus import (
    Branch,
    ConversationTree,
    CorpusStats,
    PostNode,
    corpus_statistics,
    extract_branches,
    labeled_nodes,
    load_trees,
    make_folds,
    split_trees,
    write_trees,
)
from .errors import (
    ConfigError,
    DisparseError,
    GoldContextError,
    IntegrityError,
    ParseError,
)
from .evaluation import (
    CVResult,
    EvalReport,
    NoiseSpec,
    TagMetrics,
    cross_validate,
    evaluate_stack,
    noise_experiment,
    perturb_labels,
    run_ablation,
    score,
)
from .features import (
    BowConfig,
    CategoryLexicon,
    FeatureAssembler,
    FeatureConfig,
    FeatureVector,
    MinMaxScaler,
    PdtbSidecar,
    Vocabulary,
    WordVectors,
    embed_average,
    load_demo_lexicon,
    vectorize_bow,
)
from .models import (
    BinaryModel,
    ModelSpec,
    TagStack,
    parse_branch,
    predict_tree,
    train_binary,
    train_stack,
)
from .synthetic import DependencyRule, SyntheticSpec, generate
from .tagset import CATEGORIES, TAGS, canonical_tag, label_vector, make_label_set
from .text import tokenize

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "BinaryModel",
    "BowConfig",
    "CATEGORIES",
    "CVResult",
    "CategoryLexicon",
    "ConfigError",
    "ConversationTree",
    "CorpusStats",
    "DependencyRule",
    "DisparseError",
    "EvalReport",
    "FeatureAssembler",
    "FeatureConfig",
    "FeatureVector",
    "GoldContextError",
    "IntegrityError",
    "MinMaxScaler",
    "ModelSpec",
    "NoiseSpec",
    "ParseError",
    "PdtbSidecar",
    "PostNode",
    "SyntheticSpec",
    "TAGS",
    "TagMatrix",
    "TagMetrics",
    "TagStack",
    "Vocabulary",
    "WordVectors",
    "canonical_tag",
    "corpus_statistics",
    "cross_validate",
    "embed_average",
    "evaluate_stack",
    "extract_branches",
    "generate",
    "label_vector",
    "labeled_nodes",
    "load_demo_lexicon",
    "load_stack",
    "load_trees",
    "make_folds",
    "make_label_set",
    "noise_experiment",
    "parse_branch",
    "perturb_labels",
    "pmi_matrix",
    "predict_tree",
    "run_ablation",
    "save_stack",
    "score",
    "split_trees",
    "tag_priors",
    "tokenize",
    "train_binary",
    "train_stack",
    "transition_matrix",
    "vectorize_bow",
    "write_trees",
]
