"""The discursive-move tag universe.

31 tags grouped into six categories: moves that promote the discussion,
moves showing low responsiveness, negative and positive tone, and
disagreement strategies that ease or intensify tension.  Canonical tag
order is fixed and shared by every vector representation in the toolkit.
"""

from __future__ import annotations

import numpy as np

CATEGORIES: dict[str, tuple[str, ...]] = {
    "Promoting": (
        "Moderation",
        "RequestClarification",
        "AttackValidity",
        "Clarification",
        "Answer",
        "CounterArgument",
        "Extension",
        "ViableTransformation",
        "Personal",
    ),
    "LowResponsiveness": (
        "BAD",
        "Repetition",
        "NegTransformation",
        "NoReasonDisagreement",
        "Convergence",
        "AgreeToDisagree",
    ),
    "ToneNegative": (
        "Aggressive",
        "Ridicule",
        "Complaint",
        "Sarcasm",
    ),
    "TonePositive": (
        "Positive",
        "WQualifiers",
    ),
    "DisagreeEasing": (
        "Softening",
        "AgreeBut",
        "DoubleVoicing",
        "Sources",
    ),
    "DisagreeIntensifying": (
        "RephraseAttack",
        "CriticalQuestion",
        "Alternative",
        "DirectNo",
        "Irrelevance",
        "Nitpicking",
    ),
}

#: Canonical tag order: category order above, tags in declaration order.
TAGS: tuple[str, ...] = tuple(t for tags in CATEGORIES.values() for t in tags)

TAG_INDEX: dict[str, int] = {tag: i for i, tag in enumerate(TAGS)}

CATEGORY_OF: dict[str, str] = {
    tag: cat for cat, tags in CATEGORIES.items() for tag in tags
}

#: Accepted spellings that normalize to a canonical tag.  The agreement
#: tag appears in the wild both with and without the "Agreement" suffix.
ALIASES: dict[str, str] = {
    "ConvergenceAgreement": "Convergence",
    "Convergence Agreement": "Convergence",
    "Convergence\tAgreement": "Convergence",
}

assert len(TAGS) == 31


class UnknownTagError(ValueError):
    """Raised when a label names a tag outside the canonical universe."""


def canonical_tag(name: str) -> str:
    """Map a raw tag name to its canonical form, raising on unknown tags."""
    name = name.strip()
    if name in TAG_INDEX:
        return name
    if name in ALIASES:
        return ALIASES[name]
    raise UnknownTagError(f"unknown tag: {name!r}")


def make_label_set(names) -> frozenset[str]:
    """Build a validated label set from an iterable of raw tag names."""
    return frozenset(canonical_tag(n) for n in names)


def label_vector(labels: frozenset[str] | set[str]) -> np.ndarray:
    """Encode a label set as a binary vector in canonical tag order."""
    vec = np.zeros(len(TAGS), dtype=np.float64)
    for tag in labels:
        vec[TAG_INDEX[tag]] = 1.0
    return vec
