"""The 31-tag universe and its encodings."""

import numpy as np
import pytest

from disparse.tagset import (
    CATEGORIES,
    TAG_INDEX,
    TAGS,
    UnknownTagError,
    canonical_tag,
    label_vector,
    make_label_set,
)


def test_universe_has_31_tags():
    assert len(TAGS) == 31
    assert len(set(TAGS)) == 31


def test_category_sizes():
    sizes = {cat: len(tags) for cat, tags in CATEGORIES.items()}
    assert sizes == {
        "Promoting": 9,
        "LowResponsiveness": 6,
        "ToneNegative": 4,
        "TonePositive": 2,
        "DisagreeEasing": 4,
        "DisagreeIntensifying": 6,
    }


def test_alias_normalizes_to_convergence():
    assert canonical_tag("ConvergenceAgreement") == "Convergence"
    assert canonical_tag("Convergence") == "Convergence"


def test_unknown_tag_raises_with_name():
    with pytest.raises(UnknownTagError, match="NotATag"):
        canonical_tag("NotATag")


def test_make_label_set_canonicalizes():
    assert make_label_set(["ConvergenceAgreement", "Answer"]) == frozenset(
        {"Convergence", "Answer"}
    )


class TestLabelVector:
    def test_empty_set_is_all_zero(self):
        assert not label_vector(frozenset()).any()

    def test_singleton_has_exactly_one_bit(self):
        vec = label_vector(frozenset({"CounterArgument"}))
        assert vec.sum() == 1.0
        assert vec[TAG_INDEX["CounterArgument"]] == 1.0

    def test_full_universe_is_all_ones(self):
        np.testing.assert_array_equal(label_vector(frozenset(TAGS)), np.ones(31))
