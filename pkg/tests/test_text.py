"""Canonical tokenizer behavior."""

from hypothesis import given
from hypothesis import strategies as st

from disparse.text import QUOTE_TOKEN, URL_TOKEN, tokenize


def test_punctuation_stripping():
    assert tokenize("I disagree, man.") == ["i", "disagree", "man"]


def test_quote_marker_sentinel():
    assert tokenize(">>> I did.") == [QUOTE_TOKEN, "i", "did"]
    assert tokenize("> quoted") == [QUOTE_TOKEN, "quoted"]


def test_empty_input():
    assert tokenize("") == []


def test_url_sentinel():
    assert tokenize("see https://example.com/a?b=1 now") == ["see", URL_TOKEN, "now"]
    assert tokenize("go to www.example.com please") == ["go", "to", URL_TOKEN, "please"]


def test_quote_per_line():
    text = "> first quote\nplain words\n>> nested quote"
    assert tokenize(text) == [
        QUOTE_TOKEN, "first", "quote",
        "plain", "words",
        QUOTE_TOKEN, "nested", "quote",
    ]


def test_underscore_splits():
    assert tokenize("snake_case") == ["snake", "case"]


@given(st.text(max_size=200))
def test_tokens_are_lowercase_or_sentinels(text):
    for tok in tokenize(text):
        assert tok in (QUOTE_TOKEN, URL_TOKEN) or tok == tok.lower()


@given(st.text(max_size=200))
def test_deterministic(text):
    assert tokenize(text) == tokenize(text)
