"""Canonical tokenizer.

One tokenizer for the whole toolkit so token counts, vocabularies and
lexicon matches all agree.  Lowercases, splits on non-alphanumeric
boundaries, and collapses two markdown artifacts that would otherwise
pollute the vocabulary: leading quote markers (">", ">>>") become a
QUOTE sentinel and URLs become a URL sentinel.  Sentinels are uppercase
so they can never collide with real (lowercased) word tokens.
"""

from __future__ import annotations

import re

QUOTE_TOKEN = "QUOTE"
URL_TOKEN = "URL"

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_QUOTE_RE = re.compile(r"^\s*(?:>\s*)+")
_WORD_RE = re.compile(r"[^\W_]+")  # unicode alphanumerics, underscore excluded


def _word_tokens(segment: str) -> list[str]:
    return _WORD_RE.findall(segment.lower())


def tokenize(text: str) -> list[str]:
    """Tokenize a post deterministically.

    >>> tokenize("I disagree, man.")
    ['i', 'disagree', 'man']
    >>> tokenize(">>> I did.")
    ['QUOTE', 'i', 'did']
    """
    tokens: list[str] = []
    for line in text.splitlines():
        m = _QUOTE_RE.match(line)
        if m:
            tokens.append(QUOTE_TOKEN)
            line = line[m.end():]
        pos = 0
        for um in _URL_RE.finditer(line):
            tokens.extend(_word_tokens(line[pos:um.start()]))
            tokens.append(URL_TOKEN)
            pos = um.end()
        tokens.extend(_word_tokens(line[pos:]))
    return tokens
