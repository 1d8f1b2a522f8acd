"""Text folding shared by the gazetteer, the text index and the concept lexicon."""

from __future__ import annotations

import re
import unicodedata

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# A handful of codepoints need more than one casefold/decompose pass before
# they stabilise (e.g. squared-unit signs whose decomposition is upper case),
# so fold iterates to a fixpoint instead of trusting a single pass.
_MAX_FOLD_ROUNDS = 8


def fold(text: str) -> str:
    """Lowercase `text` and strip diacritics; idempotent by construction."""
    out = text
    for _ in range(_MAX_FOLD_ROUNDS):
        prev = out
        decomposed = unicodedata.normalize("NFKD", prev.casefold())
        out = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
        if out == prev:
            break
    return out


def tokenize(text: str) -> list[str]:
    """Folded alphanumeric tokens of `text`; every other character separates tokens."""
    return _TOKEN_RE.findall(fold(text))
