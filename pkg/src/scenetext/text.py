"""Word tokenization shared by grammar learning, realization checks and ROUGE."""

from __future__ import annotations

import string

_STRIP = string.punctuation


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip punctuation at token edges.

    Inner hyphens and apostrophes survive ("fire-extinguisher"), tokens that
    are pure punctuation disappear.
    """
    out = []
    for raw in text.lower().split():
        tok = raw.strip(_STRIP)
        if tok:
            out.append(tok)
    return out
