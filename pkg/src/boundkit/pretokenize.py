"""Word splitting applied before subword segmentation.

Three modes:

* ``RAW``        — split on Unicode whitespace only; code points are never
                   altered, so punctuation stays glued to words.
* ``RULE_BASED`` — whitespace split, then iteratively detach leading and
                   trailing punctuation (Unicode category P*) from each word.
                   Word-internal punctuation (hyphens, apostrophes) stays put.
* ``EXTERNAL``   — input is already pre-tokenized by an outside tool and is
                   trusted as space-delimited tokens.

No normalization is ever applied: no case folding, no accent stripping, no
Unicode normalization.
"""

from __future__ import annotations

import enum
import unicodedata


class PretokMode(enum.Enum):
    RAW = "raw"
    RULE_BASED = "rules"
    EXTERNAL = "external"

    @classmethod
    def parse(cls, label: str) -> "PretokMode":
        for mode in cls:
            if mode.value == label:
                return mode
        raise ValueError(f"unknown pretokenization mode {label!r}; expected raw|rules|external")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _split_punct(word: str) -> list[str]:
    """Peel punctuation off both edges, one code point per output token."""
    leading = []
    trailing = []
    i, j = 0, len(word)
    while i < j and _is_punct(word[i]):
        leading.append(word[i])
        i += 1
    while j > i and _is_punct(word[j - 1]):
        trailing.append(word[j - 1])
        j -= 1
    core = word[i:j]
    parts = leading
    if core:
        parts.append(core)
    parts.extend(reversed(trailing))
    return parts


def pretokenize(line: str, mode: PretokMode) -> list[str]:
    """Split one line of text into words according to ``mode``.

    Empty input yields an empty list; output words are never empty.
    """
    words = line.split()
    if mode is PretokMode.RULE_BASED:
        out: list[str] = []
        for word in words:
            out.extend(_split_punct(word))
        return out
    return words
