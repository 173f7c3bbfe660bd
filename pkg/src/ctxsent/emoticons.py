"""The six distant-supervision emoticons: labelling and stripping."""

from __future__ import annotations

import enum
import re

POSITIVE_EMOTICONS = (":)", ":-)", ": )")
NEGATIVE_EMOTICONS = (":(", ":-(", ": (")

# Longest alternatives first so ":-)" is consumed whole.
_EMOTICON_RE = re.compile(
    "|".join(
        re.escape(e)
        for e in sorted(POSITIVE_EMOTICONS + NEGATIVE_EMOTICONS, key=len, reverse=True)
    )
)


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    @property
    def score(self) -> int:
        return 1 if self is Polarity.POSITIVE else -1

    def __str__(self) -> str:
        return self.value


def emoticon_polarities(text: str) -> tuple[bool, bool]:
    pos = neg = False
    for m in _EMOTICON_RE.finditer(text):
        if m.group() in POSITIVE_EMOTICONS:
            pos = True
        else:
            neg = True
    return pos, neg


def label_by_emoticon(text: str) -> Polarity | None:
    """Distant-supervision label from the six emoticons.

    Returns None when the text carries no emoticon or carries both
    polarities.
    """
    pos, neg = emoticon_polarities(text)
    if pos == neg:
        return None
    return Polarity.POSITIVE if pos else Polarity.NEGATIVE


def strip_emoticons(text: str) -> str:
    # Removal can splice a new emoticon together (e.g. "::))"), so repeat
    # until nothing matches.
    while True:
        stripped = _EMOTICON_RE.sub("", text)
        if stripped == text:
            return text
        text = stripped
