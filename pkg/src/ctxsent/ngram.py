"""Interpolated Kneser-Ney bigram language model.

    P(w|h) = max(c(h,w) - D, 0) / c(h) + D * N1+(h.) / c(h) * Pcont(w)
    Pcont(w) = N1+(.w) / N1+(..)

An unseen history backs off to Pcont(w) alone. Tokens outside the
vocabulary are scored as UNK.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

UNK = "<unk>"
BOS = "<s>"
UNK_ID = 0
BOS_ID = 1

MIN_COUNT = 6
DEFAULT_DISCOUNT = 0.75
FORMAT_NAME = "ctxsent-bigram"
FORMAT_VERSION = 1


class EmptyCorpusError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    """Token/id map. Id 0 is UNK, id 1 is BOS, the rest follow in sorted order."""

    tokens: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.tokens[:2] != (UNK, BOS):
            raise ValueError("vocabulary must start with UNK, BOS")
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tokens)})

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Vocabulary":
        return cls((UNK, BOS) + tuple(sorted(set(words) - {UNK, BOS})))

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    def id(self, token: str) -> int:
        return self.index.get(token, UNK_ID)

    def encode(self, tokens: Sequence[str]) -> list[int]:
        get = self.index.get
        return [get(t, UNK_ID) for t in tokens]


def build_vocabulary(sequences: Iterable[Sequence[str]], min_count: int = MIN_COUNT) -> Vocabulary:
    """Keep tokens seen at least ``min_count`` times across the corpus."""
    counts = Counter()
    n_seqs = 0
    for seq in sequences:
        counts.update(seq)
        n_seqs += 1
    if n_seqs == 0:
        raise EmptyCorpusError("cannot build a vocabulary from an empty corpus")
    return Vocabulary.from_words(t for t, c in counts.items() if c >= min_count)


def estimate_discount(bigram_counts: Iterable[int]) -> float:
    """Absolute discount n1 / (n1 + 2 n2) from bigram count-of-counts.

    Falls back to 0.75 whenever the estimate leaves the open interval (0, 1),
    which happens when there are no singletons or no doubletons.
    """
    coc = Counter(c for c in bigram_counts if c <= 2)
    n1, n2 = coc[1], coc[2]
    if n1 == 0 or n2 == 0:
        return DEFAULT_DISCOUNT
    return n1 / (n1 + 2 * n2)


class BigramModel:
    """Trained bigram counts plus the derived Kneser-Ney statistics.

    ``history_counts[h]`` is c(h), the number of bigrams whose left token is
    h; with no end-of-sentence marker it differs from ``unigram_counts[h]``
    by the number of sequences ending in h.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        bigram_counts: dict[tuple[int, int], int],
        unigram_counts: Sequence[int],
        discount: float,
        use_bos: bool = True,
    ):
        if not 0.0 < discount < 1.0:
            raise ValueError(f"discount must lie in (0, 1), got {discount}")
        v = len(vocab)
        self.vocab = vocab
        self.bigram_counts = bigram_counts
        self.unigram_counts = list(unigram_counts)
        self.discount = discount
        self.use_bos = use_bos
        self.total_tokens = sum(self.unigram_counts)

        hist = [0] * v
        n1p = [0] * v
        cont = [0] * v
        for (h, w), c in bigram_counts.items():
            hist[h] += c
            n1p[h] += 1
            cont[w] += 1
        # Floor so UNK never gets zero mass.
        if cont[UNK_ID] == 0:
            cont[UNK_ID] = 1
        self.history_counts = hist
        self.followers = n1p
        self.continuation_counts = cont
        self.continuation_total = sum(cont)
        # Per-history backoff weight D * N1+(h.) / c(h).
        self._gamma = [discount * n / c if c else 0.0 for n, c in zip(n1p, hist)]

    def prob_ids(self, h: int, w: int) -> float:
        pcont = self.continuation_counts[w] / self.continuation_total
        ch = self.history_counts[h]
        if ch == 0:
            return pcont
        c = self.bigram_counts.get((h, w), 0)
        return max(c - self.discount, 0.0) / ch + self._gamma[h] * pcont

    def prob(self, history: str, token: str) -> float:
        return self.prob_ids(self.vocab.id(history), self.vocab.id(token))

    def log_prob(self, history: str, token: str) -> float:
        p = self.prob(history, token)
        return math.log(p) if p > 0.0 else -math.inf

    def score_ids(self, ids: Sequence[int]) -> float:
        if self.use_bos:
            ids = [BOS_ID, *ids]
        cont = self.continuation_counts
        ctot = self.continuation_total
        hist = self.history_counts
        gamma = self._gamma
        bigrams = self.bigram_counts
        d = self.discount
        log = math.log
        total = 0.0
        for h, w in zip(ids, ids[1:]):
            pcont = cont[w] / ctot
            ch = hist[h]
            if ch == 0:
                total += log(pcont)
            else:
                c = bigrams.get((h, w), 0)
                total += log(max(c - d, 0.0) / ch + gamma[h] * pcont)
        return total

    def score_sequence(self, tokens: Sequence[str]) -> float:
        """Sum of log P(w_i | w_{i-1}) over the sequence; 0.0 when empty."""
        return self.score_ids(self.vocab.encode(tokens))

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "discount": self.discount,
            "use_bos": self.use_bos,
            "vocab": list(self.vocab.tokens),
            "unigram_counts": self.unigram_counts,
            "bigrams": [[h, w, c] for (h, w), c in sorted(self.bigram_counts.items())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BigramModel":
        if d.get("format") != FORMAT_NAME or d.get("version") != FORMAT_VERSION:
            raise ValueError(
                f"unsupported model format {d.get('format')!r} v{d.get('version')!r}"
            )
        return cls(
            Vocabulary(tuple(d["vocab"])),
            {(h, w): c for h, w, c in d["bigrams"]},
            d["unigram_counts"],
            d["discount"],
            d["use_bos"],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "BigramModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def train_bigram(
    sequences: Iterable[Sequence[str]],
    vocab: Vocabulary,
    *,
    discount: float | None = None,
    use_bos: bool = True,
) -> BigramModel:
    """Count unigrams and bigrams (OOV mapped to UNK) and fit the discount."""
    unigrams = [0] * len(vocab)
    bigrams: Counter = Counter()
    n_seqs = 0
    for seq in sequences:
        n_seqs += 1
        ids = vocab.encode(seq)
        for i in ids:
            unigrams[i] += 1
        if use_bos:
            ids = [BOS_ID, *ids]
        bigrams.update(zip(ids, ids[1:]))
    if n_seqs == 0:
        raise EmptyCorpusError("cannot train a language model on an empty corpus")
    if discount is None:
        discount = estimate_discount(bigrams.values())
    return BigramModel(vocab, dict(bigrams), unigrams, discount, use_bos)
