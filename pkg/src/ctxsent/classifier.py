"""Two-hypothesis Bayesian polarity classifier.

    score(s) = log Pr(W | s) + log Pr(s) [+ log Pr(C | s)]

The bracketed term is present only in contextual mode, restricted to the
enabled categories. Decisions go to the larger score; ties go Positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

from .corpus import Context, LabeledTweet, Polarity
from .ngram import MIN_COUNT, BigramModel, Vocabulary, build_vocabulary, train_bigram
from .priors import AUTHOR_MIN_TWEETS, CATEGORIES, ContextTable, context_log_likelihood, fit


class TrainingError(ValueError):
    """Training data cannot support a two-class model."""


class Prediction(NamedTuple):
    label: Polarity
    margin: float  # score(positive) - score(negative)


def parse_categories(spec: str | Iterable[str] | None) -> tuple[str, ...]:
    """Validate a category subset, returned in canonical order."""
    if spec is None:
        return ()
    if isinstance(spec, str):
        spec = [s.strip() for s in spec.split(",") if s.strip()]
    chosen = set(spec)
    unknown = chosen - set(CATEGORIES)
    if unknown:
        raise ValueError(f"unknown context categories: {', '.join(sorted(unknown))}")
    return tuple(c for c in CATEGORIES if c in chosen)


@dataclass(frozen=True)
class SentimentClassifier:
    pos_model: BigramModel
    neg_model: BigramModel
    table: ContextTable
    # None selects baseline mode; a tuple (possibly empty) selects contextual.
    categories: tuple[str, ...] | None = None

    @property
    def mode(self) -> str:
        return "baseline" if self.categories is None else "contextual"

    def with_categories(self, categories) -> "SentimentClassifier":
        """Same trained state, different mode. ``None`` means baseline."""
        cats = None if categories is None else parse_categories(categories)
        return replace(self, categories=cats)

    def language_scores(self, tokens: Sequence[str]) -> tuple[float, float]:
        return self.pos_model.score_sequence(tokens), self.neg_model.score_sequence(tokens)

    def decide(self, lm_pos: float, lm_neg: float, context: Context | None) -> Prediction:
        prior_pos = self.table.pos_total / self.table.n
        pos = lm_pos + math.log(prior_pos)
        neg = lm_neg + math.log(1.0 - prior_pos)
        if self.categories:
            pos += context_log_likelihood(self.table, context, Polarity.POSITIVE, self.categories)
            neg += context_log_likelihood(self.table, context, Polarity.NEGATIVE, self.categories)
        margin = pos - neg
        return Prediction(Polarity.POSITIVE if margin >= 0.0 else Polarity.NEGATIVE, margin)

    def classify(self, tokens: Sequence[str], context: Context | None = None) -> Prediction:
        return self.decide(*self.language_scores(tokens), context)

    def classify_batch(self, records: Iterable) -> list[Prediction]:
        """Classify LabeledTweets or (tokens, context) pairs, preserving order."""
        out = []
        for rec in records:
            if isinstance(rec, LabeledTweet):
                out.append(self.classify(rec.tokens, rec.context))
            else:
                tokens, context = rec
                out.append(self.classify(tokens, context))
        return out


def _class_vocabulary(vocab: Vocabulary, sequences, use_bos: bool) -> Vocabulary:
    """Shared vocabulary narrowed to the words this class ever predicts.

    A shared word the class never predicts would have zero continuation
    count, hence probability 0; mapping it to UNK keeps every score finite.
    """
    start = 0 if use_bos else 1
    targets = {t for seq in sequences for t in seq[start:]}
    return Vocabulary.from_words(t for t in vocab.tokens[2:] if t in targets)


def train_classifier(
    records: Sequence[LabeledTweet],
    categories=None,
    *,
    author_min_tweets: int = AUTHOR_MIN_TWEETS,
    min_count: int = MIN_COUNT,
    use_bos: bool = True,
    discount: float | None = None,
) -> SentimentClassifier:
    """Fit the shared vocabulary, both class language models and the context table."""
    pos = [r.tokens for r in records if r.label is Polarity.POSITIVE]
    neg = [r.tokens for r in records if r.label is Polarity.NEGATIVE]
    if not pos or not neg:
        raise TrainingError(
            f"training data needs both classes (got {len(pos)} positive, {len(neg)} negative)"
        )
    vocab = build_vocabulary((r.tokens for r in records), min_count)
    clf = SentimentClassifier(
        train_bigram(pos, _class_vocabulary(vocab, pos, use_bos), discount=discount, use_bos=use_bos),
        train_bigram(neg, _class_vocabulary(vocab, neg, use_bos), discount=discount, use_bos=use_bos),
        fit(records, author_min_tweets),
    )
    return clf.with_categories(categories)
