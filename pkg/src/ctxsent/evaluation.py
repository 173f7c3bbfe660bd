"""Cross-validation harness, classification metrics and agreement statistics."""

from __future__ import annotations

import csv
import io
import logging
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from scipy import stats

from .classifier import TrainingError, train_classifier
from .corpus import LabeledTweet, Polarity
from .ngram import MIN_COUNT
from .priors import AUTHOR_MIN_TWEETS, CATEGORIES

log = logging.getLogger(__name__)


# -- metrics ---------------------------------------------------------------


@dataclass(frozen=True)
class Confusion:
    """2x2 confusion counts with Positive as the reference class."""

    tp: int = 0
    fn: int = 0
    fp: int = 0
    tn: int = 0

    @classmethod
    def from_labels(cls, truth: Sequence[Polarity], predicted: Sequence[Polarity]) -> "Confusion":
        if len(truth) != len(predicted):
            raise ValueError("truth and predictions differ in length")
        c = Counter(zip(truth, predicted))
        P, N = Polarity.POSITIVE, Polarity.NEGATIVE
        return cls(c[P, P], c[P, N], c[N, P], c[N, N])

    def __add__(self, other: "Confusion") -> "Confusion":
        return Confusion(
            self.tp + other.tp, self.fn + other.fn, self.fp + other.fp, self.tn + other.tn
        )

    @property
    def n(self) -> int:
        return self.tp + self.fn + self.fp + self.tn

    def as_matrix(self) -> list[list[int]]:
        """Rows are true labels, columns predictions, both ordered (pos, neg)."""
        return [[self.tp, self.fn], [self.fp, self.tn]]


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


def _prf(tp: int, fp: int, fn: int) -> ClassMetrics:
    # Undefined ratios (no predictions / no instances) are reported as 0.
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return ClassMetrics(p, r, f1)


@dataclass(frozen=True)
class EvalReport:
    name: str
    confusion: Confusion
    fold_confusions: tuple[Confusion, ...] = ()

    @property
    def n(self) -> int:
        return self.confusion.n

    @property
    def accuracy(self) -> float:
        c = self.confusion
        return (c.tp + c.tn) / c.n if c.n else 0.0

    @property
    def positive(self) -> ClassMetrics:
        c = self.confusion
        return _prf(c.tp, c.fp, c.fn)

    @property
    def negative(self) -> ClassMetrics:
        c = self.confusion
        return _prf(c.tn, c.fn, c.fp)


def format_accuracy_table(reports: Sequence[EvalReport]) -> str:
    width = max([len("Model")] + [len(r.name) for r in reports])
    lines = [f"{'Model':<{width}}  Accuracy", "-" * (width + 10)]
    for r in reports:
        lines.append(f"{r.name:<{width}}  {r.accuracy:.3f}")
    return "\n".join(lines)


def format_class_table(report: EvalReport) -> str:
    lines = [f"{'Class':<9} Precision  Recall  F1 Score", "-" * 36]
    for name, m in (("Positive", report.positive), ("Negative", report.negative)):
        lines.append(f"{name:<9} {m.precision:9.3f}  {m.recall:6.3f}  {m.f1:8.3f}")
    return "\n".join(lines)


def reports_csv(reports: Sequence[EvalReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(
        ["model", "n", "accuracy", "pos_precision", "pos_recall", "pos_f1",
         "neg_precision", "neg_recall", "neg_f1", "tp", "fn", "fp", "tn"]
    )
    for r in reports:
        c = r.confusion
        w.writerow(
            [r.name, r.n, repr(r.accuracy),
             *(repr(v) for v in (r.positive.precision, r.positive.recall, r.positive.f1)),
             *(repr(v) for v in (r.negative.precision, r.negative.recall, r.negative.f1)),
             c.tp, c.fn, c.fp, c.tn]
        )
    return buf.getvalue()


# -- cross-validation ------------------------------------------------------


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignment: tuple[int, ...]  # record index -> fold id

    def test_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f == fold]

    def train_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.assignment) if f != fold]

    def sizes(self) -> list[int]:
        c = Counter(self.assignment)
        return [c[f] for f in range(self.k)]


def kfold(corpus, k: int = 5, seed: int = 0) -> FoldPlan:
    """Seeded shuffled partition into k folds whose sizes differ by at most one.

    ``corpus`` may be a sequence or its length.
    """
    n = corpus if isinstance(corpus, int) else len(corpus)
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise ValueError(f"corpus of {n} records is smaller than k={k}")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    assignment = [0] * n
    for pos, idx in enumerate(order):
        assignment[idx] = pos % k
    return FoldPlan(k, seed, tuple(assignment))


@dataclass(frozen=True)
class ClassifierSpec:
    """A named classifier configuration to be trained inside each fold.

    ``kind`` is "majority" or "bigram"; ``categories`` None means the
    purely linguistic model.
    """

    name: str
    kind: str = "bigram"
    categories: tuple[str, ...] | None = None
    author_min_tweets: int = AUTHOR_MIN_TWEETS
    min_count: int = MIN_COUNT
    use_bos: bool = True

    def __post_init__(self):
        if self.kind not in ("majority", "bigram"):
            raise ValueError(f"unknown classifier kind {self.kind!r}")


_SINGLE_NAMES = {"state": "State", "hour": "Hour", "dow": "DoW", "month": "Month", "author": "Author"}


def standard_specs(author_min_tweets: int = AUTHOR_MIN_TWEETS, use_bos: bool = True) -> list[ClassifierSpec]:
    """Majority, bigram, each single category, all categories, all but state."""
    common = dict(author_min_tweets=author_min_tweets, use_bos=use_bos)
    specs = [
        ClassifierSpec("Baseline-Majority", kind="majority", **common),
        ClassifierSpec("Baseline-Bigram", **common),
    ]
    for cat in CATEGORIES:
        specs.append(ClassifierSpec(f"Contextual-{_SINGLE_NAMES[cat]}", categories=(cat,), **common))
    specs.append(ClassifierSpec("Contextual-All", categories=CATEGORIES, **common))
    specs.append(
        ClassifierSpec(
            "Contextual-NoState", categories=tuple(c for c in CATEGORIES if c != "state"), **common
        )
    )
    return specs


@dataclass
class _FoldCache:
    classifiers: dict = field(default_factory=dict)
    lm_scores: dict = field(default_factory=dict)


def _fold_predictions(spec, train, test, cache: _FoldCache) -> list[Polarity]:
    if spec.kind == "majority":
        n_pos = sum(r.label is Polarity.POSITIVE for r in train)
        if n_pos == 0 or n_pos == len(train):
            raise TrainingError("training fold contains a single class")
        label = Polarity.POSITIVE if 2 * n_pos >= len(train) else Polarity.NEGATIVE
        return [label] * len(test)
    key = (spec.min_count, spec.use_bos, spec.author_min_tweets)
    clf = cache.classifiers.get(key)
    if clf is None:
        clf = train_classifier(
            train,
            author_min_tweets=spec.author_min_tweets,
            min_count=spec.min_count,
            use_bos=spec.use_bos,
        )
        cache.classifiers[key] = clf
    lm_key = key[:2]
    scores = cache.lm_scores.get(lm_key)
    if scores is None:
        scores = [clf.language_scores(r.tokens) for r in test]
        cache.lm_scores[lm_key] = scores
    variant = clf.with_categories(spec.categories)
    return [variant.decide(sp, sn, r.context).label for (sp, sn), r in zip(scores, test)]


def evaluate_many(
    specs: Sequence[ClassifierSpec], corpus: Sequence[LabeledTweet], plan: FoldPlan
) -> list[EvalReport]:
    """Cross-validate several classifiers on the same folds.

    Everything (vocabulary, language models, context counts) is refit from
    the training folds alone; test-fold tweets never touch any estimate.
    Metrics are pooled over all held-out predictions.
    """
    if len(plan.assignment) != len(corpus):
        raise ValueError("fold plan does not match corpus size")
    per_spec = {s.name: [] for s in specs}
    for fold in range(plan.k):
        train = [corpus[i] for i in plan.train_indices(fold)]
        test = [corpus[i] for i in plan.test_indices(fold)]
        truth = [r.label for r in test]
        cache = _FoldCache()
        for spec in specs:
            try:
                pred = _fold_predictions(spec, train, test, cache)
            except TrainingError as exc:
                raise TrainingError(f"fold {fold}: {exc}") from None
            per_spec[spec.name].append(Confusion.from_labels(truth, pred))
        log.info("fold %d/%d done (%d train, %d test)", fold + 1, plan.k, len(train), len(test))
    reports = []
    for spec in specs:
        folds = tuple(per_spec[spec.name])
        total = Confusion()
        for c in folds:
            total = total + c
        reports.append(EvalReport(spec.name, total, folds))
    return reports


def evaluate(spec: ClassifierSpec, corpus: Sequence[LabeledTweet], plan: FoldPlan) -> EvalReport:
    return evaluate_many([spec], corpus, plan)[0]


# -- agreement and correlation ---------------------------------------------


def fleiss_kappa_counts(counts: Sequence[Sequence[int]]) -> float:
    """Fleiss' kappa from an items x categories matrix of rater counts."""
    if not counts:
        raise ValueError("no items")
    n_raters = sum(counts[0])
    if n_raters < 2:
        raise ValueError("need at least two ratings per item")
    if any(sum(row) != n_raters for row in counts):
        raise ValueError("every item must be rated by the same number of raters")
    n_items = len(counts)
    n_cats = len(counts[0])
    p_bar = sum(
        (sum(x * x for x in row) - n_raters) / (n_raters * (n_raters - 1)) for row in counts
    ) / n_items
    p_j = [sum(row[j] for row in counts) / (n_items * n_raters) for j in range(n_cats)]
    p_e = sum(p * p for p in p_j)
    if p_e == 1.0:
        # Every rating fell in one category: agreement is total, chance is total.
        return 1.0
    return (p_bar - p_e) / (1.0 - p_e)


def fleiss_kappa(ratings: Sequence[Sequence[Hashable]]) -> float:
    """Fleiss' kappa from per-item lists of the categories each rater chose."""
    if not ratings:
        raise ValueError("no items")
    sizes = {len(r) for r in ratings}
    if len(sizes) != 1:
        raise ValueError("every item must be rated by the same number of raters")
    categories = sorted({c for r in ratings for c in r}, key=repr)
    counts = []
    for r in ratings:
        c = Counter(r)
        counts.append([c[cat] for cat in categories])
    return fleiss_kappa_counts(counts)


def pearson_r(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Sample Pearson correlation and its two-sided p-value (t test, n-2 df)."""
    n = len(x)
    if n != len(y):
        raise ValueError("x and y differ in length")
    if n < 3:
        raise ValueError("need at least three points")
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    dx = [a - mx for a in x]
    dy = [b - my for b in y]
    sxx = math.fsum(a * a for a in dx)
    syy = math.fsum(b * b for b in dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("correlation undefined for zero variance")
    r = math.fsum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return r, float(2.0 * stats.t.sf(abs(t), n - 2))
