import math
import random

import pytest

from ctxsent.classifier import (
    SentimentClassifier,
    TrainingError,
    parse_categories,
    train_classifier,
)
from ctxsent.corpus import Context
from ctxsent.priors import CATEGORIES, ContextTable, fit

from factories import NEG, POS, as_oracle_rows, random_tweets, tweet
from oracles import bayes_margin


def small_corpus():
    good = [tweet(["love", "it"], True, state="CA") for _ in range(12)]
    bad = [tweet(["hate", "it"], False, state="NY") for _ in range(8)]
    return good + bad


class TestCategories:
    def test_parse(self):
        assert parse_categories("month, state") == ("state", "month")
        assert parse_categories(["author"]) == ("author",)
        assert parse_categories("") == ()
        assert parse_categories(None) == ()

    def test_unknown(self):
        with pytest.raises(ValueError, match="weather"):
            parse_categories("state,weather")


class TestClassify:
    def test_prior_only_decision(self):
        tweets = [tweet(["w"], i < 62) for i in range(100)]
        clf = train_classifier(tweets)
        pred = clf.classify([])
        assert pred.label is POS
        assert pred.margin == pytest.approx(math.log(0.62 / 0.38), abs=1e-12)

    def test_mirror_corpus(self):
        pos = [tweet(["good", "day"], True) for _ in range(10)] + [tweet(["bad", "day"], True)] * 2
        neg = [tweet(["bad", "day"], False) for _ in range(10)] + [tweet(["good", "day"], False)] * 2
        clf = train_classifier(pos + neg)
        assert clf.classify(["good", "day"]).label is POS
        assert clf.classify(["bad", "day"]).label is NEG
        assert clf.classify(["good", "day"]).margin == pytest.approx(
            -clf.classify(["bad", "day"]).margin, abs=1e-12
        )

    def test_tie_goes_positive(self):
        tweets = [tweet(["w"], True), tweet(["w"], False)]
        clf = train_classifier(tweets, min_count=1)
        pred = clf.classify(["w"])
        assert pred.margin == 0.0
        assert pred.label is POS

    def test_single_class_rejected(self):
        with pytest.raises(TrainingError):
            train_classifier([tweet(positive=True)] * 5)

    def test_context_shifts_decision(self):
        clf = train_classifier(small_corpus(), min_count=1)
        baseline = clf.with_categories(None)
        contextual = clf.with_categories(["state"])
        m0 = baseline.classify(["it"], Context(state="NY")).margin
        m1 = contextual.classify(["it"], Context(state="NY")).margin
        assert m1 < m0

    @pytest.mark.parametrize("seed", range(5))
    def test_empty_subset_equals_baseline(self, seed):
        rng = random.Random(seed)
        tweets = random_tweets(rng, 80)
        clf = train_classifier(tweets, min_count=2)
        base = clf.with_categories(None)
        empty = clf.with_categories(())
        for t in tweets:
            assert base.classify(t.tokens, t.context) == empty.classify(t.tokens, t.context)

    def test_baseline_ignores_context(self):
        clf = train_classifier(small_corpus(), min_count=1).with_categories(None)
        assert clf.classify(["it"], Context(state="NY")) == clf.classify(["it"], None)

    def test_argmax_invariance_under_shift(self):
        rng = random.Random(8)
        tweets = random_tweets(rng, 100)
        clf = train_classifier(tweets, CATEGORIES, min_count=2)
        for t in tweets[:30]:
            sp, sn = clf.language_scores(t.tokens)
            base = clf.decide(sp, sn, t.context)
            for c in (-1e3, -7.5, 0.25, 40.0):
                assert clf.decide(sp + c, sn + c, t.context).label is base.label

    def test_monotone_state_prior(self):
        rng = random.Random(12)
        tweets = random_tweets(rng, 150)
        clf = train_classifier(tweets, ["state"], min_count=2)
        for t in tweets[:40]:
            before = clf.classify(t.tokens, t.context)
            if before.label is not POS:
                continue
            cells = {c: {k: list(v) for k, v in d.items()} for c, d in clf.table.cells.items()}
            cells["state"].setdefault(t.context.state, [0, 0])[0] += 5
            bumped = ContextTable(cells, clf.table.pos_total + 5, clf.table.neg_total)
            # Hold the class prior fixed: only the state cell moves.
            after_ll = bumped.cell_log_likelihoods("state", t.context.state)
            before_ll = clf.table.cell_log_likelihoods("state", t.context.state)
            sp, sn = clf.language_scores(t.tokens)
            prior = math.log(clf.table.pos_total / clf.table.n) - math.log(clf.table.neg_total / clf.table.n)
            margin_after = sp - sn + prior + after_ll[0] - after_ll[1]
            assert after_ll[0] - after_ll[1] >= before_ll[0] - before_ll[1]
            assert margin_after >= before.margin - 1e-12

    def test_long_input_no_underflow(self):
        clf = train_classifier(small_corpus(), CATEGORIES, min_count=1)
        tokens = ["love", "it", "unknownword"] * 3334
        pred = clf.classify(tokens, Context("CA", 1, 2, 3, "a"))
        assert math.isfinite(pred.margin)
        sp, sn = clf.language_scores(tokens)
        assert math.isfinite(sp) and math.isfinite(sn) and sp < -1000


class TestBatch:
    def setup_method(self):
        rng = random.Random(21)
        self.tweets = random_tweets(rng, 1000, n_authors=10)
        self.clf = train_classifier(self.tweets, CATEGORIES, author_min_tweets=60)

    def test_empty(self):
        assert self.clf.classify_batch([]) == []

    def test_matches_sequential(self):
        batch = self.clf.classify_batch(self.tweets)
        assert batch == [self.clf.classify(t.tokens, t.context) for t in self.tweets]

    def test_concatenation(self):
        a, b = self.tweets[:300], self.tweets[300:]
        assert self.clf.classify_batch(a + b) == self.clf.classify_batch(a) + self.clf.classify_batch(b)

    def test_pairs(self):
        pairs = [(t.tokens, t.context) for t in self.tweets[:20]]
        assert self.clf.classify_batch(pairs) == self.clf.classify_batch(self.tweets[:20])


@pytest.mark.parametrize("seed", range(8))
def test_matches_bayes_oracle(seed):
    rng = random.Random(100 + seed)
    tweets = random_tweets(rng, 20, n_authors=2, words="abcd")
    while len({t.label for t in tweets}) < 2:
        tweets = random_tweets(rng, 20, n_authors=2, words="abcd")
    cats = rng.choice([None, (), ("state",), ("hour", "author"), CATEGORIES])
    clf = train_classifier(tweets, cats, author_min_tweets=5, min_count=2)
    rows = as_oracle_rows(tweets)
    for toks, _, ctx in rows:
        expected = bayes_margin(rows, toks, ctx, cats, author_min=5, min_count=2)
        got = clf.classify(toks, Context(**ctx))
        assert abs(got.margin - expected) <= 1e-10
        assert got.label is (POS if expected >= 0 else NEG)
