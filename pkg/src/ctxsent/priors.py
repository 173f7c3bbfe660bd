"""Per-category sentiment counts and the smoothed context likelihoods built on them.

Each of the five context categories is treated as an independent feature:

    log Pr(C | s) = sum_c log Pr(cell_c | s)
    Pr(cell | s) = (n_s(cell) + 1) / (N_s(category) + #cells)

Authors with fewer than ``author_min_tweets`` training tweets (and unseen
authors) contribute nothing, leaving the other categories to set the prior.
Their tweets still count in the author-category totals, as one pooled cell,
so an eligible author's likelihood ratio compares that author with the whole
corpus.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .corpus import STATES, Context, LabeledTweet, Polarity

CATEGORIES = ("state", "hour", "dow", "month", "author")
CELL_UNIVERSE = {
    "state": STATES,
    "hour": tuple(range(24)),
    "dow": tuple(range(7)),
    "month": tuple(range(1, 13)),
}
AUTHOR_MIN_TWEETS = 50
LAPLACE_ALPHA = 1.0

# Sentinel cell for authors under the tweet threshold; never a real author id.
_SMALL_AUTHORS = ("small-authors",)

FORMAT_NAME = "ctxsent-context"
FORMAT_VERSION = 1


class ReportRow(NamedTuple):
    cell: object
    avg_sentiment: float | None
    count: int


@dataclass
class ContextTable:
    """Positive/negative tweet counts per cell of every context category."""

    cells: dict[str, dict[object, list[int]]]
    pos_total: int
    neg_total: int
    author_min_tweets: int = AUTHOR_MIN_TWEETS
    _loglik: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        for category in CATEGORIES:
            self.cells.setdefault(category, {})
        for category, universe in CELL_UNIVERSE.items():
            self._loglik[category] = self._smoothed(self.cells[category], universe)
        authors = self.cells["author"]
        eligible = sorted(a for a, (p, n) in authors.items() if p + n >= self.author_min_tweets)
        # Tweets by small authors form one pooled cell so the author
        # likelihoods are normalized against the whole corpus.
        pooled = {a: authors[a] for a in eligible}
        pooled[_SMALL_AUTHORS] = [
            self.pos_total - sum(authors[a][0] for a in eligible),
            self.neg_total - sum(authors[a][1] for a in eligible),
        ]
        loglik = self._smoothed(pooled, eligible + [_SMALL_AUTHORS])
        # The pooled cell itself is neutral: small authors contribute nothing.
        del loglik[_SMALL_AUTHORS]
        self._loglik["author"] = loglik

    @staticmethod
    def _smoothed(counts, universe):
        pos_tot = sum(counts[c][0] for c in universe if c in counts)
        neg_tot = sum(counts[c][1] for c in universe if c in counts)
        k = len(universe)
        out = {}
        for c in universe:
            p, n = counts.get(c, (0, 0))
            out[c] = (
                math.log((p + LAPLACE_ALPHA) / (pos_tot + LAPLACE_ALPHA * k)),
                math.log((n + LAPLACE_ALPHA) / (neg_tot + LAPLACE_ALPHA * k)),
            )
        return out

    @property
    def n(self) -> int:
        return self.pos_total + self.neg_total

    def counts(self, category: str, cell) -> tuple[int, int]:
        p, n = self.cells[category].get(cell, (0, 0))
        return p, n

    def is_neutral_author(self, author) -> bool:
        return author not in self._loglik["author"]

    def cell_log_likelihoods(self, category: str, cell) -> tuple[float, float] | None:
        """(log Pr(cell | pos), log Pr(cell | neg)), or None if the cell is neutral."""
        return self._loglik[category].get(cell)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "author_min_tweets": self.author_min_tweets,
            "totals": [self.pos_total, self.neg_total],
            "cells": {
                cat: [[c, p, n] for c, (p, n) in sorted(self.cells[cat].items())]
                for cat in CATEGORIES
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ContextTable":
        if d.get("format") != FORMAT_NAME or d.get("version") != FORMAT_VERSION:
            raise ValueError(
                f"unsupported context table format {d.get('format')!r} v{d.get('version')!r}"
            )
        cells = {cat: {c: [p, n] for c, p, n in rows} for cat, rows in d["cells"].items()}
        return cls(cells, d["totals"][0], d["totals"][1], d["author_min_tweets"])

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ContextTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def fit(records: Iterable[LabeledTweet], author_min_tweets: int = AUTHOR_MIN_TWEETS) -> ContextTable:
    cells = {cat: {} for cat in CATEGORIES}
    pos = neg = 0
    for rec in records:
        idx = 0 if rec.label is Polarity.POSITIVE else 1
        if idx == 0:
            pos += 1
        else:
            neg += 1
        for cat in CATEGORIES:
            cell = rec.context.get(cat)
            if cell is None:
                raise ValueError(f"record is missing context field {cat!r}")
            slot = cells[cat].setdefault(cell, [0, 0])
            slot[idx] += 1
    if pos + neg == 0:
        raise ValueError("cannot fit context priors on an empty corpus")
    return ContextTable(cells, pos, neg, author_min_tweets)


def class_prior(table: ContextTable, label: Polarity) -> float:
    share = table.pos_total / table.n
    return share if label is Polarity.POSITIVE else 1.0 - share


def context_log_likelihood(
    table: ContextTable,
    context: Context | None,
    label: Polarity,
    categories: Iterable[str] = CATEGORIES,
) -> float:
    """Sum of per-category log Pr(cell | label); neutral or missing cells add 0."""
    if context is None:
        return 0.0
    idx = 0 if label is Polarity.POSITIVE else 1
    total = 0.0
    for cat in categories:
        cell = context.get(cat)
        if cell is None:
            continue
        ll = table._loglik[cat].get(cell)
        if ll is not None:
            total += ll[idx]
    return total


def average_sentiment(table: ContextTable, category: str, cell) -> float | None:
    """Mean of +1/-1 tweet scores in the cell, None for an empty or unknown cell."""
    p, n = table.counts(category, cell)
    if p + n == 0:
        return None
    return (p - n) / (p + n)


def report(table: ContextTable, category: str) -> list[ReportRow]:
    """One row per cell, ordered by cell key; fixed categories list every cell."""
    if category not in CATEGORIES:
        raise ValueError(f"unknown category {category!r}")
    universe = CELL_UNIVERSE.get(category) or sorted(table.cells[category])
    rows = []
    for cell in universe:
        p, n = table.counts(category, cell)
        rows.append(ReportRow(cell, average_sentiment(table, category, cell), p + n))
    return rows


def report_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["cell", "avg_sentiment", "count"])
    for r in rows:
        writer.writerow([r.cell, "" if r.avg_sentiment is None else repr(r.avg_sentiment), r.count])
    return buf.getvalue()
