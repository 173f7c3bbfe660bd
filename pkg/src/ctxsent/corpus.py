"""Corpus records, emoticon labelling and local-time context.

Corpus file format: UTF-8, one JSON object per line with keys ``text``
(str), ``ts`` (int, epoch seconds UTC), ``author`` (str) and ``state``
(two-letter US state code). Labels are never stored; they are derived from
the emoticons in ``text`` at ingest time.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import datetime
from functools import lru_cache
from typing import Iterator, NamedTuple
from zoneinfo import ZoneInfo

from .emoticons import (
    NEGATIVE_EMOTICONS,
    POSITIVE_EMOTICONS,
    Polarity,
    emoticon_polarities,
    label_by_emoticon,
    strip_emoticons,
)
from .preprocess import preprocess

log = logging.getLogger(__name__)

# One primary IANA zone per state. Multi-zone states use the zone covering
# most of their population.
STATE_TIMEZONES = {
    "AL": "America/Chicago",
    "AK": "America/Anchorage",
    "AZ": "America/Phoenix",
    "AR": "America/Chicago",
    "CA": "America/Los_Angeles",
    "CO": "America/Denver",
    "CT": "America/New_York",
    "DE": "America/New_York",
    "FL": "America/New_York",
    "GA": "America/New_York",
    "HI": "Pacific/Honolulu",
    "ID": "America/Boise",
    "IL": "America/Chicago",
    "IN": "America/Indiana/Indianapolis",
    "IA": "America/Chicago",
    "KS": "America/Chicago",
    "KY": "America/Kentucky/Louisville",
    "LA": "America/Chicago",
    "ME": "America/New_York",
    "MD": "America/New_York",
    "MA": "America/New_York",
    "MI": "America/Detroit",
    "MN": "America/Chicago",
    "MS": "America/Chicago",
    "MO": "America/Chicago",
    "MT": "America/Denver",
    "NE": "America/Chicago",
    "NV": "America/Los_Angeles",
    "NH": "America/New_York",
    "NJ": "America/New_York",
    "NM": "America/Denver",
    "NY": "America/New_York",
    "NC": "America/New_York",
    "ND": "America/Chicago",
    "OH": "America/New_York",
    "OK": "America/Chicago",
    "OR": "America/Los_Angeles",
    "PA": "America/New_York",
    "RI": "America/New_York",
    "SC": "America/New_York",
    "SD": "America/Chicago",
    "TN": "America/Chicago",
    "TX": "America/Chicago",
    "UT": "America/Denver",
    "VT": "America/New_York",
    "VA": "America/New_York",
    "WA": "America/Los_Angeles",
    "WV": "America/New_York",
    "WI": "America/Chicago",
    "WY": "America/Denver",
}

STATES = tuple(sorted(STATE_TIMEZONES))


class CorpusError(Exception):
    """Raised for unreadable corpora or, in strict mode, malformed lines."""


# The label carries no state beyond its polarity, so the enum is the label.
Label = Polarity


@dataclass(frozen=True)
class RawRecord:
    text: str
    timestamp_utc: int
    author_id: str
    state: str


@dataclass(frozen=True)
class Context:
    """Where, when and by whom a tweet was written. Any field may be None."""

    state: str | None = None
    hour: int | None = None
    dow: int | None = None  # 0 = Monday .. 6 = Sunday
    month: int | None = None
    author: str | None = None

    def get(self, category: str):
        return getattr(self, category)


@dataclass(frozen=True)
class LabeledTweet:
    tokens: tuple[str, ...]
    label: Polarity
    context: Context


@dataclass
class IngestStats:
    total: int = 0
    accepted: int = 0
    positive: int = 0
    discarded_conflict: int = 0
    discarded_unlabelled: int = 0
    discarded_empty: int = 0
    malformed: int = 0

    @property
    def discarded(self) -> int:
        return self.discarded_conflict + self.discarded_unlabelled + self.discarded_empty

    @property
    def positive_share(self) -> float:
        return self.positive / self.accepted if self.accepted else 0.0

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "accepted": self.accepted,
            "positive": self.positive,
            "negative": self.accepted - self.positive,
            "positive_share": self.positive_share,
            "discarded_conflict": self.discarded_conflict,
            "discarded_unlabelled": self.discarded_unlabelled,
            "discarded_empty": self.discarded_empty,
            "malformed": self.malformed,
        }


@lru_cache(maxsize=None)
def _zone(state: str) -> ZoneInfo:
    return ZoneInfo(STATE_TIMEZONES[state])


class LocalTime(NamedTuple):
    hour: int
    dow: int
    month: int


def localize(timestamp_utc: int, state: str) -> LocalTime:
    """Local wall-clock (hour, day-of-week, month) in the state's zone."""
    if state not in STATE_TIMEZONES:
        raise ValueError(f"unknown state code {state!r}")
    local = datetime.fromtimestamp(timestamp_utc, _zone(state))
    return LocalTime(local.hour, local.weekday(), local.month)


def make_context(record: RawRecord) -> Context:
    local = localize(record.timestamp_utc, record.state)
    return Context(
        state=record.state,
        hour=local.hour,
        dow=local.dow,
        month=local.month,
        author=record.author_id,
    )


def parse_record(line: str, ts_range: tuple[int, int] | None = None) -> RawRecord:
    """Parse one corpus line. Raises ValueError on any format violation."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ValueError("record is not an object")
    text, ts, author, state = (obj.get(k) for k in ("text", "ts", "author", "state"))
    if not isinstance(text, str) or not text:
        raise ValueError("'text' must be a nonempty string")
    if isinstance(ts, bool) or not isinstance(ts, int):
        raise ValueError("'ts' must be an integer")
    if not isinstance(author, str):
        raise ValueError("'author' must be a string")
    if state not in STATE_TIMEZONES:
        raise ValueError(f"unknown state code {state!r}")
    if ts_range is not None and not ts_range[0] <= ts < ts_range[1]:
        raise ValueError(f"timestamp {ts} outside corpus range")
    return RawRecord(text, ts, author, state)


def iter_corpus(
    path,
    stats: IngestStats,
    *,
    strict: bool = False,
    ts_range: tuple[int, int] | None = None,
) -> Iterator[LabeledTweet]:
    """Stream labelled tweets from a corpus file, updating ``stats`` in place.

    Blank lines are ignored and not counted.
    """
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus {path}: {exc.strerror}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            stats.total += 1
            try:
                raw = parse_record(line, ts_range)
            except ValueError as exc:
                if strict:
                    raise CorpusError(f"{path}:{lineno}: {exc}") from None
                log.debug("%s:%d: skipping malformed line: %s", path, lineno, exc)
                stats.malformed += 1
                continue
            tweet = label_record(raw, stats)
            if tweet is not None:
                yield tweet


def label_record(raw: RawRecord, stats: IngestStats | None = None) -> LabeledTweet | None:
    has_pos, has_neg = emoticon_polarities(raw.text)
    if has_pos and has_neg:
        if stats is not None:
            stats.discarded_conflict += 1
        return None
    if not (has_pos or has_neg):
        if stats is not None:
            stats.discarded_unlabelled += 1
        return None
    tokens = preprocess(raw.text)
    if not tokens:
        if stats is not None:
            stats.discarded_empty += 1
        return None
    label = Polarity.POSITIVE if has_pos else Polarity.NEGATIVE
    if stats is not None:
        stats.accepted += 1
        stats.positive += label is Polarity.POSITIVE
    return LabeledTweet(tuple(tokens), label, make_context(raw))


def ingest(path, *, strict: bool = False, ts_range=None) -> tuple[list[LabeledTweet], IngestStats]:
    stats = IngestStats()
    records = list(iter_corpus(path, stats, strict=strict, ts_range=ts_range))
    return records, stats


def write_corpus(records, path) -> None:
    """Write RawRecords in corpus format."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(raw_to_line(r))
            fh.write("\n")


def raw_to_line(r: RawRecord) -> str:
    return json.dumps(
        {"text": r.text, "ts": r.timestamp_utc, "author": r.author_id, "state": r.state},
        ensure_ascii=False,
    )
