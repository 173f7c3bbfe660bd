"""Synthetic labelled corpora with known context effects.

Each tweet draws a state and a UTC timestamp uniformly and an author from a
Zipf distribution. Its positive probability is

    sigmoid(logit(base_positive_rate) + sum of per-category cell shifts)

clamped to [0.01, 0.99]. Words come from one of two class-conditional
unigram distributions over a shared pseudo-word lexicon, and the text ends
with an emoticon of the sampled polarity so the file can be ingested like a
real distant-supervision corpus.

Config files are flat ``key = value`` lines (``#`` starts a comment)::

    n_tweets = 100000
    seed = 7
    effect_sd.state = 1.2      # per-cell shifts drawn from N(0, sd)
    shift.state.CA = 0.5       # explicit shift, overrides the random draw
    shift.dow.4 = 0.3
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone

import numpy as np

from .corpus import STATES, RawRecord, localize, raw_to_line
from .emoticons import NEGATIVE_EMOTICONS, POSITIVE_EMOTICONS
from .porter import stem
from .priors import CATEGORIES, CELL_UNIVERSE

_CLAMP = (0.01, 0.99)
_CONSONANTS = "bdfgklmnprtvz"
_VOWELS = "aiou"


def _epoch(year: int) -> int:
    return int(datetime(year, 1, 1, tzinfo=timezone.utc).timestamp())


@dataclass
class SynthConfig:
    n_tweets: int = 100_000
    seed: int = 0
    base_positive_rate: float = 0.62
    lexicon_size: int = 400
    # Spread of per-word log(P_pos / P_neg); larger means easier text.
    word_separation: float = 1.0
    length_min: int = 3
    length_max: int = 10
    n_authors: int = 5_000
    zipf_exponent: float = 1.1
    noise_rate: float = 0.05
    # Spread of an extra state x hour effect that the classifier cannot model.
    interaction_sd: float = 0.0
    start_ts: int = field(default_factory=lambda: _epoch(2012))
    end_ts: int = field(default_factory=lambda: _epoch(2015))
    effect_sd: dict[str, float] = field(default_factory=dict)
    shifts: dict[str, dict] = field(default_factory=dict)

    def validate(self) -> None:
        if self.n_tweets <= 0:
            raise ValueError("n_tweets must be positive")
        if not 0.0 < self.base_positive_rate < 1.0:
            raise ValueError("base_positive_rate must lie in (0, 1)")
        if self.lexicon_size < 2:
            raise ValueError("lexicon_size must be at least 2")
        if not 1 <= self.length_min <= self.length_max:
            raise ValueError("need 1 <= length_min <= length_max")
        if self.n_authors < 1:
            raise ValueError("n_authors must be positive")
        if self.zipf_exponent <= 0:
            raise ValueError("zipf_exponent must be positive")
        if not 0.0 <= self.noise_rate <= 1.0:
            raise ValueError("noise_rate must lie in [0, 1]")
        if self.start_ts >= self.end_ts:
            raise ValueError("start_ts must precede end_ts")
        for cat in list(self.effect_sd) + list(self.shifts):
            if cat not in CATEGORIES:
                raise ValueError(f"unknown category {cat!r}")
        for cat, cells in self.shifts.items():
            universe = CELL_UNIVERSE.get(cat)
            for cell in cells:
                if universe is not None and cell not in universe:
                    raise ValueError(f"unknown {cat} cell {cell!r}")


def benchmark_config(n_tweets: int = 100_000, seed: int = 0) -> SynthConfig:
    """State strongest, hour next, month and day-of-week weakest, heavy authors."""
    return SynthConfig(
        n_tweets=n_tweets,
        seed=seed,
        word_separation=0.8,
        effect_sd={"state": 1.0, "hour": 0.6, "month": 0.35, "dow": 0.35, "author": 0.8},
    )


def _coerce_cell(category: str, raw: str):
    return raw if category in ("state", "author") else int(raw)


def parse_config(text: str) -> SynthConfig:
    """Parse the flat key = value config format."""
    cfg = SynthConfig()
    types = {f.name: f.type for f in fields(SynthConfig)}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key.startswith("effect_sd."):
                cfg.effect_sd[key.split(".", 1)[1]] = float(value)
            elif key.startswith("shift."):
                _, cat, cell = key.split(".", 2)
                cfg.shifts.setdefault(cat, {})[_coerce_cell(cat, cell)] = float(value)
            elif key in types and key not in ("effect_sd", "shifts"):
                conv = int if types[key] == "int" else float
                setattr(cfg, key, conv(value))
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    cfg.validate()
    return cfg


def load_config(path) -> SynthConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def make_lexicon(size: int, rng: np.random.Generator) -> list[str]:
    """Distinct CVCVC pseudo-words that preprocessing leaves untouched."""
    words: list[str] = []
    seen = set()
    while len(words) < size:
        c = rng.integers(len(_CONSONANTS), size=3)
        v = rng.integers(len(_VOWELS), size=2)
        w = (
            _CONSONANTS[c[0]] + _VOWELS[v[0]] + _CONSONANTS[c[1]]
            + _VOWELS[v[1]] + _CONSONANTS[c[2]]
        )
        if w in seen or stem(w) != w:
            continue
        seen.add(w)
        words.append(w)
    return words


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


class _World:
    """Sampled effect tables and word distributions for one config."""

    def __init__(self, cfg: SynthConfig, rng: np.random.Generator):
        self.cell_shift = {}
        for cat in ("state", "hour", "dow", "month"):
            universe = CELL_UNIVERSE[cat]
            sd = cfg.effect_sd.get(cat, 0.0)
            draws = rng.normal(0.0, sd, len(universe)) if sd > 0 else np.zeros(len(universe))
            table = dict(zip(universe, draws.tolist()))
            table.update(cfg.shifts.get(cat, {}))
            self.cell_shift[cat] = table
        sd = cfg.effect_sd.get("author", 0.0)
        draws = rng.normal(0.0, sd, cfg.n_authors) if sd > 0 else np.zeros(cfg.n_authors)
        self.author_ids = [f"u{i:06d}" for i in range(cfg.n_authors)]
        self.author_shift = dict(zip(self.author_ids, draws.tolist()))
        self.author_shift.update(cfg.shifts.get("author", {}))
        ranks = np.arange(1, cfg.n_authors + 1, dtype=float)
        weights = ranks ** -cfg.zipf_exponent
        self.author_p = weights / weights.sum()
        if cfg.interaction_sd > 0:
            self.interaction = rng.normal(0.0, cfg.interaction_sd, (len(STATES), 24))
        else:
            self.interaction = None

        self.lexicon = make_lexicon(cfg.lexicon_size, rng)
        base = 1.0 / np.arange(1, cfg.lexicon_size + 1, dtype=float)
        polarity = rng.normal(0.0, cfg.word_separation, cfg.lexicon_size)
        pos = base * np.exp(polarity / 2)
        neg = base * np.exp(-polarity / 2)
        self.word_p = {True: pos / pos.sum(), False: neg / neg.sum()}
        self.base_logit = _logit(cfg.base_positive_rate)

    def positive_rate(self, state: str, hour: int, dow: int, month: int, author: str) -> float:
        z = self.base_logit
        z += self.cell_shift["state"][state]
        z += self.cell_shift["hour"][hour]
        z += self.cell_shift["dow"][dow]
        z += self.cell_shift["month"][month]
        z += self.author_shift.get(author, 0.0)
        if self.interaction is not None:
            z += self.interaction[STATES.index(state), hour]
        p = 1.0 / (1.0 + math.exp(-z)) if z > -700 else 0.0
        return min(max(p, _CLAMP[0]), _CLAMP[1])


def generate_records(cfg: SynthConfig) -> list[RawRecord]:
    """Deterministic for a given config (numpy PCG64 seeded with ``cfg.seed``)."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    world = _World(cfg, rng)
    n = cfg.n_tweets
    states = rng.integers(len(STATES), size=n)
    stamps = rng.integers(cfg.start_ts, cfg.end_ts, size=n)
    authors = rng.choice(cfg.n_authors, size=n, p=world.author_p)
    uniforms = rng.random(n)
    lengths = rng.integers(cfg.length_min, cfg.length_max + 1, size=n)
    emoticon_pick = rng.integers(3, size=n)
    noise = rng.random(n)
    noise_kind = rng.integers(2, size=n)

    labels = np.empty(n, dtype=bool)
    for i in range(n):
        state = STATES[states[i]]
        local = localize(int(stamps[i]), state)
        p = world.positive_rate(
            state, local.hour, local.dow, local.month, world.author_ids[authors[i]]
        )
        labels[i] = uniforms[i] < p

    words = {}
    for polarity in (True, False):
        total = int(lengths[labels == polarity].sum())
        words[polarity] = iter(
            rng.choice(cfg.lexicon_size, size=total, p=world.word_p[polarity]).tolist()
        )

    records = []
    lex = world.lexicon
    for i in range(n):
        polarity = bool(labels[i])
        it = words[polarity]
        body = [lex[next(it)] for _ in range(lengths[i])]
        if noise[i] < cfg.noise_rate:
            if noise_kind[i]:
                body.insert(0, f"@{world.author_ids[(authors[i] + 1) % cfg.n_authors]}")
            else:
                body.append(f"http://t.co/{i:x}")
        emoticons = POSITIVE_EMOTICONS if polarity else NEGATIVE_EMOTICONS
        body.append(emoticons[emoticon_pick[i]])
        records.append(
            RawRecord(" ".join(body), int(stamps[i]), world.author_ids[authors[i]], STATES[states[i]])
        )
    return records


def generate(cfg: SynthConfig, path) -> int:
    """Write a synthetic corpus file; returns the number of lines written."""
    records = generate_records(cfg)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(raw_to_line(r))
            fh.write("\n")
    return len(records)
