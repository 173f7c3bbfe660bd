"""Model bundle: both language models, the context table and a manifest, in one directory.

Layout::

    <dir>/bundle.json        manifest (format, preprocessing version, mode)
    <dir>/positive.lm.json   BigramModel.to_dict() of the positive class
    <dir>/negative.lm.json   BigramModel.to_dict() of the negative class
    <dir>/context.json       ContextTable.to_dict()

Every file is compact JSON with sorted keys, so identical training data gives
byte-identical bundles.
"""

from __future__ import annotations

import json
from pathlib import Path

from .classifier import SentimentClassifier
from .ngram import BigramModel
from .preprocess import PREPROCESS_VERSION
from .priors import ContextTable

BUNDLE_FORMAT = "ctxsent-bundle"
BUNDLE_VERSION = 1
FILES = {
    "manifest": "bundle.json",
    "positive": "positive.lm.json",
    "negative": "negative.lm.json",
    "context": "context.json",
}


class BundleError(Exception):
    pass


def _write_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(obj, separators=(",", ":"), sort_keys=True))
        fh.write("\n")


def save_bundle(clf: SentimentClassifier, directory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format": BUNDLE_FORMAT,
        "version": BUNDLE_VERSION,
        "preprocess_version": PREPROCESS_VERSION,
        "categories": None if clf.categories is None else list(clf.categories),
    }
    _write_json(d / FILES["manifest"], manifest)
    _write_json(d / FILES["positive"], clf.pos_model.to_dict())
    _write_json(d / FILES["negative"], clf.neg_model.to_dict())
    _write_json(d / FILES["context"], clf.table.to_dict())
    return d


def load_bundle(directory) -> SentimentClassifier:
    d = Path(directory)
    try:
        with open(d / FILES["manifest"], encoding="utf-8") as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise BundleError(f"{d} is not a model bundle (no {FILES['manifest']})") from None
    if manifest.get("format") != BUNDLE_FORMAT or manifest.get("version") != BUNDLE_VERSION:
        raise BundleError(f"unsupported bundle format in {d}")
    if manifest.get("preprocess_version") != PREPROCESS_VERSION:
        raise BundleError(
            f"bundle was trained with preprocessing v{manifest.get('preprocess_version')}, "
            f"this build uses v{PREPROCESS_VERSION}; retrain the model"
        )
    try:
        pos = BigramModel.load(d / FILES["positive"])
        neg = BigramModel.load(d / FILES["negative"])
        table = ContextTable.load(d / FILES["context"])
    except (OSError, ValueError, KeyError) as exc:
        raise BundleError(f"corrupt bundle {d}: {exc}") from None
    cats = manifest.get("categories")
    return SentimentClassifier(pos, neg, table, None if cats is None else tuple(cats))
