"""Tweet polarity classification from bigram language models and context priors."""

__version__ = "0.1.0"

from .classifier import Prediction, SentimentClassifier, train_classifier
from .corpus import Context, LabeledTweet, Polarity, ingest
from .preprocess import preprocess

__all__ = [
    "Context",
    "LabeledTweet",
    "Polarity",
    "Prediction",
    "SentimentClassifier",
    "ingest",
    "preprocess",
    "train_classifier",
]
