import csv
import io
import os
import re
from collections import Counter
from dataclasses import asdict, dataclass
from typing import List

import numpy as np

from utils.io import atomic_write_text
from utils.register import register_class
from .metrics import accuracy_f1

DEFAULT_LEXICON_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "aesthetic_lexicon.txt")
WORD = re.compile(r"\w+")

POSITIVE_WORDS = frozenset("""
good great happy love lovely joy joyful excellent wonderful beautiful proud excited exciting
positive success successful win winning best amazing delight delighted pleasant cheerful
warm bright vibrant hope hopeful celebrate celebration admire admiration support fun
""".split())
NEGATIVE_WORDS = frozenset("""
bad sad angry hate terrible awful poor ugly worst fear afraid negative fail failure loss
lose losing disappointed disappointing upset grim gloomy dark tense tension criticism
criticize scandal shame attack pain hurt tragic crisis
""".split())


def tokenize(text):
    return WORD.findall((text or "").lower())


@register_class(alias="Scorer.Lexicon")
class LexiconIntensityScorer:
    """(positive hits - negative hits) / total hits; 0 when nothing matches."""

    def __init__(self, positive=POSITIVE_WORDS, negative=NEGATIVE_WORDS, threshold=0.05):
        self.positive = frozenset(positive)
        self.negative = frozenset(negative)
        self.threshold = threshold

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--intensity_threshold", type=float, default=0.05,
                            help="intensity above/below +-threshold reads as positive/negative")

    @classmethod
    def from_args(cls, args):
        return cls(threshold=args.intensity_threshold)

    def __call__(self, text):
        words = tokenize(text)
        pos = sum(w in self.positive for w in words)
        neg = sum(w in self.negative for w in words)
        if pos + neg == 0:
            return 0.0
        return (pos - neg) / (pos + neg)

    def classify(self, text):
        score = self(text)
        if score > self.threshold:
            return "positive"
        if score < -self.threshold:
            return "negative"
        return "neutral"


@dataclass
class IntensityHistogram:
    edges: List[float]
    counts: List[int]
    n: int
    mean: float
    std: float
    median: float

    def to_dict(self):
        return asdict(self)


def sentiment_intensity_histogram(rationales, scorer, bins=20):
    scores = np.array([scorer(r) if r else 0.0 for r in rationales], dtype=np.float64)
    counts, edges = np.histogram(np.clip(scores, -1.0, 1.0), bins=bins, range=(-1.0, 1.0))
    return IntensityHistogram(
        edges=[float(e) for e in edges],
        counts=[int(c) for c in counts],
        n=len(scores),
        mean=float(scores.mean()) if len(scores) else 0.0,
        std=float(scores.std()) if len(scores) else 0.0,
        median=float(np.median(scores)) if len(scores) else 0.0,
    )


def write_histogram_csv(path, histogram):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["bin_left", "bin_right", "count"])
    for i, count in enumerate(histogram.counts):
        writer.writerow([f"{histogram.edges[i]:.2f}", f"{histogram.edges[i + 1]:.2f}", count])
    atomic_write_text(path, buffer.getvalue())


def load_lexicon(path=DEFAULT_LEXICON_PATH):
    with open(path, "r", encoding="utf-8") as f:
        words = [line.strip().lower() for line in f]
    return [w for w in words if w and not w.startswith("#")]


def aesthetic_word_frequency(rationales, lexicon, k=15):
    """Top-k lexicon words by count, ties alphabetical."""
    vocabulary = {w.lower() for w in lexicon}
    counts = Counter(w for r in rationales for w in tokenize(r) if w in vocabulary)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


def rationale_quality(rationales, golds, classifier=None):
    """Acc/F1 of a sentiment classifier run over rationale texts against gold labels."""
    classifier = classifier or LexiconIntensityScorer().classify
    return accuracy_f1([classifier(r or "") for r in rationales], golds)
