import numpy as np
from prettytable import PrettyTable

from utils.dataset import LABELS
from .analysis import rationale_quality

# Average token lengths on the Twitter-2015 train split with released rationales.
REFERENCE_LENGTHS = {"sr": 42.5, "ir": 56.7, "ac": 35.9, "fd": 39.2, "ao": 29.1}

ROWS = [
    ("positive", "Positive"),
    ("neutral", "Neutral"),
    ("negative", "Negative"),
    ("total", "Total"),
    ("sentences", "#Sentence"),
    ("avg_length", "Avg. Length"),
    ("avg_aspect", "Avg. Aspect"),
    ("avg_sr", "Avg. Length of SR"),
    ("avg_ir", "Avg. Length of IR"),
    ("avg_ac", "Avg. Length of AC"),
    ("avg_fd", "Avg. Length of FD"),
    ("avg_ao", "Avg. Length of AO"),
]


def _avg_tokens(texts):
    lengths = [len(t.split()) for t in texts if t]
    return float(np.mean(lengths)) if lengths else None


def dataset_stats(samples):
    sentences = {}
    for s in samples:
        sentences.setdefault((s.image, s.sentence), s.sentence)
    stats = {label: sum(s.label == label for s in samples) for label in LABELS}
    stats["total"] = len(samples)
    stats["sentences"] = len(sentences)
    stats["avg_length"] = _avg_tokens(sentences.values())
    stats["avg_aspect"] = len(samples) / len(sentences) if sentences else None
    stats["avg_sr"] = _avg_tokens(s.sr for s in samples)
    stats["avg_ir"] = _avg_tokens(s.ir for s in samples)
    stats["avg_ac"] = _avg_tokens(s.ac for s in samples)
    stats["avg_fd"] = _avg_tokens(s.od for s in samples if s.od_kind == "FD")
    stats["avg_ao"] = _avg_tokens(s.od for s in samples if s.od_kind == "AO")
    return stats


def flag_deviations(stats, reference=REFERENCE_LENGTHS, factor=2.0):
    """Average lengths more than `factor` times off the reference, in either direction."""
    flags = []
    for key, ref in reference.items():
        value = stats.get(f"avg_{key}")
        if value is None or value <= 0:
            continue
        if value > factor * ref or value * factor < ref:
            flags.append(f"Avg. Length of {key.upper()} is {value:.1f}, reference {ref:.1f}")
    return flags


def _cell(value):
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def render_stats_table(stats_by_split):
    table = PrettyTable(["Statistic"] + list(stats_by_split))
    table.align["Statistic"] = "l"
    for key, title in ROWS:
        table.add_row([title] + [_cell(stats.get(key)) for stats in stats_by_split.values()])
    return table


def gold_rationale_quality(samples, classifier=None):
    """How well the attached SR/IR texts alone recover the gold labels; kinds nobody has are left out."""
    quality = {}
    for kind in ("sr", "ir"):
        rated = [s for s in samples if getattr(s, kind)]
        if rated:
            report = rationale_quality([getattr(s, kind) for s in rated], [s.label for s in rated], classifier)
            quality[kind.upper()] = report.to_dict()
    return quality
