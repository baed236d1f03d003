from dataclasses import asdict, dataclass, field
from typing import Dict

import numpy as np
from sklearn.metrics import f1_score, precision_recall_fscore_support

from learning.sequences import UNDISCERNED
from utils.dataset import LABELS


@dataclass
class MetricReport:
    acc: float
    f1: float
    dis_rate: float
    n: int
    f1_macro: float = 0.0
    f1_micro: float = 0.0
    average: str = "macro"
    per_class: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _sentiment(pred):
    return pred if isinstance(pred, str) else pred.sentiment


def accuracy_f1(preds, golds, average="macro"):
    """Accuracy, F1 over the three polarities and the undiscerned rate.

    An undiscerned prediction is wrong for accuracy and belongs to no class
    for F1, so it only costs recall of its gold class.
    """
    if len(preds) == 0:
        raise ValueError("cannot score an empty prediction list")
    if len(preds) != len(golds):
        raise ValueError(f"{len(preds)} predictions for {len(golds)} gold labels")
    if average not in ("macro", "micro"):
        raise ValueError(f"average must be macro or micro, got {average!r}")

    y_pred = [_sentiment(p) for p in preds]
    y_true = list(golds)
    correct = np.array([p == g for p, g in zip(y_pred, y_true)])
    labels = list(LABELS)
    f1_macro = f1_score(y_true, y_pred, labels=labels, average="macro", zero_division=0)
    f1_micro = f1_score(y_true, y_pred, labels=labels, average="micro", zero_division=0)
    precision, recall, f1, support = precision_recall_fscore_support(
        y_true, y_pred, labels=labels, zero_division=0)
    per_class = {
        label: {
            "precision": float(precision[i]),
            "recall": float(recall[i]),
            "f1": float(f1[i]),
            "support": int(support[i]),
        }
        for i, label in enumerate(labels)
    }
    return MetricReport(
        acc=float(correct.mean()),
        f1=float(f1_macro if average == "macro" else f1_micro),
        dis_rate=float(np.mean([p == UNDISCERNED for p in y_pred])),
        n=len(y_pred),
        f1_macro=float(f1_macro),
        f1_micro=float(f1_micro),
        average=average,
        per_class=per_class,
    )


def head_agreement(heads):
    """Fraction of samples where SC agrees with SRG, with IRG, and where all present heads agree."""
    sc = [_sentiment(p) for p in heads["SC"]]
    result = {}
    others = [h for h in ("SRG", "IRG") if h in heads]
    for head in others:
        other = [_sentiment(p) for p in heads[head]]
        result[f"sc_{head.lower()}"] = float(np.mean([a == b for a, b in zip(sc, other)])) if sc else 0.0
    if others and sc:
        columns = [sc] + [[_sentiment(p) for p in heads[h]] for h in others]
        result["all"] = float(np.mean([len(set(row)) == 1 for row in zip(*columns)]))
    return result
