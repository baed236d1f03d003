import numpy as np
from prettytable import PrettyTable

from utils.log import get_logger
from .analysis import aesthetic_word_frequency, sentiment_intensity_histogram
from .metrics import accuracy_f1, head_agreement

logger = get_logger("evaluation")

try:
    import bootstrapped.bootstrap as bs
    import bootstrapped.stats_functions as bs_stats
except ImportError:
    logger.warning("bootstrapped not installed; reports carry no confidence interval")
    bs = None
    bs_stats = None


def bootstrap_ci(values, num_iterations=1000, seed=0):
    """95% bootstrap interval of the mean; None when unavailable or fewer than 2 values."""
    if bs is None or len(values) < 2:
        return None
    np.random.seed(seed)
    results = bs.bootstrap(np.asarray(values, dtype=np.float64), stat_func=bs_stats.mean,
                           num_iterations=num_iterations)
    return {"mean": float(results.value), "lower": float(results.lower_bound), "upper": float(results.upper_bound)}


def evaluation_report(outputs, golds, average="macro", scorer=None, lexicon=None, k=15, bins=20,
                      bootstrap_iterations=1000, seed=0):
    """Per-head metrics with SC as the primary row, head agreement, and rationale analyses."""
    heads = {head: accuracy_f1(preds, golds, average).to_dict() for head, preds in outputs.items()}
    correct = [float(p.sentiment == g) for p, g in zip(outputs["SC"], golds)]
    report = {
        "primary": heads["SC"],
        "heads": heads,
        "agreement": head_agreement(outputs),
        "acc_ci": bootstrap_ci(correct, bootstrap_iterations, seed),
    }
    rationale_heads = [h for h in ("SRG", "IRG") if h in outputs]
    if scorer is not None and rationale_heads:
        report["intensity"] = {
            h: sentiment_intensity_histogram([p.rationale or "" for p in outputs[h]], scorer, bins).to_dict()
            for h in rationale_heads
        }
    if lexicon and rationale_heads:
        report["aesthetic_words"] = {
            h: [[w, c] for w, c in aesthetic_word_frequency([p.rationale or "" for p in outputs[h]], lexicon, k)]
            for h in rationale_heads
        }
    return report


def _pct(value):
    return f"{100 * value:.2f}"


def render_metric_table(heads):
    table = PrettyTable(["Head", "Acc (%)", "F1 (%)", "Dis (%)", "n"])
    for head, m in heads.items():
        table.add_row([head, _pct(m["acc"]), _pct(m["f1"]), _pct(m["dis_rate"]), m["n"]])
    return table
