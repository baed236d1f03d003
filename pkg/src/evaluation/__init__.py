from .metrics import MetricReport, accuracy_f1, head_agreement
from .analysis import (
    IntensityHistogram,
    LexiconIntensityScorer,
    aesthetic_word_frequency,
    load_lexicon,
    rationale_quality,
    sentiment_intensity_histogram,
    write_histogram_csv,
)
from .stats import REFERENCE_LENGTHS, dataset_stats, flag_deviations, render_stats_table
from .report import bootstrap_ci, evaluation_report, render_metric_table
from .zero_shot import INSTRUCTION, zero_shot_predictions
