from .types import (
    AlignmentBatch,
    CalibratedPatches,
    DecisionMask,
    PatchFeatures,
    TokenFeatures,
    ValueScores,
)
from .selection import (
    SignificanceScorer,
    attentive_scores,
    fuse_scores,
    gumbel_select,
    significance_scores,
    straight_through,
)
from .calibration import AggregationNetwork, aggregate_patches, calibrate, fuse_redundant, resolve_n_f
from .alignment import alignment_loss, alignment_matrix, alignment_score
from .module import LinguisticAlignment
