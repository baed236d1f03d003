import math

import torch
import torch.nn as nn

from .alignment import alignment_loss, alignment_matrix
from .calibration import AggregationNetwork, calibrate
from .selection import SignificanceScorer, gumbel_select, value_scores
from .types import AlignmentBatch


class LinguisticAlignment(nn.Module):
    """Patch selection, calibration and patch-token alignment as one trainable unit.

    Training mode samples Gumbel noise from the per-sample seed; eval mode
    uses zero noise so the selection is a deterministic function of p_f.
    """

    def __init__(self, dim, max_patches, beta=0.5, tau=1.0, gamma=0.2, n_f="half",
                 gumbel_form="printed", k_form="sum", hidden_dim=None):
        super().__init__()
        self.dim = dim
        self.beta = beta
        self.tau = tau
        self.gamma = gamma
        self.n_f = n_f
        self.gumbel_form = gumbel_form
        self.k_form = k_form
        max_out = max(1, math.ceil(max_patches / 2)) if n_f == "half" else max(1, int(n_f))
        self.scorer = SignificanceScorer(dim, hidden_dim)
        self.aggregator = AggregationNetwork(dim, max_out, hidden_dim)

    @classmethod
    def from_config(cls, config, dim, max_patches):
        return cls(
            dim=dim,
            max_patches=max_patches,
            beta=config.beta,
            tau=config.tau,
            gamma=config.gamma,
            n_f=config.n_f,
            gumbel_form=config.gumbel_form,
            k_form=config.k_form,
        )

    def select(self, patches, tokens, rng_seed=None, noise=None, anchor=None):
        scores = value_scores(patches, tokens.pooled, self.scorer, self.beta)
        if noise is None and not self.training:
            noise = torch.zeros(patches.n, 2, dtype=patches.patches.dtype)
        mask = gumbel_select(scores.p_f, self.tau, rng_seed=rng_seed, noise=noise,
                             form=self.gumbel_form, anchor=anchor)
        return scores, mask

    def calibrate_one(self, patches, tokens, rng_seed=None, noise=None, anchor=None):
        scores, mask = self.select(patches, tokens, rng_seed=rng_seed, noise=noise, anchor=anchor)
        calibrated = calibrate(patches, scores.p_f, mask, self.aggregator, self.n_f)
        return calibrated, scores, mask

    def align(self, patch_list, token_list, seeds=None):
        """(alignment loss, calibrated patches per pair); the loss is None for a batch of one."""
        seeds = seeds if seeds is not None else [None] * len(patch_list)
        calibrated = [
            self.calibrate_one(p, t, rng_seed=s)[0]
            for p, t, s in zip(patch_list, token_list, seeds)
        ]
        if len(calibrated) < 2:
            return None, calibrated
        K = alignment_matrix(calibrated, token_list, self.k_form)
        return alignment_loss(AlignmentBatch(K=K, gamma=self.gamma)), calibrated

    def forward(self, patch_list, token_list, seeds=None):
        return self.align(patch_list, token_list, seeds)[0]
