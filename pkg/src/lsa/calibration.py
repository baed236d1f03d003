import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from utils.errors import SelectionError
from .types import CalibratedPatches

# dropped rows sit outside the shift; the cap keeps exp finite before they are zeroed
EXP_CAP = 60.0


class AggregationNetwork(nn.Module):
    """Per-patch map R^d -> R^{max_out}; the first N_f columns are softmaxed over patches."""

    def __init__(self, dim, max_out, hidden_dim=None):
        super().__init__()
        hidden_dim = hidden_dim or max(1, dim // 2)
        self.max_out = max_out
        self.net = nn.Sequential(
            nn.Linear(dim, hidden_dim),
            nn.GELU(),
            nn.Linear(hidden_dim, max_out),
        )

    def forward(self, patches, n_f):
        if n_f > self.max_out:
            raise SelectionError(f"aggregation network yields at most {self.max_out} outputs, asked for {n_f}")
        return self.net(patches)[..., :n_f]


def resolve_n_f(n_p, rule="half"):
    """Aggregated patch count for N_p selected patches; None when there is nothing to compress."""
    if n_p <= 1:
        return None
    if rule == "half":
        return math.ceil(n_p / 2)
    return max(1, min(int(rule), n_p - 1))


def aggregate_patches(selected, n_f, agg):
    """Aggregated rows (N_f, d) and column-stochastic weights (N_p, N_f) over the selected patches."""
    n_p = selected.size(0)
    if not 1 <= n_f < n_p:
        raise SelectionError(f"N_f must satisfy 1 <= N_f < N_p, got N_f={n_f}, N_p={n_p}")
    weights = F.softmax(agg(selected, n_f), dim=0)
    return weights.t() @ selected, weights


def masked_aggregate(patches, keep, hard, n_f, agg):
    """`aggregate_patches` over all N_v patches with the selection applied as weights.

    Equal in value to aggregating the kept rows only; the gradient reaches
    the selection through `keep`.
    """
    logits = agg(patches, n_f)
    kept = hard.unsqueeze(-1) > 0.5
    shift = logits.masked_fill(~kept, float("-inf")).max(dim=0, keepdim=True).values.detach()
    scores = torch.exp((logits - shift).clamp(max=EXP_CAP)) * keep.unsqueeze(-1)
    weights = scores / scores.sum(dim=0, keepdim=True)
    return weights.t() @ patches, weights


def fuse_redundant(patches, p_f, mask):
    """Softmax(p_f)-weighted sum over the dropped patches.

    Returns (vector, empty); `empty` is True and the vector is zero when no
    patch was dropped.
    """
    dropped = mask.hard < 0.5
    if not bool(dropped.any()):
        return torch.zeros_like(patches.patches[0]), True
    drop = 1.0 - mask.keep
    shift = p_f.masked_fill(~dropped, float("-inf")).max().detach()
    scores = torch.exp((p_f - shift).clamp(max=EXP_CAP)) * drop
    weights = scores / scores.sum()
    return weights @ patches.patches, False


def calibrate(patches, p_f, mask, agg, n_f_rule="half"):
    n_p = int((mask.hard > 0.5).sum())
    n_f = resolve_n_f(n_p, n_f_rule)
    if n_f is None:
        index = mask.kept_index
        aggregated = patches.patches[index] * mask.keep[index].unsqueeze(-1)
        weights = None
    else:
        aggregated, full_weights = masked_aggregate(patches.patches, mask.keep, mask.hard, n_f, agg)
        weights = full_weights[mask.kept_index]
    redundant, empty = fuse_redundant(patches, p_f, mask)
    return CalibratedPatches(
        cls=patches.cls,
        aggregated=aggregated,
        redundant_fused=redundant,
        weights=weights,
        redundant_empty=empty,
    )
