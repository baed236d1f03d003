import torch
import torch.nn as nn
import torch.nn.functional as F

from utils.errors import FeatureError, SelectionError
from .types import DecisionMask, ValueScores, check_finite

SCORE_EPS = 1e-6
LOG_FLOOR = 1e-10


class SignificanceScorer(nn.Module):
    """Two-layer feedforward map R^d -> R^1 followed by a sigmoid, applied per patch."""

    def __init__(self, dim, hidden_dim=None):
        super().__init__()
        hidden_dim = hidden_dim or max(1, dim // 2)
        self.net = nn.Sequential(
            nn.Linear(dim, hidden_dim),
            nn.GELU(),
            nn.Linear(hidden_dim, 1),
            nn.Sigmoid(),
        )

    def forward(self, patches):
        return self.net(patches).squeeze(-1)


def significance_scores(patches, scorer):
    """Per-patch significance in (0, 1)."""
    check_finite("patches", patches.patches)
    return scorer(patches.patches).clamp(SCORE_EPS, 1 - SCORE_EPS)


def min_max_norm(scores):
    low, high = scores.min(), scores.max()
    spread = high - low
    if spread <= torch.finfo(scores.dtype).eps * max(1.0, float(high.abs())):
        # no contrast (including a single patch): every patch counts as fully attended
        return torch.ones_like(scores)
    return (scores - low) / spread


def attentive_scores(patches, text_global, visual_global=None):
    """Linguistic-aware (p_l) and visual-aware (p_e) attention scores, min-max normalized."""
    d = patches.d
    if visual_global is None:
        visual_global = patches.visual_global
    if text_global.shape != (d,) or visual_global.shape != (d,):
        raise FeatureError(
            f"width mismatch: patches d={d}, text {tuple(text_global.shape)}, visual {tuple(visual_global.shape)}")
    check_finite("text_global", text_global)
    p_l = min_max_norm(patches.patches @ text_global / d)
    p_e = min_max_norm(patches.patches @ visual_global / d)
    return p_l, p_e


def fuse_scores(p_s, p_l, p_e, beta):
    if not 0.0 <= beta <= 1.0:
        raise SelectionError(f"beta must lie in [0, 1], got {beta}")
    return (1.0 - beta) * p_s + (beta / 2.0) * (p_l + p_e)


def value_scores(patches, text_global, scorer, beta, visual_global=None):
    p_s = significance_scores(patches, scorer)
    p_l, p_e = attentive_scores(patches, text_global, visual_global)
    return ValueScores(p_s=p_s, p_l=p_l, p_e=p_e, p_f=fuse_scores(p_s, p_l, p_e, beta), beta=beta)


def sample_gumbel(shape, rng_seed=None, dtype=torch.float32):
    generator = torch.Generator()
    if rng_seed is not None:
        generator.manual_seed(int(rng_seed))
    else:
        generator.seed()
    u = torch.rand(shape, generator=generator, dtype=torch.float64).clamp(LOG_FLOOR, 1 - LOG_FLOOR)
    return (-torch.log(-torch.log(u))).to(dtype)


def gumbel_select(p_f, tau, rng_seed=None, noise=None, form="printed", eps=SCORE_EPS, anchor=None):
    """Two-way Gumbel-Softmax over (keep, drop) = (p_f, 1 - p_f) per patch.

    `form="printed"` takes log(m + G) with m + G floored at 1e-10;
    `form="canonical"` takes log(m) + G. Both agree when the noise is zero.
    `hard_i` is 1 when the keep column is the row argmax, ties go to keep.
    """
    if tau <= 0:
        raise SelectionError(f"tau must be > 0, got {tau}")
    if form not in ("printed", "canonical"):
        raise SelectionError(f"unknown gumbel form {form!r}")
    p = p_f.clamp(eps, 1 - eps)
    m = torch.stack([p, 1 - p], dim=-1)
    if noise is None:
        noise = sample_gumbel(m.shape, rng_seed=rng_seed, dtype=m.dtype)
    elif noise.shape != m.shape:
        raise SelectionError(f"noise must have shape {tuple(m.shape)}, got {tuple(noise.shape)}")
    noise = noise.to(m.dtype)

    if form == "printed":
        logits = torch.log((m + noise).clamp(min=LOG_FLOOR))
    else:
        logits = torch.log(m) + noise
    soft = F.softmax(logits / tau, dim=-1)
    hard = (soft[..., 0] >= soft[..., 1]).to(soft.dtype)
    return DecisionMask(soft=soft, hard=hard, keep=straight_through(hard, soft[..., 0], anchor), tau=tau)


def straight_through(hard, soft_keep, anchor=None):
    """Hard values forward, soft gradient backward.

    `anchor` replaces the detached soft values; passing the soft values of a
    fixed reference point makes the forward map smooth around that point.
    """
    if anchor is None:
        anchor = soft_keep.detach()
    return hard + soft_keep - anchor
