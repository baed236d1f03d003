from dataclasses import dataclass
from typing import Optional

import torch

from utils.errors import FeatureError


def check_finite(name, tensor):
    if not torch.isfinite(tensor).all():
        raise FeatureError(f"{name} contains non-finite values")
    return tensor


@dataclass
class PatchFeatures:
    """Visual patch features of one image: a cls vector plus N_v patch rows of width d."""
    cls: torch.Tensor
    patches: torch.Tensor

    def __post_init__(self):
        if self.patches.dim() != 2 or self.patches.size(0) < 1:
            raise FeatureError(f"patches must be a non-empty (N_v, d) matrix, got shape {tuple(self.patches.shape)}")
        if self.cls.shape != (self.patches.size(1),):
            raise FeatureError(f"cls must have shape ({self.patches.size(1)},), got {tuple(self.cls.shape)}")
        check_finite("patches", self.patches)
        check_finite("cls", self.cls)

    @property
    def d(self):
        return self.patches.size(1)

    @property
    def n(self):
        return self.patches.size(0)

    @property
    def visual_global(self):
        return self.patches.mean(dim=0)


@dataclass
class TokenFeatures:
    """Sentence token features; `pooled` is the sentence-level vector."""
    tokens: torch.Tensor
    pooled: torch.Tensor

    def __post_init__(self):
        if self.tokens.dim() != 2 or self.tokens.size(0) < 1:
            raise FeatureError(f"tokens must be a non-empty (N_s, d) matrix, got shape {tuple(self.tokens.shape)}")
        if self.pooled.shape != (self.tokens.size(1),):
            raise FeatureError(f"pooled must have shape ({self.tokens.size(1)},), got {tuple(self.pooled.shape)}")
        check_finite("tokens", self.tokens)
        check_finite("pooled", self.pooled)

    @property
    def d(self):
        return self.tokens.size(1)

    @classmethod
    def from_tokens(cls, tokens):
        return cls(tokens=tokens, pooled=tokens.mean(dim=0))


@dataclass
class ValueScores:
    p_s: torch.Tensor
    p_l: torch.Tensor
    p_e: torch.Tensor
    p_f: torch.Tensor
    beta: float


@dataclass
class DecisionMask:
    """Column 0 of `soft` is the keep category, column 1 the drop category.

    `keep` carries the hard values forward and the soft keep-probabilities'
    gradient backward.
    """
    soft: torch.Tensor
    hard: torch.Tensor
    keep: torch.Tensor
    tau: float

    @property
    def kept_index(self):
        return torch.nonzero(self.hard > 0.5, as_tuple=False).flatten()

    @property
    def redundant_index(self):
        return torch.nonzero(self.hard < 0.5, as_tuple=False).flatten()


@dataclass
class CalibratedPatches:
    cls: torch.Tensor
    aggregated: torch.Tensor
    redundant_fused: torch.Tensor
    weights: Optional[torch.Tensor]
    redundant_empty: bool = False

    def sequence(self):
        """(cls, aggregated..., redundant_fused) stacked into an (N_f + 2, d) matrix."""
        return torch.cat([self.cls.unsqueeze(0), self.aggregated, self.redundant_fused.unsqueeze(0)], dim=0)

    @property
    def length(self):
        return self.aggregated.size(0) + 2


@dataclass
class AlignmentBatch:
    K: torch.Tensor
    gamma: float = 0.2
