from dataclasses import dataclass

import torch
import torch.nn.functional as F

from utils.errors import ConfigError, SequenceError


def generation_loss(logits, targets, mask=None):
    """Mean over samples of the summed token negative log-likelihood.

    logits: (B, T, V) or (T, V); targets: (B, T) or (T,); mask zeroes padding.
    """
    if logits.dim() == 2:
        logits, targets = logits.unsqueeze(0), targets.unsqueeze(0)
        mask = mask.unsqueeze(0) if mask is not None else None
    if logits.shape[:-1] != targets.shape:
        raise SequenceError(
            f"logits {tuple(logits.shape)} do not line up with targets {tuple(targets.shape)}")
    log_probs = F.log_softmax(logits, dim=-1)
    nll = -log_probs.gather(-1, targets.unsqueeze(-1)).squeeze(-1)
    if mask is not None:
        nll = nll * mask.to(nll.dtype)
    return nll.sum(dim=-1).mean()


@dataclass(frozen=True)
class LossWeights:
    alpha: float
    lam: float

    def __post_init__(self):
        problems = []
        if not 0 < self.alpha < 1:
            problems.append(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.lam < 1:
            problems.append(f"lambda must lie in (0, 1), got {self.lam}")
        if problems:
            raise ConfigError(problems)


def total_loss(l_sc, l_srg, l_irg, l_align, w):
    """alpha * L_SC + (1 - alpha) / 2 * (L_SRG + L_IRG) + lambda * L_align; None terms are left out."""
    total = w.alpha * l_sc
    for term in (l_srg, l_irg):
        if term is not None:
            total = total + (1 - w.alpha) / 2 * term
    if l_align is not None:
        total = total + w.lam * l_align
    return total


def is_finite(value):
    if isinstance(value, torch.Tensor):
        return bool(torch.isfinite(value).all())
    return value == value and abs(value) != float("inf")
