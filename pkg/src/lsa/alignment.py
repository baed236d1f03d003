import torch
import torch.nn.functional as F

from utils.errors import SelectionError


def cosine_matrix(left, right):
    """Pairwise cosine; a zero-norm row on either side yields similarity 0."""
    return F.normalize(left, dim=-1) @ F.normalize(right, dim=-1).t()


def alignment_score(calibrated, tokens, k_form="sum"):
    """Max-correspondence score between a calibrated patch sequence and sentence tokens.

    "sum" gives mean_i max_j A + mean_j max_i A in [-2, 2]; "half" halves it.
    """
    patches = calibrated.sequence() if hasattr(calibrated, "sequence") else calibrated
    words = tokens.tokens if hasattr(tokens, "tokens") else tokens
    if patches.size(0) == 0 or words.size(0) == 0:
        raise SelectionError("alignment needs at least one patch and one token")
    sim = cosine_matrix(patches, words)
    score = sim.max(dim=1).values.mean() + sim.max(dim=0).values.mean()
    if k_form == "half":
        score = 0.5 * score
    return score


def alignment_matrix(calibrated_list, token_list, k_form="sum"):
    """K[i, j] = alignment_score(image i, sentence j)."""
    rows = [
        torch.stack([alignment_score(c, t, k_form) for t in token_list])
        for c in calibrated_list
    ]
    return torch.stack(rows)


def alignment_loss(batch):
    """Bidirectional triplet hinge with the hardest in-batch negatives, summed over pairs."""
    K, gamma = batch.K, batch.gamma
    if K.dim() != 2 or K.size(0) != K.size(1):
        raise SelectionError(f"K must be square, got shape {tuple(K.shape)}")
    if K.size(0) < 2:
        raise SelectionError("alignment loss needs a batch of at least 2 pairs")
    if gamma <= 0:
        raise SelectionError(f"gamma must be > 0, got {gamma}")

    diagonal = K.diag().view(K.size(0), 1)
    cost_s = (gamma + K - diagonal.expand_as(K)).clamp(min=0)
    cost_im = (gamma + K - diagonal.t().expand_as(K)).clamp(min=0)
    positives = torch.eye(K.size(0), dtype=torch.bool, device=K.device)
    cost_s = cost_s.masked_fill(positives, 0)
    cost_im = cost_im.masked_fill(positives, 0)
    return cost_s.max(dim=1).values.sum() + cost_im.max(dim=0).values.sum()
