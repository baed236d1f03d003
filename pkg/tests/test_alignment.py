import math

import numpy as np
import pytest
import torch

from lsa import AlignmentBatch, LinguisticAlignment, PatchFeatures, TokenFeatures, alignment_loss, alignment_matrix, alignment_score
from utils.errors import SelectionError


def brute_force_score(patches, tokens):
    def cos(a, b):
        na, nb = math.sqrt(sum(v * v for v in a)), math.sqrt(sum(v * v for v in b))
        if na == 0 or nb == 0:
            return 0.0
        return sum(x * y for x, y in zip(a, b)) / (na * nb)

    sim = [[cos(p, t) for t in tokens] for p in patches]
    rows = sum(max(row) for row in sim) / len(patches)
    cols = sum(max(sim[i][j] for i in range(len(patches))) for j in range(len(tokens))) / len(tokens)
    return rows + cols


def brute_force_loss(K, gamma):
    B = len(K)
    total = 0.0
    for i in range(B):
        hardest_sentence = max(K[i][j] for j in range(B) if j != i)
        hardest_image = max(K[j][i] for j in range(B) if j != i)
        total += max(0.0, gamma - K[i][i] + hardest_sentence)
        total += max(0.0, gamma - K[i][i] + hardest_image)
    return total


class TestScore:
    def test_identical_orthonormal_sets(self):
        eye = torch.eye(4, dtype=torch.float64)
        assert alignment_score(eye, eye).item() == pytest.approx(2.0)

    def test_orthogonal_sets(self):
        patches = torch.eye(4, dtype=torch.float64)[:2]
        tokens = torch.eye(4, dtype=torch.float64)[2:]
        assert alignment_score(patches, tokens).item() == pytest.approx(0.0)

    def test_half_form(self):
        rng = np.random.RandomState(0)
        patches, tokens = torch.from_numpy(rng.randn(4, 5)), torch.from_numpy(rng.randn(3, 5))
        full = alignment_score(patches, tokens, "sum")
        assert alignment_score(patches, tokens, "half").item() == pytest.approx(0.5 * full.item())

    def test_zero_norm_row_scores_zero(self):
        patches = torch.tensor([[0.0, 0.0], [1.0, 0.0]], dtype=torch.float64)
        tokens = torch.tensor([[1.0, 0.0]], dtype=torch.float64)
        assert alignment_score(patches, tokens).item() == pytest.approx(0.5 + 1.0)

    def test_brute_force_oracle(self):
        rng = np.random.RandomState(42)
        for _ in range(200):
            n_p, n_s, d = rng.randint(1, 9), rng.randint(1, 9), rng.randint(1, 9)
            patches, tokens = rng.randn(n_p, d), rng.randn(n_s, d)
            got = alignment_score(torch.from_numpy(patches), torch.from_numpy(tokens)).item()
            assert got == pytest.approx(brute_force_score(patches.tolist(), tokens.tolist()), abs=1e-6)
            assert -2.0 - 1e-9 <= got <= 2.0 + 1e-9

    def test_empty_side_rejected(self):
        with pytest.raises(SelectionError):
            alignment_score(torch.zeros(0, 3), torch.ones(2, 3))

    def test_matrix_layout(self):
        rng = np.random.RandomState(1)
        images = [torch.from_numpy(rng.randn(3, 4)) for _ in range(3)]
        sentences = [torch.from_numpy(rng.randn(2, 4)) for _ in range(3)]
        K = alignment_matrix(images, sentences)
        assert K.shape == (3, 3)
        assert K[1, 2].item() == pytest.approx(alignment_score(images[1], sentences[2]).item())


class TestLoss:
    def test_well_separated_batch(self):
        K = torch.full((3, 3), -1.0, dtype=torch.float64)
        K.fill_diagonal_(1.0)
        assert alignment_loss(AlignmentBatch(K=K, gamma=0.2)).item() == 0.0

    @pytest.mark.parametrize("B", [2, 3, 5])
    def test_all_equal_scores(self, B):
        K = torch.full((B, B), 0.3, dtype=torch.float64)
        assert alignment_loss(AlignmentBatch(K=K, gamma=0.2)).item() == pytest.approx(2 * B * 0.2)

    def test_brute_force_oracle(self):
        rng = np.random.RandomState(3)
        for _ in range(50):
            K = rng.uniform(-2, 2, size=(3, 3))
            got = alignment_loss(AlignmentBatch(K=torch.from_numpy(K), gamma=0.2)).item()
            assert got == pytest.approx(brute_force_loss(K.tolist(), 0.2), abs=1e-6)
            assert got >= 0.0

    def test_dominant_diagonal_is_zero(self):
        rng = np.random.RandomState(4)
        for _ in range(20):
            K = rng.uniform(-1, 0.5, size=(4, 4))
            np.fill_diagonal(K, 0.5 + 0.2 + 0.01)
            assert alignment_loss(AlignmentBatch(K=torch.from_numpy(K), gamma=0.2)).item() == 0.0

    def test_rejections(self):
        with pytest.raises(SelectionError):
            alignment_loss(AlignmentBatch(K=torch.ones(1, 1)))
        with pytest.raises(SelectionError):
            alignment_loss(AlignmentBatch(K=torch.ones(2, 3)))
        with pytest.raises(SelectionError):
            alignment_loss(AlignmentBatch(K=torch.ones(2, 2), gamma=0.0))


def make_pair(rng, n_v=4, n_s=3, d=8):
    patches = torch.from_numpy(rng.randn(n_v, d))
    tokens = torch.from_numpy(rng.randn(n_s, d))
    return PatchFeatures(cls=torch.from_numpy(rng.randn(d)), patches=patches), TokenFeatures.from_tokens(tokens)


class TestModule:
    def test_batch_of_one_has_no_loss(self):
        lsa = LinguisticAlignment(dim=8, max_patches=4).double()
        patches, tokens = make_pair(np.random.RandomState(0))
        loss, calibrated = lsa.align([patches], [tokens], seeds=[1])
        assert loss is None
        assert len(calibrated) == 1

    def test_loss_is_finite_and_seeded(self):
        torch.manual_seed(0)
        lsa = LinguisticAlignment(dim=8, max_patches=4, gamma=5.0).double()
        rng = np.random.RandomState(1)
        pairs = [make_pair(rng) for _ in range(3)]
        first = lsa([p for p, _ in pairs], [t for _, t in pairs], seeds=[1, 2, 3])
        second = lsa([p for p, _ in pairs], [t for _, t in pairs], seeds=[1, 2, 3])
        assert torch.isfinite(first)
        assert first.item() == second.item()
        first.backward()
        assert any(p.grad is not None and p.grad.abs().sum() > 0 for p in lsa.scorer.parameters())

    def test_eval_mode_is_deterministic(self):
        lsa = LinguisticAlignment(dim=8, max_patches=4).double().eval()
        patches, tokens = make_pair(np.random.RandomState(2))
        a, _, mask_a = lsa.calibrate_one(patches, tokens)
        b, _, mask_b = lsa.calibrate_one(patches, tokens)
        assert torch.equal(mask_a.hard, mask_b.hard)
        assert torch.equal(a.sequence(), b.sequence())


def test_gradient_matches_finite_differences():
    """Scorer gradient of the alignment loss through selection, aggregation and cosine scoring."""
    torch.manual_seed(5)
    rng = np.random.RandomState(5)
    lsa = LinguisticAlignment(dim=8, max_patches=4, gamma=5.0).double()
    pairs = [make_pair(rng, n_v=4) for _ in range(2)]
    # large noise pins the hard mask to keep, keep, drop, keep so the loss is smooth in the parameters
    noise = torch.tensor([[5.0, 0.0], [5.0, 0.0], [0.0, 5.0], [5.0, 0.0]], dtype=torch.float64)
    anchors = []
    with torch.no_grad():
        for patches, tokens in pairs:
            _, mask = lsa.select(patches, tokens, noise=noise)
            anchors.append(mask.soft[:, 0].clone())
            assert mask.hard.tolist() == [1.0, 1.0, 0.0, 1.0]

    def loss():
        calibrated = [lsa.calibrate_one(p, t, noise=noise, anchor=a)[0] for (p, t), a in zip(pairs, anchors)]
        K = alignment_matrix(calibrated, [t for _, t in pairs], lsa.k_form)
        return alignment_loss(AlignmentBatch(K=K, gamma=lsa.gamma))

    params = list(lsa.scorer.parameters())
    analytic = torch.autograd.grad(loss(), params)
    step = 1e-4
    agree, total, nonzero = 0, 0, 0
    with torch.no_grad():
        for param, grad in zip(params, analytic):
            flat, flat_grad = param.view(-1), grad.view(-1)
            for k in range(flat.numel()):
                original = flat[k].item()
                flat[k] = original + step
                up = loss().item()
                flat[k] = original - step
                down = loss().item()
                flat[k] = original
                numeric = (up - down) / (2 * step)
                a = flat_grad[k].item()
                total += 1
                nonzero += abs(a) > 1e-8
                if abs(a - numeric) <= 1e-3 * max(abs(a), abs(numeric)) + 1e-8:
                    agree += 1
    assert nonzero > 0
    assert agree / total >= 0.95
