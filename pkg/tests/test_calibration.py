import math

import numpy as np
import pytest
import torch
import torch.nn as nn

from lsa import AggregationNetwork, DecisionMask, PatchFeatures, aggregate_patches, calibrate, fuse_redundant, resolve_n_f
from lsa.calibration import masked_aggregate
from utils.errors import SelectionError


def fixed_mask(hard):
    hard = torch.tensor(hard, dtype=torch.float64)
    return DecisionMask(soft=torch.stack([hard, 1 - hard], dim=-1), hard=hard, keep=hard.clone(), tau=1.0)


def patch_features(x):
    x = torch.as_tensor(x, dtype=torch.float64)
    return PatchFeatures(cls=torch.zeros(x.size(1), dtype=torch.float64), patches=x)


def np_gelu(x):
    erf = np.vectorize(math.erf)
    return 0.5 * x * (1.0 + erf(x / math.sqrt(2.0)))


def test_resolve_n_f():
    assert resolve_n_f(0) is None
    assert resolve_n_f(1) is None
    assert resolve_n_f(4) == 2
    assert resolve_n_f(5) == 3
    assert resolve_n_f(5, 10) == 4
    assert resolve_n_f(5, 2) == 2
    assert resolve_n_f(5, 0) == 1


class TestAggregate:
    def test_identical_patches(self):
        agg = AggregationNetwork(3, 1).double()
        row = torch.tensor([0.5, -1.0, 2.0], dtype=torch.float64)
        aggregated, _ = aggregate_patches(torch.stack([row, row]), 1, agg)
        assert torch.allclose(aggregated[0], row)

    def test_zero_network_is_uniform(self):
        agg = AggregationNetwork(4, 2).double()
        for p in agg.parameters():
            nn.init.zeros_(p)
        x = torch.from_numpy(np.random.RandomState(0).randn(3, 4))
        aggregated, weights = aggregate_patches(x, 2, agg)
        assert torch.allclose(weights, torch.full((3, 2), 1 / 3, dtype=torch.float64))
        assert torch.allclose(aggregated, x.mean(dim=0).expand(2, 4))

    def test_matches_oracle(self):
        torch.manual_seed(2)
        agg = AggregationNetwork(4, 2).double()
        x = np.random.RandomState(2).randn(3, 4)
        aggregated, weights = aggregate_patches(torch.from_numpy(x), 2, agg)

        first, second = agg.net[0], agg.net[2]
        hidden = np_gelu(x @ first.weight.detach().numpy().T + first.bias.detach().numpy())
        logits = (hidden @ second.weight.detach().numpy().T + second.bias.detach().numpy())[:, :2]
        w = np.exp(logits - logits.max(axis=0))
        w = w / w.sum(axis=0)
        np.testing.assert_allclose(weights.detach().numpy(), w, atol=1e-6)
        np.testing.assert_allclose(aggregated.detach().numpy(), w.T @ x, atol=1e-6)

    def test_columns_stochastic_and_convex(self):
        rng = np.random.RandomState(9)
        torch.manual_seed(9)
        for _ in range(100):
            n_p = rng.randint(2, 9)
            n_f = rng.randint(1, n_p)
            d = rng.randint(1, 7)
            agg = AggregationNetwork(d, n_p).double()
            x = torch.from_numpy(rng.randn(n_p, d))
            aggregated, weights = aggregate_patches(x, n_f, agg)
            assert weights.shape == (n_p, n_f)
            assert torch.allclose(weights.sum(dim=0), torch.ones(n_f, dtype=torch.float64), atol=1e-6)
            low, high = x.min(dim=0).values, x.max(dim=0).values
            assert bool((aggregated >= low - 1e-9).all()) and bool((aggregated <= high + 1e-9).all())

    @pytest.mark.parametrize("n_f", [3, 4])
    def test_must_compress(self, n_f):
        agg = AggregationNetwork(2, 4).double()
        with pytest.raises(SelectionError):
            aggregate_patches(torch.ones(3, 2, dtype=torch.float64), n_f, agg)

    def test_network_width_limit(self):
        agg = AggregationNetwork(2, 1)
        with pytest.raises(SelectionError):
            agg(torch.ones(4, 2), 2)

    def test_masked_equals_selected_only(self):
        torch.manual_seed(4)
        agg = AggregationNetwork(5, 3).double()
        x = torch.from_numpy(np.random.RandomState(4).randn(7, 5))
        mask = fixed_mask([1, 0, 1, 1, 0, 1, 0])
        masked, _ = masked_aggregate(x, mask.keep, mask.hard, 2, agg)
        direct, _ = aggregate_patches(x[mask.kept_index], 2, agg)
        assert torch.allclose(masked, direct, atol=1e-9)


class TestRedundant:
    def setup_method(self):
        self.x = np.random.RandomState(5).randn(4, 3)
        self.patches = patch_features(self.x)

    def test_single_redundant_patch(self):
        p_f = torch.tensor([0.9, 0.1, 0.8, 0.7], dtype=torch.float64)
        fused, empty = fuse_redundant(self.patches, p_f, fixed_mask([1, 0, 1, 1]))
        assert not empty
        np.testing.assert_allclose(fused.numpy(), self.x[1], atol=1e-12)

    def test_equal_scores_give_mean(self):
        p_f = torch.tensor([0.9, 0.3, 0.3, 0.7], dtype=torch.float64)
        fused, _ = fuse_redundant(self.patches, p_f, fixed_mask([1, 0, 0, 1]))
        np.testing.assert_allclose(fused.numpy(), self.x[1:3].mean(axis=0), atol=1e-12)

    def test_softmax_weights(self):
        x = np.random.RandomState(6).randn(3, 4)
        p_f = torch.tensor([0.1, 0.2, 0.3], dtype=torch.float64)
        fused, _ = fuse_redundant(patch_features(x), p_f, fixed_mask([0, 0, 0]))
        w = np.exp([0.1, 0.2, 0.3])
        w = w / w.sum()
        np.testing.assert_allclose(fused.numpy(), w @ x, atol=1e-12)

    def test_no_redundant_patch(self):
        fused, empty = fuse_redundant(self.patches, torch.full((4,), 0.9, dtype=torch.float64), fixed_mask([1, 1, 1, 1]))
        assert empty
        assert torch.equal(fused, torch.zeros(3, dtype=torch.float64))


class TestCalibrate:
    def test_sequence_length_and_weights(self):
        torch.manual_seed(1)
        x = np.random.RandomState(1).randn(6, 4)
        agg = AggregationNetwork(4, 3).double()
        p_f = torch.from_numpy(np.random.RandomState(2).rand(6))
        calibrated = calibrate(patch_features(x), p_f, fixed_mask([1, 1, 0, 1, 0, 1]), agg)
        assert calibrated.aggregated.shape == (2, 4)
        assert calibrated.length == 4
        assert calibrated.sequence().shape == (4, 4)
        assert calibrated.weights.shape == (4, 2)
        assert torch.allclose(calibrated.weights.sum(dim=0), torch.ones(2, dtype=torch.float64), atol=1e-6)
        assert not calibrated.redundant_empty

    def test_nothing_dropped_keeps_length(self):
        agg = AggregationNetwork(4, 2).double()
        x = np.random.RandomState(3).randn(4, 4)
        calibrated = calibrate(patch_features(x), torch.full((4,), 0.9, dtype=torch.float64), fixed_mask([1, 1, 1, 1]), agg)
        assert calibrated.redundant_empty
        assert calibrated.length == 2 + 2
        assert torch.equal(calibrated.sequence()[-1], torch.zeros(4, dtype=torch.float64))

    def test_single_kept_patch_passes_through(self):
        agg = AggregationNetwork(4, 2).double()
        x = np.random.RandomState(4).randn(3, 4)
        calibrated = calibrate(patch_features(x), torch.full((3,), 0.5, dtype=torch.float64), fixed_mask([0, 1, 0]), agg)
        assert calibrated.weights is None
        np.testing.assert_allclose(calibrated.aggregated.numpy(), x[1:2])
        assert calibrated.length == 3
