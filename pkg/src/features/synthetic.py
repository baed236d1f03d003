import numpy as np
import torch

from lsa.types import PatchFeatures, TokenFeatures
from utils.register import register_class
from .base import FeatureProvider, split_words, stable_seed


@register_class(alias="Features.Synthetic")
class SyntheticFeatures(FeatureProvider):
    """Seeded random projections of image refs and words; same input, same features."""

    def __init__(self, dim=16, num_patches=8, seed=0):
        self.dim = dim
        self.num_patches = num_patches
        self.seed = seed

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--feature_dim", type=int, default=16, help="width d of patch and token features")
        parser.add_argument("--num_patches", type=int, default=8, help="patches per image")

    @classmethod
    def from_args(cls, args):
        return cls(dim=args.feature_dim, num_patches=args.num_patches, seed=args.seed)

    def _draw(self, rows, *key):
        rng = np.random.RandomState(stable_seed(self.seed, *key))
        return rng.standard_normal((rows, self.dim)).astype(np.float32)

    def image_features(self, image_ref):
        patches = torch.from_numpy(self._draw(self.num_patches, "image", image_ref))
        cls = torch.from_numpy(self._draw(1, "cls", image_ref)[0])
        return PatchFeatures(cls=cls, patches=patches)

    def word_vector(self, word):
        return self._draw(1, "word", word)[0]

    def text_features(self, sentence):
        words = split_words(sentence) or ["<empty>"]
        tokens = torch.from_numpy(np.stack([self.word_vector(w) for w in words]))
        return TokenFeatures.from_tokens(tokens)

    def region_embedding(self, image_ref, bbox=None):
        whole = self._draw(self.num_patches, "image", image_ref).mean(axis=0)
        if bbox is None:
            return whole
        # a crop shares half its signal with the whole image
        return 0.5 * whole + 0.5 * self._draw(1, "crop", image_ref, *bbox)[0]
