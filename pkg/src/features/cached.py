import os

import numpy as np
import torch

from lsa.types import PatchFeatures, TokenFeatures
from utils.errors import FeatureError
from utils.io import atomic_write_bytes
from utils.register import register_class
from .base import FeatureProvider, stable_seed

HEADER = np.dtype("<i4")
BODY = np.dtype("<f4")


def save_matrix(path, matrix):
    """Row-major float32 body after an int32 (N, d) header."""
    matrix = np.ascontiguousarray(matrix, dtype=BODY)
    if matrix.ndim != 2:
        raise FeatureError(f"expected a 2-d matrix, got shape {matrix.shape}")
    header = np.asarray(matrix.shape, dtype=HEADER)
    atomic_write_bytes(path, header.tobytes() + matrix.tobytes())


def load_matrix(path):
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < 8:
        raise FeatureError(f"{path}: truncated header")
    n, d = np.frombuffer(raw[:8], dtype=HEADER)
    body = np.frombuffer(raw[8:], dtype=BODY)
    if body.size != n * d:
        raise FeatureError(f"{path}: header says ({n}, {d}) but body holds {body.size} values")
    return body.reshape(int(n), int(d)).copy()


@register_class(alias="Features.Cached")
class CachedFeatures(FeatureProvider):
    """Reads precomputed features from `feature_dir`.

    Image files hold the cls row followed by the patch rows; text files hold
    the token rows. Region embeddings for crops are read from their own files.
    """

    def __init__(self, feature_dir):
        self.feature_dir = feature_dir
        self.dim = None
        self.num_patches = None
        image_files = sorted(n for n in os.listdir(feature_dir) if n.startswith("image-")) if os.path.isdir(feature_dir) else []
        if image_files:
            shape = load_matrix(os.path.join(feature_dir, image_files[0])).shape
            self.num_patches, self.dim = shape[0] - 1, shape[1]

    @staticmethod
    def add_parser_args(parser):
        parser.add_argument("--feature_dir", type=str, default="features", help="directory of cached feature files")

    @classmethod
    def from_args(cls, args):
        return cls(args.feature_dir)

    def path(self, kind, *key):
        return os.path.join(self.feature_dir, f"{kind}-{stable_seed(*key):08x}.f32")

    def _load(self, kind, *key):
        path = self.path(kind, *key)
        if not os.path.exists(path):
            raise FeatureError(f"no cached {kind} features for {key!r} ({path})")
        return load_matrix(path)

    def image_features(self, image_ref):
        rows = torch.from_numpy(self._load("image", image_ref))
        if rows.size(0) < 2:
            raise FeatureError(f"cached image features for {image_ref!r} hold no patch rows")
        return PatchFeatures(cls=rows[0], patches=rows[1:])

    def text_features(self, sentence):
        return TokenFeatures.from_tokens(torch.from_numpy(self._load("text", sentence)))

    def region_embedding(self, image_ref, bbox=None):
        if bbox is None:
            return self._load("image", image_ref)[1:].mean(axis=0)
        return self._load("region", image_ref, *bbox)[0]

    @classmethod
    def materialize(cls, source, feature_dir, image_refs=(), sentences=(), regions=()):
        """Write `source`'s features for the given inputs and return a reader over them."""
        writer = cls.__new__(cls)
        writer.feature_dir = feature_dir
        for ref in image_refs:
            feats = source.image_features(ref)
            rows = torch.cat([feats.cls.unsqueeze(0), feats.patches]).numpy()
            save_matrix(writer.path("image", ref), rows)
        for sentence in sentences:
            save_matrix(writer.path("text", sentence), source.text_features(sentence).tokens.numpy())
        for ref, bbox in regions:
            save_matrix(writer.path("region", ref, *bbox), np.asarray(source.region_embedding(ref, bbox))[None, :])
        return cls(feature_dir)
