from .base import FeatureProvider, split_words, stable_seed
from .synthetic import SyntheticFeatures
from .cached import CachedFeatures, load_matrix, save_matrix
