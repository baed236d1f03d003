import os
import shutil
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SRC = os.path.join(ROOT, "src")
if SRC not in sys.path:
    sys.path.insert(0, SRC)

TOY_DATASET = os.path.join(SRC, "data", "toy")


@pytest.fixture
def toy_dataset(tmp_path):
    """A writable copy of the bundled toy dataset."""
    target = tmp_path / "toy"
    shutil.copytree(TOY_DATASET, target)
    return str(target)


@pytest.fixture
def toy_train():
    from utils.dataset import load_split
    return load_split(TOY_DATASET, "train")


@pytest.fixture
def mock_engine():
    from engine import MockEngine
    return MockEngine()


@pytest.fixture
def synthetic_features():
    from features import SyntheticFeatures
    return SyntheticFeatures(dim=16, num_patches=8, seed=0)
