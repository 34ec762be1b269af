import numpy as np
import pytest

from rearwarn import GeneratorConfig, generate_synthetic_dataset
from rearwarn.features import dataset_from_episodes
from rearwarn.trajdata import Dataset


@pytest.fixture(scope="session")
def default_corpus() -> Dataset:
    """The full default synthetic corpus (~40k samples)."""
    episodes = generate_synthetic_dataset(GeneratorConfig(), seed=42)
    return dataset_from_episodes(episodes, seed=42)


@pytest.fixture(scope="session")
def small_corpus() -> Dataset:
    """A small corpus (~5k samples) for quick end-to-end tests."""
    episodes = generate_synthetic_dataset(GeneratorConfig(n_episodes=10), seed=7)
    return dataset_from_episodes(episodes, seed=7)


@pytest.fixture()
def blob_dataset():
    """Overlapping 2-class blobs in 5-D with a 3:1 Safe:Warning imbalance."""
    def make(n=800, seed=0, imbalance=3):
        rng = np.random.default_rng(seed)
        n_warn = n // (imbalance + 1)
        n_safe = n - n_warn
        X_safe = rng.normal(loc=0.0, scale=1.0, size=(n_safe, 5))
        X_warn = rng.normal(loc=1.0, scale=1.0, size=(n_warn, 5))
        X = np.vstack([X_safe, X_warn]) + 5.0
        y = np.concatenate([np.zeros(n_safe, np.int8), np.ones(n_warn, np.int8)])
        perm = rng.permutation(n)
        return Dataset(np.abs(X[perm]), y[perm])
    return make
