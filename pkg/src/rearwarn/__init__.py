"""rearwarn: a rear-end collision warning toolkit.

Trains cost-sensitive classifiers on labeled vehicle-trajectory data,
benchmarks them against seven classical perceptual and kinematic warning
algorithms, selects the best model with TOPSIS and serves warnings over a
line-oriented streaming interface.
"""

__version__ = "0.1.0"

from .exceptions import ConfigError, DataError
from .features import (DEFAULT_INDICATOR_CAP, NO_THREAT, FeatureVector,
                       build_feature_vector, compute_tg, compute_ttc)
from .trajdata import (ClassLabel, Dataset, Episode, GeneratorConfig, LabeledInstance,
                       TrajectorySample, generate_synthetic_dataset, label_episode,
                       parse_episode_csv, split_dataset)

__all__ = [
    "ClassLabel",
    "ConfigError",
    "DEFAULT_INDICATOR_CAP",
    "DataError",
    "Dataset",
    "Episode",
    "FeatureVector",
    "GeneratorConfig",
    "LabeledInstance",
    "NO_THREAT",
    "TrajectorySample",
    "build_feature_vector",
    "compute_tg",
    "compute_ttc",
    "generate_synthetic_dataset",
    "label_episode",
    "parse_episode_csv",
    "split_dataset",
]
