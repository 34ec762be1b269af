"""Cost matrices, instance reweighting and array plumbing shared by the learners."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from ..exceptions import ConfigError, DataError
from ..trajdata import ClassLabel, Dataset, LabeledInstance


@dataclass(frozen=True)
class CostMatrix:
    """Misclassification costs: cost_fn for a missed warning, cost_fp for a
    false alarm. Diagonal costs are fixed at zero."""

    cost_fn: float = 5.0
    cost_fp: float = 1.0

    def __post_init__(self):
        if self.cost_fn < 0 or self.cost_fp < 0:
            raise ConfigError("costs must be non-negative")
        if self.cost_fn == 0 and self.cost_fp == 0:
            raise ConfigError("at least one misclassification cost must be positive")

    @classmethod
    def parse(cls, text: str) -> "CostMatrix":
        """Parse the FN:FP form used on the command line, e.g. '5:1'."""
        parts = text.split(":")
        if len(parts) != 2:
            raise ConfigError(f"cost must look like FN:FP, got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ConfigError(f"cost must look like FN:FP, got {text!r}") from None

    @property
    def identity(self) -> bool:
        return self.cost_fn == self.cost_fp == 1.0


def apply_cost_reweighting(instances, cm: CostMatrix):
    """Scale Warning instance weights by cost_fn and Safe weights by cost_fp.

    Accepts a Dataset (returns a Dataset) or a sequence of LabeledInstance
    (returns a list); order is preserved either way.
    """
    if isinstance(instances, Dataset):
        scale = np.where(instances.y == 1, cm.cost_fn, cm.cost_fp)
        return instances.with_weights(instances.w * scale)
    out = []
    for inst in instances:
        factor = cm.cost_fn if inst.label == ClassLabel.WARNING else cm.cost_fp
        out.append(replace(inst, weight=inst.weight * factor))
    return out


def as_arrays(instances) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (X, y, w) float64/int8/float64 arrays for a Dataset or sequence."""
    if isinstance(instances, Dataset):
        return instances.X, instances.y, instances.w
    if len(instances) == 0:
        raise DataError("empty training set")
    X = np.array([inst.features for inst in instances], dtype=np.float64)
    y = np.array([int(inst.label) for inst in instances], dtype=np.int8)
    w = np.array([inst.weight for inst in instances], dtype=np.float64)
    return X, y, w


def training_arrays(instances) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """as_arrays plus validation: drop zero-weight rows, require weight > 0 left."""
    X, y, w = as_arrays(instances)
    if np.any(w > 0) and np.any(w == 0):
        keep = w > 0
        X, y, w = X[keep], y[keep], w[keep]
    if X.shape[0] == 0 or not np.any(w > 0):
        raise DataError("empty training set")
    return X, y, w
