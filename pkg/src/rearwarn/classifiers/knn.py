"""k-nearest-neighbor classifier with per-dimension min-max normalization.

Features normalize to [0, 1] using the training ranges (constant dimensions
map to 0). Votes are weighted by instance weight; distance ties resolve in
training order and vote ties predict Warning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import DataError
from ..trajdata import ClassLabel
from .core import as_arrays
from .tree import _as_query_row

_CHUNK = 512


@dataclass
class KnnModel:
    k: int
    mins: np.ndarray
    ranges: np.ndarray     # zero entries mark constant training dimensions
    Xn: np.ndarray         # normalized training matrix
    y: np.ndarray
    w: np.ndarray


def _normalize(X: np.ndarray, mins: np.ndarray, ranges: np.ndarray) -> np.ndarray:
    safe = np.where(ranges > 0, ranges, 1.0)
    out = (X - mins) / safe
    return np.where(ranges > 0, out, 0.0)


def train_knn(instances, k: int) -> KnnModel:
    X, y, w = as_arrays(instances)
    if k < 1:
        raise DataError("k must be >= 1")
    if k > X.shape[0]:
        raise DataError(f"k={k} exceeds the {X.shape[0]} training instances")
    mins = X.min(axis=0)
    ranges = X.max(axis=0) - mins
    return KnnModel(k=k, mins=mins, ranges=ranges,
                    Xn=_normalize(X, mins, ranges), y=y.copy(), w=w.copy())


def predict_knn_batch(model: KnnModel, X: np.ndarray) -> np.ndarray:
    Q = _normalize(np.ascontiguousarray(X, dtype=np.float64), model.mins, model.ranges)
    out = np.empty(Q.shape[0], dtype=np.int8)
    for lo in range(0, Q.shape[0], _CHUNK):
        chunk = Q[lo:lo + _CHUNK]
        d2 = ((chunk[:, None, :] - model.Xn[None, :, :]) ** 2).sum(axis=2)
        # stable sort keeps training order among exactly tied distances
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :model.k]
        wk = model.w[nearest]
        warn = np.where(model.y[nearest] == 1, wk, 0.0).sum(axis=1)
        safe = np.where(model.y[nearest] == 0, wk, 0.0).sum(axis=1)
        out[lo:lo + chunk.shape[0]] = (warn >= safe).astype(np.int8)
    return out


def predict_knn(model: KnnModel, fv) -> ClassLabel:
    row = _as_query_row(fv).reshape(1, 5)
    return ClassLabel(int(predict_knn_batch(model, row)[0]))
