"""Gaussian naive Bayes on weighted instances.

Per (class, feature) Gaussians use weighted means and variances with a 1e-9
variance floor; class priors are weighted. Posterior ties predict Warning,
and the posterior is invariant to rescaling all weights by a constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import DataError
from ..trajdata import ClassLabel
from .core import as_arrays
from .tree import _as_query_row

VARIANCE_FLOOR = 1e-9


@dataclass
class NaiveBayesModel:
    log_prior: np.ndarray  # (2,)
    mean: np.ndarray       # (2, 5)
    var: np.ndarray        # (2, 5)


def train_naive_bayes(instances) -> NaiveBayesModel:
    X, y, w = as_arrays(instances)
    log_prior = np.empty(2)
    mean = np.empty((2, 5))
    var = np.empty((2, 5))
    total_w = w.sum()
    if total_w <= 0:
        raise DataError("empty training set")
    for cls in (0, 1):
        mask = y == cls
        cw = w[mask].sum()
        if cw <= 0:
            raise DataError(f"class {cls} is empty")
        log_prior[cls] = math.log(cw / total_w)
        mu = (w[mask, None] * X[mask]).sum(axis=0) / cw
        mean[cls] = mu
        var[cls] = np.maximum((w[mask, None] * (X[mask] - mu) ** 2).sum(axis=0) / cw,
                              VARIANCE_FLOOR)
    return NaiveBayesModel(log_prior=log_prior, mean=mean, var=var)


def predict_nb_batch(model: NaiveBayesModel, X: np.ndarray) -> np.ndarray:
    Q = np.ascontiguousarray(X, dtype=np.float64)
    logp = np.empty((Q.shape[0], 2))
    for cls in (0, 1):
        z = (Q - model.mean[cls]) ** 2 / model.var[cls]
        logp[:, cls] = model.log_prior[cls] - 0.5 * (
            np.log(2.0 * np.pi * model.var[cls]).sum() + z.sum(axis=1))
    return (logp[:, 1] >= logp[:, 0]).astype(np.int8)


def predict_nb(model: NaiveBayesModel, fv) -> ClassLabel:
    row = _as_query_row(fv).reshape(1, 5)
    return ClassLabel(int(predict_nb_batch(model, row)[0]))
