import numpy as np
import pytest

from rearwarn import ClassLabel, DataError
from rearwarn.classifiers import (CostMatrix, apply_cost_reweighting, predict_knn,
                                  predict_knn_batch, predict_nb, predict_nb_batch,
                                  train_knn, train_naive_bayes)
from rearwarn.trajdata import Dataset


def _ds(X, y, w=None):
    return Dataset(np.asarray(X, float), np.asarray(y, np.int8),
                   None if w is None else np.asarray(w, float))


def test_knn_memorizes_training_points():
    rng = np.random.default_rng(0)
    X = rng.uniform(size=(40, 5))
    y = rng.integers(0, 2, 40).astype(np.int8)
    model = train_knn(_ds(X, y), k=1)
    assert np.array_equal(predict_knn_batch(model, X), y)


def test_knn_global_vote_with_weights():
    # k=N on a 5:1 set reweighted (5,1): warning weight 5, safe weight 5 -> tie -> Warning
    X = np.zeros((6, 5))
    X[:, 0] = np.arange(6)
    y = np.array([1, 0, 0, 0, 0, 0], np.int8)
    ds = apply_cost_reweighting(_ds(X, y), CostMatrix(5, 1))
    model = train_knn(ds, k=6)
    assert predict_knn(model, [2.5, 0, 0, 0, 0]) == ClassLabel.WARNING
    # without reweighting the safe majority wins
    model_plain = train_knn(_ds(X, y), k=6)
    assert predict_knn(model_plain, [2.5, 0, 0, 0, 0]) == ClassLabel.SAFE


def test_knn_distance_ties_break_by_training_order():
    # two training points at the same location, different labels: the earlier wins
    X = np.zeros((3, 5))
    X[0, 0] = 1.0
    X[1, 0] = 1.0
    X[2, 0] = 5.0
    y = np.array([0, 1, 1], np.int8)
    model = train_knn(_ds(X, y), k=1)
    assert predict_knn(model, [1.0, 0, 0, 0, 0]) == ClassLabel.SAFE
    y2 = np.array([1, 0, 1], np.int8)
    model2 = train_knn(_ds(X, y2), k=1)
    assert predict_knn(model2, [1.0, 0, 0, 0, 0]) == ClassLabel.WARNING


def test_knn_constant_dimension_maps_to_zero():
    X = np.ones((4, 5))
    X[:, 0] = [0, 1, 2, 3]
    y = np.array([0, 0, 1, 1], np.int8)
    model = train_knn(_ds(X, y), k=1)
    assert model.ranges[1] == 0.0
    assert np.all(model.Xn[:, 1] == 0.0)
    assert predict_knn(model, [3.0, 99.0, 1, 1, 1]) == ClassLabel.WARNING


def test_knn_k_validation():
    X = np.zeros((3, 5))
    y = np.array([0, 1, 0], np.int8)
    with pytest.raises(DataError):
        train_knn(_ds(X, y), k=4)
    with pytest.raises(DataError):
        train_knn(_ds(X, y), k=0)


def test_knn_vote_tie_predicts_warning():
    X = np.zeros((2, 5))
    X[0, 0] = 1.0
    X[1, 0] = 3.0
    y = np.array([0, 1], np.int8)
    model = train_knn(_ds(X, y), k=2)
    assert predict_knn(model, [2.0, 0, 0, 0, 0]) == ClassLabel.WARNING


def test_nb_symmetric_tie_predicts_warning():
    # offsets of 0.5 keep both class variances bitwise equal
    X = np.zeros((8, 5))
    X[:4, 0] = [1.0, 1.5, 0.5, 1.0]
    X[4:, 0] = [3.0, 3.5, 2.5, 3.0]
    y = np.array([1, 1, 1, 1, 0, 0, 0, 0], np.int8)
    model = train_naive_bayes(_ds(X, y))
    assert predict_nb(model, [2.0, 0, 0, 0, 0]) == ClassLabel.WARNING


def test_nb_dominant_likelihood():
    rng = np.random.default_rng(1)
    X = np.vstack([rng.normal(0, 1, size=(50, 5)), rng.normal(6, 1, size=(50, 5))])
    y = np.array([0] * 50 + [1] * 50, np.int8)
    model = train_naive_bayes(_ds(np.abs(X), y))
    assert predict_nb(model, np.full(5, 6.0)) == ClassLabel.WARNING
    assert predict_nb(model, np.full(5, 0.5)) == ClassLabel.SAFE


def test_nb_weight_scale_invariance():
    rng = np.random.default_rng(2)
    X = np.abs(rng.normal(2, 1, size=(60, 5)))
    y = (X[:, 0] > 2).astype(np.int8)
    w = rng.uniform(0.5, 2.0, size=60)
    m1 = train_naive_bayes(_ds(X, y, w))
    m2 = train_naive_bayes(_ds(X, y, w * 7.5))
    Q = np.abs(rng.normal(2, 1, size=(200, 5)))
    assert np.array_equal(predict_nb_batch(m1, Q), predict_nb_batch(m2, Q))
    assert np.allclose(m1.mean, m2.mean)
    assert np.allclose(m1.var, m2.var)


def test_nb_empty_class_rejected():
    X = np.zeros((3, 5))
    y = np.array([1, 1, 1], np.int8)
    with pytest.raises(DataError):
        train_naive_bayes(_ds(X, y))


def test_nb_variance_floor_on_constant_feature():
    X = np.ones((6, 5))
    X[:3, 0] = 1.0
    X[3:, 0] = 2.0
    y = np.array([0, 0, 0, 1, 1, 1], np.int8)
    model = train_naive_bayes(_ds(X, y))
    assert np.all(model.var >= 1e-9)
    assert predict_nb(model, [2.0, 1, 1, 1, 1]) == ClassLabel.WARNING
