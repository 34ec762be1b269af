"""Random forest: bagged unpruned trees with per-node feature subsampling.

Each tree trains on a weighted bootstrap resample (N draws proportional to
instance weights, drawn instances carrying unit weight) and considers a fresh
random subset of features at every node. Per-tree random streams derive from
(seed, tree index), so training is reproducible regardless of how trees are
scheduled; with more than one CPU trees are grown in parallel threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import DataError
from ..trajdata import ClassLabel
from . import _engine
from .core import training_arrays
from .tree import TreeModel, _as_query_row, min_cost_label


@dataclass
class ForestModel:
    trees: list[TreeModel]
    n_trees: int
    features_per_split: int
    bootstrap: bool
    seed: int
    params: dict = field(default_factory=dict)
    _packed: tuple | None = field(default=None, repr=False, compare=False)

    def packed(self) -> tuple:
        """Concatenated node arrays plus tree offsets, for batch prediction."""
        if self._packed is None:
            offsets = np.zeros(len(self.trees) + 1, dtype=np.int64)
            for i, t in enumerate(self.trees):
                offsets[i + 1] = offsets[i] + t.n_nodes
            feat = np.concatenate([t.feature for t in self.trees])
            thr = np.concatenate([t.threshold for t in self.trees])
            left = np.concatenate([t.left for t in self.trees])
            right = np.concatenate([t.right for t in self.trees])
            w1 = np.concatenate([t.warn_weight for t in self.trees])
            w0 = np.concatenate([t.safe_weight for t in self.trees])
            self._packed = (feat, thr, left, right, w1, w0, offsets)
        return self._packed


def _tree_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def train_random_forest(instances, *, n_trees: int = 100, features_per_split: int = 3,
                        bootstrap: bool = True, seed: int = 0,
                        min_leaf_weight: float = 2.0,
                        n_jobs: int | None = None) -> ForestModel:
    """Train a forest of unpruned gain-ratio trees.

    With bootstrap=False every tree sees the full weighted set; combined with
    n_trees=1 and features_per_split=5 this reproduces a single unpruned tree.
    """
    if n_trees < 1:
        raise DataError("n_trees must be >= 1")
    if not 1 <= features_per_split <= 5:
        raise DataError("features_per_split must be in 1..5")
    if seed < 0:
        raise DataError("seed must be non-negative")
    X, y, w = training_arrays(instances)
    n = X.shape[0]
    Xf = np.asfortranarray(X)
    base_order = _engine.presort(Xf)
    min_total = 2.0 * min_leaf_weight

    if bootstrap:
        # cumulative-weight inversion so draws are proportional to weights;
        # a resample is its multiplicity vector over the base rows
        cum = np.cumsum(w)
        cum /= cum[-1]
        xlt = _engine.xlogx_table(n)
    else:
        w_int = _engine.integer_weights(w)
        if w_int is not None:
            xlt = _engine.xlogx_table(int(w_int.sum()))

    def grow(index: int) -> TreeModel:
        ts = _tree_seed(seed, index)
        if bootstrap:
            u = np.random.default_rng(np.random.SeedSequence([seed, index, 1])).random(n)
            pick = np.searchsorted(cum, u, side="right")
            counts = np.bincount(pick, minlength=n).astype(np.int64)
            mask = counts[base_order] > 0
            n_sub = int(mask[0].sum())
            order = np.ascontiguousarray(base_order[mask].reshape(X.shape[1], n_sub))
            nodes = _engine.grow_tree(Xf, y, w, counts, order, features_per_split,
                                      min_total, 0, False, ts, True, xlt)
        elif w_int is not None:
            nodes = _engine.grow_tree(Xf, y, w, w_int, base_order.copy(),
                                      features_per_split, min_total, 0, False,
                                      ts, True, xlt)
        else:
            nodes = _engine.grow_tree(Xf, y, w, _engine._EMPTY_INT, base_order.copy(),
                                      features_per_split, min_total, 0, False,
                                      ts, False, _engine._EMPTY_TAB)
        return TreeModel(*nodes)

    workers = n_jobs if n_jobs is not None else min(os.cpu_count() or 1, n_trees)
    if workers > 1 and n_trees > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            trees = list(ex.map(grow, range(n_trees)))
    else:
        trees = [grow(i) for i in range(n_trees)]

    return ForestModel(trees=trees, n_trees=n_trees, features_per_split=features_per_split,
                       bootstrap=bootstrap, seed=seed,
                       params={"min_leaf_weight": min_leaf_weight})


def predict_forest(model: ForestModel, fv, cost=None) -> tuple[ClassLabel, float]:
    """Majority vote over trees; ties predict Warning.

    Returns (label, vote_fraction) where vote_fraction is warning votes over
    the number of trees. With a CostMatrix in `cost` the label minimizes the
    expected misclassification cost at the vote fraction instead.
    """
    row = _as_query_row(fv).reshape(1, 5)
    feat, thr, left, right, w1, w0, offsets = model.packed()
    votes = int(_engine.forest_votes(feat, thr, left, right, w1, w0, offsets, row)[0])
    frac = votes / model.n_trees
    if cost is not None:
        return min_cost_label(frac, cost), frac
    label = ClassLabel.WARNING if votes * 2 >= model.n_trees else ClassLabel.SAFE
    return label, frac


def predict_forest_batch(model: ForestModel, X: np.ndarray) -> np.ndarray:
    """Vectorized majority-vote labels over an (n, 5) query array."""
    Q = np.ascontiguousarray(X, dtype=np.float64)
    feat, thr, left, right, w1, w0, offsets = model.packed()
    votes = _engine.forest_votes(feat, thr, left, right, w1, w0, offsets, Q)
    return (votes * 2 >= model.n_trees).astype(np.int8)
