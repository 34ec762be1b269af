"""C4.5-style decision tree induction with gain ratio and pessimistic pruning.

Numeric splits only (all five features are numeric). Induction follows the
classic recipe: candidate thresholds are midpoints between consecutive
distinct sorted values, the chosen split maximizes gain ratio among candidates
whose information gain reaches the mean candidate gain, and recursion stops on
purity, low weight or the absence of a positive-gain split. Pruning is
subtree replacement driven by the pessimistic error estimate at a given
confidence factor.

With max_depth=1 the tree degenerates to a decision stump whose threshold
minimizes weighted misclassification cost; that is the mode used to extract
critical indicator thresholds from data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..exceptions import DataError
from ..trajdata import ClassLabel
from . import _engine
from .core import training_arrays

DEFAULT_CONFIDENCE = 0.25

# C4.5 confidence-to-deviation interpolation table
_CF_VALUES = (0.0, 0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.40, 1.00)
_CF_DEVIATIONS = (4.0, 3.09, 2.58, 2.33, 1.65, 1.28, 0.84, 0.25, 0.00)


@dataclass
class TreeModel:
    """A binary decision tree over the five features, as flat node arrays.

    feature[i] < 0 marks a leaf. Internal nodes route queries with
    value <= threshold to the left child. Every node carries its weighted
    class totals (warn_weight, safe_weight).
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    warn_weight: np.ndarray
    safe_weight: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def is_leaf(self, i: int) -> bool:
        return self.feature[i] < 0

    @property
    def root_feature(self) -> int:
        if self.is_leaf(0):
            raise DataError("tree is a single leaf; no root split")
        return int(self.feature[0])

    @property
    def root_threshold(self) -> float:
        if self.is_leaf(0):
            raise DataError("tree is a single leaf; no root split")
        return float(self.threshold[0])

    def leaves(self) -> list[int]:
        return [i for i in range(self.n_nodes) if self.is_leaf(i)]


def _coefficient(confidence: float) -> float:
    """Squared normal deviate for the pessimistic error bound, interpolated
    from the canonical C4.5 table."""
    if confidence <= 0 or confidence >= 1:
        raise DataError(f"confidence must be in (0, 1), got {confidence}")
    i = 0
    while confidence > _CF_VALUES[i]:
        i += 1
    lo_v, hi_v = _CF_VALUES[i - 1], _CF_VALUES[i]
    lo_d, hi_d = _CF_DEVIATIONS[i - 1], _CF_DEVIATIONS[i]
    dev = lo_d + (hi_d - lo_d) * (confidence - lo_v) / (hi_v - lo_v)
    return dev * dev


def added_errors(total: float, errors: float, confidence: float = DEFAULT_CONFIDENCE) -> float:
    """Pessimistic extra errors for a leaf seeing `errors` of `total` weight."""
    if total <= 0.0:
        return 0.0
    if errors < 1e-6:
        return total * (1.0 - math.exp(math.log(confidence) / total))
    if errors < 0.9999:
        base = total * (1.0 - math.exp(math.log(confidence) / total))
        return base + errors * (added_errors(total, 1.0, confidence) - base)
    if errors + 0.5 >= total:
        return 0.67 * (total - errors)
    coeff = _coefficient(confidence)
    pr = (errors + 0.5 + coeff / 2.0
          + math.sqrt(coeff * ((errors + 0.5) * (1.0 - (errors + 0.5) / total) + coeff / 4.0))
          ) / (total + coeff)
    return total * pr - errors


def _prune(model: TreeModel, confidence: float) -> TreeModel:
    """Bottom-up subtree replacement: collapse a node to a leaf when the
    pessimistic leaf estimate does not exceed the subtree estimate."""
    feat = model.feature.copy()
    thr = model.threshold.copy()
    left = model.left.copy()
    right = model.right.copy()
    w1 = model.warn_weight
    w0 = model.safe_weight

    def leaf_estimate(i: int) -> float:
        total = w1[i] + w0[i]
        err = total - max(w1[i], w0[i])
        return err + added_errors(total, err, confidence)

    def visit(i: int) -> float:
        if feat[i] < 0:
            return leaf_estimate(i)
        subtree_est = visit(left[i]) + visit(right[i])
        leaf_est = leaf_estimate(i)
        if leaf_est <= subtree_est + 1e-9:
            feat[i] = -1
            left[i] = -1
            right[i] = -1
            return leaf_est
        return subtree_est

    visit(0)

    # compact away detached nodes so serialized trees carry no dead records
    keep_order: list[int] = []

    def collect(i: int) -> None:
        keep_order.append(i)
        if feat[i] >= 0:
            collect(left[i])
            collect(right[i])

    collect(0)
    remap = {old: new for new, old in enumerate(keep_order)}
    idx = np.array(keep_order, dtype=np.int64)
    new_left = np.array([remap[left[i]] if feat[i] >= 0 else -1 for i in keep_order],
                        dtype=np.int32)
    new_right = np.array([remap[right[i]] if feat[i] >= 0 else -1 for i in keep_order],
                         dtype=np.int32)
    return TreeModel(feat[idx], thr[idx], new_left, new_right, w1[idx], w0[idx],
                     params=dict(model.params))


def train_c45(instances, *, min_leaf_weight: float = 2.0, prune: bool = True,
              confidence: float = DEFAULT_CONFIDENCE,
              max_depth: int | None = None) -> TreeModel:
    """Induce a decision tree from weighted labeled instances.

    min_leaf_weight sets the stopping rule (a node with total weight below
    2 * min_leaf_weight becomes a leaf). With prune=True the grown tree gets
    pessimistic subtree-replacement pruning at the given confidence.
    max_depth=1 produces the minimum-cost stump described in the module
    docstring (pruning is skipped: a stump is already minimal).
    """
    X, y, w = training_arrays(instances)
    if min_leaf_weight <= 0:
        raise DataError("min_leaf_weight must be positive")
    depth = 0 if max_depth is None else int(max_depth)
    if max_depth is not None and depth < 1:
        raise DataError("max_depth must be >= 1 when given")
    stump = depth == 1

    Xf = np.asfortranarray(X)
    order = _engine.presort(Xf)
    nodes = _engine.build_tree(Xf, y, w, order, X.shape[1], 2.0 * min_leaf_weight,
                               depth, stump, 0)
    if stump and nodes[0][0] < 0:
        # depth-1 extraction needs a root split; only constant features or a
        # pure/underweight node land here
        w1, w0 = nodes[4][0], nodes[5][0]
        if w1 > 0 and w0 > 0 and w1 + w0 >= 2.0 * min_leaf_weight:
            raise DataError("no candidate split: the feature is constant")
    model = TreeModel(*nodes, params={
        "min_leaf_weight": min_leaf_weight,
        "prune": prune and not stump,
        "confidence": confidence,
        "max_depth": max_depth,
    })
    if prune and not stump:
        model = _prune(model, confidence)
    return model


def min_cost_label(p_warn: float, cost) -> ClassLabel:
    """Label minimizing expected misclassification cost at warning
    probability p_warn; ties predict Warning."""
    expected_if_safe = p_warn * cost.cost_fn
    expected_if_warn = (1.0 - p_warn) * cost.cost_fp
    return ClassLabel.WARNING if expected_if_warn <= expected_if_safe else ClassLabel.SAFE


def predict_tree(model: TreeModel, fv, cost=None) -> tuple[ClassLabel, float]:
    """Route one feature vector to its leaf.

    Returns (label, warning_probability); the leaf predicts its weighted
    majority with ties resolved to Warning. With a CostMatrix in `cost` the
    label instead minimizes the expected misclassification cost at the leaf
    probability.
    """
    row = _as_query_row(fv)
    node = 0
    while model.feature[node] >= 0:
        if row[model.feature[node]] <= model.threshold[node]:
            node = model.left[node]
        else:
            node = model.right[node]
    w1 = model.warn_weight[node]
    w0 = model.safe_weight[node]
    p_warn = float(w1 / (w1 + w0))
    if cost is not None:
        return min_cost_label(p_warn, cost), p_warn
    label = ClassLabel.WARNING if w1 >= w0 else ClassLabel.SAFE
    return label, p_warn


def predict_tree_batch(model: TreeModel, X: np.ndarray) -> np.ndarray:
    """Vectorized predict_tree labels over an (n, 5) query array."""
    Q = np.ascontiguousarray(X, dtype=np.float64)
    leaf = _engine.tree_leaf_stats(model.feature, model.threshold,
                                   model.left, model.right, Q)
    return (model.warn_weight[leaf] >= model.safe_weight[leaf]).astype(np.int8)


def _as_query_row(fv) -> np.ndarray:
    if hasattr(fv, "as_row"):
        return np.asarray(fv.as_row(), dtype=np.float64)
    row = np.asarray(fv, dtype=np.float64)
    if row.shape != (5,):
        raise DataError(f"expected a 5-feature vector, got shape {row.shape}")
    return row
