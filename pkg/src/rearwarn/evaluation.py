"""Evaluation harness: confusion metrics, timing, threshold sweeps,
data-driven critical thresholds and the multi-scenario comparison grid."""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import baselines
from .classifiers import (CostMatrix, apply_cost_reweighting, predict_forest_batch,
                          predict_knn_batch, predict_nb_batch, predict_tree_batch,
                          train_c45, train_knn, train_naive_bayes, train_random_forest)
from .exceptions import ConfigError, DataError
from .features import TG, TTC
from .trajdata import Dataset, split_dataset

COMPARISON_CSV_HEADER = "method,scenario,seed,accuracy,sensitivity,specificity,time_s"

INDICATOR_COLUMNS = {"ttc": TTC, "tg": TG}


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with Warning as the positive class."""

    tp: int
    fn: int
    fp: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fn + self.fp + self.tn


@dataclass(frozen=True)
class Metrics:
    accuracy: float | None
    sensitivity: float | None
    specificity: float | None


def confusion(predictions: Sequence[int], labels: Sequence[int]) -> ConfusionMatrix:
    preds = np.asarray(predictions)
    labs = np.asarray(labels)
    if preds.shape != labs.shape or preds.ndim != 1:
        raise DataError("predictions and labels must be equal-length 1-D sequences")
    if preds.size == 0:
        raise DataError("empty prediction sequence")
    tp = int(np.count_nonzero((labs == 1) & (preds == 1)))
    fn = int(np.count_nonzero((labs == 1) & (preds == 0)))
    fp = int(np.count_nonzero((labs == 0) & (preds == 1)))
    tn = int(np.count_nonzero((labs == 0) & (preds == 0)))
    return ConfusionMatrix(tp=tp, fn=fn, fp=fp, tn=tn)


def metrics(cm: ConfusionMatrix) -> Metrics:
    """Accuracy, sensitivity and specificity; a ratio with an absent class is
    reported as None rather than coerced to zero."""
    if cm.total <= 0:
        raise DataError("confusion matrix is empty")
    accuracy = (cm.tp + cm.tn) / cm.total
    sensitivity = cm.tp / (cm.tp + cm.fn) if cm.tp + cm.fn > 0 else None
    specificity = cm.tn / (cm.tn + cm.fp) if cm.tn + cm.fp > 0 else None
    return Metrics(accuracy=accuracy, sensitivity=sensitivity, specificity=specificity)


@dataclass(frozen=True)
class EvaluationReport:
    method: str
    scenario: float
    seed: int
    accuracy: float | None
    sensitivity: float | None
    specificity: float | None
    time_s: float
    cm: ConfusionMatrix | None = None


# ---------------------------------------------------------------------------
# Method registry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Method:
    """A named way to produce labels for validation rows.

    Classifiers train on the (reweighted) training set; baselines only
    predict, so their processing time is prediction-only.
    """

    name: str
    needs_training: bool
    train: Callable | None          # (dataset, seed) -> model
    predict: Callable               # (model, X) -> labels


def resolve_method(spec: str, forest_params: dict | None = None,
                   baseline_params: dict | None = None) -> Method:
    """Build a Method from a name like 'rf', 'c45', 'nb', 'knn:3' or a
    baseline preset name. baseline_params maps preset names to parameter
    objects overriding the defaults."""
    name, _, arg = spec.partition(":")
    fp = forest_params or {}
    if name == "rf":
        kw = {k: fp[k] for k in ("n_trees", "features_per_split", "bootstrap",
                                 "min_leaf_weight") if k in fp}
        return Method(spec, True,
                      lambda ds, seed: train_random_forest(ds, seed=seed, **kw),
                      predict_forest_batch)
    if name == "c45":
        return Method(spec, True, lambda ds, seed: train_c45(ds), predict_tree_batch)
    if name == "knn":
        k = int(arg) if arg else 1
        return Method(spec, True, lambda ds, seed: train_knn(ds, k), predict_knn_batch)
    if name == "nb":
        return Method(spec, True, lambda ds, seed: train_naive_bayes(ds), predict_nb_batch)
    if name in baselines.PRESETS:
        params = (baseline_params or {}).get(name)
        return Method(spec, False, None,
                      lambda _model, X, _n=name, _p=params: baselines.decide_rows(_n, X, _p))
    raise ConfigError(f"unknown method {spec!r}")


def evaluate_classifier(trainer: Method, train: Dataset, validation: Dataset,
                        cm_cost: CostMatrix, *, scenario: float = 0.0,
                        seed: int = 0, repeats: int = 1) -> EvaluationReport:
    """Reweight, train, predict the validation set and report metrics.

    Processing time is wall-clock training plus validation prediction; with
    repeats > 1 the median over repeats is reported to tame timer noise.
    """
    if repeats < 1:
        raise ConfigError("repeats must be >= 1")
    times = []
    preds = None
    for _ in range(repeats):
        if trainer.needs_training:
            weighted = apply_cost_reweighting(train, cm_cost)
            t0 = time.perf_counter()
            model = trainer.train(weighted, seed)
            preds = trainer.predict(model, validation.X)
            times.append(time.perf_counter() - t0)
        else:
            t0 = time.perf_counter()
            preds = trainer.predict(None, validation.X)
            times.append(time.perf_counter() - t0)
    cm = confusion(preds, validation.y)
    m = metrics(cm)
    return EvaluationReport(method=trainer.name, scenario=scenario, seed=seed,
                            accuracy=m.accuracy, sensitivity=m.sensitivity,
                            specificity=m.specificity,
                            time_s=float(np.median(times)), cm=cm)


# ---------------------------------------------------------------------------
# Threshold sweeps and data-driven critical thresholds
# ---------------------------------------------------------------------------

def sweep_threshold(indicator: str, data: Dataset,
                    thresholds: Sequence[float]) -> list[tuple[float, float, float]]:
    """Evaluate the perceptual rule `indicator <= threshold` per threshold.

    Returns (threshold, sensitivity, specificity) triples; sensitivity is
    non-decreasing and specificity non-increasing in the threshold.
    """
    if len(thresholds) == 0:
        raise ConfigError("empty threshold list")
    if list(thresholds) != sorted(thresholds):
        raise ConfigError("thresholds must be sorted ascending")
    col = data.X[:, _indicator_column(indicator)]
    warn_mask = data.y == 1
    n_warn = int(warn_mask.sum())
    n_safe = len(data.y) - n_warn
    if n_warn == 0 or n_safe == 0:
        raise DataError("threshold sweep needs both classes present")
    out = []
    for t in thresholds:
        pred_warn = col <= t
        tp = int(np.count_nonzero(pred_warn & warn_mask))
        fp = int(np.count_nonzero(pred_warn & ~warn_mask))
        out.append((float(t), tp / n_warn, (n_safe - fp) / n_safe))
    return out


def extract_critical_threshold(indicator: str, data: Dataset, cm: CostMatrix,
                               *, depth: int | None = 1) -> float:
    """Critical indicator threshold from a cost-reweighted single-feature tree.

    depth=1 (the default) returns the stump threshold that minimizes the
    weighted training cost over all candidate midpoints. depth=None grows a
    full pruned tree and reads the threshold off its root.
    """
    safe, warn = data.class_counts()
    if safe == 0 or warn == 0:
        raise DataError("threshold extraction needs both classes present")
    col = data.X[:, _indicator_column(indicator)]
    X1 = np.zeros((len(col), 5))
    X1[:, 0] = col
    one_feature = Dataset(X1, data.y, data.w, provenance=data.provenance, seed=data.seed)
    weighted = apply_cost_reweighting(one_feature, cm)
    tree = train_c45(weighted, prune=depth is None, max_depth=depth)
    return tree.root_threshold


def _indicator_column(indicator: str) -> int:
    try:
        return INDICATOR_COLUMNS[indicator]
    except KeyError:
        raise ConfigError(f"indicator must be 'ttc' or 'tg', got {indicator!r}") from None


# ---------------------------------------------------------------------------
# Comparison harness
# ---------------------------------------------------------------------------

def run_comparison(dataset: Dataset, scenarios: Sequence[float],
                   methods: Sequence[Method], seeds: Sequence[int],
                   cost: CostMatrix, *, repeats: int = 1,
                   with_timing: bool = True) -> list[EvaluationReport]:
    """Evaluate every method on every (scenario, seed) holdout split.

    Timed sections run serially so measurements do not interfere. With
    with_timing=False all reported times are zero, which makes the output
    deterministic byte-for-byte across runs.
    """
    if not scenarios or not methods or not seeds:
        raise ConfigError("scenarios, methods and seeds must be non-empty")
    reports = []
    for scenario in scenarios:
        for seed in seeds:
            train, validation = split_dataset(dataset, scenario, seed)
            for method in methods:
                rep = evaluate_classifier(method, train, validation, cost,
                                          scenario=scenario, seed=seed, repeats=repeats)
                if not with_timing:
                    rep = replace(rep, time_s=0.0)
                reports.append(rep)
    return reports


def _fmt_metric(v: float | None) -> str:
    return "" if v is None else repr(v)


def write_comparison_csv(reports: Sequence[EvaluationReport], out,
                         comments: Sequence[str] = ()) -> None:
    for c in comments:
        out.write(f"# {c}\n")
    out.write(COMPARISON_CSV_HEADER + "\n")
    for r in reports:
        out.write(f"{r.method},{r.scenario!r},{r.seed},{_fmt_metric(r.accuracy)},"
                  f"{_fmt_metric(r.sensitivity)},{_fmt_metric(r.specificity)},"
                  f"{r.time_s!r}\n")


def read_comparison_csv(text) -> list[EvaluationReport]:
    import io as _io
    if isinstance(text, str):
        text = _io.StringIO(text)
    header_seen = False
    reports = []
    for lineno, line in enumerate(text, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line != COMPARISON_CSV_HEADER:
                raise DataError(f"line {lineno}: expected header {COMPARISON_CSV_HEADER!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise DataError(f"line {lineno}: expected 7 fields")
        reports.append(EvaluationReport(
            method=parts[0], scenario=float(parts[1]), seed=int(parts[2]),
            accuracy=float(parts[3]) if parts[3] else None,
            sensitivity=float(parts[4]) if parts[4] else None,
            specificity=float(parts[5]) if parts[5] else None,
            time_s=float(parts[6])))
    if not header_seen:
        raise DataError("empty input: missing comparison CSV header")
    return reports
