"""TOPSIS ranking over evaluation reports.

Classical formulation: vector (root-sum-square) normalization per criterion,
weighting, ideal/anti-ideal points (per-column max for benefit criteria, min
for cost criteria, reversed for the anti-ideal), Euclidean separations and
closeness C = S- / (S+ + S-). The four weight assumptions over
(sensitivity, specificity, processing time) are provided as presets.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import ConfigError, DataError

log = logging.getLogger(__name__)

BENEFIT = "benefit"
COST = "cost"

# assumption index -> weights over (sensitivity, specificity, time)
WEIGHT_ASSUMPTIONS: dict[int, tuple[float, float, float]] = {
    1: (1 / 3, 1 / 3, 1 / 3),
    2: (1 / 2, 1 / 2, 0.0),
    3: (2 / 6, 3 / 6, 1 / 6),
    4: (3 / 6, 2 / 6, 1 / 6),
}

REPORT_CRITERIA = (("sensitivity", BENEFIT), ("specificity", BENEFIT), ("time_s", COST))


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[float, ...]

    def __post_init__(self):
        if any(w < 0 for w in self.weights):
            raise ConfigError("weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ConfigError(f"weights must sum to 1, got {sum(self.weights)}")

    @classmethod
    def assumption(cls, index: int) -> "WeightVector":
        try:
            return cls(WEIGHT_ASSUMPTIONS[index])
        except KeyError:
            raise ConfigError(f"assumption index must be 1..4, got {index}") from None


@dataclass(frozen=True)
class DecisionMatrix:
    alternatives: tuple[str, ...]
    criteria: tuple[tuple[str, str], ...]   # (name, benefit|cost)
    values: np.ndarray                      # alternatives x criteria, >= 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape != (len(self.alternatives), len(self.criteria)):
            raise DataError("decision matrix dimensions are inconsistent")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise DataError("decision matrix values must be finite and non-negative")
        for j, (name, direction) in enumerate(self.criteria):
            if direction not in (BENEFIT, COST):
                raise DataError(f"criterion {name!r}: direction must be benefit or cost")
            if not np.any(v[:, j] > 0):
                raise DataError(f"criterion {name!r}: all-zero column, normalization undefined")
        object.__setattr__(self, "values", v)


def topsis_rank(m: DecisionMatrix, w: WeightVector) -> list[tuple[str, float]]:
    """Rank alternatives by closeness to the ideal solution, descending.

    Ties in closeness keep the alternative order of the matrix. If every
    alternative is identical the closeness is defined as 0.5 for all.
    """
    if len(w.weights) != len(m.criteria):
        raise ConfigError("weight vector length does not match the criteria")
    V = m.values
    norms = np.sqrt((V ** 2).sum(axis=0))
    R = V / norms
    Y = R * np.asarray(w.weights)

    ideal = np.empty(Y.shape[1])
    anti = np.empty(Y.shape[1])
    for j, (_, direction) in enumerate(m.criteria):
        col = Y[:, j]
        if direction == BENEFIT:
            ideal[j], anti[j] = col.max(), col.min()
        else:
            ideal[j], anti[j] = col.min(), col.max()

    s_plus = np.sqrt(((Y - ideal) ** 2).sum(axis=1))
    s_minus = np.sqrt(((Y - anti) ** 2).sum(axis=1))
    denom = s_plus + s_minus
    closeness = np.where(denom > 0, s_minus / np.where(denom > 0, denom, 1.0), 0.5)

    order = sorted(range(len(m.alternatives)), key=lambda i: -closeness[i])
    return [(m.alternatives[i], float(closeness[i])) for i in order]


def matrix_from_reports(reports: Sequence, include_time: bool = True) -> DecisionMatrix:
    """Average sensitivity/specificity/time per method over a report batch.

    Reports missing a criterion (degenerate class absence) are excluded with
    a notice and do not enter the matrix. include_time=False drops the time
    column (for untimed runs, where it would be an all-zero column).
    """
    grouped: dict[str, list] = {}
    for r in reports:
        if r.sensitivity is None or r.specificity is None or r.time_s is None:
            log.warning("excluding report %s/%s (incomplete criteria)", r.method, r.scenario)
            continue
        grouped.setdefault(r.method, []).append(r)
    if len(grouped) < 2:
        raise DataError("need complete reports for at least two methods")
    alternatives = tuple(grouped)
    values = np.array([
        [float(np.mean([r.sensitivity for r in grouped[m]])),
         float(np.mean([r.specificity for r in grouped[m]])),
         float(np.mean([r.time_s for r in grouped[m]]))]
        for m in alternatives
    ])
    if not include_time:
        return DecisionMatrix(alternatives, REPORT_CRITERIA[:2], values[:, :2])
    return DecisionMatrix(alternatives, REPORT_CRITERIA, values)


def assumption_weights(assumption: int, include_time: bool = True) -> WeightVector:
    """Weight preset for an assumption; without time only the no-time
    assumption (index 2) is meaningful."""
    if include_time:
        return WeightVector.assumption(assumption)
    if assumption != 2:
        raise ConfigError("untimed rankings support only assumption 2 "
                          "(the other presets weight processing time)")
    return WeightVector((0.5, 0.5))


def select_best(reports: Sequence, assumption: int, include_time: bool = True) -> str:
    """Top-ranked method under one of the four weight assumptions."""
    m = matrix_from_reports(reports, include_time=include_time)
    ranking = topsis_rank(m, assumption_weights(assumption, include_time))
    return ranking[0][0]


def write_ranking_csv(ranking: Sequence[tuple[str, float]], out,
                      comments: Sequence[str] = ()) -> None:
    for c in comments:
        out.write(f"# {c}\n")
    out.write("alternative,closeness,rank\n")
    for rank, (alt, c) in enumerate(ranking, start=1):
        out.write(f"{alt},{float(c)!r},{rank}\n")
