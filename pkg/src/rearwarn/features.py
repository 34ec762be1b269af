"""The five classification features: follower speed, relative distance,
relative speed, time gap and time to collision.

TTC = delta_x / (v_f - v_l) when the pair is closing, TG = delta_x / v_f when
the follower moves. Pairs with no collision course get the NO_THREAT sentinel
(+inf); at the model boundary indicator values saturate at a configurable cap
so every learner sees finite, totally ordered numerics.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DataError
from .trajdata import (ClassLabel, Dataset, Episode, KMH_PER_MS,
                       TrajectorySample, label_episode)

NO_THREAT = math.inf
DEFAULT_INDICATOR_CAP = 100.0

FEATURE_NAMES = ("Speed", "DeltaX", "DeltaV", "TimeGap", "TimeToCollision")
FEATURE_UNITS = ("km/h", "m", "m/s", "s", "s")
SPEED, DELTA_X, DELTA_V, TG, TTC = range(5)

DATASET_CSV_HEADER = "speed_kmh,delta_x_m,delta_v_ms,tg_s,ttc_s,label"


def compute_ttc(delta_x: float, v_f: float, v_l: float) -> float:
    """Time to collision: delta_x / (v_f - v_l), NO_THREAT unless closing."""
    if delta_x < 0 or v_f < 0 or v_l < 0:
        raise DataError(f"negative input to compute_ttc({delta_x}, {v_f}, {v_l})")
    if v_f > v_l:
        return delta_x / (v_f - v_l)
    return NO_THREAT


def compute_tg(delta_x: float, v_f: float) -> float:
    """Time gap: delta_x / v_f, NO_THREAT for a stationary follower."""
    if delta_x < 0 or v_f < 0:
        raise DataError(f"negative input to compute_tg({delta_x}, {v_f})")
    if v_f > 0:
        return delta_x / v_f
    return NO_THREAT


@dataclass(frozen=True)
class FeatureVector:
    """Per-sample features. Speed is km/h; tg/ttc may be NO_THREAT (+inf)."""

    speed_kmh: float
    delta_x: float
    delta_v: float
    tg: float
    ttc: float

    def as_row(self, cap: float = DEFAULT_INDICATOR_CAP) -> tuple[float, float, float, float, float]:
        """Numeric encoding for model consumption: indicators saturate at cap."""
        return (self.speed_kmh, self.delta_x, self.delta_v,
                min(self.tg, cap), min(self.ttc, cap))


def build_feature_vector(s: TrajectorySample) -> FeatureVector:
    """Compute the feature vector of one trajectory sample."""
    return FeatureVector(
        speed_kmh=s.v_f * KMH_PER_MS,
        delta_x=s.delta_x,
        delta_v=s.v_l - s.v_f,
        tg=compute_tg(s.delta_x, s.v_f),
        ttc=compute_ttc(s.delta_x, s.v_f, s.v_l),
    )


def dataset_from_episodes(episodes: Sequence[Episode],
                          cap: float = DEFAULT_INDICATOR_CAP,
                          provenance: str = "synthetic",
                          seed: int | None = None) -> Dataset:
    """Label every episode and assemble the encoded feature dataset."""
    rows = []
    labels = []
    for ep in episodes:
        for sample, label in label_episode(ep):
            rows.append(build_feature_vector(sample).as_row(cap))
            labels.append(int(label))
    if not rows:
        raise DataError("episodes produced no labeled samples")
    return Dataset(np.array(rows, dtype=np.float64),
                   np.array(labels, dtype=np.int8),
                   provenance=provenance, seed=seed)


def write_dataset_csv(ds: Dataset, out, comments: Sequence[str] = ()) -> None:
    """Write the labeled-dataset CSV (repr-exact floats)."""
    for c in comments:
        out.write(f"# {c}\n")
    out.write(DATASET_CSV_HEADER + "\n")
    for row, label in zip(ds.X, ds.y):
        out.write(",".join(repr(float(v)) for v in row) + f",{int(label)}\n")


def read_dataset_csv(text, provenance: str = "ingested") -> Dataset:
    """Read the labeled-dataset CSV; leading '#' lines are skipped."""
    if isinstance(text, str):
        text = io.StringIO(text)
    header_seen = False
    rows = []
    labels = []
    for lineno, line in enumerate(text, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line.lstrip("﻿") != DATASET_CSV_HEADER:
                raise DataError(
                    f"line {lineno}: expected header {DATASET_CSV_HEADER!r}, got {line!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise DataError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        try:
            rows.append(tuple(float(p) for p in parts[:5]))
            label = int(parts[5])
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
        if label not in (0, 1):
            raise DataError(f"line {lineno}: label must be 0 or 1")
        labels.append(label)
    if not header_seen:
        raise DataError("empty input: missing dataset CSV header")
    if not rows:
        raise DataError("dataset CSV contains no instances")
    return Dataset(np.array(rows, dtype=np.float64), np.array(labels, dtype=np.int8),
                   provenance=provenance)
