"""Trajectory episodes: data model, CSV ingestion, event labeling, synthetic
generation and dataset splitting.

An episode is one car-following near-crash: a follower/leader pair sampled at
a fixed period, with an event window [event_start, event_end] marking the span
from the leader's braking onset to the follower's evasive reaction. Samples
inside the window are Warning, the 30 s before and 10 s after are Safe, and
everything else is dropped.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .exceptions import ConfigError, DataError

PRE_EVENT_WINDOW_S = 30.0
POST_EVENT_WINDOW_S = 10.0

EPISODE_CSV_HEADER = "episode_id,t,v_f,v_l,range,event"

KMH_PER_MS = 3.6


class ClassLabel(IntEnum):
    SAFE = 0
    WARNING = 1


@dataclass(frozen=True)
class TrajectorySample:
    """One time-stamped observation of a follower/leader pair.

    t is seconds since episode start, speeds are m/s, delta_x is the
    leader-minus-follower gap in meters.
    """

    t: float
    v_f: float
    v_l: float
    delta_x: float


@dataclass(frozen=True)
class LabeledInstance:
    """A five-feature numeric vector with a class label and instance weight."""

    features: tuple[float, float, float, float, float]
    label: ClassLabel
    weight: float = 1.0


class Episode:
    """An ordered run of samples plus the event window.

    Invariants checked on construction: strictly increasing t, non-negative
    speeds and gap, event window inside the sampled time range with
    event_start < event_end, and a sampling period constant to within 1 %.
    """

    __slots__ = ("episode_id", "samples", "event_start", "event_end")

    def __init__(self, episode_id: str, samples: Sequence[TrajectorySample],
                 event_start: float, event_end: float):
        if not samples:
            raise DataError(f"episode {episode_id!r}: no samples")
        prev = None
        for s in samples:
            if s.delta_x < 0:
                raise DataError(f"episode {episode_id!r}: negative gap at t={s.t}")
            if s.v_f < 0 or s.v_l < 0:
                raise DataError(f"episode {episode_id!r}: negative speed at t={s.t}")
            if prev is not None and s.t <= prev:
                raise DataError(f"episode {episode_id!r}: non-monotone time at t={s.t}")
            prev = s.t
        if not event_start < event_end:
            raise DataError(
                f"episode {episode_id!r}: event_start {event_start} not before event_end {event_end}")
        t0, t1 = samples[0].t, samples[-1].t
        if event_start < t0 or event_end > t1:
            raise DataError(f"episode {episode_id!r}: event window outside sampled range")
        if len(samples) >= 3:
            dts = [b.t - a.t for a, b in zip(samples, samples[1:])]
            ref = sorted(dts)[len(dts) // 2]
            for dt in dts:
                if abs(dt - ref) > 0.01 * ref:
                    raise DataError(
                        f"episode {episode_id!r}: sampling period varies by more than 1 %")
        self.episode_id = episode_id
        self.samples = list(samples)
        self.event_start = event_start
        self.event_end = event_end

    def __len__(self) -> int:
        return len(self.samples)

    def __repr__(self) -> str:
        return (f"Episode({self.episode_id!r}, n={len(self.samples)}, "
                f"event=[{self.event_start}, {self.event_end}])")


class Dataset:
    """Labeled feature vectors backed by contiguous arrays.

    X is (n, 5) float64 in the canonical feature order (speed km/h, delta_x m,
    delta_v m/s, time gap s, time to collision s), y is {0, 1} and w holds
    per-instance weights.
    """

    def __init__(self, X: np.ndarray, y: np.ndarray, w: np.ndarray | None = None,
                 provenance: str = "ingested", seed: int | None = None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.ascontiguousarray(y, dtype=np.int8)
        if X.ndim != 2 or X.shape[1] != 5:
            raise DataError("dataset features must be an (n, 5) array")
        if X.shape[0] == 0:
            raise DataError("dataset is empty")
        if y.shape != (X.shape[0],):
            raise DataError("label array does not match feature array")
        if not np.all((y == 0) | (y == 1)):
            raise DataError("labels must be 0 or 1")
        if not np.all(np.isfinite(X)):
            raise DataError("features must be finite after encoding")
        if w is None:
            w = np.ones(X.shape[0], dtype=np.float64)
        else:
            w = np.ascontiguousarray(w, dtype=np.float64)
            if w.shape != (X.shape[0],) or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise DataError("weights must be finite, non-negative and match the instances")
        self.X = X
        self.y = y
        self.w = w
        self.provenance = provenance
        self.seed = seed

    @classmethod
    def from_instances(cls, instances: Sequence[LabeledInstance],
                       provenance: str = "ingested", seed: int | None = None) -> "Dataset":
        X = np.array([inst.features for inst in instances], dtype=np.float64)
        y = np.array([int(inst.label) for inst in instances], dtype=np.int8)
        w = np.array([inst.weight for inst in instances], dtype=np.float64)
        return cls(X, y, w, provenance=provenance, seed=seed)

    @property
    def instances(self) -> list[LabeledInstance]:
        return [
            LabeledInstance(tuple(row), ClassLabel(int(lab)), float(wt))
            for row, lab, wt in zip(self.X, self.y, self.w)
        ]

    def with_weights(self, w: np.ndarray) -> "Dataset":
        return Dataset(self.X, self.y, w, provenance=self.provenance, seed=self.seed)

    def class_counts(self) -> tuple[int, int]:
        n_warn = int(np.count_nonzero(self.y == 1))
        return len(self.y) - n_warn, n_warn

    def __len__(self) -> int:
        return self.X.shape[0]

    def __repr__(self) -> str:
        safe, warn = self.class_counts()
        return f"Dataset(n={len(self)}, safe={safe}, warning={warn}, provenance={self.provenance!r})"


# ---------------------------------------------------------------------------
# Episode CSV ingestion
# ---------------------------------------------------------------------------

def _require_lines(text) -> Iterator[tuple[int, str]]:
    """Yield (line_number, line) from a string, file object or line iterable."""
    if isinstance(text, str):
        lines: Iterable[str] = io.StringIO(text)
    else:
        lines = text
    for i, line in enumerate(lines, start=1):
        yield i, line.rstrip("\r\n")


def parse_episode_csv(text, units: str = "si") -> list[Episode]:
    """Parse the episode CSV format into Episode objects.

    Header must be exactly `episode_id,t,v_f,v_l,range,event`; leading lines
    starting with '#' are skipped. Speeds are m/s, or km/h when
    units="kmh" (the range column stays in meters either way). The event
    window is reconstructed from the first/last row carrying event=1.
    """
    if units not in ("si", "kmh"):
        raise ConfigError(f"unknown units {units!r} (expected 'si' or 'kmh')")
    speed_scale = 1.0 / KMH_PER_MS if units == "kmh" else 1.0

    rows_by_episode: dict[str, list[tuple[int, float, float, float, float, int]]] = {}
    header_seen = False
    for lineno, line in _require_lines(text):
        if not line.strip():
            continue
        if line.lstrip().startswith("#"):
            continue
        if not header_seen:
            if line.strip().lstrip("﻿") != EPISODE_CSV_HEADER:
                raise DataError(
                    f"line {lineno}: expected header {EPISODE_CSV_HEADER!r}, got {line.strip()!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise DataError(f"line {lineno}: expected 6 fields, got {len(parts)}")
        ep_id = parts[0].strip()
        try:
            t = float(parts[1])
            v_f = float(parts[2]) * speed_scale
            v_l = float(parts[3]) * speed_scale
            rng = float(parts[4])
            event = int(parts[5])
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
        if event not in (0, 1):
            raise DataError(f"line {lineno}: event must be 0 or 1, got {event}")
        if rng < 0:
            raise DataError(f"line {lineno}: negative gap")
        if v_f < 0 or v_l < 0:
            raise DataError(f"line {lineno}: negative speed")
        bucket = rows_by_episode.setdefault(ep_id, [])
        if bucket and t <= bucket[-1][1]:
            raise DataError(f"line {lineno}: non-monotone time in episode {ep_id!r}")
        bucket.append((lineno, t, v_f, v_l, rng, event))
    if not header_seen:
        raise DataError("empty input: missing episode CSV header")

    episodes = []
    for ep_id, rows in rows_by_episode.items():
        event_ts = [t for (_, t, _, _, _, e) in rows if e == 1]
        if not event_ts:
            raise DataError(f"episode {ep_id!r}: no event rows")
        samples = [TrajectorySample(t, v_f, v_l, rng) for (_, t, v_f, v_l, rng, _) in rows]
        episodes.append(Episode(ep_id, samples, event_ts[0], event_ts[-1]))
    return episodes


def write_episode_csv(episodes: Sequence[Episode], out, comments: Sequence[str] = ()) -> None:
    """Write episodes in the episode CSV format (SI units, repr-exact floats)."""
    for c in comments:
        out.write(f"# {c}\n")
    out.write(EPISODE_CSV_HEADER + "\n")
    for ep in episodes:
        for s in ep.samples:
            event = 1 if ep.event_start <= s.t <= ep.event_end else 0
            out.write(f"{ep.episode_id},{float(s.t)!r},{float(s.v_f)!r},"
                      f"{float(s.v_l)!r},{float(s.delta_x)!r},{event}\n")


# ---------------------------------------------------------------------------
# Labeling
# ---------------------------------------------------------------------------

def label_episode(ep: Episode) -> list[tuple[TrajectorySample, ClassLabel]]:
    """Assign Warning/Safe labels around the event window.

    Samples with t in [event_start, event_end] are Warning, samples in the
    30 s before and the 10 s after are Safe, everything else is dropped.
    """
    out = []
    lo = ep.event_start - PRE_EVENT_WINDOW_S
    hi = ep.event_end + POST_EVENT_WINDOW_S
    for s in ep.samples:
        if s.t < lo or s.t > hi:
            continue
        if ep.event_start <= s.t <= ep.event_end:
            out.append((s, ClassLabel.WARNING))
        else:
            out.append((s, ClassLabel.SAFE))
    return out


# ---------------------------------------------------------------------------
# Synthetic episode generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorConfig:
    """Car-following near-crash scenario generator settings.

    Each episode cruises for lead_in seconds, then the leader brakes at a
    random deceleration for a random duration; the follower keeps cruising
    until its response delay elapses (the event window) and then brakes hard
    enough to settle at final_gap behind the leader. The response delay is
    long because these are near-crashes: the follower reacts late, which is
    what makes a warning necessary. Defaults are tuned so the labeled corpus
    comes out near 40,000 samples with a Safe:Warning ratio around 5:1.
    """

    n_episodes: int = 83
    dt: float = 0.1                  # sampling period, s
    speed_min: float = 20.0          # cruise speed range, m/s
    speed_max: float = 33.0
    leader_decel_min: float = 1.5    # leader braking, m/s^2
    leader_decel_max: float = 3.5
    brake_duration_min: float = 2.0  # leader braking interval, s
    brake_duration_max: float = 4.0
    reaction_min: float = 6.0        # follower response delay = event length, s
    reaction_max: float = 10.0
    final_gap_min: float = 5.0       # settled gap after the evasive action, m
    final_gap_max: float = 12.0
    noise_std: float = 0.2           # observation noise on speeds and range
    lead_in_min: float = 30.5        # event start, s
    lead_in_max: float = 33.0
    evasive_decel_cap: float = 8.5   # m/s^2
    post_event_pad: float = 11.0     # episode tail beyond event end, s

    def validate(self) -> None:
        if self.n_episodes < 1:
            raise ConfigError("n_episodes must be >= 1")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if not 0 < self.speed_min <= self.speed_max:
            raise ConfigError("bad cruise speed range")
        if not 0 < self.leader_decel_min <= self.leader_decel_max:
            raise ConfigError("bad leader deceleration range")
        if not 0 < self.brake_duration_min <= self.brake_duration_max:
            raise ConfigError("bad brake duration range")
        if not 0 < self.reaction_min <= self.reaction_max:
            raise ConfigError("bad reaction range")
        if self.reaction_min <= self.brake_duration_max:
            raise ConfigError(
                "infeasible config: follower response delay must exceed the leader "
                "braking duration (reaction_min > brake_duration_max)")
        if not 0 < self.final_gap_min <= self.final_gap_max:
            raise ConfigError("bad final gap range")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be >= 0")
        if self.lead_in_min < PRE_EVENT_WINDOW_S:
            raise ConfigError(f"lead_in_min must be >= {PRE_EVENT_WINDOW_S} s "
                              "so the full pre-event window exists")
        if self.lead_in_max < self.lead_in_min:
            raise ConfigError("bad lead-in range")
        if self.evasive_decel_cap <= 0:
            raise ConfigError("evasive_decel_cap must be positive")
        if self.post_event_pad < POST_EVENT_WINDOW_S:
            raise ConfigError(f"post_event_pad must be >= {POST_EVENT_WINDOW_S} s")
        if self.reaction_max + self.lead_in_max + self.post_event_pad > 36000:
            raise ConfigError("infeasible config: episode longer than 10 hours")


def _piecewise_position(t: np.ndarray, t0: float, v0: float, a: float, dur: float) -> np.ndarray:
    """Distance traveled by a vehicle cruising at v0, braking at rate a for
    dur seconds starting at t0, then holding the reduced speed."""
    v1 = v0 - a * dur
    x_brake_end = v0 * t0 + v0 * dur - 0.5 * a * dur * dur
    pre = v0 * t
    mid = v0 * t0 + v0 * (t - t0) - 0.5 * a * (t - t0) ** 2
    post = x_brake_end + v1 * (t - t0 - dur)
    return np.where(t < t0, pre, np.where(t < t0 + dur, mid, post))


def generate_synthetic_dataset(cfg: GeneratorConfig, seed: int) -> list[Episode]:
    """Generate deterministic car-following near-crash episodes.

    The kinematics are exact piecewise-quadratic forms, so with zero noise the
    gap decreases strictly through the event window. Observation noise is
    additive Gaussian on speeds and range, clipped at zero.
    """
    cfg.validate()
    rng = np.random.default_rng(seed)
    episodes = []
    for k in range(cfg.n_episodes):
        v0 = rng.uniform(cfg.speed_min, cfg.speed_max)
        a_l = rng.uniform(cfg.leader_decel_min, cfg.leader_decel_max)
        d_brake = rng.uniform(cfg.brake_duration_min, cfg.brake_duration_max)
        tau = rng.uniform(cfg.reaction_min, cfg.reaction_max)
        lead_in = rng.uniform(cfg.lead_in_min, cfg.lead_in_max)
        g_final = rng.uniform(cfg.final_gap_min, cfg.final_gap_max)
        brake_factor = rng.uniform(0.8, 1.2)

        # snap event boundaries to the sampling grid
        t_b = round(lead_in / cfg.dt) * cfg.dt
        t_e = t_b + max(round(tau / cfg.dt), 1) * cfg.dt
        tau_g = t_e - t_b

        d_eff = min(d_brake, v0 / a_l)          # leader stops early if it runs out of speed
        dv = a_l * d_eff                        # closing speed once the leader settles
        a_e = min(max(dv * brake_factor, 1.0), cfg.evasive_decel_cap)
        closure_evasive = dv * dv / (2.0 * a_e) if dv > 0 else 0.0
        gap0 = g_final + closure_evasive + dv * (tau_g - d_eff / 2.0)

        t_end = t_e + cfg.post_event_pad
        n = int(round(t_end / cfg.dt)) + 1
        t = np.arange(n, dtype=np.float64) * cfg.dt

        v_l = np.maximum(v0 - a_l * np.clip(t - t_b, 0.0, d_eff), 0.0)
        t_match = dv / a_e if dv > 0 else 0.0
        v_f = np.maximum(v0 - a_e * np.clip(t - t_e, 0.0, t_match), 0.0)
        x_l = _piecewise_position(t, t_b, v0, a_l, d_eff)
        x_f = _piecewise_position(t, t_e, v0, a_e, t_match)
        gap = gap0 + x_l - x_f

        if cfg.noise_std > 0:
            noise = rng.normal(0.0, cfg.noise_std, size=(n, 3))
            v_f = np.maximum(v_f + noise[:, 0], 0.0)
            v_l = np.maximum(v_l + noise[:, 1], 0.0)
            gap = np.maximum(gap + noise[:, 2], 0.0)

        samples = [TrajectorySample(float(ti), float(vf), float(vl), float(g))
                   for ti, vf, vl, g in zip(t, v_f, v_l, gap)]
        episodes.append(Episode(f"ep{k:04d}", samples, t_b, t_e))
    return episodes


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------

def split_dataset(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Random holdout partition with |train| = round(fraction * N).

    Both partitions must contain at least one instance of each class; up to
    100 seed-derived reshuffles are tried before giving up.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train fraction must be in (0, 1), got {train_fraction}")
    if seed < 0:
        raise ConfigError("seed must be non-negative")
    n = len(ds)
    n_train = int(round(train_fraction * n))
    if n_train < 1 or n_train >= n:
        raise ConfigError(
            f"fraction {train_fraction} leaves an empty partition for {n} instances")
    for attempt in range(100):
        perm = np.random.default_rng(np.random.SeedSequence([seed, attempt])).permutation(n)
        tr, va = perm[:n_train], perm[n_train:]
        ok = True
        for part in (tr, va):
            labels = ds.y[part]
            if not (np.any(labels == 1) and np.any(labels == 0)):
                ok = False
                break
        if ok:
            tr.sort()
            va.sort()
            make = lambda idx: Dataset(ds.X[idx], ds.y[idx], ds.w[idx],
                                       provenance=ds.provenance, seed=seed)
            return make(tr), make(va)
    raise DataError("could not produce a split with both classes in both partitions")
