"""The seven classical warning algorithms used for comparison.

Perceptual algorithms threshold a driver-performance indicator (time to
collision or time gap) or a TTC-derived warning distance (Honda,
Hirst-Graham). Kinematic algorithms compute a safe stopping distance from
reaction time and deceleration parameters (stop-distance, Mazda, PATH) and
warn when the actual gap is at or below it. Every constant is configurable;
the named presets carry the conventional parameter choices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .exceptions import ConfigError
from .features import FeatureVector
from .trajdata import ClassLabel


@dataclass(frozen=True)
class PerceptualParams:
    indicator: str              # "ttc" or "tg"
    threshold: float            # seconds

    def __post_init__(self):
        if self.indicator not in ("ttc", "tg"):
            raise ConfigError(f"indicator must be 'ttc' or 'tg', got {self.indicator!r}")
        if self.threshold <= 0:
            raise ConfigError("threshold must be positive")


@dataclass(frozen=True)
class WarningDistanceParams:
    ttc_crit: float             # seconds
    offset: float = 0.0         # meters

    def __post_init__(self):
        if self.ttc_crit <= 0:
            raise ConfigError("ttc_crit must be positive")
        if self.offset < 0:
            raise ConfigError("offset must be >= 0")


@dataclass(frozen=True)
class KinematicParams:
    a_f: float                  # follower max deceleration, m/s^2
    a_l: float                  # leader deceleration, m/s^2
    tau: float                  # driver reaction time, s
    d0: float = 0.0             # standstill margin, m
    tau2: float = 0.6           # relative-speed time constant, s (Mazda)

    def __post_init__(self):
        if self.a_f <= 0 or self.a_l <= 0:
            raise ConfigError("decelerations must be positive")
        if self.tau < 0 or self.d0 < 0:
            raise ConfigError("tau and d0 must be >= 0")


def perceptual_warn(fv: FeatureVector, p: PerceptualParams) -> ClassLabel:
    """Warning iff the selected indicator is finite and at or below threshold."""
    value = fv.ttc if p.indicator == "ttc" else fv.tg
    if math.isfinite(value) and value <= p.threshold:
        return ClassLabel.WARNING
    return ClassLabel.SAFE


def warning_distance_perceptual(delta_x: float, v_f: float, v_l: float,
                                p: WarningDistanceParams) -> tuple[float, ClassLabel]:
    """TTC-derived warning distance: d_w = ttc_crit * max(v_f - v_l, 0) + offset."""
    v_rel = max(v_f - v_l, 0.0)
    d_w = p.ttc_crit * v_rel + p.offset
    label = ClassLabel.WARNING if delta_x <= d_w else ClassLabel.SAFE
    return d_w, label


def stop_distance(v_f: float, v_l: float, p: KinematicParams) -> float:
    """Safe stopping distance:
    d_w = max(0, v_f*tau + v_f^2/(2*a_f) - v_l^2/(2*a_l) + d0)."""
    return max(0.0, v_f * p.tau + v_f * v_f / (2.0 * p.a_f)
               - v_l * v_l / (2.0 * p.a_l) + p.d0)


def mazda_distance(v_f: float, v_l: float, p: KinematicParams) -> float:
    """Mazda warning distance:
    d_w = max(0, 0.5*(v_f^2/a_f - v_l^2/a_l) + v_f*tau + (v_f - v_l)*tau2 + d0)."""
    return max(0.0, 0.5 * (v_f * v_f / p.a_f - v_l * v_l / p.a_l)
               + v_f * p.tau + (v_f - v_l) * p.tau2 + p.d0)


def path_distance(v_f: float, v_l: float, p: KinematicParams) -> float:
    """PATH warning distance: the stop-distance form with PATH's parameters."""
    return stop_distance(v_f, v_l, p)


def kinematic_warn(delta_x: float, d_w: float) -> ClassLabel:
    """Warning iff the gap is at or below the computed warning distance."""
    return ClassLabel.WARNING if delta_x <= d_w else ClassLabel.SAFE


BaselineParams = Union[PerceptualParams, WarningDistanceParams, KinematicParams]

# Named presets. Perceptual thresholds are the data-driven values used in the
# unified comparison (TTC 6.5 s, TG 0.8 s); Honda and Hirst-Graham carry their
# published constants. Kinematic parameter triples follow the four-scenario
# initialization table, with Mazda's tau2/d0 from its published form.
PRESETS: dict[str, BaselineParams] = {
    "ttc": PerceptualParams("ttc", 6.5),
    "tg": PerceptualParams("tg", 0.8),
    "honda": WarningDistanceParams(ttc_crit=2.2, offset=6.2),
    "hirst-graham": WarningDistanceParams(ttc_crit=3.0, offset=0.0),
    "stop-distance": KinematicParams(a_f=5.0, a_l=5.0, tau=1.5, d0=0.0),
    "mazda": KinematicParams(a_f=6.0, a_l=8.0, tau=0.1, d0=5.0, tau2=0.6),
    "path": KinematicParams(a_f=6.0, a_l=6.0, tau=0.5, d0=0.0),
}

BASELINE_NAMES = tuple(PRESETS)

# Parameter sets for the stop-distance sensitivity study: the baseline's own
# preset, the Mazda and PATH triples, and a fourth proffered triple.
STOP_DISTANCE_SCENARIOS: dict[int, KinematicParams] = {
    1: KinematicParams(a_f=5.0, a_l=5.0, tau=1.5),
    2: KinematicParams(a_f=6.0, a_l=8.0, tau=0.1),
    3: KinematicParams(a_f=6.0, a_l=6.0, tau=0.5),
    4: KinematicParams(a_f=7.0, a_l=7.0, tau=0.8),
}


def get_preset(name: str, **overrides) -> BaselineParams:
    """Look up a preset by name, optionally overriding parameter fields."""
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown baseline preset {name!r}; "
                          f"expected one of {', '.join(PRESETS)}") from None
    if overrides:
        preset = replace(preset, **overrides)
    return preset


def decide(name: str, fv: FeatureVector, params: BaselineParams | None = None) -> ClassLabel:
    """Run one baseline on one feature vector (follower state recovered from it)."""
    p = params if params is not None else get_preset(name)
    if isinstance(p, PerceptualParams):
        return perceptual_warn(fv, p)
    v_f = fv.speed_kmh / 3.6
    v_l = v_f + fv.delta_v
    if isinstance(p, WarningDistanceParams):
        return warning_distance_perceptual(fv.delta_x, v_f, v_l, p)[1]
    if name == "mazda":
        d_w = mazda_distance(v_f, v_l, p)
    else:
        d_w = stop_distance(v_f, v_l, p)
    return kinematic_warn(fv.delta_x, d_w)


def decide_rows(name: str, X: np.ndarray, params: BaselineParams | None = None) -> np.ndarray:
    """Vectorized baseline decisions over encoded feature rows (n, 5).

    Indicator columns may be cap-encoded; that never flips a decision because
    thresholds sit far below the cap.
    """
    p = params if params is not None else get_preset(name)
    X = np.asarray(X, dtype=np.float64)
    delta_x = X[:, 1]
    if isinstance(p, PerceptualParams):
        col = X[:, 4] if p.indicator == "ttc" else X[:, 3]
        warn = np.isfinite(col) & (col <= p.threshold)
        return warn.astype(np.int8)
    v_f = X[:, 0] / 3.6
    v_l = v_f + X[:, 2]
    if isinstance(p, WarningDistanceParams):
        d_w = p.ttc_crit * np.maximum(v_f - v_l, 0.0) + p.offset
    elif name == "mazda":
        d_w = np.maximum(0.0, 0.5 * (v_f ** 2 / p.a_f - v_l ** 2 / p.a_l)
                         + v_f * p.tau + (v_f - v_l) * p.tau2 + p.d0)
    else:
        d_w = np.maximum(0.0, v_f * p.tau + v_f ** 2 / (2.0 * p.a_f)
                         - v_l ** 2 / (2.0 * p.a_l) + p.d0)
    return (delta_x <= d_w).astype(np.int8)
