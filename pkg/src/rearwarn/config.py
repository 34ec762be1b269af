"""Key-value run configuration: `key = value` lines, '#' comments.

Recognized keys (all optional, command-line flags win over the file):

    gen.n_episodes, gen.dt, gen.speed_min, gen.speed_max,
    gen.leader_decel_min, gen.leader_decel_max, gen.brake_duration_min,
    gen.brake_duration_max, gen.reaction_min, gen.reaction_max,
    gen.final_gap_min, gen.final_gap_max, gen.noise_std, gen.lead_in_min,
    gen.lead_in_max, gen.evasive_decel_cap, gen.post_event_pad
    rf.n_trees, rf.features_per_split, rf.bootstrap, rf.min_leaf_weight
    c45.min_leaf_weight, c45.prune, c45.confidence
    knn.k
    cost  (FN:FP)
    scenarios  (comma-separated fractions)
    seeds      (comma-separated integers)
    units      (si | kmh)
    features.cap
    baseline.<preset>.<field>  (e.g. baseline.ttc.threshold = 6.5)

The default config path comes from the REARWARN_CONFIG environment variable.
"""

from __future__ import annotations

import dataclasses
import os
from typing import Mapping

from .exceptions import ConfigError
from .trajdata import GeneratorConfig

CONFIG_ENV_VAR = "REARWARN_CONFIG"


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError(f"config line {lineno}: empty key")
        out[key] = value
    return out


def load_config_file(path: str | None) -> dict[str, str]:
    """Load an explicit path, else the env-var default, else empty."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
        if not path:
            return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None


def _coerce(value: str, target_type):
    if target_type is bool:
        low = value.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {value!r}")
    try:
        return target_type(value)
    except ValueError:
        raise ConfigError(f"expected {target_type.__name__}, got {value!r}") from None


def generator_config(cfg: Mapping[str, str]) -> GeneratorConfig:
    """Build a GeneratorConfig from 'gen.<field>' keys."""
    fields = {f.name: f.type for f in dataclasses.fields(GeneratorConfig)}
    kwargs = {}
    for key, value in cfg.items():
        if not key.startswith("gen."):
            continue
        name = key[4:]
        if name not in fields:
            raise ConfigError(f"unknown generator key {key!r}")
        ftype = int if name == "n_episodes" else float
        kwargs[name] = _coerce(value, ftype)
    return GeneratorConfig(**kwargs)


def forest_params(cfg: Mapping[str, str]) -> dict:
    out = {}
    mapping = {"rf.n_trees": ("n_trees", int),
               "rf.features_per_split": ("features_per_split", int),
               "rf.bootstrap": ("bootstrap", bool),
               "rf.min_leaf_weight": ("min_leaf_weight", float)}
    for key, (name, typ) in mapping.items():
        if key in cfg:
            out[name] = _coerce(cfg[key], typ)
    return out


def c45_params(cfg: Mapping[str, str]) -> dict:
    out = {}
    mapping = {"c45.min_leaf_weight": ("min_leaf_weight", float),
               "c45.prune": ("prune", bool),
               "c45.confidence": ("confidence", float)}
    for key, (name, typ) in mapping.items():
        if key in cfg:
            out[name] = _coerce(cfg[key], typ)
    return out


def baseline_overrides(cfg: Mapping[str, str]) -> dict[str, dict[str, float]]:
    """Collect baseline.<preset>.<field> overrides."""
    out: dict[str, dict[str, float]] = {}
    for key, value in cfg.items():
        if not key.startswith("baseline."):
            continue
        parts = key.split(".")
        if len(parts) != 3:
            raise ConfigError(f"bad baseline override key {key!r}")
        _, preset, field = parts
        out.setdefault(preset, {})[field] = _coerce(value, float)
    return out


def config_snapshot(cfg: Mapping[str, str], overrides: Mapping[str, object]) -> list[str]:
    """Deterministic one-line-per-setting snapshot for output artifacts."""
    merged: dict[str, object] = dict(cfg)
    for k, v in overrides.items():
        if v is not None:
            merged[k] = v
    return [f"config {k} = {merged[k]}" for k in sorted(merged)]
