import numpy as np
import pytest

from rearwarn import ClassLabel, ConfigError
from rearwarn.baselines import (KinematicParams, PerceptualParams, STOP_DISTANCE_SCENARIOS,
                                WarningDistanceParams, decide_rows, get_preset,
                                kinematic_warn, mazda_distance, path_distance,
                                perceptual_warn, stop_distance, warning_distance_perceptual)
from rearwarn.features import FeatureVector, build_feature_vector
from rearwarn.trajdata import TrajectorySample


def fv(ttc=100.0, tg=100.0, speed=72.0, dx=30.0, dv=-5.0):
    return FeatureVector(speed_kmh=speed, delta_x=dx, delta_v=dv, tg=tg, ttc=ttc)


def test_perceptual_ttc_threshold():
    assert perceptual_warn(fv(ttc=2.0), PerceptualParams("ttc", 6.5)) == ClassLabel.WARNING
    assert perceptual_warn(fv(ttc=6.5), PerceptualParams("ttc", 6.5)) == ClassLabel.WARNING
    assert perceptual_warn(fv(ttc=7.0), PerceptualParams("ttc", 6.5)) == ClassLabel.SAFE


def test_perceptual_tg_threshold():
    assert perceptual_warn(fv(tg=1.0), PerceptualParams("tg", 0.8)) == ClassLabel.SAFE
    assert perceptual_warn(fv(tg=0.5), PerceptualParams("tg", 0.8)) == ClassLabel.WARNING


def test_perceptual_no_threat_is_safe():
    import math
    assert perceptual_warn(fv(ttc=math.inf), PerceptualParams("ttc", 1000.0)) == ClassLabel.SAFE


def test_honda_distance():
    d_w, _ = warning_distance_perceptual(50, 15, 5, WarningDistanceParams(2.2, 6.2))
    assert d_w == pytest.approx(28.2)


def test_warning_distance_no_closing_speed():
    d_w, label = warning_distance_perceptual(10, 10, 15, WarningDistanceParams(3.0, 0.0))
    assert d_w == 0.0
    assert label == ClassLabel.SAFE


def test_hirst_graham_preset():
    p = get_preset("hirst-graham")
    assert p.ttc_crit == 3.0 and p.offset == 0.0


def test_stop_distance_values():
    p = KinematicParams(a_f=5, a_l=5, tau=1.5)
    assert stop_distance(20, 0, p) == pytest.approx(70.0)
    assert stop_distance(0, 0, KinematicParams(5, 5, 1.5, d0=2.0)) == 2.0
    assert stop_distance(20, 20, p) == pytest.approx(30.0)


def test_mazda_distance_values():
    p = get_preset("mazda")
    assert mazda_distance(0, 0, p) == pytest.approx(5.0)
    assert mazda_distance(20, 20, p) == pytest.approx(0.5 * (400 / 6 - 400 / 8) + 2 + 5)
    assert (p.a_f, p.a_l, p.tau) == (6.0, 8.0, 0.1)


def test_path_distance_values():
    p = get_preset("path")
    assert path_distance(20, 10, p) == pytest.approx(35.0)
    # opening pair with high leader speed floors at zero
    assert path_distance(5, 40, p) == 0.0
    s4 = STOP_DISTANCE_SCENARIOS[4]
    assert (s4.a_f, s4.a_l, s4.tau) == (7.0, 7.0, 0.8)


def test_kinematic_warn_boundary():
    assert kinematic_warn(50, 70) == ClassLabel.WARNING
    assert kinematic_warn(80, 70) == ClassLabel.SAFE
    assert kinematic_warn(70, 70) == ClassLabel.WARNING


def test_stop_distance_monotonicity():
    rng = np.random.default_rng(0)
    p = KinematicParams(a_f=6, a_l=7, tau=1.0, d0=1.0)
    for _ in range(500):
        v_f, v_l = rng.uniform(0, 40, size=2)
        dv = rng.uniform(0.01, 5)
        if stop_distance(v_f, v_l, p) > 0:
            assert stop_distance(v_f + dv, v_l, p) >= stop_distance(v_f, v_l, p)
            assert stop_distance(v_f, v_l + dv, p) <= stop_distance(v_f, v_l, p)


def test_distances_nonnegative_finite():
    rng = np.random.default_rng(1)
    for name in ("stop-distance", "mazda", "path"):
        p = get_preset(name)
        for _ in range(300):
            v_f, v_l = rng.uniform(0, 50, size=2)
            d = mazda_distance(v_f, v_l, p) if name == "mazda" else stop_distance(v_f, v_l, p)
            assert 0.0 <= d < np.inf


def test_ttc_threshold_equals_distance_form():
    rng = np.random.default_rng(2)
    T = 3.0
    for _ in range(2000):
        dx = rng.uniform(0.1, 120)
        v_f = rng.uniform(0, 40)
        v_l = rng.uniform(0, 40)
        sample = TrajectorySample(0.0, v_f, v_l, dx)
        a = perceptual_warn(build_feature_vector(sample), PerceptualParams("ttc", T))
        b = warning_distance_perceptual(dx, v_f, v_l, WarningDistanceParams(T, 0.0))[1]
        assert a == b


def test_scenario_presets_change_confusion(small_corpus):
    outcomes = set()
    for params in STOP_DISTANCE_SCENARIOS.values():
        preds = decide_rows("stop-distance", small_corpus.X, params)
        outcomes.add(tuple(np.bincount(preds, minlength=2)))
    assert len(outcomes) >= 2


def test_preset_overrides():
    p = get_preset("ttc", threshold=4.0)
    assert p.threshold == 4.0
    with pytest.raises(ConfigError):
        get_preset("nope")


def test_decide_rows_matches_scalar_decide():
    from rearwarn.baselines import decide
    rng = np.random.default_rng(3)
    rows = []
    fvs = []
    for _ in range(200):
        s = TrajectorySample(0.0, rng.uniform(0, 40), rng.uniform(0, 40), rng.uniform(0, 120))
        v = build_feature_vector(s)
        fvs.append(v)
        rows.append(v.as_row())
    X = np.array(rows)
    for name in ("ttc", "tg", "honda", "hirst-graham", "stop-distance", "mazda", "path"):
        batch = decide_rows(name, X)
        single = np.array([int(decide(name, v)) for v in fvs], np.int8)
        assert np.array_equal(batch, single), name
