import math

import numpy as np
import pytest

from rearwarn import DataError, NO_THREAT, build_feature_vector, compute_tg, compute_ttc
from rearwarn.features import DEFAULT_INDICATOR_CAP, FeatureVector, dataset_from_episodes
from rearwarn.trajdata import Episode, TrajectorySample


def test_ttc_direct_substitution():
    assert compute_ttc(30, 20, 10) == 3.0


def test_ttc_zero_closing_speed():
    assert compute_ttc(30, 10, 10) == NO_THREAT


def test_ttc_contact_condition():
    assert compute_ttc(0, 20, 10) == 0.0


def test_ttc_opening_pair():
    assert compute_ttc(30, 10, 12) == NO_THREAT


def test_tg_direct_substitution():
    assert compute_tg(30, 15) == 2.0


def test_tg_stationary_follower():
    assert compute_tg(30, 0) == NO_THREAT


def test_tg_equals_ttc_for_stationary_leader():
    assert compute_tg(20, 20) == 1.0
    assert compute_tg(20, 20) == compute_ttc(20, 20, 0)


def test_negative_inputs_rejected():
    with pytest.raises(DataError):
        compute_ttc(-1, 20, 10)
    with pytest.raises(DataError):
        compute_ttc(30, -1, 10)
    with pytest.raises(DataError):
        compute_tg(-1, 20)
    with pytest.raises(DataError):
        compute_tg(30, -1)


def test_tg_ttc_identity_random():
    rng = np.random.default_rng(123)
    for _ in range(10_000):
        dx = rng.uniform(0, 200)
        v = rng.uniform(0.01, 50)
        assert compute_tg(dx, v) == compute_ttc(dx, v, 0.0)


def test_ttc_scale_invariance():
    rng = np.random.default_rng(5)
    for _ in range(2000):
        dx = rng.uniform(0.1, 100)
        closing = rng.uniform(0.1, 30)
        c = rng.uniform(0.01, 100)
        base = compute_ttc(dx, closing, 0.0)
        scaled = compute_ttc(dx * c, closing * c, 0.0)
        assert scaled == pytest.approx(base, rel=1e-12)


def test_ttc_monotone_in_gap():
    rng = np.random.default_rng(6)
    for _ in range(2000):
        v_f = rng.uniform(1, 40)
        v_l = rng.uniform(0, v_f - 0.5) if v_f > 0.5 else 0.0
        d1, d2 = sorted(rng.uniform(0, 100, size=2))
        if d1 == d2:
            continue
        assert compute_ttc(d1, v_f, v_l) < compute_ttc(d2, v_f, v_l)


def test_build_feature_vector_speed_conversion():
    fv = build_feature_vector(TrajectorySample(t=0, v_f=20, v_l=10, delta_x=30))
    assert fv.speed_kmh == 72.0
    assert fv.delta_v == -10.0
    assert fv.ttc == 3.0


def test_build_feature_vector_opening_pair_encoding():
    fv = build_feature_vector(TrajectorySample(t=0, v_f=10, v_l=12, delta_x=30))
    assert fv.delta_v == 2.0
    assert fv.ttc == NO_THREAT
    assert fv.as_row()[4] == 100.0


def test_rule_one_antecedent_representable():
    # a sample inside the warning-rule region: speed <= 73 km/h, gap in
    # [4.7, 8.6] m, closing 3.2..13.5 m/s, TG <= 1.5 s, TTC <= 2.8 s
    v_f = 70 / 3.6
    fv = build_feature_vector(TrajectorySample(t=0, v_f=v_f, v_l=v_f - 8.0, delta_x=6.0))
    row = fv.as_row()
    assert row[0] <= 73.0
    assert 4.7 <= row[1] <= 8.6
    assert -13.5 <= row[2] <= -3.2
    assert row[3] <= 1.5
    assert row[4] <= 2.8
    assert row == (fv.speed_kmh, fv.delta_x, fv.delta_v, fv.tg, fv.ttc)


def test_encoding_cap_dominates_dataset():
    samples = [TrajectorySample(t=i * 0.5, v_f=20, v_l=19.99, delta_x=30) for i in range(20)]
    ep = Episode("e1", samples, event_start=1.0, event_end=3.0)
    ds = dataset_from_episodes([ep])
    # nearly equal speeds give a huge finite TTC; it must saturate at the cap
    assert ds.X[:, 4].max() == DEFAULT_INDICATOR_CAP
    assert np.all(ds.X[:, 3] <= DEFAULT_INDICATOR_CAP)
    assert np.all(np.isfinite(ds.X))


def test_feature_vector_as_row_custom_cap():
    fv = FeatureVector(speed_kmh=50, delta_x=10, delta_v=1.0, tg=2.0, ttc=math.inf)
    assert fv.as_row(cap=42.0)[4] == 42.0
