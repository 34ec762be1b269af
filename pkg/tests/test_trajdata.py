import dataclasses
import io

import numpy as np
import pytest

from rearwarn import (ClassLabel, ConfigError, DataError, GeneratorConfig,
                      generate_synthetic_dataset, label_episode, parse_episode_csv,
                      split_dataset)
from rearwarn.features import dataset_from_episodes
from rearwarn.trajdata import Dataset, Episode, TrajectorySample, write_episode_csv

CSV = """episode_id,t,v_f,v_l,range,event
e1,0.0,20,10,30,0
e1,1.0,20,10,28,0
e1,2.0,20,10,26,1
e1,3.0,20,10,24,1
e1,4.0,20,10,22,0
"""


def test_parse_field_mapping():
    eps = parse_episode_csv(CSV)
    assert len(eps) == 1
    s = eps[0].samples[0]
    assert (s.t, s.v_f, s.v_l, s.delta_x) == (0.0, 20.0, 10.0, 30.0)


def test_parse_window_reconstruction():
    ep = parse_episode_csv(CSV)[0]
    assert ep.event_start == 2.0
    assert ep.event_end == 3.0


def test_parse_kmh_units():
    ep = parse_episode_csv(CSV, units="kmh")[0]
    assert ep.samples[0].v_f == pytest.approx(20 / 3.6)
    assert ep.samples[0].delta_x == 30.0  # range stays in meters


def test_parse_non_monotone_time():
    bad = "episode_id,t,v_f,v_l,range,event\ne1,0.0,20,10,30,0\ne1,0.1,20,10,30,1\ne1,0.1,20,10,30,1\n"
    with pytest.raises(DataError, match="line 4.*non-monotone"):
        parse_episode_csv(bad)


def test_parse_negative_gap():
    bad = "episode_id,t,v_f,v_l,range,event\ne1,0.0,20,10,-3,1\n"
    with pytest.raises(DataError, match="line 2.*negative gap"):
        parse_episode_csv(bad)


def test_parse_malformed_row():
    bad = "episode_id,t,v_f,v_l,range,event\ne1,0.0,20,10,30\n"
    with pytest.raises(DataError, match="line 2"):
        parse_episode_csv(bad)


def test_parse_no_event_rows():
    bad = "episode_id,t,v_f,v_l,range,event\ne1,0.0,20,10,30,0\ne1,1.0,20,10,30,0\ne1,2.0,20,10,30,0\n"
    with pytest.raises(DataError, match="no event rows"):
        parse_episode_csv(bad)


def test_parse_skips_comment_lines():
    eps = parse_episode_csv("# config seed = 1\n" + CSV)
    assert len(eps[0].samples) == 5


def test_episode_round_trip():
    eps = parse_episode_csv(CSV)
    buf = io.StringIO()
    write_episode_csv(eps, buf)
    again = parse_episode_csv(buf.getvalue())
    assert [(s.t, s.v_f, s.v_l, s.delta_x) for s in again[0].samples] == \
        [(s.t, s.v_f, s.v_l, s.delta_x) for s in eps[0].samples]
    assert again[0].event_start == eps[0].event_start


def test_episode_sampling_period_invariant():
    samples = [TrajectorySample(t, 20, 10, 30) for t in (0.0, 1.0, 2.0, 3.5)]
    with pytest.raises(DataError, match="sampling period"):
        Episode("e1", samples, 1.0, 2.0)


def _window_episode():
    dt = 0.5
    n = 200
    samples = [TrajectorySample(i * dt, 20, 18, 40) for i in range(n)]
    return Episode("w", samples, event_start=50.0, event_end=58.0)


def test_labeling_inside_event_is_warning():
    ep = _window_episode()
    labels = dict((s.t, lab) for s, lab in label_episode(ep))
    assert labels[51.0] == ClassLabel.WARNING
    assert labels[50.0] == ClassLabel.WARNING
    assert labels[58.0] == ClassLabel.WARNING


def test_labeling_before_event_is_safe():
    ep = _window_episode()
    labels = dict((s.t, lab) for s, lab in label_episode(ep))
    assert labels[40.0] == ClassLabel.SAFE
    assert labels[20.0] == ClassLabel.SAFE  # exactly event_start - 30


def test_labeling_drops_outside_window():
    ep = _window_episode()
    times = [s.t for s, _ in label_episode(ep)]
    assert 73.0 not in times  # beyond event_end + 10
    assert 19.5 not in times  # before event_start - 30
    assert min(times) == 20.0
    assert max(times) == 68.0


def test_labeling_partition_property():
    ep = _window_episode()
    pairs = label_episode(ep)
    seen = set()
    for s, lab in pairs:
        assert s.t not in seen
        seen.add(s.t)
        assert (lab == ClassLabel.WARNING) == (ep.event_start <= s.t <= ep.event_end)


def test_generator_determinism():
    cfg = GeneratorConfig(n_episodes=4)
    a = generate_synthetic_dataset(cfg, seed=11)
    b = generate_synthetic_dataset(cfg, seed=11)
    for ea, eb in zip(a, b):
        assert ea.event_start == eb.event_start
        assert all((x.t, x.v_f, x.v_l, x.delta_x) == (y.t, y.v_f, y.v_l, y.delta_x)
                   for x, y in zip(ea.samples, eb.samples))


def test_generator_full_stop_strictly_closing():
    cfg = GeneratorConfig(
        n_episodes=2, noise_std=0.0,
        speed_min=20.0, speed_max=20.0,
        leader_decel_min=5.0, leader_decel_max=5.0,
        brake_duration_min=5.0, brake_duration_max=5.0,  # 20/5 = 4s to full stop
        reaction_min=6.0, reaction_max=6.0,
    )
    for ep in generate_synthetic_dataset(cfg, seed=3):
        in_event = [s for s in ep.samples if ep.event_start <= s.t <= ep.event_end]
        assert in_event[-1].v_l == 0.0  # leader reached a standstill
        gaps = [s.delta_x for s in in_event]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))


def test_generator_class_ratio():
    cfg = GeneratorConfig(n_episodes=500)
    ds = dataset_from_episodes(generate_synthetic_dataset(cfg, seed=99))
    safe, warn = ds.class_counts()
    assert 4.0 <= safe / warn <= 6.0


def test_generator_infeasible_config():
    with pytest.raises(ConfigError, match="infeasible"):
        GeneratorConfig(reaction_min=3.0, reaction_max=3.5).validate()


def test_split_sizes():
    ds = Dataset(np.arange(50).reshape(10, 5).astype(float),
                 np.array([0, 1] * 5, np.int8))
    train, val = split_dataset(ds, 0.8, seed=0)
    assert len(train) == 8
    assert len(val) == 2


def test_split_determinism_and_partition():
    rng = np.random.default_rng(0)
    ds = Dataset(rng.uniform(size=(40, 5)), rng.integers(0, 2, 40).astype(np.int8))
    t1, v1 = split_dataset(ds, 0.65, seed=5)
    t2, v2 = split_dataset(ds, 0.65, seed=5)
    assert np.array_equal(t1.X, t2.X) and np.array_equal(v1.X, v2.X)
    merged = np.vstack([t1.X, v1.X])
    assert merged.shape[0] == len(ds)
    key = lambda M: sorted(map(tuple, M))
    assert key(merged) == key(ds.X)


def test_split_keeps_both_classes():
    # two warning instances in 30: a naive split often puts both on one side
    X = np.random.default_rng(1).uniform(size=(30, 5))
    y = np.zeros(30, np.int8)
    y[7] = 1
    y[17] = 1
    ds = Dataset(X, y)
    for seed in range(10):
        train, val = split_dataset(ds, 0.5, seed=seed)
        assert train.class_counts()[1] >= 1
        assert val.class_counts()[1] >= 1


def test_split_bad_fraction():
    ds = Dataset(np.zeros((4, 5)), np.array([0, 1, 0, 1], np.int8))
    with pytest.raises(ConfigError):
        split_dataset(ds, 1.2, seed=0)


def test_split_class_empty_after_retries():
    X = np.zeros((3, 5))
    y = np.array([0, 0, 1], np.int8)
    with pytest.raises(DataError):
        # validation side gets a single instance; warning cannot be on both sides
        split_dataset(Dataset(X, y), 0.34, seed=0)
