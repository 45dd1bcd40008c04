import numpy as np
import pytest

from driftsearch import harness

from scenario_util import small_config


@pytest.fixture(scope="module")
def base():
    return small_config()


def test_zero_scheduled_days_finds_nothing():
    cfg = small_config().replace(days=())
    ep = harness.run_episode(cfg, 0)
    assert ep.final_rate == 0.0


def test_days_without_agents_only_drift():
    cfg = small_config("schedule.agents=0")
    ep = harness.run_episode(cfg, 0)
    assert ep.final_rate == 0.0 and len(ep.times) > 1


def test_saturated_sensor_finds_everything_on_day_one():
    cfg = small_config("sensor.radius_km=200", "sensor.expected_time_s=0.001")
    ep = harness.run_episode(cfg, 0)
    first_day_end = cfg.windows()[0][1]
    idx = np.searchsorted(ep.times, first_day_end)
    assert ep.detected_fraction[idx] == 1.0


def test_episode_is_deterministic(base):
    a = harness.run_episode(base, 1, record_trajectories=True)
    b = harness.run_episode(base, 1, record_trajectories=True)
    np.testing.assert_array_equal(a.detected_fraction, b.detected_fraction)
    np.testing.assert_array_equal(a.detection_times, b.detection_times)
    assert a.trajectories == b.trajectories and a.detections == b.detections


def test_targets_depend_on_run_index(base):
    p0, _ = harness.seed_targets(base, 0)
    p0b, _ = harness.seed_targets(base, 0)
    p1, _ = harness.seed_targets(base, 1)
    np.testing.assert_array_equal(p0, p0b)
    assert not np.array_equal(p0, p1)


@pytest.mark.parametrize("controller", ["mdsmc", "dsmc", "lawnmower_reported", "lawnmower_drifted"])
def test_controllers_conserve_effort(controller):
    cfg = small_config(f"agents.controller={controller}")
    ep = harness.run_episode(cfg, 0)
    expected = np.cumsum([d.agents * (d.end_hour - d.start_hour) for d in cfg.days])
    for (c_total, hours), want in zip(ep.audits, expected):
        assert np.isclose(hours, want)
        assert abs(c_total - hours) / hours < 2e-2
    assert np.all(np.diff(ep.detected_fraction) >= 0)


def test_single_run_ensemble_equals_episode(base):
    cfg = base.replace(n_runs=1)
    stats = harness.run_ensemble(cfg)
    ep = harness.run_episode(cfg, 0)
    np.testing.assert_array_equal(stats.mean_curve, ep.detected_fraction)
    assert stats.mean_final == ep.final_rate


def test_two_run_mean(base):
    stats = harness.run_ensemble(base)
    np.testing.assert_allclose(stats.mean_curve, stats.curves.mean(axis=0))
    np.testing.assert_allclose(stats.mean_curve, 0.5 * (stats.episodes[0].detected_fraction
                                                        + stats.episodes[1].detected_fraction))
    counts, edges = stats.histogram()
    assert counts.sum() == 2 and len(edges) == 21


def test_parallel_ensemble_matches_serial(base):
    serial = harness.run_ensemble(base)
    parallel = harness.run_ensemble(base, jobs=2)
    np.testing.assert_array_equal(serial.curves, parallel.curves)


def test_delayed_offsets_identity(base):
    cfg = base.replace(n_runs=1)
    plain = harness.run_ensemble(cfg)
    cmp = harness.delayed_start_experiment(cfg, [0])
    np.testing.assert_array_equal(cmp.stats[0].curves, plain.curves)
    twice = harness.delayed_start_experiment(cfg, [0, 0])
    np.testing.assert_array_equal(twice.daily_success[0], twice.daily_success[1])
    np.testing.assert_array_equal(twice.daily_delta, 0.0)


def test_daily_increments_sum_to_final(base):
    stats = harness.run_ensemble(base)
    inc = harness.daily_increments(base, stats)
    assert len(inc) == len(base.days)
    assert np.isclose(inc.sum(), stats.mean_final)
