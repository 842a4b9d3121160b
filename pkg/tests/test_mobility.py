# -*- coding: utf-8 -*-
import numpy as np
import pytest
from scipy import stats

from ristide.core import SeedStreams
from ristide.errors import InvalidArgumentError
from ristide.sim.config import load_scenario
from ristide.sim.geometry import LayoutSpec, build_layout, resident_nodes
from ristide.sim.mobility import (Crowd, MobilityParams, OrientationParams,
                                  PhaseSchedule, UserState, next_waypoint,
                                  phase_of, sample_truncated_pareto,
                                  sample_ue_orientation, steering_step,
                                  truncated_pareto_cdf, truncated_pareto_ppf)


@pytest.fixture
def wide_layout():
    return build_layout(LayoutSpec(room_size=(10.0, 10.0, 3.0)))


def test_truncated_pareto_median():
    assert truncated_pareto_ppf(0.5, 0.5, 1.0, 100.0) == \
        pytest.approx(3.3057851, abs=1e-6)


def test_truncated_pareto_inverse():
    u = np.linspace(0.0, 1.0, 11)
    x = truncated_pareto_ppf(u, 1.3, 0.5, 7.0)
    assert np.allclose(truncated_pareto_cdf(x, 1.3, 0.5, 7.0), u)
    assert x[0] == pytest.approx(0.5)
    assert x[-1] == pytest.approx(7.0)


def test_truncated_pareto_samples_stay_in_bounds(rng):
    draws = sample_truncated_pareto(rng, 0.5, 2.0, 300.0, size=5000)
    assert draws.min() >= 2.0 and draws.max() <= 300.0
    assert isinstance(sample_truncated_pareto(rng, 1.0, 1.0, 5.0), float)
    assert sample_truncated_pareto(rng, 1.0, 3.0, 3.0) == 3.0


@pytest.mark.parametrize('exponent', [0.5, 1.0])
def test_truncated_pareto_passes_ks(rng, exponent):
    draws = sample_truncated_pareto(rng, exponent, 1.0, 100.0, size=100000)
    result = stats.kstest(
        draws, lambda x: truncated_pareto_cdf(x, exponent, 1.0, 100.0))
    assert result.pvalue > 0.001


@pytest.mark.parametrize('args', [(0.0, 1.0, 2.0), (1.0, 0.0, 2.0),
                                  (1.0, 3.0, 2.0)])
def test_truncated_pareto_arguments(rng, args):
    with pytest.raises(InvalidArgumentError):
        sample_truncated_pareto(rng, *args)


def test_phase_of():
    assert phase_of(0.0) == 'entering'
    assert phase_of(0.1) == 'entering'
    assert phase_of(0.15) == 'wandering'
    assert phase_of(0.7) == 'exiting'
    assert phase_of(1.0) == 'exiting'
    with pytest.raises(InvalidArgumentError):
        phase_of(1.5)


def test_boundary_steps():
    assert PhaseSchedule().boundary_steps(100) == (15, 70, 100)
    with pytest.raises(InvalidArgumentError):
        PhaseSchedule(0.8, 0.7)


def test_orientation_without_noise():
    params = OrientationParams(sitting_std=0, walking_std=0,
                               azimuth_jitter=0)
    pose = sample_ue_orientation('sitting', params, (1.0, 0.0), None)
    assert pose.polar_deg == pytest.approx(45.11)
    assert pose.azimuth_deg == pytest.approx(0.0)
    pose = sample_ue_orientation('walking', params, (0.0, 2.0), None)
    assert pose.polar_deg == pytest.approx(31.79)
    assert pose.azimuth_deg == pytest.approx(90.0)


def test_polar_angle_is_clamped(rng):
    params = OrientationParams(walking_mean=120.0, walking_std=0.0)
    pose = sample_ue_orientation('walking', params, (1.0, 0.0), rng)
    assert pose.polar_deg == 90.0
    with pytest.raises(InvalidArgumentError):
        sample_ue_orientation('running', params, (1.0, 0.0), rng)


def test_orientation_moments(rng):
    params = OrientationParams(azimuth_jitter=0.0)
    sitting = [sample_ue_orientation('sitting', params, (1.0, 0.0),
                                     rng).polar_deg for _ in range(20000)]
    walking = [sample_ue_orientation('walking', params, (1.0, 0.0),
                                     rng).polar_deg for _ in range(20000)]
    assert np.mean(sitting) == pytest.approx(45.11, abs=0.2)
    assert np.std(sitting) == pytest.approx(7.84, abs=0.2)
    assert np.mean(walking) == pytest.approx(31.79, abs=0.2)
    assert np.std(walking) == pytest.approx(7.61, abs=0.2)


def _polar_angles(rng, posture, n=100000):
    params = OrientationParams(azimuth_jitter=0.0)
    return np.array([sample_ue_orientation(posture, params, (1.0, 0.0),
                                           rng).polar_deg for _ in range(n)])


def test_sitting_polar_angle_is_laplace(rng):
    law = stats.laplace(45.11, 7.84 / np.sqrt(2.0))
    assert stats.kstest(_polar_angles(rng, 'sitting'), law.cdf).pvalue > 0.001


def test_walking_polar_angle_is_gaussian(rng):
    law = stats.norm(31.79, 7.61)
    assert stats.kstest(_polar_angles(rng, 'walking'), law.cdf).pvalue > 0.001


def test_unknown_mobility_key():
    with pytest.raises(InvalidArgumentError):
        MobilityParams(speed=2.0)
    with pytest.raises(InvalidArgumentError):
        MobilityParams(return_probability=1.5)


def test_displacement_bound_defaults_to_the_diagonal(table_layout):
    d_min, d_max = MobilityParams().displacement_bounds(table_layout)
    assert d_min == 0.5
    assert d_max == pytest.approx(np.hypot(5.0, 5.0))


def test_waypoints_are_free(table_layout, rng):
    params = MobilityParams()
    user = UserState('U0', (0.8, 0.8))
    for _ in range(200):
        waypoint = next_waypoint(user, table_layout, params, rng)
        assert table_layout.is_free(waypoint, params.body_radius)
        user = user.evolve(position=waypoint)


def test_returns_pick_resident_nodes(table_layout, rng):
    params = MobilityParams(return_probability=1.0)
    nodes = [tuple(np.round(n, 9))
             for n in resident_nodes(table_layout, params.body_radius)]
    user = UserState('U0', (0.8, 0.8))
    for _ in range(50):
        waypoint = next_waypoint(user, table_layout, params, rng)
        assert tuple(np.round(waypoint, 9)) in nodes


def test_levy_step_lengths_pass_ks(wide_layout, rng):
    params = MobilityParams(return_probability=0.0,
                            displacement_bounds=(0.5, 4.5))
    user = UserState('U0', (5.0, 5.0))
    lengths = np.array([
        np.hypot(*(next_waypoint(user, wide_layout, params, rng) - 5.0))
        for _ in range(100000)])
    result = stats.kstest(
        lengths, lambda x: truncated_pareto_cdf(x, 0.5, 0.5, 4.5))
    assert result.pvalue > 0.001


def test_r1_waypoints_stay_free(rng):
    config = load_scenario('R1')
    layout = build_layout(config.layout)
    params = config.mobility
    nodes = resident_nodes(layout, params.body_radius)
    user = UserState('U0', layout.door_anchor)
    for _ in range(10000):
        waypoint = next_waypoint(user, layout, params, rng, nodes)
        assert layout.is_free(waypoint, params.body_radius - 1e-9)
        user = user.evolve(position=waypoint)


def test_evolve_leaves_the_original_alone():
    user = UserState('U0', (1.0, 1.0))
    moved = user.evolve(position=(2.0, 2.0), phase='wandering')
    assert user.position.tolist() == [1.0, 1.0]
    assert user.phase == 'entering'
    assert moved.position.tolist() == [2.0, 2.0]
    assert moved.id == 'U0'


def test_head_on_users_mirror_each_other(empty_layout):
    params = MobilityParams()
    a = UserState('A', (2.0, 2.5), waypoint=(3.0, 2.5), heading=(1.0, 0.0))
    b = UserState('B', (3.0, 2.5), waypoint=(2.0, 2.5), heading=(-1.0, 0.0))
    for _ in range(5):
        a, b = (steering_step(a, [a, b], empty_layout, params, 0.1),
                steering_step(b, [a, b], empty_layout, params, 0.1))
        assert a.position[0] - 2.5 == pytest.approx(2.5 - b.position[0])
        assert a.position[1] == pytest.approx(b.position[1])
        assert a.velocity[0] == pytest.approx(-b.velocity[0])


def test_arrival_settles_on_the_waypoint(wide_layout):
    params = MobilityParams()
    user = UserState('U0', (5.0, 5.0), waypoint=(5.0, 5.3))
    for _ in range(300):
        user = steering_step(user, [user], wide_layout, params, 0.1)
    assert np.hypot(*(user.position - [5.0, 5.3])) < 0.01
    assert user.speed < 0.01


def test_speed_never_exceeds_the_walk_speed(wide_layout):
    params = MobilityParams()
    user = UserState('U0', (1.0, 5.0), waypoint=(9.0, 5.0))
    for _ in range(100):
        user = steering_step(user, [user], wide_layout, params, 0.1)
        assert user.speed <= params.walk_speed + 1e-9
        assert wide_layout.is_free(user.position, params.body_radius)


def _crowd(layout, seed, n_users=3, duration=120):
    return Crowd(layout, n_users, MobilityParams(), OrientationParams(),
                 PhaseSchedule(), duration, 0.1, SeedStreams(seed))


def test_crowds_are_reproducible(table_layout):
    first, second = _crowd(table_layout, 5), _crowd(table_layout, 5)
    for step in range(1, 81):
        first.step(step)
        second.step(step)
    assert [u.id for u in first.users] == [u.id for u in second.users]
    for a, b in zip(first.users, second.users):
        assert np.array_equal(a.position, b.position)
        assert a.ue_pose.polar_deg == b.ue_pose.polar_deg


def test_crowd_conserves_users(table_layout):
    crowd = _crowd(table_layout, 11, n_users=4, duration=200)
    phases = []
    for step in range(1, 201):
        phases.append(crowd.step(step))
        assert crowd.active + crowd.despawned == crowd.spawned
        for user in crowd.users:
            assert table_layout.is_free(user.position, 0.15 - 1e-9)
    assert crowd.spawned == 4
    assert phases[0] == 'entering' and phases[-1] == 'exiting'
    assert 'wandering' in phases


def test_users_spawn_during_entering(table_layout):
    crowd = _crowd(table_layout, 2, n_users=5, duration=100)
    for step in range(1, 16):
        crowd.step(step)
    assert crowd.spawned == 5


@pytest.mark.parametrize('seed', range(6))
def test_nobody_spawns_on_the_entering_boundary(table_layout, seed):
    crowd = _crowd(table_layout, seed, n_users=8, duration=100)
    for step in range(1, 15):
        assert crowd.step(step) == 'entering'
    assert crowd.spawned == 8


def test_r1_crowd_never_enters_furniture():
    config = load_scenario('R1')
    layout = build_layout(config.layout)
    crowd = Crowd(layout, config.n_users, config.mobility, config.orientation,
                  config.schedule, 10000, config.dt, SeedStreams(config.seed))
    boxes = [(f.lo[:2], f.hi[:2]) for f in layout.furniture]
    assert boxes
    for step in range(1, 10001):
        crowd.step(step)
        for user in crowd.users:
            x, y = user.position
            for lo, hi in boxes:
                assert not (lo[0] < x < hi[0] and lo[1] < y < hi[1])
            assert layout.is_free(user.position,
                                  config.mobility.body_radius - 1e-9)
    assert crowd.spawned == config.n_users
