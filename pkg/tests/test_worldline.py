"""Worldline kinematics, interpolation, and proper-time bookkeeping."""

import math

import numpy as np
import pytest

from mcced.minkowski import dot4
from mcced.worldline import (
    Worldline,
    circular_worldline,
    four_acceleration_of,
    four_velocity_of,
    gamma_of,
    hyperbolic_worldline,
    inertial_worldline,
    static_worldline,
    worldline_from_functions,
)


def test_four_kinematics_identities():
    rng = np.random.default_rng(5)
    for _ in range(200):
        v = rng.uniform(-0.55, 0.55, size=3)
        acc = rng.normal(size=3)
        u = four_velocity_of(v)
        a = four_acceleration_of(v, acc)
        assert dot4(u, u) == pytest.approx(1.0, abs=1e-12)
        assert dot4(u, a) == pytest.approx(0.0, abs=1e-9 * (1 + np.max(np.abs(a))))
        assert u[0] == pytest.approx(gamma_of(v))


def test_gamma_of_matches_formula():
    v = (0.3, 0.4, 0.0)
    assert gamma_of(v) == pytest.approx(1.0 / math.sqrt(1.0 - 0.25), rel=1e-15)
    assert gamma_of((0.0, 0.0, 0.0)) == 1.0


def test_circular_worldline_matches_analytic_motion():
    radius, speed = 4.0, 0.45
    omega = speed / radius
    w = circular_worldline(radius, speed, -30.0, 30.0, samples_per_period=1024)
    rng = np.random.default_rng(1)
    for t in rng.uniform(-25.0, 25.0, size=20):
        pos, vel, acc = w.state3_at(float(t))
        angle = omega * t
        assert np.allclose(
            pos, [radius * math.cos(angle), radius * math.sin(angle), 0.0], atol=1e-9
        )
        assert np.allclose(
            vel, [-speed * math.sin(angle), speed * math.cos(angle), 0.0], atol=1e-9
        )
        assert np.allclose(
            acc,
            [-speed * omega * math.cos(angle), -speed * omega * math.sin(angle), 0.0],
            atol=1e-8,
        )


def test_worldline_extends_inertially_beyond_samples():
    v = np.array([0.2, 0.0, 0.1])
    w = inertial_worldline((1.0, 0.0, 0.0), v, 0.0, 10.0)
    pos, vel, acc = w.state3_at(25.0)
    assert np.allclose(pos, np.array([1.0, 0.0, 0.0]) + 25.0 * v, atol=1e-12)
    assert np.allclose(vel, v)
    assert np.allclose(acc, 0.0)
    pos, vel, acc = w.state3_at(-5.0)
    assert np.allclose(pos, np.array([1.0, 0.0, 0.0]) - 5.0 * v, atol=1e-12)


def test_proper_time_is_inverse_of_time_of_proper():
    w = circular_worldline(3.0, 0.6, 0.0, 50.0)
    rng = np.random.default_rng(9)
    for t in rng.uniform(0.0, 50.0, size=25):
        tau = w.tau_of_t(float(t))
        assert w.t_of_tau(tau) == pytest.approx(t, abs=1e-10)
    # proper time runs slower than coordinate time by gamma
    gamma = gamma_of((0.6, 0.0, 0.0))
    assert w.tau_of_t(50.0) - w.tau_of_t(0.0) == pytest.approx(50.0 / gamma, rel=1e-9)


def test_static_worldline_proper_time_is_coordinate_time():
    w = static_worldline((5.0, 0.0, 0.0), -10.0, 10.0)
    assert w.tau_of_t(7.0) - w.tau_of_t(-3.0) == pytest.approx(10.0, abs=1e-12)


def test_hyperbolic_worldline_has_constant_proper_acceleration():
    g = 0.05
    w = hyperbolic_worldline(g, -20.0, 20.0)
    for t in (-15.0, -3.0, 0.0, 8.0):
        s = w.sample_at(t)
        a2 = -dot4(s.acceleration.as_array(), s.acceleration.as_array())
        assert math.sqrt(a2) == pytest.approx(g, rel=1e-6)


def test_worldline_from_functions_reproduces_functions():
    def pos(t):
        return np.array([math.sin(0.3 * t), 0.1 * t, 0.0])

    def vel(t):
        return np.array([0.3 * math.cos(0.3 * t), 0.1, 0.0])

    times = np.linspace(-10.0, 10.0, 801)
    w = worldline_from_functions(pos, vel, times)
    for t in (-7.3, 0.0, 4.1):
        p, v, _ = w.state3_at(t)
        assert np.allclose(p, pos(t), atol=1e-9)
        assert np.allclose(v, vel(t), atol=1e-9)


def test_reversed_copy_flips_time_and_velocity():
    w = circular_worldline(2.0, 0.3, -8.0, 8.0)
    r = w.reversed_copy()
    for t in (-5.0, 1.0, 6.5):
        pos, vel, acc = w.state3_at(t)
        rpos, rvel, racc = r.state3_at(-t)
        assert np.allclose(rpos, pos, atol=1e-12)
        assert np.allclose(rvel, -vel, atol=1e-12)
        assert np.allclose(racc, acc, atol=1e-10)


def test_spatially_reflected_negates_positions():
    w = circular_worldline(2.0, 0.3, -8.0, 8.0, center=(1.0, 0.0, 0.0))
    r = w.spatially_reflected()
    for t in (-5.0, 1.0, 6.5):
        pos, vel, acc = w.state3_at(t)
        rpos, rvel, racc = r.state3_at(t)
        assert np.allclose(rpos, -pos, atol=1e-12)
        assert np.allclose(rvel, -vel, atol=1e-12)
        assert np.allclose(racc, -acc, atol=1e-10)


def test_time_shifted_translates_the_parametrization():
    w = circular_worldline(2.0, 0.3, -8.0, 8.0)
    shifted = w.time_shifted(3.0)
    pos, vel, _ = w.state3_at(1.0)
    spos, svel, _ = shifted.state3_at(4.0)
    assert np.allclose(spos, pos, atol=1e-12)
    assert np.allclose(svel, vel, atol=1e-12)


def test_worldline_sample_validates_kinematics():
    w = circular_worldline(5.0, 0.5, -10.0, 10.0)
    s = w.sample_at(2.0)
    u = s.velocity.as_array()
    assert dot4(u, u) == pytest.approx(1.0, abs=1e-9)


def test_builder_validation():
    with pytest.raises(ValueError):
        circular_worldline(0.0, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        circular_worldline(1.0, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        hyperbolic_worldline(-0.1, 0.0, 1.0)


def test_worldline_rejects_superluminal_samples():
    times = np.array([0.0, 1.0])
    positions = np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    velocities = np.array([[2.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        Worldline(times, positions, velocities)


def test_worldline_rejects_non_monotone_times():
    times = np.array([0.0, -1.0])
    positions = np.zeros((2, 3))
    velocities = np.zeros((2, 3))
    with pytest.raises(ValueError):
        Worldline(times, positions, velocities)
