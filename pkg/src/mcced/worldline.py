"""Particle worldlines: cubic Hermite interpolation over (t, position, velocity).

A worldline stores coordinate-time samples of position and velocity and
interpolates between them with a C1 cubic Hermite spline.  Outside the
sampled window the motion continues inertially with the endpoint velocity,
so light-cone searches far into the past or future always terminate.
Four-velocity and four-acceleration are derived structurally from the
interpolated three-velocity and three-acceleration, which keeps u.u = 1 and
u.a = 0 at machine precision regardless of interpolation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .minkowski import FourVector, dot4

__all__ = [
    "WorldlineSample",
    "Worldline",
    "worldline_state_at",
    "gamma_of",
    "four_velocity_of",
    "four_acceleration_of",
    "static_worldline",
    "inertial_worldline",
    "circular_worldline",
    "hyperbolic_worldline",
    "worldline_from_functions",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
# mapped to [0, 1]
_GL_S = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS


def gamma_of(velocity) -> float:
    """Lorentz factor of a three-velocity; requires |v| < 1."""
    v = np.asarray(velocity, dtype=float)
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise ValueError(f"speed must satisfy |v| < 1, got |v|^2 = {v2}")
    return 1.0 / math.sqrt(1.0 - v2)


def four_velocity_of(velocity) -> np.ndarray:
    """Four-velocity u = gamma*(1, v) as a length-4 array; u.u = 1."""
    v = np.asarray(velocity, dtype=float)
    g = gamma_of(v)
    return np.array([g, g * v[0], g * v[1], g * v[2]])


def four_acceleration_of(velocity, coordinate_acceleration) -> np.ndarray:
    """Four-acceleration from three-velocity and coordinate acceleration.

    a^mu = gamma * d/dt [gamma*(1, v)] with dgamma/dt = gamma^3 (v.a); the
    construction satisfies u.a = 0 identically.
    """
    v = np.asarray(velocity, dtype=float)
    ac = np.asarray(coordinate_acceleration, dtype=float)
    g = gamma_of(v)
    gdot = g ** 3 * float(v @ ac)
    spatial = g * (gdot * v + g * ac)
    return np.array([g * gdot, spatial[0], spatial[1], spatial[2]])


@dataclass(frozen=True)
class WorldlineSample:
    """Worldline state at one event: proper time and four-kinematics."""

    tau: float
    position: FourVector
    velocity: FourVector
    acceleration: FourVector

    def __post_init__(self):
        u = self.velocity.as_array()
        a = self.acceleration.as_array()
        uu = dot4(u, u)
        if abs(uu - 1.0) > 1e-9:
            raise ValueError(f"four-velocity must satisfy u.u = 1, got {uu}")
        ua = dot4(u, a)
        scale = 1.0 + float(np.max(np.abs(a)))
        if abs(ua) > 1e-9 * scale:
            raise ValueError(f"four-acceleration must satisfy u.a = 0, got {ua}")


def _hermite_state(times, positions, velocities, t, side):
    """Evaluate the Hermite interpolant; returns (pos3, vel3, acc3)."""
    n = times.shape[0]
    if t <= times[0]:
        if t == times[0] and side > 0:
            i = 0
        else:
            v = velocities[0]
            return positions[0] + (t - times[0]) * v, v.copy(), np.zeros(3)
    elif t >= times[-1]:
        if t == times[-1] and side < 0:
            i = n - 2
        else:
            v = velocities[-1]
            return positions[-1] + (t - times[-1]) * v, v.copy(), np.zeros(3)
    else:
        lookup = "left" if side < 0 else "right"
        i = int(np.searchsorted(times, t, side=lookup)) - 1
        i = min(max(i, 0), n - 2)
    h = float(times[i + 1] - times[i])
    s = (t - float(times[i])) / h
    p0, p1 = positions[i], positions[i + 1]
    v0, v1 = velocities[i], velocities[i + 1]
    s2 = s * s
    s3 = s2 * s
    # Hermite basis weights (velocity weights carry the h factor of the
    # scaled tangents hv = h v folded in).
    wp0 = 2.0 * s3 - 3.0 * s2 + 1.0
    wv0 = (s3 - 2.0 * s2 + s) * h
    wp1 = -2.0 * s3 + 3.0 * s2
    wv1 = (s3 - s2) * h
    dp0 = (6.0 * s2 - 6.0 * s) / h
    dv0 = 3.0 * s2 - 4.0 * s + 1.0
    dp1 = (-6.0 * s2 + 6.0 * s) / h
    dv1 = 3.0 * s2 - 2.0 * s
    h2 = h * h
    ap0 = (12.0 * s - 6.0) / h2
    av0 = (6.0 * s - 4.0) / h
    ap1 = (-12.0 * s + 6.0) / h2
    av1 = (6.0 * s - 2.0) / h
    pos = np.empty(3)
    vel = np.empty(3)
    acc = np.empty(3)
    for c in range(3):
        a = float(p0[c])
        b = float(v0[c])
        d = float(p1[c])
        e = float(v1[c])
        pos[c] = wp0 * a + wv0 * b + wp1 * d + wv1 * e
        vel[c] = dp0 * a + dv0 * b + dp1 * d + dv1 * e
        acc[c] = ap0 * a + av0 * b + ap1 * d + av1 * e
    return pos, vel, acc


def _validate_samples(times, positions, velocities):
    if times.ndim != 1 or times.shape[0] < 2:
        raise ValueError("a worldline needs at least two time samples")
    if positions.shape != (times.shape[0], 3) or velocities.shape != positions.shape:
        raise ValueError(
            f"sample shapes must be (n,), (n,3), (n,3); got {times.shape}, "
            f"{positions.shape}, {velocities.shape}"
        )
    if not (np.all(np.isfinite(times)) and np.all(np.isfinite(positions)) and np.all(np.isfinite(velocities))):
        raise ValueError("worldline samples must be finite")
    if not np.all(np.diff(times) > 0.0):
        raise ValueError("sample times must be strictly increasing")
    speeds2 = np.einsum("ij,ij->i", velocities, velocities)
    if np.any(speeds2 >= 1.0):
        raise ValueError(f"sampled speeds must satisfy |v| < 1, max |v|^2 = {speeds2.max()}")


class Worldline:
    """Immutable sampled worldline with inertial extension beyond the window."""

    def __init__(self, times, positions, velocities):
        times = np.array(times, dtype=float)
        positions = np.array(positions, dtype=float)
        velocities = np.array(velocities, dtype=float)
        _validate_samples(times, positions, velocities)
        for arr in (times, positions, velocities):
            arr.setflags(write=False)
        self._times = times
        self._positions = positions
        self._velocities = velocities
        self._tau_table = self._build_tau_table()
        self._tau_table.setflags(write=False)

    def _build_tau_table(self) -> np.ndarray:
        t = self._times
        h = np.diff(t)  # (m,)
        s = _GL_S[None, :]  # (1, 8)
        s2 = s * s
        s3 = s2 * s
        p0 = self._positions[:-1, None, :]
        p1 = self._positions[1:, None, :]
        hv0 = h[:, None, None] * self._velocities[:-1, None, :]
        hv1 = h[:, None, None] * self._velocities[1:, None, :]
        vel = (
            (6.0 * s2 - 6.0 * s)[..., None] * p0
            + (3.0 * s2 - 4.0 * s + 1.0)[..., None] * hv0
            + (-6.0 * s2 + 6.0 * s)[..., None] * p1
            + (3.0 * s2 - 2.0 * s)[..., None] * hv1
        ) / h[:, None, None]
        speed2 = np.einsum("msk,msk->ms", vel, vel)
        speed2 = np.minimum(speed2, 1.0 - 1e-15)
        dtau = h * np.einsum("s,ms->m", _GL_W, np.sqrt(1.0 - speed2))
        table = np.empty(t.shape[0])
        table[0] = 0.0
        np.cumsum(dtau, out=table[1:])
        return table

    @property
    def times(self) -> np.ndarray:
        return self._times

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    @property
    def velocities(self) -> np.ndarray:
        return self._velocities

    @property
    def t_min(self) -> float:
        return float(self._times[0])

    @property
    def t_max(self) -> float:
        return float(self._times[-1])

    def state3_at(self, t, side=1):
        """(position, velocity, coordinate acceleration) 3-vectors at time t.

        `side` selects the one-sided limit at interior sample nodes, where
        the Hermite second derivative may jump: +1 right (default), -1 left.
        """
        return _hermite_state(self._times, self._positions, self._velocities, float(t), side)

    def tau_of_t(self, t) -> float:
        """Proper time elapsed since the first sample node (negative before it)."""
        t = float(t)
        times = self._times
        if t <= times[0]:
            v = self._velocities[0]
            return (t - times[0]) * math.sqrt(max(1.0 - float(v @ v), 0.0))
        if t >= times[-1]:
            v = self._velocities[-1]
            return float(self._tau_table[-1]) + (t - times[-1]) * math.sqrt(
                max(1.0 - float(v @ v), 0.0)
            )
        i = int(np.searchsorted(times, t, side="right")) - 1
        i = min(max(i, 0), times.shape[0] - 2)
        span = t - times[i]
        nodes = times[i] + _GL_S * span
        speed2 = np.empty_like(nodes)
        for j, tj in enumerate(nodes):
            _, v, _ = self.state3_at(tj)
            speed2[j] = min(float(v @ v), 1.0 - 1e-15)
        return float(self._tau_table[i]) + span * float(_GL_W @ np.sqrt(1.0 - speed2))

    def t_of_tau(self, tau) -> float:
        """Inverse of tau_of_t; Newton iteration with a bisection safeguard."""
        tau = float(tau)
        table = self._tau_table
        times = self._times
        if tau <= table[0]:
            v = self._velocities[0]
            return float(times[0]) + tau / math.sqrt(max(1.0 - float(v @ v), 1e-300))
        if tau >= table[-1]:
            v = self._velocities[-1]
            return float(times[-1]) + (tau - float(table[-1])) / math.sqrt(
                max(1.0 - float(v @ v), 1e-300)
            )
        i = int(np.searchsorted(table, tau, side="right")) - 1
        i = min(max(i, 0), table.shape[0] - 2)
        lo, hi = float(times[i]), float(times[i + 1])
        t = 0.5 * (lo + hi)
        tol = 1e-14 * (1.0 + abs(tau))
        for _ in range(80):
            f = self.tau_of_t(t) - tau
            if abs(f) <= tol:
                return t
            if f > 0.0:
                hi = t
            else:
                lo = t
            _, v, _ = self.state3_at(t)
            g = gamma_of(v)
            t_new = t - f * g
            if not (lo < t_new < hi):
                t_new = 0.5 * (lo + hi)
            t = t_new
        return t

    def sample_at(self, t, side=1) -> WorldlineSample:
        """Full four-kinematic state at coordinate time t."""
        t = float(t)
        pos, vel, acc = self.state3_at(t, side)
        u = four_velocity_of(vel)
        a = four_acceleration_of(vel, acc)
        return WorldlineSample(
            tau=self.tau_of_t(t),
            position=FourVector.from_spatial(t, pos),
            velocity=FourVector.from_array(u),
            acceleration=FourVector.from_array(a),
        )

    def reversed_copy(self) -> "Worldline":
        """The time-reflected worldline: events (t, x) -> (-t, x)."""
        return Worldline(
            -self._times[::-1], self._positions[::-1], -self._velocities[::-1]
        )

    def spatially_reflected(self) -> "Worldline":
        """The parity image: events (t, x) -> (t, -x)."""
        return Worldline(self._times, -self._positions, -self._velocities)

    def time_shifted(self, delta) -> "Worldline":
        """The same motion displaced in coordinate time by delta."""
        return Worldline(self._times + float(delta), self._positions, self._velocities)


def worldline_state_at(w: Worldline, t, side=1) -> WorldlineSample:
    """Module-level accessor for the full state of a worldline at time t."""
    return w.sample_at(t, side)


def static_worldline(point, t0=0.0, t1=1.0) -> Worldline:
    """A charge at rest at `point` for all time."""
    p = np.asarray(point, dtype=float)
    return Worldline([t0, t1], [p, p], [np.zeros(3), np.zeros(3)])


def inertial_worldline(point, velocity, t0=0.0, t1=1.0) -> Worldline:
    """Uniform motion through `point` at time t0."""
    p = np.asarray(point, dtype=float)
    v = np.asarray(velocity, dtype=float)
    return Worldline([t0, t1], [p, p + (t1 - t0) * v], [v, v])


def circular_worldline(
    radius,
    speed,
    t_min,
    t_max,
    center=(0.0, 0.0, 0.0),
    phase=0.0,
    samples_per_period=256,
) -> Worldline:
    """Uniform circular motion in the xy plane about `center`.

    Angular velocity is speed/radius; position at t is
    center + radius*(cos(w t + phase), sin(w t + phase), 0).
    """
    if radius <= 0.0 or not 0.0 < speed < 1.0:
        raise ValueError("need radius > 0 and 0 < speed < 1")
    omega = speed / radius
    period = 2.0 * math.pi / omega
    n = max(int(math.ceil((t_max - t_min) / period * samples_per_period)), 8) + 1
    times = np.linspace(t_min, t_max, n)
    angles = omega * times + phase
    c = np.asarray(center, dtype=float)
    positions = c + radius * np.stack(
        [np.cos(angles), np.sin(angles), np.zeros_like(angles)], axis=1
    )
    velocities = speed * np.stack(
        [-np.sin(angles), np.cos(angles), np.zeros_like(angles)], axis=1
    )
    return Worldline(times, positions, velocities)


def hyperbolic_worldline(proper_acceleration, t_min, t_max, samples=2001) -> Worldline:
    """Constant proper acceleration g along x: x(t) = sqrt(1/g^2 + t^2).

    The trajectory passes through x = 1/g at t = 0 with zero velocity.
    """
    g = float(proper_acceleration)
    if g <= 0.0:
        raise ValueError("proper acceleration must be positive")
    b = 1.0 / g
    times = np.linspace(t_min, t_max, samples)
    x = np.sqrt(b * b + times * times)
    vx = times / x
    zeros = np.zeros_like(times)
    positions = np.stack([x, zeros, zeros], axis=1)
    velocities = np.stack([vx, zeros, zeros], axis=1)
    return Worldline(times, positions, velocities)


def worldline_from_functions(position_fn, velocity_fn, times) -> Worldline:
    """Sample analytic position/velocity functions of coordinate time."""
    times = np.asarray(times, dtype=float)
    positions = np.array([position_fn(t) for t in times], dtype=float)
    velocities = np.array([velocity_fn(t) for t in times], dtype=float)
    return Worldline(times, positions, velocities)
