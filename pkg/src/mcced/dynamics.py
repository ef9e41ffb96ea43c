"""Radiation-reaction dynamics for point charges.

Equations of motion are integrated in natural units (c = 1) with
Heaviside-Lorentz field normalization, so the damping time of a charge is

    tau0 = (2/3) e^2 / (4 pi m)

and the radiated power along a worldline is

    larmor_power = -(e^2 / 6 pi) (a.a)  >= 0     (mostly-minus metric)

Five integration methods are provided:

* ``ld-integro`` — the future-weighted integral form of the self-force
  equation, m a(tau) = Int_0^inf K(tau + alpha tau0) e^(-alpha) d alpha,
  solved by waveform (Picard) iteration on a proper-time grid with exact
  exponential quadrature per segment, sub-segment splitting at field
  switch times, and an analytically integrated inertial tail.
* ``ld-local`` — the third-order differential form, integrated forward to
  exhibit (not hide) its runaway solutions, with a fitted growth rate.
* ``landau-lifshitz`` — reduction of order: the self-force evaluated along
  the zeroth-order motion; no runaways by construction.
* ``nbody-retarded`` — delay-differential N-body integration for the
  measurement-color topology with p = +1: neighbor fields on the past
  light cone from committed histories, self coupling via the
  reduction-of-order force.
* ``nbody-advanced`` — the p = -1 branch, realized exactly through the
  time-reversal mapping of a retarded run (the supplied state is reached
  at the *end* of the window); a direct fixed-point solver over short
  windows cross-validates the mapping.

Single-particle methods interpret ``IntegratorConfig.dt`` as the
proper-time step (the equations live in proper time); the N-body methods
use it as the coordinate-time step.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .coupling import Scenario
from .errors import ConvergenceError
from .fields import FieldTensor
from .lienard import (
    lw_field,
    lw_field_from_geometry,
    lw_geometry,
    self_minus_force,
)
from .minkowski import FourVector
from .worldline import (
    Worldline,
    _hermite_state,
    four_acceleration_of,
    gamma_of,
)

__all__ = [
    "ALD_GAUSSIAN_COEFFICIENT",
    "INTEGRATION_METHODS",
    "tau0",
    "larmor_power",
    "radiation_reaction_vector",
    "IntegratorConfig",
    "ParticleTrace",
    "EnergyLedger",
    "TrajectoryRecord",
    "RunawayReport",
    "AsymptoticReport",
    "ld_kernel",
    "integrate_ld_integro",
    "integrate_ld_local",
    "integrate_landau_lifshitz",
    "integrate_retarded_nbody",
    "integrate_advanced_nbody",
    "advanced_nbody_direct",
    "validate_self_force",
    "asymptotic_check",
    "classical_threshold",
    "integrate",
]

#: Dimensionless damping coefficient before unit normalization is folded
#: in: tau0 * m = ALD_GAUSSIAN_COEFFICIENT * e^2 / (4 pi) in these units.
ALD_GAUSSIAN_COEFFICIENT = 2.0 / 3.0

INTEGRATION_METHODS = (
    "ld-integro",
    "ld-local",
    "landau-lifshitz",
    "nbody-retarded",
    "nbody-advanced",
)


def tau0(charge: float, mass: float) -> float:
    """Radiation-damping time (2/3) e^2 / (4 pi m) for c = 1."""
    mass = float(mass)
    if not (math.isfinite(mass) and mass > 0.0):
        raise ValueError("mass must be positive")
    charge = float(charge)
    return ALD_GAUSSIAN_COEFFICIENT * charge * charge / (4.0 * math.pi * mass)


def _as4(v) -> np.ndarray:
    if isinstance(v, FourVector):
        return v.as_array()
    arr = np.asarray(v, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"expected a four-vector, got shape {arr.shape}")
    return arr


def larmor_power(u, a, charge: float) -> float:
    """Radiated power -(e^2 / 6 pi)(a.a), non-negative for physical motion."""
    a = _as4(a)
    aa = a[0] * a[0] - a[1] * a[1] - a[2] * a[2] - a[3] * a[3]
    e = float(charge)
    return -(e * e) / (6.0 * math.pi) * aa


def radiation_reaction_vector(charge: float, u, a, adot) -> FourVector:
    """Self-force four-vector (e^2 / 6 pi)(da/dtau + (a.a) u).

    This is the unique combination proportional to da/dtau that is
    orthogonal to u (because u.da/dtau = -(a.a) along any worldline), and
    it matches the point-split limit of the half-difference self field.
    """
    u = _as4(u)
    a = _as4(a)
    adot = _as4(adot)
    aa = a[0] * a[0] - a[1] * a[1] - a[2] * a[2] - a[3] * a[3]
    e = float(charge)
    return FourVector.from_array((e * e) / (6.0 * math.pi) * (adot + aa * u))


@dataclass(frozen=True)
class IntegratorConfig:
    """Numerical parameters for one integration run.

    ``future_horizon`` (in units of tau0) truncates the future-weighted
    kernel integral; e^(-20) < 1e-8 bounds the truncation error, so values
    below 20 are rejected.  ``tolerance`` is the sup-norm position
    tolerance of the waveform/fixed-point iterations.
    """

    dt: float
    t_end: float
    method: str
    future_horizon: float = 25.0
    waveform_iterations: int = 60
    tolerance: float = 1e-10

    def __post_init__(self):
        if self.method not in INTEGRATION_METHODS:
            raise ValueError(
                f"method must be one of {INTEGRATION_METHODS}, got {self.method!r}"
            )
        for name in ("dt", "t_end", "future_horizon", "tolerance"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.t_end <= 0.0:
            raise ValueError("t_end must be positive")
        if self.future_horizon < 20.0:
            raise ValueError(
                "future_horizon must be at least 20 (kernel truncation e^-20)"
            )
        iterations = int(self.waveform_iterations)
        if iterations < 1:
            raise ValueError("waveform_iterations must be at least 1")
        object.__setattr__(self, "waveform_iterations", iterations)
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ParticleTrace:
    """Time series for one particle.

    ``accelerations`` holds coordinate accelerations d v / d t; the
    four-quantities are derived on demand so that u.u = 1 and u.a = 0 hold
    structurally at every sample.  The force columns are contravariant
    four-force components split by origin (applied external+free field,
    other particles, self coupling).
    """

    times: np.ndarray
    tau: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    accelerations: np.ndarray
    larmor: np.ndarray
    force_external: np.ndarray
    force_neighbors: np.ndarray
    force_self: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.times).shape[0]
        for name in dataclasses.fields(self):
            arr = _frozen(getattr(self, name.name))
            expected = (n,) if arr.ndim == 1 else (n, arr.shape[1])
            if arr.shape[0] != n:
                raise ValueError(f"{name.name} length {arr.shape[0]} != {n}")
            object.__setattr__(self, name.name, arr.reshape(expected))

    @property
    def n_samples(self) -> int:
        return int(self.times.shape[0])

    def worldline(self) -> Worldline:
        return Worldline(self.times, self.positions, self.velocities)

    def four_velocities(self) -> np.ndarray:
        v = self.velocities
        gamma = 1.0 / np.sqrt(1.0 - np.einsum("ij,ij->i", v, v))
        return np.concatenate([gamma[:, None], gamma[:, None] * v], axis=1)

    def four_accelerations(self) -> np.ndarray:
        v = self.velocities
        a = self.accelerations
        v2 = np.einsum("ij,ij->i", v, v)
        gamma2 = 1.0 / (1.0 - v2)
        gamma4 = gamma2 * gamma2
        va = np.einsum("ij,ij->i", v, a)
        a0 = gamma4 * va
        aspat = gamma2[:, None] * a + (gamma4 * va)[:, None] * v
        return np.concatenate([a0[:, None], aspat], axis=1)

    def proper_acceleration(self) -> np.ndarray:
        """Magnitude sqrt(-(a.a)) at every sample."""
        a4 = self.four_accelerations()
        aa = a4[:, 0] ** 2 - np.einsum("ij,ij->i", a4[:, 1:], a4[:, 1:])
        return np.sqrt(np.maximum(-aa, 0.0))


@dataclass(frozen=True)
class EnergyLedger:
    """Mechanical/radiated energy bookkeeping for one run.

    ``closure_residual = dKE + dPE + arrow_sign * radiated`` vanishes for
    isolated runs (no external field doing work); it is always reported,
    never absorbed.  ``arrow_sign`` is +1 for p > 0 branches (radiated
    energy leaves the particles) and -1 for p < 0 (it arrives).
    """

    initial_kinetic: float
    final_kinetic: float
    potential_initial: float
    potential_final: float
    radiated: float
    arrow_sign: float
    closure_residual: float

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class RunawayReport:
    """Exponential-growth diagnostics of a local self-force run."""

    detected: bool
    truncated: bool
    fitted_rate: float
    expected_rate: float
    relative_error: float
    growth_factor: float
    fit_window: tuple

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["fit_window"] = list(self.fit_window)
        return d


@dataclass(frozen=True)
class AsymptoticReport:
    """Trailing-window acceleration decay check (dynamic stability)."""

    max_proper_acceleration: float
    window: float
    tolerance: float
    passed: bool
    branch_parameter: float
    branch_is_unit: bool

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Result of one integration run."""

    scenario: Scenario
    method: str
    dt: float
    traces: tuple
    ledger: EnergyLedger
    diagnostics: dict = field(default_factory=dict)

    def worldlines(self) -> list:
        return [trace.worldline() for trace in self.traces]

    def final_scenario(self) -> Scenario:
        return self.scenario.with_worldlines(self.worldlines())

    @property
    def t_start(self) -> float:
        return float(self.traces[0].times[0])

    @property
    def t_final(self) -> float:
        return float(self.traces[0].times[-1])


# --------------------------------------------------------------------------
# shared helpers


def _applied_field(scenario: Scenario) -> Callable[[float, np.ndarray, int], FieldTensor]:
    """Evaluator for the non-particle field: external plus (ced) free."""
    external = scenario.external
    free = scenario.topology.free_field
    if free.kind == "none":
        def evaluate(t, x3, side=1):
            return external.field_at(np.array([t, x3[0], x3[1], x3[2]]), side=side)
    else:
        def evaluate(t, x3, side=1):
            event = np.array([t, x3[0], x3[1], x3[2]])
            return external.field_at(event, side=side) + free.field_at(event, side=side)
    return evaluate


def _applied_switch_times(scenario: Scenario) -> tuple:
    times = set(scenario.external.switch_times())
    times.update(scenario.topology.free_field.switch_times())
    return tuple(sorted(times))


def _smooth_gated_fields(scenario: Scenario, ramp: float):
    """Replace sharp field gates with a smooth ramp for RK4-based methods.

    Runge-Kutta order collapses across discontinuities; the integral-form
    solver splits segments exactly instead and keeps sharp gates.
    Returns (scenario, note) where note is None if nothing changed.
    """
    changed = []
    external = scenario.external
    if external.switch_times() and external.ramp == 0.0:
        external = dataclasses.replace(external, ramp=ramp)
        changed.append("external")
    topology = scenario.topology
    free = topology.free_field
    if free.switch_times() and free.ramp == 0.0:
        free = dataclasses.replace(free, ramp=ramp)
        topology = dataclasses.replace(topology, free_field=free)
        changed.append("free_field")
    if not changed:
        return scenario, None
    scenario = dataclasses.replace(scenario, external=external, topology=topology)
    return scenario, {
        "smoothed_fields": changed,
        "ramp": ramp,
    }


def _kinetic_energy(scenario: Scenario, velocities: np.ndarray) -> float:
    total = 0.0
    for part, v in zip(scenario.particles, velocities):
        total += part.mass * (gamma_of(v) - 1.0)
    return total


def _potential_energy(scenario: Scenario, positions: np.ndarray) -> float:
    total = 0.0
    n = len(scenario.particles)
    for i in range(n):
        for j in range(i + 1, n):
            r = float(np.linalg.norm(positions[i] - positions[j]))
            total += (
                scenario.particles[i].charge
                * scenario.particles[j].charge
                / (4.0 * math.pi * r)
            )
    return total


def _ledger_from_traces(scenario: Scenario, traces: Sequence[ParticleTrace]) -> EnergyLedger:
    v_first = np.array([trace.velocities[0] for trace in traces])
    v_last = np.array([trace.velocities[-1] for trace in traces])
    x_first = np.array([trace.positions[0] for trace in traces])
    x_last = np.array([trace.positions[-1] for trace in traces])
    ke_i = _kinetic_energy(scenario, v_first)
    ke_f = _kinetic_energy(scenario, v_last)
    pe_i = _potential_energy(scenario, x_first)
    pe_f = _potential_energy(scenario, x_last)
    radiated = 0.0
    for trace in traces:
        radiated += float(np.trapezoid(trace.larmor, trace.times))
    arrow = 1.0 if scenario.topology.p > 0 else -1.0
    closure = (ke_f - ke_i) + (pe_f - pe_i) + arrow * radiated
    return EnergyLedger(
        initial_kinetic=ke_i,
        final_kinetic=ke_f,
        potential_initial=pe_i,
        potential_final=pe_f,
        radiated=radiated,
        arrow_sign=arrow,
        closure_residual=closure,
    )


class _History:
    """Append-only trajectory history with the worldline sampling protocol.

    Queries before the first node or after the last follow the inertial
    extension, so the required inertial pre-history is implicit.
    """

    __slots__ = ("_t", "_x", "_v", "_n")

    def __init__(self, capacity: int, t0: float, x0, v0):
        self._t = np.empty(capacity)
        self._x = np.empty((capacity, 3))
        self._v = np.empty((capacity, 3))
        self._t[0] = t0
        self._x[0] = x0
        self._v[0] = v0
        self._n = 1

    def append(self, t: float, x, v):
        i = self._n
        self._t[i] = t
        self._x[i] = x
        self._v[i] = v
        self._n = i + 1

    def state3_at(self, t: float, side: int = 1):
        n = self._n
        if n == 1:
            v = self._v[0].copy()
            return self._x[0] + (t - self._t[0]) * v, v, np.zeros(3)
        return _hermite_state(
            self._t[:n], self._x[:n], self._v[:n], float(t), side
        )


# --------------------------------------------------------------------------
# kernel of the integral-form self-force equation


def _require_single_particle(scenario: Scenario, method: str):
    if len(scenario.particles) != 1:
        raise ValueError(
            f"{method} integrates a single particle in an applied field; "
            f"got {len(scenario.particles)} particles (use an n-body method)"
        )


def _require_retarded_branch(scenario: Scenario, method: str):
    if scenario.topology.p != 1.0:
        raise ValueError(
            f"{method} realizes the p = +1 arrow; map a p = -1 problem "
            "through the time-reversal route instead"
        )


def ld_kernel(scenario: Scenario, k: int, tau: float) -> FourVector:
    """Self-force kernel K(tau) = f_applied + f_neighbors(ret) - R u.

    Evaluated on the scenario's current worldlines: the Lorentz four-force
    of the retarded neighbor fields plus the applied field, minus the
    radiated-power drag term larmor_power * u.
    """
    k = int(k)
    if not 0 <= k < len(scenario.particles):
        raise IndexError(f"particle index {k} out of range")
    part = scenario.particles[k]
    w = part.worldline
    if w is None:
        raise ValueError(f"particle {k} has no worldline")
    t = w.t_of_tau(float(tau))
    sample = w.sample_at(t)
    u = sample.velocity.as_array()
    a = sample.acceleration.as_array()
    x = sample.position
    applied = _applied_field(scenario)
    force = applied(x.t, x.spatial).four_force(part.charge, u)
    for j, other in enumerate(scenario.particles):
        if j == k:
            continue
        if other.worldline is None:
            raise ValueError(f"particle {j} has no worldline")
        f_j = lw_field(other.worldline, other.charge, x, "retarded")
        force = force + f_j.four_force(part.charge, u)
    drag = larmor_power(u, a, part.charge)
    return FourVector.from_array(force - drag * u)


# --------------------------------------------------------------------------
# integral-form solver


def _exp_a0(L: float) -> float:
    return -math.expm1(-L)


def _exp_a1(L: float) -> float:
    """(1/L) Int_0^L (alpha/L->alpha) ... = (1/L)(1 - (1+L)e^-L), stable."""
    if L < 1e-4:
        return L * (0.5 + L * (-1.0 / 3.0 + L * (0.125 - L / 30.0)))
    return (1.0 - (1.0 + L) * math.exp(-L)) / L


def _piece_contribution(k_start: np.ndarray, k_end: np.ndarray, L: float) -> np.ndarray:
    a0 = _exp_a0(L)
    a1 = _exp_a1(L)
    return k_start * (a0 - a1) + k_end * a1


def _chain_pieces(pieces) -> np.ndarray:
    """Exponentially weighted contribution of consecutive linear pieces."""
    total = None
    damp = 1.0
    for k_start, k_end, L in pieces:
        contribution = damp * _piece_contribution(k_start, k_end, L)
        total = contribution if total is None else total + contribution
        damp *= math.exp(-L)
    return total


def integrate_ld_integro(scenario: Scenario, cfg: IntegratorConfig) -> TrajectoryRecord:
    """Waveform solution of the future-weighted self-force equation.

    The unknown is the spatial four-acceleration sampled on a uniform
    proper-time grid reaching one kernel horizon past ``t_end``.  Each
    sweep rebuilds the kinematics from the acceleration samples (Hermite
    quadrature, exact for cubic position segments), re-evaluates the
    kernel along the sweep — splitting any grid segment that contains a
    field switch time into one-sided linear pieces — and folds the
    future integral with the exact exponential weight of each piece, so a
    piecewise-linear kernel is integrated without quadrature error.
    Beyond the grid the motion continues inertially and the tail integral
    uses the same exact per-segment rule, which keeps the constant-force
    identity  m a = K  exact to rounding.
    """
    if cfg.method != "ld-integro":
        raise ValueError(f"config method {cfg.method!r} is not ld-integro")
    _require_single_particle(scenario, "ld-integro")
    _require_retarded_branch(scenario, "ld-integro")
    part = scenario.particles[0]
    e, m = part.charge, part.mass
    tau_damp = tau0(e, m)
    h = cfg.dt
    applied = _applied_field(scenario)
    switches = _applied_switch_times(scenario)

    n_seg = int(math.ceil((cfg.t_end + cfg.future_horizon * tau_damp) / h))
    n_nodes = n_seg + 1
    tau_grid = h * np.arange(n_nodes)
    L_seg = h / tau_damp
    E_seg = math.exp(-L_seg)

    u0bar = gamma_of(part.velocity) * np.asarray(part.velocity)
    drag_coeff = e * e / (6.0 * math.pi)

    def kinematics(abar):
        """Positions, times and four-velocities from acceleration samples."""
        ubar = np.empty((n_nodes, 3))
        ubar[0] = u0bar
        increments = 0.5 * h * (abar[:-1] + abar[1:])
        np.cumsum(increments, axis=0, out=ubar[1:])
        ubar[1:] += u0bar
        u0 = np.sqrt(1.0 + np.einsum("ij,ij->i", ubar, ubar))
        a0 = np.einsum("ij,ij->i", ubar, abar) / u0
        ts = np.empty(n_nodes)
        ts[0] = 0.0
        dt_inc = 0.5 * h * (u0[:-1] + u0[1:]) + (h * h / 12.0) * (a0[:-1] - a0[1:])
        np.cumsum(dt_inc, out=ts[1:])
        xs = np.empty((n_nodes, 3))
        xs[0] = part.position
        dx_inc = 0.5 * h * (ubar[:-1] + ubar[1:]) + (h * h / 12.0) * (
            abar[:-1] - abar[1:]
        )
        np.cumsum(dx_inc, axis=0, out=xs[1:])
        xs[1:] += np.asarray(part.position)
        return ubar, u0, a0, ts, xs

    def kernel_value(t, x3, ubar_s, abar_s, side):
        u0_s = math.sqrt(1.0 + float(ubar_s @ ubar_s))
        u = np.array([u0_s, ubar_s[0], ubar_s[1], ubar_s[2]])
        a0_s = float(ubar_s @ abar_s) / u0_s
        aa = a0_s * a0_s - float(abar_s @ abar_s)
        force = applied(t, x3, side).four_force(e, u)
        return force + (drag_coeff * aa) * u

    def node_kernels(ubar, u0, a0, ts, xs, abar):
        K = np.empty((n_nodes, 4))
        for i in range(n_nodes):
            K[i] = kernel_value(ts[i], xs[i], ubar[i], abar[i], side=1)
        return K

    def tau_of_switch(t_s, ts, u0):
        j = int(np.searchsorted(ts, t_s, side="right")) - 1
        j = min(max(j, 0), n_nodes - 2)
        du0 = u0[j + 1] - u0[j]
        s = (t_s - ts[j]) / u0[j]
        for _ in range(3):
            t_val = ts[j] + s * u0[j] + s * s / (2.0 * h) * du0
            u0_val = u0[j] + (s / h) * du0
            s -= (t_val - t_s) / u0_val
        return j, min(max(s, 0.0), h)

    def state_within(j, s, ubar, abar, xs):
        da = abar[j + 1] - abar[j]
        ubar_s = ubar[j] + s * abar[j] + (s * s / (2.0 * h)) * da
        x_s = (
            xs[j]
            + s * ubar[j]
            + 0.5 * s * s * abar[j]
            + (s ** 3 / (6.0 * h)) * da
        )
        abar_s = abar[j] + (s / h) * da
        return x_s, ubar_s, abar_s

    def segment_overrides(ubar, u0, ts, xs, abar):
        """Per-segment switch splits keyed by segment index."""
        overrides = {}
        node_tol = 1e-9 * h
        for t_s in switches:
            if not ts[0] < t_s < ts[-1]:
                continue
            j, s = tau_of_switch(t_s, ts, u0)
            if s <= node_tol or s >= h - node_tol:
                # Switch sits on a grid node: the two adjacent segments
                # need one-sided kernel values at that node.  Evaluate at
                # the exact switch time — the node time may sit a few ulp
                # to either side, which would put both one-sided values on
                # the same side of the gate.
                node = j + 1 if s >= h - node_tol else j
                x_n, ub_n, ab_n = xs[node], ubar[node], abar[node]
                minus = kernel_value(t_s, x_n, ub_n, ab_n, side=-1)
                plus = kernel_value(t_s, x_n, ub_n, ab_n, side=1)
                if node - 1 >= 0:
                    overrides.setdefault(node - 1, {})["right"] = minus
                if node <= n_seg - 1:
                    overrides.setdefault(node, {})["left"] = plus
            else:
                x_s, ub_s, ab_s = state_within(j, s, ubar, abar, xs)
                entry = overrides.setdefault(j, {})
                entry.setdefault("splits", []).append(
                    (
                        s,
                        kernel_value(t_s, x_s, ub_s, ab_s, side=-1),
                        kernel_value(t_s, x_s, ub_s, ab_s, side=1),
                    )
                )
        return overrides

    def segment_contributions(K, overrides):
        C = np.empty((n_seg, 4))
        base = _piece_contribution(K[:-1], K[1:], L_seg)
        C[:] = base
        for j, entry in overrides.items():
            left = entry.get("left", K[j])
            right = entry.get("right", K[j + 1])
            splits = sorted(entry.get("splits", []), key=lambda item: item[0])
            pieces = []
            prev_s = 0.0
            prev_k = left
            for s, k_minus, k_plus in splits:
                pieces.append((prev_k, k_minus, (s - prev_s) / tau_damp))
                prev_s = s
                prev_k = k_plus
            pieces.append((prev_k, right, (h - prev_s) / tau_damp))
            C[j] = _chain_pieces(pieces)
        return C

    def tail_integral(ts, xs, ubar, u0):
        """Future integral past the grid along the inertial continuation."""
        u_b = ubar[-1]
        u0_b = u0[-1]
        t_b = ts[-1]
        x_b = xs[-1]
        u_vec = np.array([u0_b, u_b[0], u_b[1], u_b[2]])
        span = 60.0 * tau_damp
        n_tail = max(int(math.ceil(span / h)), 2)

        def tail_kernel(s, side=1, t_exact=None):
            t_val = t_b + s * u0_b if t_exact is None else t_exact
            x_val = x_b + s * u_b
            return applied(t_val, x_val, side).four_force(e, u_vec)

        # Collect tail switch offsets in proper time, keeping the exact
        # coordinate time so the gate is sampled on the intended side.
        cut_points = []
        for t_s in switches:
            if t_s > t_b:
                s = (t_s - t_b) / u0_b
                if s < n_tail * h:
                    cut_points.append((s, t_s))
        J = np.zeros(4)
        for i in reversed(range(n_tail)):
            s_lo = i * h
            s_hi = (i + 1) * h
            inner = sorted(
                (s, t_s) for s, t_s in cut_points if s_lo < s < s_hi
            )
            if not inner:
                C = _piece_contribution(
                    tail_kernel(s_lo), tail_kernel(s_hi), L_seg
                )
            else:
                pieces = []
                prev = s_lo
                k_prev = tail_kernel(s_lo, side=1)
                for s, t_s in inner:
                    pieces.append(
                        (k_prev, tail_kernel(s, side=-1, t_exact=t_s), (s - prev) / tau_damp)
                    )
                    prev = s
                    k_prev = tail_kernel(s, side=1, t_exact=t_s)
                pieces.append((k_prev, tail_kernel(s_hi), (s_hi - prev) / tau_damp))
                C = _chain_pieces(pieces)
            J = C + E_seg * J
        return J

    abar = np.zeros((n_nodes, 3))
    residuals = []
    rising = 0
    previous_x = None
    converged = False
    sweeps = 0
    kin = kinematics(abar)
    for sweeps in range(1, cfg.waveform_iterations + 1):
        ubar, u0, a0, ts, xs = kin
        K = node_kernels(ubar, u0, a0, ts, xs, abar)
        overrides = segment_overrides(ubar, u0, ts, xs, abar)
        C = segment_contributions(K, overrides)
        J = np.empty((n_nodes, 4))
        J[-1] = tail_integral(ts, xs, ubar, u0)
        for i in reversed(range(n_seg)):
            J[i] = C[i] + E_seg * J[i + 1]
        abar = J[:, 1:] / m
        kin = kinematics(abar)
        main = ts <= cfg.t_end + 1e-12 * (1.0 + cfg.t_end)
        if previous_x is not None:
            residual = float(np.max(np.abs(kin[4][main] - previous_x[main])))
            if residuals and residual > residuals[-1]:
                rising += 1
                if rising >= 3:
                    raise ConvergenceError(
                        "waveform iteration diverging: residual rose for "
                        "three successive sweeps",
                        residuals=residuals + [residual],
                    )
            else:
                rising = 0
            residuals.append(residual)
            if residual < cfg.tolerance:
                converged = True
                break
        previous_x = kin[4]
    if not converged:
        raise ConvergenceError(
            f"waveform iteration did not reach tolerance {cfg.tolerance} "
            f"within {cfg.waveform_iterations} sweeps",
            residuals=residuals,
        )

    ubar, u0, a0, ts, xs = kin
    # Final kernel pass for reporting consistency.
    J_time_drift = float(np.max(np.abs(J[:, 0] / m - a0)))
    keep = ts <= cfg.t_end + 1e-12 * (1.0 + cfg.t_end)
    idx = np.nonzero(keep)[0]
    velocities = ubar[idx] / u0[idx, None]
    a_coord = (abar[idx] - velocities * a0[idx, None]) / (u0[idx, None] ** 2)
    larmor = np.empty(idx.shape[0])
    f_ext = np.empty((idx.shape[0], 4))
    f_self = np.empty((idx.shape[0], 4))
    for row, i in enumerate(idx):
        u_vec = np.array([u0[i], ubar[i, 0], ubar[i, 1], ubar[i, 2]])
        a_vec = np.array([a0[i], abar[i, 0], abar[i, 1], abar[i, 2]])
        larmor[row] = larmor_power(u_vec, a_vec, e)
        f_ext[row] = applied(ts[i], xs[i], 1).four_force(e, u_vec)
        f_self[row] = m * a_vec - f_ext[row]
    trace = ParticleTrace(
        times=ts[idx],
        tau=tau_grid[idx],
        positions=xs[idx],
        velocities=velocities,
        accelerations=a_coord,
        larmor=larmor,
        force_external=f_ext,
        force_neighbors=np.zeros((idx.shape[0], 4)),
        force_self=f_self,
    )
    scenario_out = scenario.with_worldlines([trace.worldline()])
    diagnostics = {
        "sweeps": sweeps,
        "residual_history": residuals,
        "grid_nodes": n_nodes,
        "reported_nodes": int(idx.shape[0]),
        "kernel_time_component_drift": J_time_drift,
        "future_horizon_tau0": cfg.future_horizon,
    }
    return TrajectoryRecord(
        scenario=scenario_out,
        method="ld-integro",
        dt=cfg.dt,
        traces=(trace,),
        ledger=_ledger_from_traces(scenario, (trace,)),
        diagnostics=diagnostics,
    )


# --------------------------------------------------------------------------
# local third-order form


def integrate_ld_local(scenario: Scenario, cfg: IntegratorConfig) -> TrajectoryRecord:
    """Forward integration of the third-order local self-force equation.

    m a = f_applied + m tau0 (da/dtau + (a.a) u), integrated as written —
    including its unstable runaway directions.  Growth is diagnosed (rate
    fitted against the exact 1/tau0) and overflow truncates the run with a
    report instead of crashing.
    """
    if cfg.method != "ld-local":
        raise ValueError(f"config method {cfg.method!r} is not ld-local")
    _require_single_particle(scenario, "ld-local")
    _require_retarded_branch(scenario, "ld-local")
    part = scenario.particles[0]
    e, m = part.charge, part.mass
    tau_damp = tau0(e, m)
    scenario_run, smooth_note = _smooth_gated_fields(scenario, tau_damp / 10.0)
    applied = _applied_field(scenario_run)
    h = cfg.dt

    def deriv(state):
        t, x, ubar, abar = state[0], state[1:4], state[4:7], state[7:10]
        u0 = math.sqrt(1.0 + float(ubar @ ubar))
        u = np.array([u0, ubar[0], ubar[1], ubar[2]])
        a0 = float(ubar @ abar) / u0
        aa = a0 * a0 - float(abar @ abar)
        force = applied(t, x).four_force(e, u)
        adot = (abar - force[1:] / m) / tau_damp - aa * ubar
        out = np.empty(10)
        out[0] = u0
        out[1:4] = ubar
        out[4:7] = abar
        out[7:10] = adot
        return out

    state = np.empty(10)
    state[0] = 0.0
    state[1:4] = part.position
    gamma0 = gamma_of(part.velocity)
    state[4:7] = gamma0 * np.asarray(part.velocity)
    state[7:10] = four_acceleration_of(part.velocity, part.initial_acceleration)[1:]

    rows = []
    truncated = False
    max_steps = int(math.ceil(cfg.t_end / h)) + 2

    def snapshot(state):
        t, x, ubar, abar = state[0], state[1:4], state[4:7], state[7:10]
        u0 = math.sqrt(1.0 + float(ubar @ ubar))
        u = np.array([u0, *ubar])
        a0 = float(ubar @ abar) / u0
        a = np.array([a0, *abar])
        f_ext = applied(t, x).four_force(e, u)
        return (
            t,
            x.copy(),
            ubar / u0,
            (abar - (ubar / u0) * a0) / (u0 * u0),
            larmor_power(u, a, e),
            f_ext,
            m * a - f_ext,
        )

    tau_samples = [0.0]
    rows.append(snapshot(state))
    for step in range(max_steps):
        if state[0] >= cfg.t_end:
            break
        if float(np.max(np.abs(state[4:10]))) > 1e120 or float(
            np.abs(state[4:7]) @ np.abs(state[4:7])
        ) > 1e14:
            truncated = True
            break
        k1 = deriv(state)
        k2 = deriv(state + 0.5 * h * k1)
        k3 = deriv(state + 0.5 * h * k2)
        k4 = deriv(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(state)):
            truncated = True
            break
        tau_samples.append(tau_samples[-1] + h)
        rows.append(snapshot(state))

    times = np.array([row[0] for row in rows])
    trace = ParticleTrace(
        times=times,
        tau=np.array(tau_samples),
        positions=np.array([row[1] for row in rows]),
        velocities=np.array([row[2] for row in rows]),
        accelerations=np.array([row[3] for row in rows]),
        larmor=np.array([row[4] for row in rows]),
        force_external=np.array([row[5] for row in rows]),
        force_neighbors=np.zeros((len(rows), 4)),
        force_self=np.array([row[6] for row in rows]),
    )

    g = trace.proper_acceleration()
    taus = trace.tau
    g_first = float(g[0])
    g_max = float(np.max(g))
    growth_factor = g_max / g_first if g_first > 0.0 else math.inf if g_max > 0 else 1.0
    fit_lo, fit_hi = 2.0 * tau_damp, 10.0 * tau_damp
    mask = (taus >= fit_lo) & (taus <= min(fit_hi, float(taus[-1]))) & (g > 0.0)
    if int(np.count_nonzero(mask)) >= 3:
        slope = float(np.polyfit(taus[mask], np.log(g[mask]), 1)[0])
    else:
        slope = 0.0
    expected = 1.0 / tau_damp
    report = RunawayReport(
        detected=bool(growth_factor > 100.0 and g_first > 0.0),
        truncated=truncated,
        fitted_rate=slope,
        expected_rate=expected,
        relative_error=abs(slope - expected) / expected,
        growth_factor=growth_factor,
        fit_window=(fit_lo, float(min(fit_hi, taus[-1]))),
    )
    diagnostics = {"runaway": report, "steps": len(rows) - 1}
    if smooth_note:
        diagnostics.update(smooth_note)
    return TrajectoryRecord(
        scenario=scenario.with_worldlines([trace.worldline()]),
        method="ld-local",
        dt=cfg.dt,
        traces=(trace,),
        ledger=_ledger_from_traces(scenario, (trace,)),
        diagnostics=diagnostics,
    )


# --------------------------------------------------------------------------
# reduction of order


def _ll_self_force(field_of, t, x, ubar, charge, mass, tau_damp, delta, sign=1.0):
    """Reduction-of-order self-force: tau0-scaled derivative of the applied
    acceleration along the zeroth-order motion, projected orthogonal to u.

    ``field_of(t, x3) -> FieldTensor`` supplies the full driving field.
    ``sign`` = +1 damps (retarded arrow), -1 anti-damps (advanced arrow).
    Returns (f_applied, gamma_vector) as contravariant four-vectors.
    """
    u0 = math.sqrt(1.0 + float(ubar @ ubar))
    u = np.array([u0, ubar[0], ubar[1], ubar[2]])
    f0 = field_of(t, x).four_force(charge, u)
    a_zero = f0 / mass

    def accel_at(offset):
        t_p = t + offset * u0
        x_p = x + offset * ubar
        u_p = u + offset * a_zero
        norm = math.sqrt(
            max(u_p[0] * u_p[0] - float(u_p[1:] @ u_p[1:]), 1e-300)
        )
        u_p = u_p / norm
        return field_of(t_p, x_p).four_force(charge, u_p) / mass

    a_plus = accel_at(delta)
    a_minus = accel_at(-delta)
    adot = (a_plus - a_minus) / (2.0 * delta)
    aa = a_zero[0] * a_zero[0] - float(a_zero[1:] @ a_zero[1:])
    gamma_vec = mass * tau_damp * (adot + aa * u)
    gamma_vec = gamma_vec - (
        gamma_vec[0] * u[0] - float(gamma_vec[1:] @ u[1:])
    ) * u
    return f0, sign * gamma_vec


def integrate_landau_lifshitz(scenario: Scenario, cfg: IntegratorConfig) -> TrajectoryRecord:
    """Reduction-of-order single-particle integration (no runaways)."""
    if cfg.method != "landau-lifshitz":
        raise ValueError(f"config method {cfg.method!r} is not landau-lifshitz")
    _require_single_particle(scenario, "landau-lifshitz")
    _require_retarded_branch(scenario, "landau-lifshitz")
    part = scenario.particles[0]
    e, m = part.charge, part.mass
    tau_damp = tau0(e, m)
    scenario_run, smooth_note = _smooth_gated_fields(scenario, tau_damp / 10.0)
    applied = _applied_field(scenario_run)
    h = cfg.dt
    delta = 0.25 * h

    def field_of(t, x3):
        return applied(t, x3)

    def full_force(t, x, ubar):
        f0, gamma_vec = _ll_self_force(
            field_of, t, x, ubar, e, m, tau_damp, delta
        )
        return f0, gamma_vec

    def deriv(state):
        t, x, ubar = state[0], state[1:4], state[4:7]
        u0 = math.sqrt(1.0 + float(ubar @ ubar))
        f0, gamma_vec = full_force(t, x, ubar)
        out = np.empty(7)
        out[0] = u0
        out[1:4] = ubar
        out[4:7] = (f0[1:] + gamma_vec[1:]) / m
        return out

    state = np.empty(7)
    state[0] = 0.0
    state[1:4] = part.position
    state[4:7] = gamma_of(part.velocity) * np.asarray(part.velocity)

    def snapshot(state):
        t, x, ubar = state[0], state[1:4], state[4:7]
        u0 = math.sqrt(1.0 + float(ubar @ ubar))
        u = np.array([u0, *ubar])
        f0, gamma_vec = full_force(t, x, ubar)
        a = (f0 + gamma_vec) / m
        a0 = a[0]
        abar = a[1:]
        return (
            t,
            x.copy(),
            ubar / u0,
            (abar - (ubar / u0) * a0) / (u0 * u0),
            larmor_power(u, a, e),
            f0,
            gamma_vec,
        )

    rows = [snapshot(state)]
    tau_samples = [0.0]
    max_steps = int(math.ceil(cfg.t_end / h)) + 2
    for _ in range(max_steps):
        if state[0] >= cfg.t_end:
            break
        k1 = deriv(state)
        k2 = deriv(state + 0.5 * h * k1)
        k3 = deriv(state + 0.5 * h * k2)
        k4 = deriv(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        tau_samples.append(tau_samples[-1] + h)
        rows.append(snapshot(state))

    trace = ParticleTrace(
        times=np.array([row[0] for row in rows]),
        tau=np.array(tau_samples),
        positions=np.array([row[1] for row in rows]),
        velocities=np.array([row[2] for row in rows]),
        accelerations=np.array([row[3] for row in rows]),
        larmor=np.array([row[4] for row in rows]),
        force_external=np.array([row[5] for row in rows]),
        force_neighbors=np.zeros((len(rows), 4)),
        force_self=np.array([row[6] for row in rows]),
    )
    diagnostics = {"steps": len(rows) - 1}
    if smooth_note:
        diagnostics.update(smooth_note)
    return TrajectoryRecord(
        scenario=scenario.with_worldlines([trace.worldline()]),
        method="landau-lifshitz",
        dt=cfg.dt,
        traces=(trace,),
        ledger=_ledger_from_traces(scenario, (trace,)),
        diagnostics=diagnostics,
    )


# --------------------------------------------------------------------------
# N-body delay dynamics


def _min_separation(positions: np.ndarray) -> float:
    n = positions.shape[0]
    best = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            best = min(best, float(np.linalg.norm(positions[i] - positions[j])))
    return best


def _nbody_core(scenario, cfg, neighbor_field, self_sign, commit_histories):
    """Shared fixed-step RK4 core for the delay N-body methods.

    ``neighbor_field(k, t, x3) -> FieldTensor`` supplies the summed field
    of the other particles; ``commit_histories`` is the list of _History
    objects to append to after each step (empty for frozen-field passes).
    Returns the list of per-particle traces.
    """
    particles = scenario.particles
    n = len(particles)
    applied = _applied_field(scenario)
    h = cfg.dt
    delta = 0.25 * h
    taus = [tau0(p.charge, p.mass) for p in particles]
    n_steps = int(round(cfg.t_end / h))
    if abs(n_steps * h - cfg.t_end) > 1e-9 * cfg.t_end or n_steps < 1:
        n_steps = max(int(math.ceil(cfg.t_end / h)), 1)

    state = np.empty((n, 7))  # x(3), ubar(3), tau(1)
    for k, part in enumerate(particles):
        state[k, 0:3] = part.position
        state[k, 3:6] = gamma_of(part.velocity) * np.asarray(part.velocity)
        state[k, 6] = 0.0

    records = [
        {
            "t": [], "tau": [], "x": [], "v": [], "a": [],
            "larmor": [], "f_ext": [], "f_nbr": [], "f_self": [],
        }
        for _ in range(n)
    ]
    min_sep_seen = math.inf

    def forces_on(k, t, x, ubar):
        u0 = math.sqrt(1.0 + float(ubar @ ubar))
        u = np.array([u0, ubar[0], ubar[1], ubar[2]])
        part = particles[k]

        def field_of(t_p, x_p):
            return neighbor_field(k, t_p, x_p) + applied(t_p, x_p)

        f_nbr = neighbor_field(k, t, x).four_force(part.charge, u)
        f_ext = applied(t, x).four_force(part.charge, u)
        _, gamma_vec = _ll_self_force(
            field_of, t, x, ubar, part.charge, part.mass, taus[k], delta,
            sign=self_sign,
        )
        return f_ext, f_nbr, gamma_vec

    def deriv(t, state, sink=None):
        out = np.empty_like(state)
        for k in range(n):
            x = state[k, 0:3]
            ubar = state[k, 3:6]
            u0 = math.sqrt(1.0 + float(ubar @ ubar))
            f_ext, f_nbr, f_self = forces_on(k, t, x, ubar)
            total = f_ext + f_nbr + f_self
            m = particles[k].mass
            out[k, 0:3] = ubar / u0
            out[k, 3:6] = total[1:] / (m * u0)
            out[k, 6] = 1.0 / u0
            if sink is not None:
                a = total / m
                u = np.array([u0, *ubar])
                v = ubar / u0
                sink[k] = (
                    x.copy(),
                    v,
                    (a[1:] - v * a[0]) / (u0 * u0),
                    larmor_power(u, a, particles[k].charge),
                    f_ext,
                    f_nbr,
                    f_self,
                )
        return out

    gamma_max = max(gamma_of(p.velocity) for p in particles)
    for step in range(n_steps + 1):
        t = step * h
        sep = _min_separation(state[:, 0:3])
        min_sep_seen = min(min_sep_seen, sep)
        if sep <= 2.5 * h * gamma_max:
            raise ValueError(
                f"time step {h} too large for particle separation {sep:.3g} "
                f"at t = {t:.6g}: light-cone field queries would need the "
                "uncommitted present; reduce dt"
            )
        sink = [None] * n
        k1 = deriv(t, state, sink=sink)
        for k in range(n):
            x, v, a_c, lar, f_ext, f_nbr, f_self = sink[k]
            rec = records[k]
            rec["t"].append(t)
            rec["tau"].append(state[k, 6])
            rec["x"].append(x)
            rec["v"].append(v)
            rec["a"].append(a_c)
            rec["larmor"].append(lar)
            rec["f_ext"].append(f_ext)
            rec["f_nbr"].append(f_nbr)
            rec["f_self"].append(f_self)
        if step == n_steps:
            break
        k2 = deriv(t + 0.5 * h, state + 0.5 * h * k1)
        k3 = deriv(t + 0.5 * h, state + 0.5 * h * k2)
        k4 = deriv(t + h, state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        gamma_max = max(
            math.sqrt(1.0 + float(state[k, 3:6] @ state[k, 3:6])) for k in range(n)
        )
        if commit_histories:
            t_next = (step + 1) * h
            for k in range(n):
                ubar = state[k, 3:6]
                u0 = math.sqrt(1.0 + float(ubar @ ubar))
                commit_histories[k].append(t_next, state[k, 0:3], ubar / u0)

    traces = []
    for k in range(n):
        rec = records[k]
        traces.append(
            ParticleTrace(
                times=np.array(rec["t"]),
                tau=np.array(rec["tau"]),
                positions=np.array(rec["x"]),
                velocities=np.array(rec["v"]),
                accelerations=np.array(rec["a"]),
                larmor=np.array(rec["larmor"]),
                force_external=np.array(rec["f_ext"]),
                force_neighbors=np.array(rec["f_nbr"]),
                force_self=np.array(rec["f_self"]),
            )
        )
    return traces, min_sep_seen, n_steps


def integrate_retarded_nbody(scenario: Scenario, cfg: IntegratorConfig) -> TrajectoryRecord:
    """Delay-differential N-body run on the retarded (p = +1) branch.

    Neighbor fields are evaluated on the past light cone against committed
    step histories (cubic Hermite interpolation; the inertial pre-history
    is implicit in the extension of the first node).  The self coupling —
    p times the particle's own half-difference field — is applied through
    the reduction-of-order force, which equals it to first order in tau0
    and never feeds a runaway.
    """
    if cfg.method != "nbody-retarded":
        raise ValueError(f"config method {cfg.method!r} is not nbody-retarded")
    if scenario.topology.mode != "mc-ced":
        raise ValueError("nbody-retarded requires the mc-ced topology")
    if scenario.topology.p != 1.0:
        raise ValueError("nbody-retarded requires p = +1")
    tau_min = min(tau0(p.charge, p.mass) for p in scenario.particles)
    scenario_run, smooth_note = _smooth_gated_fields(scenario, tau_min / 10.0)

    n_steps_cap = int(math.ceil(cfg.t_end / cfg.dt)) + 4
    histories = [
        _History(n_steps_cap, 0.0, p.position, p.velocity)
        for p in scenario_run.particles
    ]

    last_crossing = {}

    def neighbor_field(k, t, x3):
        event = np.array([t, x3[0], x3[1], x3[2]])
        total = FieldTensor.zero()
        for j, other in enumerate(scenario_run.particles):
            if j == k:
                continue
            geom = lw_geometry(
                histories[j], event, "retarded",
                guess=last_crossing.get((k, j)),
            )
            last_crossing[(k, j)] = geom.source_time
            total = total + lw_field_from_geometry(geom, other.charge)
        return total

    traces, min_sep, n_steps = _nbody_core(
        scenario_run, cfg, neighbor_field, self_sign=1.0,
        commit_histories=histories,
    )
    diagnostics = {
        "steps": n_steps,
        "min_separation": min_sep,
        "self_force": "landau-lifshitz",
    }
    if smooth_note:
        diagnostics.update(smooth_note)
    return TrajectoryRecord(
        scenario=scenario.with_worldlines([tr.worldline() for tr in traces]),
        method="nbody-retarded",
        dt=cfg.dt,
        traces=tuple(traces),
        ledger=_ledger_from_traces(scenario, traces),
        diagnostics=diagnostics,
    )


def _time_reverse_traces(traces, t_total):
    mapped = []
    for trace in traces:
        tau_total = float(trace.tau[-1])
        mapped.append(
            ParticleTrace(
                times=(t_total - trace.times)[::-1],
                tau=(tau_total - trace.tau)[::-1],
                positions=trace.positions[::-1],
                velocities=-trace.velocities[::-1],
                accelerations=trace.accelerations[::-1],
                larmor=trace.larmor[::-1],
                force_external=np.concatenate(
                    [-trace.force_external[::-1, :1], trace.force_external[::-1, 1:]],
                    axis=1,
                ),
                force_neighbors=np.concatenate(
                    [-trace.force_neighbors[::-1, :1], trace.force_neighbors[::-1, 1:]],
                    axis=1,
                ),
                force_self=np.concatenate(
                    [-trace.force_self[::-1, :1], trace.force_self[::-1, 1:]],
                    axis=1,
                ),
            )
        )
    return mapped


def integrate_advanced_nbody(scenario: Scenario, cfg: IntegratorConfig) -> TrajectoryRecord:
    """N-body run on the advanced (p = -1) branch via time reversal.

    The generalized reversal (time reflection composed with the branch
    flip) maps p = -1 dynamics exactly onto p = +1 dynamics, so the run
    integrates the reflected problem on the retarded branch and maps the
    result back.  Because reflection swaps the roles of the window's ends,
    the supplied particle state is reached at ``t_end`` — the record shows
    the history that precedes it under the advanced arrow.  Use
    ``advanced_nbody_direct`` for a forward-anchored fixed-point solution
    over short windows.
    """
    if cfg.method != "nbody-advanced":
        raise ValueError(f"config method {cfg.method!r} is not nbody-advanced")
    if scenario.topology.mode != "mc-ced":
        raise ValueError("nbody-advanced requires the mc-ced topology")
    if scenario.topology.p != -1.0:
        raise ValueError("nbody-advanced requires p = -1")
    mirrored = dataclasses.replace(
        scenario,
        particles=tuple(
            dataclasses.replace(p, velocity=-np.asarray(p.velocity))
            for p in scenario.particles
        ),
        topology=scenario.topology.with_p(1.0),
        external=scenario.external.time_reversed().time_shifted(cfg.t_end),
    )
    retarded_cfg = dataclasses.replace(cfg, method="nbody-retarded")
    retarded = integrate_retarded_nbody(mirrored, retarded_cfg)
    t_total = retarded.t_final
    traces = _time_reverse_traces(retarded.traces, t_total)
    diagnostics = {
        "realized_via": "time reversal of the retarded branch",
        "anchor": "supplied particle state is reached at t_end",
        "retarded_run": retarded.diagnostics,
    }
    return TrajectoryRecord(
        scenario=scenario.with_worldlines([tr.worldline() for tr in traces]),
        method="nbody-advanced",
        dt=cfg.dt,
        traces=tuple(traces),
        ledger=_ledger_from_traces(scenario, traces),
        diagnostics=diagnostics,
    )


def advanced_nbody_direct(scenario: Scenario, cfg: IntegratorConfig) -> TrajectoryRecord:
    """Forward fixed-point solution of the advanced branch (short windows).

    Iterates: integrate forward with neighbor fields on the *future* light
    cone of the previous iterate's worldlines (anti-damped self coupling),
    then replace the worldlines, until successive iterates agree in
    position sup-norm.  Converges for short windows and weak coupling;
    used to cross-validate the time-reversal realization.
    """
    if scenario.topology.mode != "mc-ced":
        raise ValueError("advanced_nbody_direct requires the mc-ced topology")
    if scenario.topology.p != -1.0:
        raise ValueError("advanced_nbody_direct requires p = -1")
    guesses = [
        Worldline(
            np.array([0.0, cfg.t_end]),
            np.array([p.position, p.position + cfg.t_end * np.asarray(p.velocity)]),
            np.array([p.velocity, p.velocity]),
        )
        for p in scenario.particles
    ]
    residuals = []
    rising = 0
    previous = None
    for iteration in range(1, cfg.waveform_iterations + 1):
        frozen = list(guesses)
        last_crossing = {}

        def neighbor_field(k, t, x3):
            event = np.array([t, x3[0], x3[1], x3[2]])
            total = FieldTensor.zero()
            for j, other in enumerate(scenario.particles):
                if j == k:
                    continue
                geom = lw_geometry(
                    frozen[j], event, "advanced",
                    guess=last_crossing.get((k, j)),
                )
                last_crossing[(k, j)] = geom.source_time
                total = total + lw_field_from_geometry(geom, other.charge)
            return total

        traces, min_sep, n_steps = _nbody_core(
            scenario, cfg, neighbor_field, self_sign=-1.0, commit_histories=[],
        )
        guesses = [tr.worldline() for tr in traces]
        positions = np.concatenate([tr.positions for tr in traces])
        if previous is not None:
            residual = float(np.max(np.abs(positions - previous)))
            if residuals and residual > residuals[-1]:
                rising += 1
                if rising >= 3:
                    raise ConvergenceError(
                        "advanced fixed-point iteration diverging",
                        residuals=residuals + [residual],
                    )
            else:
                rising = 0
            residuals.append(residual)
            if residual < cfg.tolerance:
                return TrajectoryRecord(
                    scenario=scenario.with_worldlines(guesses),
                    method="nbody-advanced",
                    dt=cfg.dt,
                    traces=tuple(traces),
                    ledger=_ledger_from_traces(scenario, traces),
                    diagnostics={
                        "realized_via": "direct fixed point on the future cone",
                        "iterations": iteration,
                        "residual_history": residuals,
                        "min_separation": min_sep,
                    },
                )
        previous = positions
    raise ConvergenceError(
        f"advanced fixed-point iteration did not reach {cfg.tolerance} "
        f"within {cfg.waveform_iterations} passes",
        residuals=residuals,
    )


def validate_self_force(record: TrajectoryRecord, k: int, times) -> float:
    """Max deviation between the recorded self-force and the point-split
    half-difference force along the recorded worldline (validation path;
    expensive).  Returns the largest four-vector component difference."""
    trace = record.traces[k]
    part = record.scenario.particles[k]
    w = trace.worldline()
    worst = 0.0
    for t in times:
        tau = w.tau_of_t(float(t))
        exact = self_minus_force(w, part.charge, tau).as_array()
        i = int(np.argmin(np.abs(trace.times - float(t))))
        recorded = trace.force_self[i]
        worst = max(worst, float(np.max(np.abs(exact - recorded))))
    return worst


# --------------------------------------------------------------------------
# diagnostics


def asymptotic_check(
    record: TrajectoryRecord, window: float, tolerance: float = 1e-6
) -> AsymptoticReport:
    """Dynamic-stability check: does the proper acceleration die out over
    the trailing window?  Non-unit branch parameters are flagged."""
    window = float(window)
    span = record.t_final - record.t_start
    if not 0.0 < window < span:
        raise ValueError(
            f"window must lie inside the trajectory span (0, {span}), got {window}"
        )
    worst = 0.0
    cutoff = record.t_final - window
    for trace in record.traces:
        mask = trace.times >= cutoff
        g = trace.proper_acceleration()[mask]
        if g.size:
            worst = max(worst, float(np.max(g)))
    p = record.scenario.topology.p
    return AsymptoticReport(
        max_proper_acceleration=worst,
        window=window,
        tolerance=float(tolerance),
        passed=bool(worst <= tolerance),
        branch_parameter=p,
        branch_is_unit=bool(abs(p) == 1.0),
    )


def classical_threshold(correlation_length: float, wavelength: float) -> str:
    """Coherence-scale regime label: a stored-correlation length much
    longer than the radiated wavelength behaves classically (ratio > 10),
    much shorter stays quantum (ratio < 0.1), otherwise intermediate."""
    L = float(correlation_length)
    lam = float(wavelength)
    if not (math.isfinite(L) and L > 0.0 and math.isfinite(lam) and lam > 0.0):
        raise ValueError("correlation length and wavelength must be positive")
    ratio = L / lam
    if ratio > 10.0:
        return "pointer-basis classical"
    if ratio < 0.1:
        return "quantum superposition"
    return "intermediate"


_METHOD_DISPATCH = {
    "ld-integro": integrate_ld_integro,
    "ld-local": integrate_ld_local,
    "landau-lifshitz": integrate_landau_lifshitz,
    "nbody-retarded": integrate_retarded_nbody,
    "nbody-advanced": integrate_advanced_nbody,
}


def integrate(scenario: Scenario, cfg: Optional[IntegratorConfig] = None) -> TrajectoryRecord:
    """Run the integrator configured on the scenario (or given explicitly)."""
    cfg = cfg if cfg is not None else scenario.integrator
    if cfg is None:
        raise ValueError("no integrator configuration supplied")
    return _METHOD_DISPATCH[cfg.method](scenario, cfg)
