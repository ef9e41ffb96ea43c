"""Field assembly for the two coupling topologies.

A scenario couples N point charges either through the measurement-color
topology (``mc-ced``) — every particle sees the branch-mixed fields of the
*other* particles plus ``p`` times its own source-free half-difference
field — or through ordinary electrodynamics (``ced``), which adds a
configured source-free field (a plane wave, or none) on top of the same
particle-sourced content and whose self-interaction enters dynamics only
through the renormalized self-force.

For a branch parameter ``p`` the per-particle mixed propagator field is

    mix_p(j) = (1+p)/2 * F_ret(j) + (1-p)/2 * F_adv(j)
             = half_sum(j) + p * half_diff(j)

The field observed by particle k is

    observed(k) = sum_{j != k} mix_p(j) + p * half_diff(k)
                  [+ configured free field, ced only] + external

and its decomposition splits into a retarded part, an advanced part and a
radiative part whose recomposition is exact by construction.  The applied
external field is not a radiation branch and is excluded from the
decomposition parts; ``observed == decomposition.total + external``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from .fields import ExternalField, FieldTensor
from .lienard import field_half_difference, field_half_sum, lw_field
from .worldline import Worldline

if TYPE_CHECKING:  # pragma: no cover - typing only, avoids a module cycle
    from .dynamics import IntegratorConfig

__all__ = [
    "COUPLING_MODES",
    "CouplingTopology",
    "ParticleSpec",
    "Scenario",
    "ObservedFieldDecomposition",
    "observed_field",
    "decompose_observed",
    "tcrf_field",
    "total_field",
]

COUPLING_MODES = ("mc-ced", "ced")

_FREE_FIELD_KINDS = ("none", "plane-wave")


def _as_vec3(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class CouplingTopology:
    """Coupling mode, branch parameter and optional configured free field.

    ``p`` weights the retarded/advanced mix; the stable arrows are p = +1
    (retarded) and p = -1 (advanced), but any nonzero real is accepted and
    diagnostic checks flag non-unit values.  A configured free field is a
    source-free solution (plane wave) and is only admissible in ``ced``
    mode; the measurement-color topology has no free fields by
    construction.
    """

    mode: str
    p: float
    free_field: ExternalField = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.mode not in COUPLING_MODES:
            raise ValueError(
                f"mode must be one of {COUPLING_MODES}, got {self.mode!r}"
            )
        p = float(self.p)
        if not math.isfinite(p):
            raise ValueError("branch parameter p must be finite")
        if p == 0.0:
            raise ValueError("branch parameter p must be nonzero")
        object.__setattr__(self, "p", p)
        free = self.free_field
        if free is None:
            free = ExternalField.none_field()
            object.__setattr__(self, "free_field", free)
        if not isinstance(free, ExternalField):
            raise TypeError("free_field must be an ExternalField")
        if free.kind not in _FREE_FIELD_KINDS:
            raise ValueError(
                "free_field must be source-free: kind one of "
                f"{_FREE_FIELD_KINDS}, got {free.kind!r}"
            )
        if self.mode == "mc-ced" and free.kind != "none":
            raise ValueError(
                "mc-ced topology admits no configured free field"
            )

    @classmethod
    def mc(cls, p: float = 1.0) -> "CouplingTopology":
        return cls(mode="mc-ced", p=p)

    @classmethod
    def ced(
        cls, p: float = 1.0, free_field: Optional[ExternalField] = None
    ) -> "CouplingTopology":
        return cls(mode="ced", p=p, free_field=free_field)

    def with_p(self, p: float) -> "CouplingTopology":
        return dataclasses.replace(self, p=p)


@dataclass(frozen=True)
class ParticleSpec:
    """One point charge: physical constants, initial data and (once a run
    has produced or a test has supplied one) its worldline.

    ``initial_acceleration`` seeds the third-order local self-force
    integrator; the other integrators derive the initial acceleration from
    the fields and ignore it.
    """

    charge: float
    mass: float
    position: np.ndarray
    velocity: np.ndarray
    initial_acceleration: np.ndarray = None  # type: ignore[assignment]
    worldline: Optional[Worldline] = None

    def __post_init__(self):
        charge = float(self.charge)
        mass = float(self.mass)
        if not math.isfinite(charge):
            raise ValueError("charge must be finite")
        if not (math.isfinite(mass) and mass > 0.0):
            raise ValueError("mass must be positive")
        object.__setattr__(self, "charge", charge)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "position", _as_vec3(self.position, "position"))
        vel = _as_vec3(self.velocity, "velocity")
        if float(vel @ vel) >= 1.0:
            raise ValueError("initial speed must be below 1 (light speed)")
        object.__setattr__(self, "velocity", vel)
        acc = self.initial_acceleration
        acc = np.zeros(3) if acc is None else acc
        object.__setattr__(
            self,
            "initial_acceleration",
            _as_vec3(acc, "initial_acceleration"),
        )
        if self.worldline is not None and not isinstance(self.worldline, Worldline):
            raise TypeError("worldline must be a Worldline or None")

    def with_worldline(self, worldline: Worldline) -> "ParticleSpec":
        return dataclasses.replace(self, worldline=worldline)


@dataclass(frozen=True)
class Scenario:
    """Immutable description of one experiment.

    ``integrator`` is an ``IntegratorConfig`` from the dynamics module (or
    None for pure field queries); field assembly never reads it.
    """

    name: str
    particles: tuple
    topology: CouplingTopology
    external: ExternalField = None  # type: ignore[assignment]
    integrator: "Optional[IntegratorConfig]" = None

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValueError("scenario name must be a nonempty string")
        particles = tuple(self.particles)
        if not particles:
            raise ValueError("scenario needs at least one particle")
        for i, part in enumerate(particles):
            if not isinstance(part, ParticleSpec):
                raise TypeError(f"particles[{i}] must be a ParticleSpec")
        object.__setattr__(self, "particles", particles)
        if not isinstance(self.topology, CouplingTopology):
            raise TypeError("topology must be a CouplingTopology")
        if self.topology.mode == "mc-ced" and len(particles) < 2:
            raise ValueError("mc-ced topology requires at least two particles")
        ext = self.external
        if ext is None:
            ext = ExternalField.none_field()
            object.__setattr__(self, "external", ext)
        if not isinstance(ext, ExternalField):
            raise TypeError("external must be an ExternalField")

    @property
    def n_particles(self) -> int:
        return len(self.particles)

    def worldlines(self) -> Sequence[Worldline]:
        """All particle worldlines; raises if any particle has none."""
        lines = []
        for i, part in enumerate(self.particles):
            if part.worldline is None:
                raise ValueError(
                    f"particle {i} has no worldline; integrate the scenario "
                    "or supply one explicitly"
                )
            lines.append(part.worldline)
        return lines

    def with_worldlines(self, worldlines: Sequence[Worldline]) -> "Scenario":
        if len(worldlines) != len(self.particles):
            raise ValueError(
                "need exactly one worldline per particle "
                f"({len(worldlines)} given for {len(self.particles)} particles)"
            )
        particles = tuple(
            part.with_worldline(w) for part, w in zip(self.particles, worldlines)
        )
        return dataclasses.replace(self, particles=particles)

    def with_topology(self, topology: CouplingTopology) -> "Scenario":
        return dataclasses.replace(self, topology=topology)


@dataclass(frozen=True)
class ObservedFieldDecomposition:
    """Branch decomposition of the coupled field observed by one particle.

    ``total`` is the exact sum of the three parts.  The applied external
    field is not part of any branch; adding it to ``total`` reproduces
    ``observed_field``.
    """

    ret_part: FieldTensor
    adv_part: FieldTensor
    rad_part: FieldTensor
    total: FieldTensor


def _check_index(scenario: Scenario, k: int) -> int:
    k = int(k)
    if not 0 <= k < len(scenario.particles):
        raise IndexError(
            f"particle index {k} out of range for {len(scenario.particles)} particles"
        )
    return k


def _neighbor_branch_sums(scenario, k, x, horizon):
    """Retarded and advanced field sums over all particles other than k."""
    ret_sum = FieldTensor.zero()
    adv_sum = FieldTensor.zero()
    for j, part in enumerate(scenario.particles):
        if j == k:
            continue
        w = part.worldline
        if w is None:
            raise ValueError(f"particle {j} has no worldline")
        ret_sum = ret_sum + lw_field(w, part.charge, x, "retarded", horizon=horizon)
        adv_sum = adv_sum + lw_field(w, part.charge, x, "advanced", horizon=horizon)
    return ret_sum, adv_sum


def _self_minus_field(scenario, k, x, horizon) -> FieldTensor:
    part = scenario.particles[k]
    if part.worldline is None:
        raise ValueError(f"particle {k} has no worldline")
    return field_half_difference(part.worldline, part.charge, x, horizon=horizon)


def decompose_observed(
    scenario: Scenario, k: int, x, side: int = 1, horizon: float = math.inf
) -> ObservedFieldDecomposition:
    """Split the field observed by particle k into ret/adv/rad branches.

    ret_part = (1+p)/2 * sum_{j != k} F_ret(j)
    adv_part = (1-p)/2 * sum_{j != k} F_adv(j)
    rad_part = p * half_diff(k)            (mc-ced)
             = free field + p * half_diff(k)   (ced)

    The ced radiative part equals "total free field minus p times the
    neighbors' half-difference fields": every half-difference field is
    source-free, so the configured free field plus p times the sum of all
    half-difference fields is the full homogeneous content of the ced
    solution, and subtracting the neighbor pieces leaves exactly
    ``free + p*half_diff(k)`` — the form computed here.
    """
    k = _check_index(scenario, k)
    p = scenario.topology.p
    ret_sum, adv_sum = _neighbor_branch_sums(scenario, k, x, horizon)
    ret_part = 0.5 * (1.0 + p) * ret_sum
    adv_part = 0.5 * (1.0 - p) * adv_sum
    rad_part = p * _self_minus_field(scenario, k, x, horizon)
    if scenario.topology.mode == "ced":
        rad_part = rad_part + scenario.topology.free_field.field_at(x, side=side)
    total = ret_part + adv_part + rad_part
    return ObservedFieldDecomposition(
        ret_part=ret_part, adv_part=adv_part, rad_part=rad_part, total=total
    )


def observed_field(
    scenario: Scenario, k: int, x, side: int = 1, horizon: float = math.inf
) -> FieldTensor:
    """Field observed by (and acting on) particle k at event x.

    Both topologies exclude the particle's own singular bound field; the
    finite self coupling enters as ``p`` times the particle's own
    half-difference field (whose on-worldline limit is the renormalized
    self-force evaluated in the dynamics module).
    """
    decomposition = decompose_observed(scenario, k, x, side=side, horizon=horizon)
    return decomposition.total + scenario.external.field_at(x, side=side)


def tcrf_field(scenario: Scenario, x, horizon: float = math.inf) -> FieldTensor:
    """Total coupled radiation field: sum of every particle's
    half-difference field.  Source-free and odd under time reversal."""
    total = FieldTensor.zero()
    for j, part in enumerate(scenario.particles):
        w = part.worldline
        if w is None:
            raise ValueError(f"particle {j} has no worldline")
        total = total + field_half_difference(w, part.charge, x, horizon=horizon)
    return total


def total_field(
    scenario: Scenario, x, side: int = 1, horizon: float = math.inf
) -> FieldTensor:
    """Physical total field of a ced scenario at a spacetime point off all
    worldlines: every particle's branch-mixed field plus the configured
    free field plus the external field.

    Only ced mode has a probe-independent total; in the measurement-color
    topology each observer couples to its own field combination, so this
    query is rejected there.  Comparing against ``observed_field`` of the
    matching mc-ced scenario isolates the self bound field:
    ``total_field(ced) - observed_field(mc, k) = half_sum(k) + free``.
    """
    if scenario.topology.mode != "ced":
        raise ValueError("total_field is defined for ced scenarios only")
    p = scenario.topology.p
    total = scenario.topology.free_field.field_at(x, side=side)
    total = total + scenario.external.field_at(x, side=side)
    for part in scenario.particles:
        w = part.worldline
        if w is None:
            raise ValueError("all particles need worldlines for total_field")
        total = total + field_half_sum(w, part.charge, x, horizon=horizon)
        total = total + p * field_half_difference(w, part.charge, x, horizon=horizon)
    return total
