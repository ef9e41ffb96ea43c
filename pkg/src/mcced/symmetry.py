"""Discrete symmetry operations and parity measurements.

Six operations act on scenarios and trajectory records:

* ``Tt``   — time reflection about t = 0: kinematics and fields are
  reflected (E even, B odd), the branch parameter is left alone.
* ``Tp``   — branch flip: the coupling parameter p changes sign and
  nothing else moves.  Neither factor alone maps solutions to solutions.
* ``T``    — the composite Tt∘Tp.  This is the operation that maps
  solutions of the p-branch onto solutions of the (-p)-branch.
* ``C``    — charge conjugation: every charge and every configured field
  changes sign; trajectories are untouched (forces are charge-bilinear).
* ``P``    — point reflection of space.
* ``CPT``  — the composite of all three.

``measure_parity`` evaluates one field functional of the coupling layer
(``ret_part``, ``adv_part``, ``rad_part``, ``total``, ``tcrf``) on a
scenario and on its image, at events and mapped events, and reports +1,
-1, or "none" when the functional is not a parity eigenstate (the
retarded and advanced parts individually swap under time reflection, so
only their weighted sum transforms covariantly).

``equation_of_motion_residual`` recomputes the force balance of an
N-body record from its own worldlines and reports the relative residual;
applying ``T`` to a solved record leaves the residual at the numerical
floor, while applying ``Tt`` alone (without the branch flip) breaks the
balance by twice the radiative coupling — that contrast is the
operational content of branch selection by time reversal.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .coupling import Scenario, decompose_observed, tcrf_field
from .dynamics import ParticleTrace, TrajectoryRecord, _ledger_from_traces, tau0
from .fields import FieldTensor
from .lienard import lw_field
from .worldline import gamma_of

__all__ = [
    "SYMMETRY_OPS",
    "PARITY_FUNCTIONALS",
    "map_event",
    "map_field",
    "apply_symmetry",
    "ParityMeasurement",
    "measure_parity",
    "measure_parity_detail",
    "parity_table",
    "CedParityContrast",
    "ced_parity_contrast",
    "equation_of_motion_residual",
]

SYMMETRY_OPS = ("Tt", "Tp", "C", "P", "CPT", "T")

PARITY_FUNCTIONALS = ("ret_part", "adv_part", "rad_part", "total", "tcrf")

#: op -> (time sign, space sign) for event mapping
_EVENT_SIGNS = {
    "Tt": (-1.0, 1.0),
    "Tp": (1.0, 1.0),
    "C": (1.0, 1.0),
    "P": (1.0, -1.0),
    "T": (-1.0, 1.0),
    "CPT": (-1.0, -1.0),
}

#: op -> (electric sign, magnetic sign) for field mapping.  These carry
#: only the spacetime (kinematic) action on field components; charge
#: conjugation moves no components, so functionals linear in the sources
#: measure odd under C.  CPT composes the P and Tt component actions.
_FIELD_SIGNS = {
    "Tt": (1.0, -1.0),
    "Tp": (1.0, 1.0),
    "C": (1.0, 1.0),
    "P": (-1.0, 1.0),
    "T": (1.0, -1.0),
    "CPT": (-1.0, -1.0),
}


def _check_op(op: str) -> str:
    if op not in SYMMETRY_OPS:
        raise ValueError(f"unknown symmetry operation {op!r}; expected one of {SYMMETRY_OPS}")
    return op


def map_event(op: str, x) -> np.ndarray:
    """Image of an event (t, r) under the operation."""
    _check_op(op)
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise ValueError(f"event must have shape (4,), got {x.shape}")
    ts, ss = _EVENT_SIGNS[op]
    out = np.empty(4)
    out[0] = ts * x[0]
    out[1:] = ss * x[1:]
    return out


def map_field(op: str, field: FieldTensor) -> FieldTensor:
    """Image of field values under the operation (components only; the
    evaluation event must be mapped separately with ``map_event``)."""
    _check_op(op)
    es, bs = _FIELD_SIGNS[op]
    return FieldTensor(es * field.electric, bs * field.magnetic)


def _map_particle(op: str, part):
    position = np.asarray(part.position)
    velocity = np.asarray(part.velocity)
    accel = np.asarray(part.initial_acceleration)
    charge = part.charge
    w = part.worldline
    if op in ("Tt", "T", "CPT"):
        velocity = -velocity
        if w is not None:
            w = w.reversed_copy()
    if op in ("P", "CPT"):
        position = -position
        velocity = -velocity
        accel = -accel
        if w is not None:
            w = w.spatially_reflected()
    if op in ("C", "CPT"):
        charge = -charge
    return dataclasses.replace(
        part,
        charge=charge,
        position=position,
        velocity=velocity,
        initial_acceleration=accel,
        worldline=w,
    )


def _map_external(op: str, ext):
    if op in ("Tt", "T", "CPT"):
        ext = ext.time_reversed()
    if op in ("P", "CPT"):
        ext = ext.parity_reflected()
    if op in ("C", "CPT"):
        ext = ext.charge_conjugated()
    return ext


def _map_scenario(op: str, scenario: Scenario) -> Scenario:
    particles = tuple(_map_particle(op, p) for p in scenario.particles)
    topology = scenario.topology
    if op in ("Tp", "T", "CPT"):
        topology = topology.with_p(-topology.p)
    free = _map_external(op, topology.free_field)
    if free is not topology.free_field:
        topology = dataclasses.replace(topology, free_field=free)
    return dataclasses.replace(
        scenario,
        particles=particles,
        topology=topology,
        external=_map_external(op, scenario.external),
    )


def _map_trace(op: str, trace: ParticleTrace) -> ParticleTrace:
    times = trace.times
    tau = trace.tau
    positions = trace.positions
    velocities = trace.velocities
    accelerations = trace.accelerations
    larmor = trace.larmor
    forces = [trace.force_external, trace.force_neighbors, trace.force_self]
    if op in ("Tt", "T", "CPT"):
        times = (-times)[::-1]
        tau = (tau[-1] - tau)[::-1]
        positions = positions[::-1]
        velocities = (-velocities)[::-1]
        accelerations = accelerations[::-1]
        larmor = larmor[::-1]
        forces = [
            np.concatenate([-f[::-1, :1], f[::-1, 1:]], axis=1) for f in forces
        ]
    if op in ("P", "CPT"):
        positions = -positions
        velocities = -velocities
        accelerations = -accelerations
        forces = [
            np.concatenate([f[:, :1], -f[:, 1:]], axis=1) for f in forces
        ]
    return ParticleTrace(
        times=times,
        tau=tau,
        positions=positions,
        velocities=velocities,
        accelerations=accelerations,
        larmor=larmor,
        force_external=forces[0],
        force_neighbors=forces[1],
        force_self=forces[2],
    )


def apply_symmetry(op: str, obj):
    """Image of a Scenario or TrajectoryRecord under the operation."""
    _check_op(op)
    if isinstance(obj, Scenario):
        return _map_scenario(op, obj)
    if isinstance(obj, TrajectoryRecord):
        scenario = _map_scenario(op, obj.scenario)
        traces = tuple(_map_trace(op, trace) for trace in obj.traces)
        scenario = scenario.with_worldlines([tr.worldline() for tr in traces])
        diagnostics = dict(obj.diagnostics)
        chain = diagnostics.get("symmetry_image", ())
        diagnostics["symmetry_image"] = tuple(chain) + (op,)
        return TrajectoryRecord(
            scenario=scenario,
            method=obj.method,
            dt=obj.dt,
            traces=traces,
            ledger=_ledger_from_traces(scenario, traces),
            diagnostics=diagnostics,
        )
    raise TypeError(
        f"apply_symmetry acts on Scenario or TrajectoryRecord, got {type(obj).__name__}"
    )


# --------------------------------------------------------------------------
# parity measurement


def _functional_values(scenario: Scenario, functional: str, event) -> list:
    if functional == "tcrf":
        return [tcrf_field(scenario, event)]
    values = []
    for k in range(scenario.n_particles):
        parts = decompose_observed(scenario, k, event)
        values.append(getattr(parts, functional))
    return values


def _stack(values) -> np.ndarray:
    return np.concatenate(
        [np.concatenate([v.electric, v.magnetic]) for v in values]
    )


@dataclass(frozen=True)
class ParityMeasurement:
    """Outcome of one parity measurement."""

    functional: str
    op: str
    parity: object  # +1, -1, or "none"
    even_deviation: float
    odd_deviation: float
    scale: float
    n_events: int


def measure_parity_detail(
    functional: str,
    op: str,
    scenario: Scenario,
    events,
    tolerance: float = 1e-9,
) -> ParityMeasurement:
    """Measure how a field functional transforms under an operation.

    Compares functional[op(s)](map_event(x)) against
    ±map_field(functional[s](x)) over the given events and every particle
    index; +1/-1 requires agreement within ``tolerance`` relative to the
    field scale, anything else reports "none".
    """
    if functional not in PARITY_FUNCTIONALS:
        raise ValueError(
            f"unknown functional {functional!r}; expected one of {PARITY_FUNCTIONALS}"
        )
    _check_op(op)
    events = [np.asarray(x, dtype=float) for x in events]
    if not events:
        raise ValueError("at least one event is required")
    image = apply_symmetry(op, scenario)
    even = 0.0
    odd = 0.0
    scale = 0.0
    for x in events:
        base = _functional_values(scenario, functional, x)
        mapped = _functional_values(image, functional, map_event(op, x))
        expect = [map_field(op, v) for v in base]
        got = _stack(mapped)
        want = _stack(expect)
        even = max(even, float(np.max(np.abs(got - want))))
        odd = max(odd, float(np.max(np.abs(got + want))))
        scale = max(scale, float(np.max(np.abs(want))), float(np.max(np.abs(got))))
    threshold = tolerance * max(scale, 1e-300)
    if even <= threshold:
        parity = +1  # includes zero-against-zero: even by convention
    elif odd <= threshold:
        parity = -1
    else:
        parity = "none"
    return ParityMeasurement(
        functional=functional,
        op=op,
        parity=parity,
        even_deviation=even,
        odd_deviation=odd,
        scale=scale,
        n_events=len(events),
    )


def measure_parity(
    functional: str,
    op: str,
    scenario: Scenario,
    events,
    tolerance: float = 1e-9,
):
    """Parity of a field functional under an operation: +1, -1, or "none"."""
    return measure_parity_detail(functional, op, scenario, events, tolerance).parity


def parity_table(
    scenario: Scenario,
    events,
    functionals=PARITY_FUNCTIONALS,
    ops=SYMMETRY_OPS,
    tolerance: float = 1e-9,
) -> dict:
    """Full (functional, op) -> parity table for one scenario."""
    return {
        (functional, op): measure_parity(functional, op, scenario, events, tolerance)
        for functional in functionals
        for op in ops
    }


@dataclass(frozen=True)
class CedParityContrast:
    """How the configured-field topology relates to the branch flip.

    In the measurement-color topology the radiative part is strictly odd
    under the branch flip and strictly odd under time reflection.  In the
    standard topology with a configured free field the same functional is
    *not* a parity eigenstate — only the whole family map p -> -p with
    the reflected free field is covariant (``family_deviation``).  When
    the configured field is absent the contrast degenerates to the
    measurement-color behavior (``degenerate`` is set).
    """

    p: float
    free_field_kind: str
    degenerate: bool
    strict_parity: object
    family_deviation: float
    family_covariant: bool
    scale: float


def ced_parity_contrast(
    scenario: Scenario, events, tolerance: float = 1e-9
) -> CedParityContrast:
    """Contrast the ced radiative part against the branch-flip family map."""
    if scenario.topology.mode != "ced":
        raise ValueError(
            "ced_parity_contrast inspects the standard topology; "
            "measurement-color scenarios have strictly odd radiative parts"
        )
    events = [np.asarray(x, dtype=float) for x in events]
    detail = measure_parity_detail("rad_part", "Tt", scenario, events, tolerance)
    image = apply_symmetry("T", scenario)
    deviation = 0.0
    scale = 0.0
    for x in events:
        for k in range(scenario.n_particles):
            base = decompose_observed(scenario, k, x).rad_part
            mapped = decompose_observed(image, k, map_event("T", x)).rad_part
            want = map_field("T", base)
            deviation = max(
                deviation,
                float(np.max(np.abs(_stack([mapped]) - _stack([want])))),
            )
            scale = max(scale, float(np.max(np.abs(_stack([want])))))
    free_kind = scenario.topology.free_field.kind
    return CedParityContrast(
        p=scenario.topology.p,
        free_field_kind=free_kind,
        degenerate=bool(free_kind == "none"),
        strict_parity=detail.parity,
        family_deviation=deviation,
        family_covariant=bool(deviation <= tolerance * max(scale, 1e-300)),
        scale=scale,
    )


# --------------------------------------------------------------------------
# equation-of-motion residual


def equation_of_motion_residual(record: TrajectoryRecord, stride: int = 1) -> float:
    """Relative force-balance residual of an N-body record.

    Recomputes, at every ``stride``-th node, the neighbor field on the
    branch selected by the record's coupling parameter, the applied field,
    and the reduction-of-order self force, and compares their sum with
    m a from the recorded kinematics.  Solved records sit at the rounding
    floor; a record whose kinematics were time-reflected *without* the
    branch flip violates the balance at the radiative-coupling scale.
    """
    scenario = record.final_scenario()
    if scenario.topology.mode != "mc-ced":
        raise ValueError(
            "equation_of_motion_residual applies to measurement-color N-body records"
        )
    p = scenario.topology.p
    if p == 1.0:
        branch = "retarded"
    elif p == -1.0:
        branch = "advanced"
    else:
        raise ValueError(f"records carry p = +1 or p = -1, got {p}")
    worldlines = scenario.worldlines()
    external = scenario.external
    from .dynamics import _ll_self_force  # shared force definition

    worst = 0.0
    scale = 0.0
    stride = max(int(stride), 1)
    for k, trace in enumerate(record.traces):
        part = scenario.particles[k]
        m = part.mass
        tau_damp = tau0(part.charge, part.mass)
        delta = 0.25 * record.dt
        u4 = trace.four_velocities()
        a4 = trace.four_accelerations()

        def field_of(t, x3, _k=k):
            event = np.array([t, x3[0], x3[1], x3[2]])
            total = external.field_at(event)
            for j, other in enumerate(scenario.particles):
                if j == _k:
                    continue
                total = total + lw_field(worldlines[j], other.charge, event, branch)
            return total

        for i in range(0, trace.n_samples, stride):
            t = float(trace.times[i])
            x = trace.positions[i]
            ubar = u4[i, 1:]
            f0, gamma_vec = _ll_self_force(
                field_of, t, x, ubar, part.charge, m, tau_damp, delta, sign=p
            )
            total = f0 + gamma_vec
            residual = m * a4[i] - total
            worst = max(worst, float(np.max(np.abs(residual))))
            scale = max(
                scale,
                float(np.max(np.abs(total))),
                float(np.max(np.abs(m * a4[i]))),
            )
    return worst / max(scale, 1e-300)
