"""Lienard-Wiechert potentials and fields of sampled worldlines.

All field quantities are in Heaviside-Lorentz units with c = 1, so a static
charge e has E = e/(4 pi r^2) r_hat.  Both light-cone branches are
supported: "retarded" (source point in the past of the event) and
"advanced" (source point in the future).  The half-sum and half-difference
combinations split a charge's field into its singular time-even part and
its regular time-odd (radiative) part; the limit of the half-difference
force on the worldline itself is extracted by even point-splitting with
Richardson extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, HorizonError, NumericalLimitError, SingularityError
from .fields import FieldTensor, _cross3
from .minkowski import FourVector, dot4
from .worldline import Worldline, four_acceleration_of, four_velocity_of

__all__ = [
    "LIGHT_CONE_BRANCHES",
    "light_cone_time",
    "lw_geometry",
    "LightConeGeometry",
    "lw_potential",
    "lw_field",
    "lw_field_from_geometry",
    "field_half_sum",
    "field_half_difference",
    "self_minus_force",
]

LIGHT_CONE_BRANCHES = ("retarded", "advanced")

FIELD_PARTS = ("full", "velocity", "acceleration")


def _branch_sign(branch) -> float:
    if branch == "retarded":
        return -1.0
    if branch == "advanced":
        return 1.0
    raise ValueError(f"unknown light-cone branch {branch!r}; expected one of {LIGHT_CONE_BRANCHES}")


def _event_components(x):
    if isinstance(x, FourVector):
        return x.t, x.spatial
    arr = np.asarray(x, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"event must be a FourVector or length-4 array, got shape {arr.shape}")
    return float(arr[0]), arr[1:4].copy()


def light_cone_time(w: Worldline, x, branch="retarded", horizon=math.inf,
                    guess=None) -> float:
    """Source time s at which the worldline crosses the light cone of x.

    For the retarded branch s solves (x^0 - s) = |x_vec - r(s)| with s in
    the past of x; the advanced branch mirrors it into the future.  The
    defining function is strictly monotone in s because sampled speeds stay
    below 1, so a geometric bracket walk plus safeguarded Newton iteration
    always converges.  Raises HorizonError if no crossing lies within
    `horizon` of x^0, and SingularityError if the crossing point coincides
    with x itself.  An optional `guess` (a nearby previous solution) seeds
    the bracket walk; it affects iteration count only, never the root.
    """
    t0, xs = _event_components(x)
    sign = _branch_sign(branch)
    scale = 1.0 + abs(t0)

    def residual(s):
        pos, vel, _ = w.state3_at(s)
        d = xs - pos
        dist = math.sqrt(float(d @ d))
        return sign * (s - t0) - dist, dist

    f0, dist0 = residual(t0)
    if dist0 < 1e-12 * scale:
        raise SingularityError("event lies on the source worldline; field is singular there")
    # Root bracket: residual is negative at s = t0 and increases along the
    # branch direction at a rate of at least 1 - |v| > 0.
    near = t0
    f_near = f0
    far = None
    f_far = None
    step = max(dist0, 1e-6 * scale)
    if guess is not None and sign * (guess - t0) > 0.0:
        fg, _ = residual(guess)
        if fg >= 0.0:
            far = guess
            f_far = fg
        else:
            near = guess
            f_near = fg
            # A near-root seed: walk in steps scaled to its residual
            # rather than to the full source distance.
            step = max(2.0 * abs(fg), 1e-6 * scale)
    if far is None:
        base = near
        while True:
            candidate = base + sign * step
            if abs(candidate - t0) > horizon:
                # Clamp the final probe to the horizon edge: the residual is
                # monotone along the branch, so a negative value there proves
                # no crossing exists within the horizon.
                candidate = t0 + sign * horizon
                fc, _ = residual(candidate)
                if fc < 0.0:
                    raise HorizonError(
                        f"no {branch} light-cone crossing within horizon {horizon} of t = {t0}"
                    )
                far = candidate
                f_far = fc
                break
            fc, _ = residual(candidate)
            if fc >= 0.0:
                far = candidate
                f_far = fc
                break
            near = candidate
            f_near = fc
            step *= 2.0
    # near has residual < 0, far has residual >= 0.  Start the safeguarded
    # Newton iteration from the endpoint with the smaller residual.
    if f_far == 0.0:
        s = far
    elif abs(f_near) <= f_far:
        s = near
    else:
        s = far
    # The residual differences two numbers of size ~ dist, so demand
    # convergence relative to that magnitude (1e-13 absolute for short
    # crossings, a few ULP for long ones).
    for _ in range(200):
        f, dist = residual(s)
        tol = 1e-13 * (scale + dist)
        if abs(f) <= tol:
            if dist < 1e-12 * scale:
                raise SingularityError("event lies on the source worldline; field is singular there")
            return s
        if f < 0.0:
            near = s
        else:
            far = s
        pos, vel, _ = w.state3_at(s)
        d = xs - pos
        dist = math.sqrt(float(d @ d))
        if dist > 0.0:
            n = d / dist
            fprime = sign + float(n @ vel)
        else:
            fprime = 0.0
        if fprime != 0.0:
            s_new = s - f / fprime
        else:
            s_new = 0.5 * (near + far)
        lo, hi = (near, far) if near < far else (far, near)
        if not (lo < s_new < hi):
            s_new = 0.5 * (near + far)
        s = s_new
    raise ConvergenceError(
        f"light-cone solve did not reach tolerance {tol} near s = {s}", residuals=[abs(f)]
    )


@dataclass(frozen=True)
class LightConeGeometry:
    """Geometry of one light-cone crossing, used by the field formulas."""

    branch: str
    source_time: float
    distance: float
    direction: np.ndarray  # unit vector from source point to the event
    velocity: np.ndarray
    acceleration: np.ndarray
    doppler: float  # 1 -+ n.v for retarded/advanced


def lw_geometry(w: Worldline, x, branch="retarded", horizon=math.inf,
                guess=None) -> LightConeGeometry:
    sign = _branch_sign(branch)
    t0, xs = _event_components(x)
    s = light_cone_time(w, x, branch, horizon, guess=guess)
    pos, vel, acc = w.state3_at(s)
    d = xs - pos
    dist = math.sqrt(float(d @ d))
    if dist < 1e-12 * (1.0 + abs(t0)):
        raise SingularityError("event lies on the source worldline; field is singular there")
    n = d / dist
    doppler = 1.0 + sign * float(n @ vel)
    return LightConeGeometry(
        branch=branch,
        source_time=s,
        distance=dist,
        direction=n,
        velocity=vel,
        acceleration=acc,
        doppler=doppler,
    )


def lw_potential(w: Worldline, charge, x, branch="retarded", horizon=math.inf) -> FourVector:
    """Four-potential A = (e/4 pi) u / |u.(x - r)| at event x.

    The invariant denominator equals gamma * R * doppler and is positive on
    both branches.
    """
    g = lw_geometry(w, x, branch, horizon)
    pref = float(charge) / (4.0 * math.pi * g.distance * g.doppler)
    return FourVector.from_array(
        [pref, pref * g.velocity[0], pref * g.velocity[1], pref * g.velocity[2]]
    )


def lw_field(w: Worldline, charge, x, branch="retarded", part="full", horizon=math.inf) -> FieldTensor:
    """Lienard-Wiechert field of the worldline at event x.

    part selects "velocity" (the 1/R^2 piece), "acceleration" (the 1/R
    piece), or their sum "full".  On the advanced branch the magnetic field
    is -n x E, the time reflection of the retarded relation.
    """
    if part not in FIELD_PARTS:
        raise ValueError(f"unknown field part {part!r}; expected one of {FIELD_PARTS}")
    g = lw_geometry(w, x, branch, horizon)
    return lw_field_from_geometry(g, charge, part)


def lw_field_from_geometry(g: LightConeGeometry, charge, part="full") -> FieldTensor:
    """Field value from an already-solved light-cone geometry."""
    if part not in FIELD_PARTS:
        raise ValueError(f"unknown field part {part!r}; expected one of {FIELD_PARTS}")
    branch = g.branch
    sigma = 1.0 if branch == "retarded" else -1.0
    pref = float(charge) / (4.0 * math.pi)
    n = g.direction
    beta = g.velocity
    kappa = g.doppler
    e = np.zeros(3)
    if part in ("full", "velocity"):
        beta2 = float(beta @ beta)
        e = e + (n - sigma * beta) * (1.0 - beta2) / (kappa ** 3 * g.distance ** 2)
    if part in ("full", "acceleration"):
        e = e + _cross3(n, _cross3(n - sigma * beta, g.acceleration)) / (
            kappa ** 3 * g.distance
        )
    e = pref * e
    b = sigma * _cross3(n, e)
    return FieldTensor._raw(e, b)


def field_half_sum(w: Worldline, charge, x, horizon=math.inf) -> FieldTensor:
    """(retarded + advanced)/2: the time-even, bound part of the field."""
    ret = lw_field(w, charge, x, "retarded", horizon=horizon)
    adv = lw_field(w, charge, x, "advanced", horizon=horizon)
    return 0.5 * (ret + adv)


def field_half_difference(w: Worldline, charge, x, horizon=math.inf) -> FieldTensor:
    """(retarded - advanced)/2: the time-odd, radiative part of the field.

    Regular on the worldline itself; vanishes identically for static
    sources.
    """
    ret = lw_field(w, charge, x, "retarded", horizon=horizon)
    adv = lw_field(w, charge, x, "advanced", horizon=horizon)
    return 0.5 * (ret - adv)


def _orthonormal_triad(u: np.ndarray) -> list:
    """Three unit spacelike vectors orthogonal to u and to each other.

    Boosted coordinate axes: d^0 = gamma (v.e_i), d_vec = e_i +
    (gamma^2/(gamma+1)) (v.e_i) v, which satisfy d.d = -1 and d.u = 0.
    """
    gamma = u[0]
    v = u[1:] / gamma
    coeff = gamma * gamma / (gamma + 1.0)
    triad = []
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        ve = float(v @ e)
        d = np.empty(4)
        d[0] = gamma * ve
        d[1:] = e + coeff * ve * v
        triad.append(d)
    return triad


def _richardson_triplet(values):
    """Extrapolate G(eps), G(eps/2), G(eps/4) of an even function to eps -> 0.

    Returns (limit, spread) where spread bounds the unresolved step between
    the two second-level estimates.
    """
    g0, g1, g2 = (np.asarray(v, dtype=float) for v in values)
    r1 = (4.0 * g1 - g0) / 3.0
    r2 = (4.0 * g2 - g1) / 3.0
    limit = (16.0 * r2 - r1) / 15.0
    spread = float(np.max(np.abs(r2 - r1)))
    return limit, spread


def self_minus_force(w: Worldline, charge, tau, epsilon_scale=1e-3, horizon=math.inf) -> FourVector:
    """Force of a charge's own half-difference field on itself, at proper time tau.

    The half-difference field is regular on the worldline, so the force is
    obtained as the even limit of e F(x +- eps d) u over three orthonormal
    spacelike directions d, with Richardson extrapolation in eps.  The base
    offset is epsilon_scale times the local curvature radius 1/|a|.  Raises
    NumericalLimitError when the extrapolation fails to stabilize.
    """
    t = w.t_of_tau(float(tau))
    pos, vel, acc = w.state3_at(t)
    u = four_velocity_of(vel)
    a4 = four_acceleration_of(vel, acc)
    g2 = max(-dot4(a4, a4), 0.0)
    span = w.t_max - w.t_min
    cap = max(1.0, 0.1 * span)
    if g2 > 1e-24:
        eps0 = min(epsilon_scale / math.sqrt(g2), cap)
    else:
        eps0 = cap
    event = np.array([t, pos[0], pos[1], pos[2]])
    triad = _orthonormal_triad(u)
    e = float(charge)
    means = []
    for level in range(3):
        eps = eps0 / (2.0 ** level)
        total = np.zeros(4)
        for d in triad:
            for sgn in (1.0, -1.0):
                y = event + sgn * eps * d
                f = field_half_difference(w, e, y, horizon=horizon)
                total += f.four_force(e, u)
        means.append(total / 6.0)
    limit, spread = _richardson_triplet(means)
    force_scale = (e * e / (6.0 * math.pi)) * g2 * max(1.0, float(u[0]))
    tol = 1e-3 * max(float(np.max(np.abs(limit))), force_scale) + 1e-14
    if spread > tol:
        raise NumericalLimitError(
            f"point-split self-force extrapolation did not stabilize: spread {spread} > {tol}",
            estimates=[m.tolist() for m in means],
        )
    return FourVector.from_array(limit)
