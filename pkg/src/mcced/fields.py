"""Electromagnetic field values and configured external/background fields.

A FieldTensor holds the electric and magnetic three-vectors of the
antisymmetric field tensor at one event, in Heaviside-Lorentz units with
c = 1.  ExternalField describes the supported configured fields (uniform
electric, uniform magnetic, fixed Coulomb center, plane wave), including
optional switch-on/off times for the uniform kinds and exact symmetry maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import SingularityError
from .minkowski import FourVector

__all__ = ["FieldTensor", "boost_field", "ExternalField", "EXTERNAL_FIELD_KINDS"]


def _as_vec3(values, name):
    v = np.asarray(values, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} components must be finite")
    return v


def _cross3(a, b) -> np.ndarray:
    """Cross product of two 3-vectors without np.cross axis machinery."""
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


class FieldTensor:
    """Electric and magnetic field three-vectors at a single event."""

    __slots__ = ("_e", "_b")

    def __init__(self, electric, magnetic):
        e = _as_vec3(electric, "electric field").copy()
        b = _as_vec3(magnetic, "magnetic field").copy()
        e.setflags(write=False)
        b.setflags(write=False)
        self._e = e
        self._b = b

    @classmethod
    def _raw(cls, e: np.ndarray, b: np.ndarray) -> "FieldTensor":
        """Adopt freshly computed float arrays without validation/copy."""
        self = object.__new__(cls)
        e.setflags(write=False)
        b.setflags(write=False)
        self._e = e
        self._b = b
        return self

    @classmethod
    def zero(cls) -> "FieldTensor":
        return _ZERO_FIELD

    @property
    def electric(self) -> np.ndarray:
        return self._e

    @property
    def magnetic(self) -> np.ndarray:
        return self._b

    def __add__(self, other):
        if not isinstance(other, FieldTensor):
            return NotImplemented
        return FieldTensor._raw(self._e + other._e, self._b + other._b)

    def __sub__(self, other):
        if not isinstance(other, FieldTensor):
            return NotImplemented
        return FieldTensor._raw(self._e - other._e, self._b - other._b)

    def __neg__(self):
        return FieldTensor._raw(-self._e, -self._b)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return FieldTensor._raw(scalar * self._e, scalar * self._b)

    __rmul__ = __mul__

    def four_force(self, charge, u) -> np.ndarray:
        """Lorentz four-force e F^{mu nu} u_nu for four-velocity u (length 4)."""
        q = float(charge)
        ev, bv = self._e, self._b
        u0 = float(u[0])
        u1 = float(u[1])
        u2 = float(u[2])
        u3 = float(u[3])
        return np.array([
            q * (ev[0] * u1 + ev[1] * u2 + ev[2] * u3),
            q * (u0 * ev[0] + u2 * bv[2] - u3 * bv[1]),
            q * (u0 * ev[1] + u3 * bv[0] - u1 * bv[2]),
            q * (u0 * ev[2] + u1 * bv[1] - u2 * bv[0]),
        ])

    def max_abs(self) -> float:
        return float(max(np.max(np.abs(self._e)), np.max(np.abs(self._b))))

    def allclose(self, other: "FieldTensor", tol) -> bool:
        return (
            float(np.max(np.abs(self._e - other._e))) <= tol
            and float(np.max(np.abs(self._b - other._b))) <= tol
        )

    def __repr__(self):
        return f"FieldTensor(electric={self._e.tolist()}, magnetic={self._b.tolist()})"


_ZERO_FIELD = FieldTensor(np.zeros(3), np.zeros(3))


def boost_field(velocity, field: FieldTensor) -> FieldTensor:
    """Field components in the frame moving at `velocity` (same event).

    Pairs with minkowski.boost: if x' = boost(v, x), the moving observer at
    x' measures boost_field(v, F) when the original frame measures F at x.
    """
    v = _as_vec3(velocity, "boost velocity")
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise ValueError(f"boost speed must satisfy |v| < 1, got |v|^2 = {v2}")
    if v2 == 0.0:
        return FieldTensor(field.electric, field.magnetic)
    gamma = 1.0 / math.sqrt(1.0 - v2)
    # (gamma - 1) * (w.vhat) vhat written with gamma^2/(gamma+1) for stability
    coeff = gamma * gamma / (gamma + 1.0)
    e, b = field.electric, field.magnetic
    e_out = gamma * (e + np.cross(v, b)) - coeff * float(e @ v) * v
    b_out = gamma * (b - np.cross(v, e)) - coeff * float(b @ v) * v
    return FieldTensor(e_out, b_out)


EXTERNAL_FIELD_KINDS = (
    "none",
    "uniform-electric",
    "uniform-magnetic",
    "coulomb-center",
    "plane-wave",
)

_GATED_KINDS = ("uniform-electric", "uniform-magnetic")


def _unit_or_error(values, name):
    v = _as_vec3(values, name)
    n = float(np.linalg.norm(v))
    if n < 1e-300:
        raise ValueError(f"{name} must be nonzero")
    return tuple((v / n).tolist())


@dataclass(frozen=True)
class ExternalField:
    """A configured background field; `none` is the zero field.

    Uniform kinds support optional switch times t_on/t_off.  With ramp = 0
    the switches are sharp and `side` selects the one-sided value exactly at
    a switch (+1 right limit, -1 left limit).  With ramp > 0 each switch is
    smoothed by a cubic smoothstep centered on the switch time, which keeps
    every symmetry map exactly representable.
    """

    kind: str = "none"
    amplitude: float = 0.0
    direction: tuple | None = None
    center: tuple = (0.0, 0.0, 0.0)
    source_charge: float = 0.0
    polarization: tuple | None = None
    omega: float = 0.0
    phase: float = 0.0
    t_on: float | None = None
    t_off: float | None = None
    ramp: float = 0.0

    def __post_init__(self):
        if self.kind not in EXTERNAL_FIELD_KINDS:
            raise ValueError(f"unknown external field kind {self.kind!r}; expected one of {EXTERNAL_FIELD_KINDS}")
        if not math.isfinite(self.amplitude):
            raise ValueError("field amplitude must be finite")
        if self.ramp < 0.0:
            raise ValueError("ramp must be nonnegative")
        if self.kind in ("uniform-electric", "uniform-magnetic", "plane-wave"):
            if self.direction is None:
                raise ValueError(f"{self.kind} requires a direction")
            d = np.asarray(self.direction, dtype=float)
            if abs(float(d @ d) - 1.0) > 1e-12:
                raise ValueError("direction must be a unit vector (within 1e-12)")
        if self.kind == "plane-wave":
            if self.polarization is None:
                raise ValueError("plane-wave requires a polarization")
            p = np.asarray(self.polarization, dtype=float)
            d = np.asarray(self.direction, dtype=float)
            if abs(float(p @ p) - 1.0) > 1e-12:
                raise ValueError("polarization must be a unit vector (within 1e-12)")
            if abs(float(p @ d)) > 1e-12:
                raise ValueError("polarization must be orthogonal to the propagation direction (within 1e-12)")
            if self.omega <= 0.0:
                raise ValueError("plane-wave omega must be positive")
        if (self.t_on is not None or self.t_off is not None) and self.kind not in _GATED_KINDS:
            raise ValueError("switch times are supported on uniform kinds only")
        if self.t_on is not None and self.t_off is not None and not self.t_on < self.t_off:
            raise ValueError("t_on must be earlier than t_off")

    @classmethod
    def none_field(cls) -> "ExternalField":
        return cls(kind="none")

    @classmethod
    def uniform_electric(cls, amplitude, direction, t_on=None, t_off=None, ramp=0.0) -> "ExternalField":
        return cls(
            kind="uniform-electric",
            amplitude=float(amplitude),
            direction=_unit_or_error(direction, "direction"),
            t_on=None if t_on is None else float(t_on),
            t_off=None if t_off is None else float(t_off),
            ramp=float(ramp),
        )

    @classmethod
    def uniform_magnetic(cls, amplitude, direction, t_on=None, t_off=None, ramp=0.0) -> "ExternalField":
        return cls(
            kind="uniform-magnetic",
            amplitude=float(amplitude),
            direction=_unit_or_error(direction, "direction"),
            t_on=None if t_on is None else float(t_on),
            t_off=None if t_off is None else float(t_off),
            ramp=float(ramp),
        )

    @classmethod
    def coulomb_center(cls, source_charge, center=(0.0, 0.0, 0.0)) -> "ExternalField":
        c = _as_vec3(center, "center")
        return cls(kind="coulomb-center", source_charge=float(source_charge), center=tuple(c.tolist()))

    @classmethod
    def plane_wave(cls, amplitude, direction, polarization, omega, phase=0.0) -> "ExternalField":
        d = _unit_or_error(direction, "direction")
        p = _unit_or_error(polarization, "polarization")
        return cls(
            kind="plane-wave",
            amplitude=float(amplitude),
            direction=d,
            polarization=p,
            omega=float(omega),
            phase=float(phase),
        )

    def _gate(self, t, side) -> float:
        if self.t_on is None and self.t_off is None:
            return 1.0
        if self.ramp > 0.0:
            value = 1.0
            if self.t_on is not None:
                s = min(max((t - self.t_on) / self.ramp + 0.5, 0.0), 1.0)
                value *= s * s * (3.0 - 2.0 * s)
            if self.t_off is not None:
                s = min(max((t - self.t_off) / self.ramp + 0.5, 0.0), 1.0)
                value *= 1.0 - s * s * (3.0 - 2.0 * s)
            return value
        on = True
        if self.t_on is not None:
            if t < self.t_on or (t == self.t_on and side < 0):
                on = False
        if self.t_off is not None:
            if t > self.t_off or (t == self.t_off and side > 0):
                on = False
        return 1.0 if on else 0.0

    def switch_times(self) -> tuple:
        """Coordinate times at which the field value is discontinuous."""
        if self.ramp > 0.0:
            return ()
        times = [t for t in (self.t_on, self.t_off) if t is not None]
        return tuple(sorted(times))

    def field_at(self, x, side=1) -> FieldTensor:
        """Field value at event x (FourVector or length-4 array)."""
        if isinstance(x, FourVector):
            t = x.t
            r = x.spatial
        else:
            arr = np.asarray(x, dtype=float)
            t = float(arr[0])
            r = arr[1:4]
        if self.kind == "none":
            return FieldTensor.zero()
        if self.kind == "uniform-electric":
            g = self._gate(t, side)
            return FieldTensor(self.amplitude * g * np.asarray(self.direction), np.zeros(3))
        if self.kind == "uniform-magnetic":
            g = self._gate(t, side)
            return FieldTensor(np.zeros(3), self.amplitude * g * np.asarray(self.direction))
        if self.kind == "coulomb-center":
            d = r - np.asarray(self.center, dtype=float)
            dist = float(np.linalg.norm(d))
            if dist < 1e-12 * (1.0 + float(np.max(np.abs(r)))):
                raise SingularityError("coulomb-center field evaluated at its own source point")
            e = self.source_charge / (4.0 * math.pi * dist ** 3) * d
            return FieldTensor(e, np.zeros(3))
        # plane-wave
        n = np.asarray(self.direction, dtype=float)
        pol = np.asarray(self.polarization, dtype=float)
        psi = self.omega * (t - float(n @ r)) + self.phase
        e = self.amplitude * math.cos(psi) * pol
        return FieldTensor._raw(e, _cross3(n, e))

    def time_reversed(self) -> "ExternalField":
        """The configuration whose field is the time reflection of this one.

        Under t -> -t the electric field is even and the magnetic field is
        odd; switch windows reflect, and a plane wave reverses propagation.
        """
        t_on = None if self.t_off is None else -self.t_off
        t_off = None if self.t_on is None else -self.t_on
        if self.kind == "uniform-electric":
            return replace(self, t_on=t_on, t_off=t_off)
        if self.kind == "uniform-magnetic":
            return replace(self, amplitude=-self.amplitude, t_on=t_on, t_off=t_off)
        if self.kind == "plane-wave":
            d = tuple(-c for c in self.direction)
            return replace(self, direction=d, phase=-self.phase)
        return self

    def charge_conjugated(self) -> "ExternalField":
        """The configuration with all source strengths negated."""
        if self.kind == "coulomb-center":
            return replace(self, source_charge=-self.source_charge)
        if self.kind == "none":
            return self
        return replace(self, amplitude=-self.amplitude)

    def time_shifted(self, delta: float) -> "ExternalField":
        """The configuration whose field is this one delayed by ``delta``:
        ``shifted.field_at((t, r)) == self.field_at((t - delta, r))``."""
        delta = float(delta)
        if not math.isfinite(delta):
            raise ValueError("time shift must be finite")
        if self.kind in ("none", "coulomb-center"):
            return self
        if self.kind == "plane-wave":
            return replace(self, phase=self.phase - self.omega * delta)
        t_on = None if self.t_on is None else self.t_on + delta
        t_off = None if self.t_off is None else self.t_off + delta
        return replace(self, t_on=t_on, t_off=t_off)

    def parity_reflected(self) -> "ExternalField":
        """The configuration whose field is the spatial reflection of this one.

        Under x -> -x the electric field is odd and the magnetic field even.
        """
        if self.kind == "uniform-electric":
            return replace(self, direction=tuple(-c for c in self.direction))
        if self.kind == "uniform-magnetic":
            return self
        if self.kind == "coulomb-center":
            return replace(self, center=tuple(-c for c in self.center))
        if self.kind == "plane-wave":
            return replace(
                self,
                direction=tuple(-c for c in self.direction),
                polarization=tuple(-c for c in self.polarization),
            )
        return self
