"""Minkowski four-vectors with signature (+, -, -, -); natural units, c = 1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FourVector", "minkowski_dot", "dot4", "boost", "boost_array"]

METRIC_DIAGONAL = (1.0, -1.0, -1.0, -1.0)


@dataclass(frozen=True)
class FourVector:
    """Contravariant four-vector (t, x, y, z); components must be finite."""

    t: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("t", "x", "y", "z"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"component {name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"component {name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_array(cls, values) -> "FourVector":
        t, x, y, z = (float(v) for v in values)
        return cls(t, x, y, z)

    @classmethod
    def from_spatial(cls, t, spatial) -> "FourVector":
        x, y, z = (float(v) for v in spatial)
        return cls(float(t), x, y, z)

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def __add__(self, other):
        if not isinstance(other, FourVector):
            return NotImplemented
        return FourVector(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        if not isinstance(other, FourVector):
            return NotImplemented
        return FourVector(self.t - other.t, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self):
        return FourVector(-self.t, -self.x, -self.y, -self.z)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, float)):
            return NotImplemented
        return FourVector(scalar * self.t, scalar * self.x, scalar * self.y, scalar * self.z)

    __rmul__ = __mul__

    def dot(self, other: "FourVector") -> float:
        return minkowski_dot(self, other)

    def norm_squared(self) -> float:
        return minkowski_dot(self, self)


def minkowski_dot(a: FourVector, b: FourVector) -> float:
    """Invariant inner product a.b = a^t b^t - a.x b.x - a.y b.y - a.z b.z."""
    return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z


def dot4(a, b) -> float:
    """minkowski_dot on plain length-4 arrays; hot-path variant."""
    return float(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3])


def _check_velocity(velocity) -> tuple[np.ndarray, float]:
    v = np.asarray(velocity, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"boost velocity must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("boost velocity components must be finite")
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise ValueError(f"boost speed must satisfy |v| < 1, got |v|^2 = {v2}")
    return v, v2


def boost_array(velocity, values) -> np.ndarray:
    """Lorentz boost of a contravariant component array (..., 4).

    Returns the components seen in the frame moving with `velocity`
    relative to the original frame.
    """
    v, v2 = _check_velocity(velocity)
    arr = np.asarray(values, dtype=float)
    if arr.shape[-1] != 4:
        raise ValueError(f"expected trailing axis of length 4, got shape {arr.shape}")
    t = arr[..., 0]
    r = arr[..., 1:]
    if v2 == 0.0:
        return arr.copy()
    gamma = 1.0 / math.sqrt(1.0 - v2)
    vr = r @ v
    t_out = gamma * (t - vr)
    # (gamma - 1)/v2 rewritten as gamma^2/(gamma + 1): stable as v -> 0
    coeff = gamma * gamma / (gamma + 1.0)
    r_out = r + np.multiply.outer(coeff * vr - gamma * t, v)
    return np.concatenate([t_out[..., None], r_out], axis=-1)


def boost(velocity, vector: FourVector) -> FourVector:
    """Lorentz boost of a four-vector into the frame moving at `velocity`."""
    if not isinstance(vector, FourVector):
        raise TypeError("boost expects a FourVector; use boost_array for raw arrays")
    return FourVector.from_array(boost_array(velocity, vector.as_array()))
