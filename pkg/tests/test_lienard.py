"""Point-charge field evaluation: light-cone solves and field branches.

Oracles used here are independent of the field code: the closed-form
Coulomb field, explicit boosts of it, a direct sphere quadrature of the
Poynting flux against the invariant radiated-power formula, and exact
geometric identities (same light ray => exact 1/R amplitude ratio).
"""

import math

import numpy as np
import pytest

from mcced.dynamics import larmor_power
from mcced.errors import HorizonError, SingularityError
from mcced.fields import FieldTensor, boost_field
from mcced.lienard import (
    field_half_difference,
    field_half_sum,
    light_cone_time,
    lw_field,
    lw_geometry,
    lw_potential,
    self_minus_force,
)
from mcced.minkowski import FourVector, boost
from mcced.worldline import circular_worldline, inertial_worldline, static_worldline


def coulomb_field(charge, center, x3):
    rho = np.asarray(x3, dtype=float) - np.asarray(center, dtype=float)
    r = np.linalg.norm(rho)
    return FieldTensor(charge * rho / (4.0 * math.pi * r**3), np.zeros(3))


# ---------------------------------------------------------------------------
# static charge
# ---------------------------------------------------------------------------


class TestStaticCharge:
    def setup_method(self):
        self.w = static_worldline((2.0, -1.0, 0.5), -500.0, 500.0)

    def test_retarded_field_is_coulomb(self):
        for x3 in [(10.0, 0.0, 0.0), (-3.0, 4.0, 1.0), (2.0, -1.0, 9.5)]:
            for t in (-3.0, 0.0, 7.25):
                f = lw_field(self.w, 1.5, (t, *x3), "retarded")
                ref = coulomb_field(1.5, (2.0, -1.0, 0.5), x3)
                assert np.allclose(f.electric, ref.electric, rtol=1e-12, atol=1e-15)
                assert np.allclose(f.magnetic, 0.0, atol=1e-15)

    def test_advanced_equals_retarded(self):
        # A static source is time-symmetric: both branches give the same field.
        x = (1.0, 8.0, -2.0, 3.0)
        ret = lw_field(self.w, -2.0, x, "retarded")
        adv = lw_field(self.w, -2.0, x, "advanced")
        assert np.allclose(ret.electric, adv.electric, rtol=1e-12)
        assert np.allclose(adv.magnetic, 0.0, atol=1e-15)

    def test_potential_is_coulomb(self):
        x3 = np.array([5.0, -1.0, 0.5])
        r = np.linalg.norm(x3 - np.array([2.0, -1.0, 0.5]))
        pot = lw_potential(self.w, 3.0, (0.0, *x3), "retarded")
        assert pot.t == pytest.approx(3.0 / (4.0 * math.pi * r), rel=1e-12)
        assert np.allclose(pot.spatial, 0.0, atol=1e-15)

    def test_half_difference_vanishes(self):
        f = field_half_difference(self.w, 2.0, (0.0, 6.0, 6.0, 6.0))
        assert np.allclose(f.electric, 0.0, atol=1e-14)
        assert np.allclose(f.magnetic, 0.0, atol=1e-14)

    def test_self_minus_force_vanishes(self):
        f = self_minus_force(self.w, 1.0, 0.0)
        assert np.allclose(f.as_array(), 0.0, atol=1e-12)


# ---------------------------------------------------------------------------
# uniformly moving charge vs boosted Coulomb oracle
# ---------------------------------------------------------------------------


class TestUniformMotion:
    @pytest.mark.parametrize("speed", [0.2, 0.5, 0.8, 0.95])
    def test_matches_boosted_coulomb(self, speed):
        v = np.array([speed, 0.0, 0.0])
        w = inertial_worldline(-1000.0 * v, v, -1000.0, 1000.0)
        for x3 in [(0.0, 3.0, 0.0), (2.0, 1.0, -1.0), (-1.5, 0.0, 2.5)]:
            x = FourVector(1.0, *x3)
            f = lw_field(w, 1.0, x.as_array(), "retarded")
            # Oracle: Coulomb field in the charge's rest frame, boosted back.
            rest_event = boost(v, x)
            rho = rest_event.spatial
            rest = FieldTensor(rho / (4.0 * math.pi * np.linalg.norm(rho) ** 3),
                               np.zeros(3))
            ref = boost_field(-v, rest)
            scale = np.linalg.norm(ref.electric)
            assert np.allclose(f.electric, ref.electric, atol=1e-9 * scale)
            assert np.allclose(f.magnetic, ref.magnetic, atol=1e-9 * scale)


# ---------------------------------------------------------------------------
# light-cone solver behaviour
# ---------------------------------------------------------------------------


class TestLightCone:
    def setup_method(self):
        self.w = circular_worldline(5.0, 0.6, -400.0, 400.0)

    def test_solution_satisfies_cone_equation(self):
        for x in [(0.0, 30.0, 2.0, -4.0), (10.0, -8.0, 1.0, 12.0)]:
            for branch in ("retarded", "advanced"):
                s = light_cone_time(self.w, x, branch)
                pos = self.w.sample_at(s).position
                dist = np.linalg.norm(np.asarray(x[1:]) - pos.spatial)
                assert abs(abs(x[0] - s) - dist) <= 1e-10 * (1.0 + dist)

    def test_branch_ordering(self):
        x = (3.0, 25.0, 0.0, 0.0)
        s_ret = light_cone_time(self.w, x, "retarded")
        s_adv = light_cone_time(self.w, x, "advanced")
        assert s_ret < x[0] < s_adv

    def test_guess_does_not_change_root(self):
        x = (0.0, 40.0, 7.0, -3.0)
        s0 = light_cone_time(self.w, x, "retarded")
        for guess in (s0, s0 + 0.3, s0 - 2.0, -55.0):
            s = light_cone_time(self.w, x, "retarded", guess=guess)
            assert s == pytest.approx(s0, abs=1e-10)

    def test_horizon_error(self):
        x = (0.0, 300.0, 0.0, 0.0)
        with pytest.raises(HorizonError):
            light_cone_time(self.w, x, "retarded", horizon=50.0)
        # A generous horizon succeeds.
        light_cone_time(self.w, x, "retarded", horizon=400.0)

    def test_singularity_on_worldline(self):
        s = self.w.sample_at(1.25)
        x = (1.25, *s.position.spatial)
        with pytest.raises(SingularityError):
            light_cone_time(self.w, x, "retarded")
        with pytest.raises(SingularityError):
            lw_field(self.w, 1.0, x, "retarded")

    def test_geometry_null_separation(self):
        x = np.array([2.0, 18.0, -6.0, 9.0])
        g = lw_geometry(self.w, x, "retarded")
        # Reconstruct the source point and verify the separation is null and
        # the stored direction/distance agree with the worldline sample.
        src = x[1:] - g.distance * g.direction
        pos = self.w.sample_at(g.source_time).position.spatial
        assert np.allclose(src, pos, atol=1e-9)
        assert x[0] - g.source_time == pytest.approx(g.distance, rel=1e-12)
        assert np.linalg.norm(g.direction) == pytest.approx(1.0, rel=1e-12)
        assert g.doppler == pytest.approx(
            1.0 - float(g.direction @ g.velocity), rel=1e-12)


# ---------------------------------------------------------------------------
# field parts
# ---------------------------------------------------------------------------


class TestFieldParts:
    def setup_method(self):
        self.w = circular_worldline(10.0, 0.3, -6000.0, 6000.0)

    def test_parts_sum_to_full(self):
        x = (0.0, 50.0, 10.0, -5.0)
        full = lw_field(self.w, 2.0, x, "retarded", part="full")
        vel = lw_field(self.w, 2.0, x, "retarded", part="velocity")
        acc = lw_field(self.w, 2.0, x, "retarded", part="acceleration")
        assert np.allclose(full.electric, (vel + acc).electric, rtol=1e-12)
        assert np.allclose(full.magnetic, (vel + acc).magnetic, rtol=1e-12)

    def test_acceleration_part_scales_as_inverse_distance(self):
        # Two events on the SAME outgoing light ray share a retarded point,
        # so the far-zone amplitude ratio is exactly the distance ratio.
        s0 = 0.0
        src = self.w.sample_at(s0).position.spatial
        n = np.array([3.0, -2.0, 6.0])
        n /= np.linalg.norm(n)
        r1, r2 = 500.0, 1000.0
        f1 = lw_field(self.w, 1.0, (s0 + r1, *(src + r1 * n)), "retarded",
                      part="acceleration")
        f2 = lw_field(self.w, 1.0, (s0 + r2, *(src + r2 * n)), "retarded",
                      part="acceleration")
        assert np.allclose(f1.electric, 2.0 * f2.electric, rtol=1e-9)
        assert np.allclose(f1.magnetic, 2.0 * f2.magnetic, rtol=1e-9)

    def test_far_zone_flux_matches_invariant_power(self):
        # Sphere quadrature of the Poynting flux at large radius against the
        # covariant radiated-power formula.  Constant-|a| motion makes the
        # emitted power time independent, so retardation spread across the
        # sphere does not matter.
        radius = 10.0
        speed = 0.05
        w = circular_worldline(radius, speed, -100000.0, 100000.0)
        sample = w.sample_at(0.0)
        p_ref = larmor_power(sample.velocity, sample.acceleration, 1.0)

        sphere_r = 20000.0
        n_pts = 3000
        # Fibonacci sphere: near-uniform quadrature nodes.
        idx = np.arange(n_pts) + 0.5
        phi = math.pi * (3.0 - math.sqrt(5.0)) * idx
        z = 1.0 - 2.0 * idx / n_pts
        rho = np.sqrt(1.0 - z * z)
        dirs = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=1)

        flux = 0.0
        for nhat in dirs:
            x = (sphere_r, *(sphere_r * nhat))
            f = lw_field(w, 1.0, x, "retarded")
            s_vec = np.cross(f.electric, f.magnetic)
            flux += float(np.dot(s_vec, nhat))
        power = flux / n_pts * 4.0 * math.pi * sphere_r**2
        assert power == pytest.approx(p_ref, rel=2e-3)


# ---------------------------------------------------------------------------
# branch combinations
# ---------------------------------------------------------------------------


class TestBranchCombinations:
    def test_half_sum_difference_reconstruct_branches(self):
        w = circular_worldline(4.0, 0.5, -300.0, 300.0)
        x = (0.0, 20.0, -11.0, 6.0)
        ret = lw_field(w, 1.3, x, "retarded")
        adv = lw_field(w, 1.3, x, "advanced")
        hs = field_half_sum(w, 1.3, x)
        hd = field_half_difference(w, 1.3, x)
        assert np.allclose((hs + hd).electric, ret.electric, rtol=1e-12)
        assert np.allclose((hs + hd).magnetic, ret.magnetic, rtol=1e-12)
        assert np.allclose((hs - hd).electric, adv.electric, rtol=1e-12)
        assert np.allclose((hs - hd).magnetic, adv.magnetic, rtol=1e-12)

    def test_invalid_branch_and_part_rejected(self):
        w = static_worldline((0.0, 0.0, 0.0), -10.0, 10.0)
        with pytest.raises(ValueError):
            lw_field(w, 1.0, (0.0, 5.0, 0.0, 0.0), "sideways")
        with pytest.raises(ValueError):
            lw_field(w, 1.0, (0.0, 5.0, 0.0, 0.0), "retarded", part="bound")
