"""Coupling topology and scenario assembly: observed-field composition."""

import math

import numpy as np
import pytest

from mcced.coupling import (
    CouplingTopology,
    ParticleSpec,
    Scenario,
    decompose_observed,
    observed_field,
    tcrf_field,
    total_field,
)
from mcced.fields import ExternalField, FieldTensor
from mcced.lienard import field_half_difference, field_half_sum, lw_field
from mcced.worldline import circular_worldline, static_worldline


def _static_pair(mode="mc-ced", p=1.0, free_field=None, external=None):
    w0 = static_worldline((0.0, 0.0, 0.0), -800.0, 800.0)
    w1 = static_worldline((40.0, 0.0, 0.0), -800.0, 800.0)
    particles = (
        ParticleSpec(charge=1.0, mass=1.0, position=(0.0, 0.0, 0.0),
                     velocity=(0.0, 0.0, 0.0), worldline=w0),
        ParticleSpec(charge=-2.0, mass=1.0, position=(40.0, 0.0, 0.0),
                     velocity=(0.0, 0.0, 0.0), worldline=w1),
    )
    if mode == "mc-ced":
        topo = CouplingTopology.mc(p)
    else:
        topo = CouplingTopology.ced(p, free_field)
    return Scenario(name="pair", particles=particles, topology=topo,
                    external=external)


class TestTopologyValidation:
    def test_modes(self):
        assert CouplingTopology.mc(1.0).mode == "mc-ced"
        assert CouplingTopology.ced(-1.0).mode == "ced"
        with pytest.raises(ValueError):
            CouplingTopology(mode="hybrid", p=1.0, free_field=None)

    def test_p_must_be_finite_nonzero(self):
        with pytest.raises(ValueError):
            CouplingTopology.mc(0.0)
        with pytest.raises(ValueError):
            CouplingTopology.ced(math.nan)
        assert CouplingTopology.mc(0.5).p == 0.5

    def test_mc_rejects_free_field(self):
        wave = ExternalField.plane_wave(amplitude=0.1, direction=(0, 0, 1),
                                        polarization=(1, 0, 0), omega=1.0)
        with pytest.raises(ValueError):
            CouplingTopology(mode="mc-ced", p=1.0, free_field=wave)

    def test_free_field_must_be_source_free(self):
        ext = ExternalField.uniform_electric(0.1, (1, 0, 0))
        with pytest.raises(ValueError):
            CouplingTopology.ced(1.0, free_field=ext)
        # Plane waves are admissible.
        wave = ExternalField.plane_wave(amplitude=0.1, direction=(0, 0, 1),
                                        polarization=(1, 0, 0), omega=1.0)
        assert CouplingTopology.ced(1.0, free_field=wave).free_field.kind == "plane-wave"

    def test_with_p(self):
        topo = CouplingTopology.mc(1.0).with_p(-1.0)
        assert topo.p == -1.0 and topo.mode == "mc-ced"


class TestScenarioValidation:
    def test_particle_spec_validation(self):
        with pytest.raises(ValueError):
            ParticleSpec(charge=1.0, mass=0.0, position=(0, 0, 0),
                         velocity=(0, 0, 0))
        with pytest.raises(ValueError):
            ParticleSpec(charge=1.0, mass=1.0, position=(0, 0, 0),
                         velocity=(1.0, 0, 0))
        with pytest.raises(ValueError):
            ParticleSpec(charge=math.inf, mass=1.0, position=(0, 0, 0),
                         velocity=(0, 0, 0))

    def test_mc_needs_two_particles(self):
        spec = ParticleSpec(charge=1.0, mass=1.0, position=(0, 0, 0),
                            velocity=(0, 0, 0))
        with pytest.raises(ValueError):
            Scenario(name="solo", particles=(spec,),
                     topology=CouplingTopology.mc(1.0))
        # ced admits a single particle.
        Scenario(name="solo", particles=(spec,),
                 topology=CouplingTopology.ced(1.0))

    def test_worldlines_require_assignment(self):
        spec = ParticleSpec(charge=1.0, mass=1.0, position=(0, 0, 0),
                            velocity=(0, 0, 0))
        scn = Scenario(name="solo", particles=(spec,),
                       topology=CouplingTopology.ced(1.0))
        with pytest.raises(ValueError):
            scn.worldlines()
        w = static_worldline((0.0, 0.0, 0.0), -10.0, 10.0)
        assert list(scn.with_worldlines([w]).worldlines()) == [w]
        with pytest.raises(ValueError):
            scn.with_worldlines([w, w])


class TestObservedField:
    def test_decomposition_parts_sum(self):
        scn = _static_pair("mc-ced", p=1.0)
        x = (0.0, 10.0, 5.0, -3.0)
        d = decompose_observed(scn, 0, x)
        total = d.ret_part + d.adv_part + d.rad_part
        assert np.allclose(d.total.electric, total.electric, atol=1e-16)
        assert np.allclose(d.total.magnetic, total.magnetic, atol=1e-16)

    def test_mc_excludes_own_bound_field(self):
        # Near particle 0 the observed field must stay finite and equal the
        # neighbor's Coulomb field: the probe particle never sees its own
        # bound (half-sum) field.
        scn = _static_pair("mc-ced", p=1.0)
        x3 = np.array([0.05, 0.0, 0.0])  # 0.05 from particle 0, ~40 from 1
        f = observed_field(scn, 0, (0.0, *x3))
        rho = x3 - np.array([40.0, 0.0, 0.0])
        ref = -2.0 * rho / (4.0 * math.pi * np.linalg.norm(rho) ** 3)
        assert np.allclose(f.electric, ref, rtol=1e-12)

    def test_p_weights_static_branches(self):
        # For a static pair every branch field is the same Coulomb field, so
        # observed = [(1+p)/2 + (1-p)/2] * neighbor = neighbor for every p.
        x = (0.0, 7.0, 2.0, 1.0)
        f_plus = observed_field(_static_pair("mc-ced", p=1.0), 0, x)
        f_minus = observed_field(_static_pair("mc-ced", p=-1.0), 0, x)
        f_half = observed_field(_static_pair("mc-ced", p=0.5), 0, x)
        assert np.allclose(f_plus.electric, f_minus.electric, rtol=1e-12)
        assert np.allclose(f_plus.electric, f_half.electric, rtol=1e-12)

    def test_branch_weights_on_moving_source(self):
        # With a circulating neighbor the retarded and advanced sums differ;
        # check the (1 +- p)/2 weights against directly assembled branches.
        w0 = circular_worldline(3.0, 0.4, -200.0, 200.0)
        w1 = static_worldline((25.0, 0.0, 0.0), -200.0, 200.0)
        particles = (
            ParticleSpec(charge=1.0, mass=1.0, position=(3.0, 0.0, 0.0),
                         velocity=(0.0, 0.0, 0.0), worldline=w0),
            ParticleSpec(charge=1.0, mass=1.0, position=(25.0, 0.0, 0.0),
                         velocity=(0.0, 0.0, 0.0), worldline=w1),
        )
        p = -0.75
        scn = Scenario(name="mix", particles=particles,
                       topology=CouplingTopology.mc(p))
        x = (0.0, 25.0, 0.5, 0.0)
        d = decompose_observed(scn, 1, x)
        ret = lw_field(w0, 1.0, x, "retarded")
        adv = lw_field(w0, 1.0, x, "advanced")
        assert np.allclose(d.ret_part.electric,
                           (0.5 * (1 + p) * ret).electric, rtol=1e-12)
        assert np.allclose(d.adv_part.electric,
                           (0.5 * (1 - p) * adv).electric, rtol=1e-12)
        own = field_half_difference(w1, 1.0, x)
        assert np.allclose(d.rad_part.electric, (p * own).electric,
                           atol=1e-18)

    def test_external_field_added_to_observed(self):
        ext = ExternalField.uniform_electric(0.25, (0.0, 0.0, 1.0))
        scn = _static_pair("mc-ced", external=ext)
        x = (0.0, 10.0, 5.0, -3.0)
        with_ext = observed_field(scn, 0, x)
        without = decompose_observed(scn, 0, x).total
        diff = with_ext.electric - without.electric
        assert np.allclose(diff, [0.0, 0.0, 0.25], atol=1e-15)

    def test_ced_free_field_enters_rad_part(self):
        wave = ExternalField.plane_wave(amplitude=0.05, direction=(0, 0, 1),
                                        polarization=(1, 0, 0), omega=0.7)
        scn = _static_pair("ced", p=1.0, free_field=wave)
        x = (1.3, 10.0, 5.0, -3.0)
        d = decompose_observed(scn, 0, x)
        own = field_half_difference(
            scn.particles[0].worldline, 1.0, x)
        expected = wave.field_at(np.asarray(x)) + 1.0 * own
        assert np.allclose(d.rad_part.electric, expected.electric, atol=1e-15)
        assert np.allclose(d.rad_part.magnetic, expected.magnetic, atol=1e-15)


class TestTotalAndTcrf:
    def test_total_field_rejected_for_mc(self):
        scn = _static_pair("mc-ced")
        with pytest.raises(ValueError):
            total_field(scn, (0.0, 10.0, 0.0, 0.0))

    def test_ced_total_is_sum_of_coulombs_when_static(self):
        scn = _static_pair("ced", p=1.0)
        x3 = np.array([10.0, 6.0, -2.0])
        f = total_field(scn, (0.0, *x3))
        r0 = x3
        r1 = x3 - np.array([40.0, 0.0, 0.0])
        ref = (1.0 * r0 / (4 * math.pi * np.linalg.norm(r0) ** 3)
               - 2.0 * r1 / (4 * math.pi * np.linalg.norm(r1) ** 3))
        assert np.allclose(f.electric, ref, rtol=1e-12)

    def test_total_minus_observed_is_self_bound_field(self):
        # total_field(ced) - observed_field(mc) at the same point isolates
        # the probe particle's own half-sum (bound) field.
        scn_ced = _static_pair("ced", p=1.0)
        scn_mc = _static_pair("mc-ced", p=1.0)
        x = (0.0, 3.0, 1.0, 0.5)
        diff = total_field(scn_ced, x) - observed_field(scn_mc, 0, x)
        bound = field_half_sum(scn_mc.particles[0].worldline, 1.0, x)
        assert np.allclose(diff.electric, bound.electric, rtol=1e-12)
        assert np.allclose(diff.magnetic, bound.magnetic, atol=1e-15)

    def test_tcrf_vanishes_for_static_sources(self):
        scn = _static_pair("mc-ced")
        f = tcrf_field(scn, (0.0, 9.0, 9.0, 9.0))
        assert np.allclose(f.electric, 0.0, atol=1e-14)
        assert np.allclose(f.magnetic, 0.0, atol=1e-14)

    def test_tcrf_sums_half_differences(self):
        w0 = circular_worldline(3.0, 0.4, -200.0, 200.0, phase=0.0)
        w1 = circular_worldline(3.0, 0.4, -200.0, 200.0, phase=math.pi)
        particles = (
            ParticleSpec(charge=1.0, mass=1.0, position=(3.0, 0.0, 0.0),
                         velocity=(0.0, 0.0, 0.0), worldline=w0),
            ParticleSpec(charge=-1.0, mass=1.0, position=(-3.0, 0.0, 0.0),
                         velocity=(0.0, 0.0, 0.0), worldline=w1),
        )
        scn = Scenario(name="dipole", particles=particles,
                       topology=CouplingTopology.mc(1.0))
        x = (2.0, 14.0, -8.0, 5.0)
        f = tcrf_field(scn, x)
        ref = (field_half_difference(w0, 1.0, x)
               + field_half_difference(w1, -1.0, x))
        assert np.allclose(f.electric, ref.electric, atol=1e-18)
        assert np.allclose(f.magnetic, ref.magnetic, atol=1e-18)
