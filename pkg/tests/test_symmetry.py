"""Discrete symmetry operations, parity measurement, records under mapping."""

import math

import numpy as np
import pytest

from mcced.coupling import CouplingTopology, ParticleSpec, Scenario, observed_field
from mcced.dynamics import IntegratorConfig, integrate
from mcced.fields import ExternalField, FieldTensor
from mcced.symmetry import (
    PARITY_FUNCTIONALS,
    SYMMETRY_OPS,
    apply_symmetry,
    ced_parity_contrast,
    equation_of_motion_residual,
    map_event,
    map_field,
    measure_parity,
    measure_parity_detail,
    parity_table,
)
from mcced.worldline import circular_worldline, static_worldline


def _circular_pair(mode="mc-ced", p=1.0, free_field=None):
    w0 = circular_worldline(4.0, 0.3, -150.0, 150.0, phase=0.0)
    w1 = circular_worldline(4.0, 0.3, -150.0, 150.0, phase=math.pi)
    particles = (
        ParticleSpec(charge=1.0, mass=1.0, position=(4.0, 0.0, 0.0),
                     velocity=(0.0, 0.3, 0.0), worldline=w0),
        ParticleSpec(charge=-1.0, mass=1.0, position=(-4.0, 0.0, 0.0),
                     velocity=(0.0, -0.3, 0.0), worldline=w1),
    )
    if mode == "mc-ced":
        topo = CouplingTopology.mc(p)
    else:
        topo = CouplingTopology.ced(p, free_field)
    return Scenario(name="probe", particles=particles, topology=topo)


EVENTS = [
    (0.0, 9.0, 3.0, 1.5),
    (2.3, -4.0, 7.5, -2.0),
    (-1.7, 5.0, -8.0, 3.0),
]


class TestEventAndFieldMaps:
    def test_event_signs(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        assert np.array_equal(map_event("Tt", x), [-1.0, 2.0, 3.0, 4.0])
        assert np.array_equal(map_event("Tp", x), x)
        assert np.array_equal(map_event("C", x), x)
        assert np.array_equal(map_event("P", x), [1.0, -2.0, -3.0, -4.0])
        assert np.array_equal(map_event("T", x), [-1.0, 2.0, 3.0, 4.0])
        assert np.array_equal(map_event("CPT", x), [-1.0, -2.0, -3.0, -4.0])

    def test_field_signs(self):
        f = FieldTensor([1.0, 2.0, 3.0], [4.0, 5.0, 6.0])
        tt = map_field("Tt", f)
        assert np.array_equal(tt.electric, f.electric)
        assert np.array_equal(tt.magnetic, -f.magnetic)
        pp = map_field("P", f)
        assert np.array_equal(pp.electric, -f.electric)
        assert np.array_equal(pp.magnetic, f.magnetic)
        cpt = map_field("CPT", f)
        assert np.array_equal(cpt.electric, -f.electric)
        assert np.array_equal(cpt.magnetic, -f.magnetic)

    def test_unknown_op_rejected(self):
        with pytest.raises(ValueError):
            map_event("Q", np.zeros(4))
        with pytest.raises(ValueError):
            map_field("Q", FieldTensor.zero())
        with pytest.raises(ValueError):
            map_event("Tt", np.zeros(3))

    def test_maps_are_involutions(self):
        x = np.array([1.0, -2.0, 0.5, 3.0])
        f = FieldTensor([1.0, -2.0, 0.5], [0.1, 0.2, -0.3])
        for op in SYMMETRY_OPS:
            assert np.array_equal(map_event(op, map_event(op, x)), x)
            twice = map_field(op, map_field(op, f))
            assert np.array_equal(twice.electric, f.electric)
            assert np.array_equal(twice.magnetic, f.magnetic)


class TestScenarioMapping:
    def test_parity_mapped_static_pair_field(self):
        # Concrete covariance of a Coulomb configuration under spatial
        # reflection, assembled by hand on both sides.
        w0 = static_worldline((3.0, 1.0, 0.0), -100.0, 100.0)
        w1 = static_worldline((-5.0, 0.0, 2.0), -100.0, 100.0)
        particles = (
            ParticleSpec(charge=1.0, mass=1.0, position=(3.0, 1.0, 0.0),
                         velocity=(0.0, 0.0, 0.0), worldline=w0),
            ParticleSpec(charge=-2.0, mass=1.0, position=(-5.0, 0.0, 2.0),
                         velocity=(0.0, 0.0, 0.0), worldline=w1),
        )
        scn = Scenario(name="pair", particles=particles,
                       topology=CouplingTopology.mc(1.0))
        image = apply_symmetry("P", scn)
        x = np.array([0.0, 2.0, 7.0, -1.0])
        base = observed_field(scn, 0, x)
        mapped = observed_field(image, 0, map_event("P", x))
        want = map_field("P", base)
        assert np.allclose(mapped.electric, want.electric, rtol=1e-12)
        assert np.allclose(mapped.magnetic, want.magnetic, atol=1e-15)

    def test_charge_conjugation_flips_charges_only(self):
        scn = _circular_pair()
        image = apply_symmetry("C", scn)
        assert [p.charge for p in image.particles] == [-1.0, 1.0]
        assert np.array_equal(image.particles[0].position,
                              scn.particles[0].position)
        assert image.topology.p == scn.topology.p

    def test_branch_flip_ops_negate_p(self):
        scn = _circular_pair(p=1.0)
        for op in ("Tp", "T", "CPT"):
            assert apply_symmetry(op, scn).topology.p == -1.0
        for op in ("Tt", "C", "P"):
            assert apply_symmetry(op, scn).topology.p == 1.0


class TestParityMeasurement:
    def test_pinned_structural_rows(self):
        scn = _circular_pair()
        assert measure_parity("tcrf", "Tt", scn, EVENTS) == -1
        assert measure_parity("rad_part", "Tp", scn, EVENTS) == -1
        assert measure_parity("rad_part", "T", scn, EVENTS) == +1
        assert measure_parity("total", "C", scn, EVENTS) == -1

    def test_full_table_structure(self):
        # Structure of the whole table at p = +1.  The branch-weighted
        # parts are not eigenstates of any operation that flips p ("none"):
        # the image scenario puts weight on the other branch.  adv_part is
        # identically zero at p = +1, so non-flip operations compare zero
        # against zero (reported even).  "total" is NOT covariant under
        # bare time reflection Tt — only under the generalized reversal T
        # that also flips the branch: that asymmetry is the arrow.
        expected = {
            "tcrf":     {"Tt": -1, "Tp": 1, "C": -1, "P": 1, "T": -1, "CPT": 1},
            "rad_part": {"Tt": -1, "Tp": -1, "C": -1, "P": 1, "T": 1, "CPT": -1},
            "total":    {"Tt": "none", "Tp": "none", "C": -1, "P": 1,
                         "T": 1, "CPT": -1},
            "ret_part": {"Tt": "none", "Tp": "none", "C": -1, "P": 1,
                         "T": "none", "CPT": "none"},
            "adv_part": {"Tt": 1, "Tp": "none", "C": 1, "P": 1,
                         "T": "none", "CPT": "none"},
        }
        scn = _circular_pair()
        table = parity_table(scn, EVENTS)
        assert set(table) == {(f, op) for f in PARITY_FUNCTIONALS
                              for op in SYMMETRY_OPS}
        got = {f: {op: table[(f, op)] for op in SYMMETRY_OPS}
               for f in PARITY_FUNCTIONALS}
        assert got == expected

    def test_static_sources_measure_at_rounding_floor(self):
        # Static sources have vanishing tcrf up to rounding (~1e-20 from
        # the two light-cone solves); the measurement must classify it as a
        # definite sign on that degenerate data, never as a violation.
        w0 = static_worldline((0.0, 0.0, 0.0), -100.0, 100.0)
        w1 = static_worldline((10.0, 0.0, 0.0), -100.0, 100.0)
        particles = (
            ParticleSpec(charge=1.0, mass=1.0, position=(0.0, 0.0, 0.0),
                         velocity=(0.0, 0.0, 0.0), worldline=w0),
            ParticleSpec(charge=1.0, mass=1.0, position=(10.0, 0.0, 0.0),
                         velocity=(0.0, 0.0, 0.0), worldline=w1),
        )
        scn = Scenario(name="static", particles=particles,
                       topology=CouplingTopology.mc(1.0))
        d = measure_parity_detail("tcrf", "Tt", scn, EVENTS)
        assert d.scale <= 1e-18
        assert d.parity in (1, -1)

    def test_detail_reports_deviations(self):
        scn = _circular_pair()
        d = measure_parity_detail("tcrf", "Tt", scn, EVENTS)
        assert d.parity == -1
        assert d.odd_deviation <= 1e-12 * d.scale
        assert d.even_deviation > 0.1 * d.scale  # genuinely odd, not zero
        assert d.n_events == len(EVENTS)

    def test_validation(self):
        scn = _circular_pair()
        with pytest.raises(ValueError):
            measure_parity("bound_part", "Tt", scn, EVENTS)
        with pytest.raises(ValueError):
            measure_parity("tcrf", "Q", scn, EVENTS)
        with pytest.raises(ValueError):
            measure_parity("tcrf", "Tt", scn, [])


class TestCedContrast:
    def test_rejects_mc(self):
        with pytest.raises(ValueError):
            ced_parity_contrast(_circular_pair("mc-ced"), EVENTS)

    def test_free_field_breaks_strict_parity_but_family_covariant(self):
        wave = ExternalField.plane_wave(amplitude=0.02, direction=(0, 0, 1),
                                        polarization=(1, 0, 0), omega=0.35)
        scn = _circular_pair("ced", p=1.0, free_field=wave)
        contrast = ced_parity_contrast(scn, EVENTS)
        assert not contrast.degenerate
        assert contrast.strict_parity == "none"
        assert contrast.family_covariant
        assert contrast.family_deviation <= 1e-12 * contrast.scale

    def test_no_free_field_degenerates_to_odd(self):
        scn = _circular_pair("ced", p=1.0)
        contrast = ced_parity_contrast(scn, EVENTS)
        assert contrast.degenerate
        assert contrast.strict_parity == -1


class TestRecordMapping:
    def _short_run(self, p=1.0):
        particles = (
            ParticleSpec(charge=1.0, mass=1.0, position=(0.0, 0.0, 0.0),
                         velocity=(0.0, 0.05, 0.0)),
            ParticleSpec(charge=-1.0, mass=1.0, position=(10.0, 0.0, 0.0),
                         velocity=(0.0, -0.05, 0.0)),
        )
        scn = Scenario(name="short", particles=particles,
                       topology=CouplingTopology.mc(p))
        method = "nbody-retarded" if p == 1.0 else "nbody-advanced"
        cfg = IntegratorConfig(dt=0.05, t_end=5.0, method=method)
        return integrate(scn, cfg)

    def test_solved_record_sits_on_shell(self):
        rec = self._short_run()
        residual = equation_of_motion_residual(rec, stride=10)
        assert residual <= 1e-8

    def test_generalized_reversal_preserves_the_equations(self):
        # T = time reflection + branch flip maps a solved p=+1 record to a
        # solved p=-1 record; the force balance holds on the image too.
        rec = self._short_run()
        image = apply_symmetry("T", rec)
        assert image.final_scenario().topology.p == -1.0
        residual = equation_of_motion_residual(image, stride=10)
        assert residual <= 1e-6

    def test_bare_reflection_violates_the_equations(self):
        # Tt alone (no branch flip) does not solve the p=+1 equations: the
        # residual must sit at the radiative-coupling scale, far above the
        # solved floor.  This is the structural arrow-of-time statement.
        rec = self._short_run()
        solved = equation_of_motion_residual(rec, stride=10)
        image = apply_symmetry("Tt", rec)
        # Tt maps the record onto the p = +1 equations with reversed
        # kinematics; measure the same residual.
        assert image.final_scenario().topology.p == 1.0
        broken = equation_of_motion_residual(image, stride=10)
        assert broken > 1e3 * max(solved, 1e-15)

    def test_record_map_is_involution(self):
        rec = self._short_run()
        back = apply_symmetry("T", apply_symmetry("T", rec))
        for a, b in zip(back.traces, rec.traces):
            assert np.allclose(a.times, b.times, atol=1e-12)
            assert np.allclose(a.positions, b.positions, atol=1e-12)
            assert np.allclose(a.velocities, b.velocities, atol=1e-12)

    def test_non_mc_record_rejected(self):
        ext = ExternalField.uniform_magnetic(0.05, (0.0, 0.0, 1.0))
        spec = ParticleSpec(charge=1.0, mass=1.0, position=(0.0, 0.0, 0.0),
                            velocity=(0.4, 0.0, 0.0))
        scn = Scenario(name="sync", particles=(spec,),
                       topology=CouplingTopology.ced(1.0), external=ext)
        cfg = IntegratorConfig(dt=0.5, t_end=5.0, method="landau-lifshitz")
        rec = integrate(scn, cfg)
        with pytest.raises(ValueError):
            equation_of_motion_residual(rec)
