"""Exact-rational single-mode operator algebra: structural identities.

Everything here is exact Fraction arithmetic — assertions are equalities,
not tolerances.  Property loops (Jacobi, conjugation involution) sweep
randomized generator triples with a fixed seed.
"""

import random
from fractions import Fraction

import pytest

from mcced.photon import (
    FockState,
    Generator,
    OperatorPolynomial,
    apply_to_state,
    apply_to_vacuum,
    base_commutator,
    build_a_rad,
    build_alpha,
    build_h_ph,
    commutator,
    generator,
    inner_product,
    subsidiary_check,
    time_parity,
    transverse_positivity,
)

ETA = (Fraction(1), Fraction(-1), Fraction(-1), Fraction(-1))


class TestBaseCommutator:
    def test_cross_color_bracket(self):
        # [a^(k)_mu, a^(l)_nu^dag] = -eta_mu_nu for k != l, zero same color.
        for mu in range(4):
            for nu in range(4):
                val = base_commutator(Generator(1, mu, False),
                                      Generator(2, nu, True))
                assert val == (-ETA[mu] if mu == nu else 0)
                assert base_commutator(Generator(3, mu, False),
                                       Generator(3, nu, True)) == 0

    def test_like_operators_commute(self):
        assert base_commutator(Generator(1, 1, False), Generator(2, 2, False)) == 0
        assert base_commutator(Generator(1, 1, True), Generator(2, 2, True)) == 0

    def test_polynomial_commutator_matches(self):
        a = generator(1, 2, False)
        ad = generator(2, 2, True)
        c = commutator(a, ad)
        assert c.scalar_part() == 1  # -eta_22 = +1
        assert (c - OperatorPolynomial.identity()).is_zero()


class TestAlgebraicProperties:
    def _random_poly(self, rng, n_colors=3):
        out = OperatorPolynomial.zero()
        for _ in range(rng.randint(1, 3)):
            coeff = Fraction(rng.randint(-4, 4), rng.randint(1, 5))
            mono = OperatorPolynomial.identity() * coeff
            for _ in range(rng.randint(1, 2)):
                mono = mono * generator(rng.randint(1, n_colors),
                                        rng.randrange(4),
                                        rng.random() < 0.5)
            out = out + mono
        return out

    def test_jacobi_identity(self):
        rng = random.Random(20260817)
        for _ in range(200):
            a = self._random_poly(rng)
            b = self._random_poly(rng)
            c = self._random_poly(rng)
            j = (commutator(a, commutator(b, c))
                 + commutator(b, commutator(c, a))
                 + commutator(c, commutator(a, b)))
            assert j.is_zero()

    def test_conjugation_involution_and_antihomomorphism(self):
        rng = random.Random(7)
        for _ in range(100):
            a = self._random_poly(rng)
            b = self._random_poly(rng)
            assert (a.conjugate().conjugate() - a).is_zero()
            lhs = (a * b).conjugate()
            rhs = b.conjugate() * a.conjugate()
            assert (lhs - rhs).is_zero()

    def test_normal_ordering_is_consistent(self):
        # (a ad) and (ad a + [a, ad]) are the same element.
        a = generator(1, 3, False)
        ad = generator(2, 3, True)
        direct = a * ad
        reordered = ad * a + commutator(a, ad)
        assert (direct - reordered).is_zero()


class TestCollectiveOperators:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_alpha_bracket(self, n):
        # alpha_mu = sum_j a^(j)_mu / (n-1):
        # [alpha_mu, alpha_nu^dag] = -eta * n/(n-1)^2 * (n-1) = -eta n/(n-1).
        for mu in range(4):
            c = commutator(build_alpha(n, mu), build_alpha(n, mu, dagger=True))
            assert c.scalar_part() == -ETA[mu] * Fraction(n, n - 1)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_radiative_brackets(self, n):
        # Same color: +eta (n-2)/(n-1); cross color: -eta/(n-1).
        for mu in range(4):
            same = commutator(build_a_rad(n, 1, mu),
                              build_a_rad(n, 1, mu, dagger=True))
            assert same.scalar_part() == ETA[mu] * Fraction(n - 2, n - 1)
            cross = commutator(build_a_rad(n, 1, mu),
                               build_a_rad(n, 2, mu, dagger=True))
            assert cross.scalar_part() == -ETA[mu] * Fraction(1, n - 1)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_color_sum_of_radiative_is_alpha(self, n):
        # sum_k a_rad(k) = n*alpha - (n-1)*alpha ... = alpha  (per index).
        for mu in range(4):
            total = OperatorPolynomial.zero()
            for k in range(1, n + 1):
                total = total + build_a_rad(n, k, mu)
            assert (total - build_alpha(n, mu)).is_zero()

    def test_two_color_radiative_operators_are_null(self):
        # n = 2 is the degenerate case: same-color radiative brackets vanish
        # identically, so one-color radiative quanta are zero-norm.
        for mu in range(4):
            c = commutator(build_a_rad(2, 1, mu),
                           build_a_rad(2, 1, mu, dagger=True))
            assert c.is_zero()
        state = apply_to_vacuum(build_a_rad(2, 1, 1, dagger=True))
        assert inner_product(state, state) == 0


class TestHamiltonianAndStates:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_vacuum_annihilated(self, n):
        h = build_h_ph(n, Fraction(5, 2))
        assert apply_to_vacuum(h).is_zero()

    @pytest.mark.parametrize("n", [2, 3])
    def test_one_photon_eigenstates(self, n):
        omega = Fraction(7, 3)
        h = build_h_ph(n, omega)
        # Collective and colored one-photon states are omega-eigenstates.
        for mu in range(4):
            for op in (build_alpha(n, mu, dagger=True),
                       generator(1, mu, True)):
                state = apply_to_vacuum(op)
                h_state = apply_to_state(h, state)
                assert (h_state - omega * state).is_zero()

    def test_hamiltonian_is_hermitian(self):
        for n in (2, 3):
            h = build_h_ph(n, Fraction(3, 1))
            assert (h.conjugate() - h).is_zero()

    def test_two_photon_eigenvalue(self):
        omega = Fraction(2)
        h = build_h_ph(3, omega)
        state = apply_to_vacuum(
            build_alpha(3, 1, dagger=True) * build_alpha(3, 2, dagger=True))
        h_state = apply_to_state(h, state)
        assert (h_state - (2 * omega) * state).is_zero()

    def test_norms(self):
        # Collective one-photon norms: -eta * n/(n-1); colored radiative
        # one-photon norms: -(n-2)/(n-1) for a spatial index.
        for n in (2, 3, 4, 5):
            spatial = apply_to_vacuum(build_alpha(n, 1, dagger=True))
            assert inner_product(spatial, spatial) == Fraction(n, n - 1)
            timelike = apply_to_vacuum(build_alpha(n, 0, dagger=True))
            assert inner_product(timelike, timelike) == -Fraction(n, n - 1)
            colored = apply_to_vacuum(build_a_rad(n, 1, 1, dagger=True))
            assert inner_product(colored, colored) == -Fraction(n - 2, n - 1)


class TestTimeParityAndSubsidiary:
    def test_time_parity_counts_photon_number(self):
        # Parity of the T-image: every radiative quantum is T-odd, so the
        # grading is (-1)^(photon count) regardless of the Lorentz index.
        vac = FockState.vacuum()
        assert time_parity(vac) == +1
        one_t = apply_to_vacuum(generator(1, 0, True))
        one_s = apply_to_vacuum(generator(1, 2, True))
        assert time_parity(one_t) == -1
        assert time_parity(one_s) == -1
        two = apply_to_vacuum(generator(1, 0, True) * generator(2, 0, True))
        assert time_parity(two) == +1
        mixed = one_t + vac
        assert time_parity(mixed) == "mixed"

    @pytest.mark.parametrize("n", [2, 3])
    def test_transverse_states_pass_subsidiary(self, n):
        lam = (1, 0, 0, 1)
        for mu in (1, 2):
            state = apply_to_vacuum(build_alpha(n, mu, dagger=True))
            assert all(subsidiary_check(n, state, lam))

    @pytest.mark.parametrize("n", [2, 3])
    def test_null_combination_passes_timelike_fails(self, n):
        lam = (1, 0, 0, 1)
        null_combo = apply_to_vacuum(
            build_alpha(n, 0, dagger=True) + build_alpha(n, 3, dagger=True))
        assert all(subsidiary_check(n, null_combo, lam))
        bare_timelike = apply_to_vacuum(build_alpha(n, 0, dagger=True))
        assert not all(subsidiary_check(n, bare_timelike, lam))

    def test_subsidiary_rejects_non_lightlike(self):
        state = FockState.vacuum()
        with pytest.raises(ValueError):
            subsidiary_check(2, state, (1, 0, 0, 0))


class TestTransversePositivity:
    @pytest.mark.parametrize("n", [2, 3])
    def test_sector_is_positive(self, n):
        report = transverse_positivity(n, 3)
        assert report["dimension"] == 10
        assert report["subsidiary_all_pass"]
        assert report["gram_positive_semidefinite"]
        assert report["certificate"] is None
        assert report["color_difference_norm"] == -2
        assert report["color_difference_passes_subsidiary"]


class TestStateArithmetic:
    def test_vacuum_norm_and_orthogonality(self):
        vac = FockState.vacuum()
        assert inner_product(vac, vac) == 1
        one = apply_to_vacuum(generator(1, 1, True))
        assert inner_product(vac, one) == 0

    def test_annihilator_on_vacuum(self):
        assert apply_to_vacuum(generator(1, 1, False)).is_zero()

    def test_state_linear_combinations(self):
        a = apply_to_vacuum(generator(1, 1, True))
        b = apply_to_vacuum(generator(2, 2, True))
        s = a + Fraction(2, 3) * b
        # <s|s> = <a|a> + 4/9 <b|b>; cross terms vanish (different slots).
        expected = inner_product(a, a) + Fraction(4, 9) * inner_product(b, b)
        assert inner_product(s, s) == expected
        assert ((s - a) - Fraction(2, 3) * b).is_zero()
