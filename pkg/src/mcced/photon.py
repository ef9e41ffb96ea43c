"""Exact single-mode photon operator algebra with color-excluded self coupling.

N "colors" of photon operators share one mode.  The defining bracket

    [a_mu^(k), a_nu^(j)^dagger] = (1 - delta^{kj}) (-eta_{mu nu})

vanishes for equal colors — a color never couples to itself — and carries
the indefinite metric eta = diag(+1,-1,-1,-1), so timelike excitations
have negative norm.  Everything downstream is built generically from this
bracket over exact rationals; the zero self-bracket is never special-cased.

Derived operators:

* ``alpha_mu = sum_j a_mu^(j) / (N-1)`` — the symmetric combination, with
  ``[alpha_mu, alpha_nu^dagger] = -eta_{mu nu} N/(N-1)``.
* ``a_rad(k)_mu = alpha_mu - a_mu^(k)`` — what color k observes: every
  color but its own.  ``sum_k a_rad(k) = alpha`` exactly.
* ``H = -omega sum_k sum_mu eta^{mu mu} a_rad(k)_mu^dagger a_mu^(k)``,
  normal-ordered and exactly Hermitian; it annihilates the vacuum and has
  ``alpha^dagger|0>`` as an omega-eigenstate.

States are unnormalized creation polynomials applied to the vacuum, with
exact rational inner products (indefinite), a time-parity grading
(-1)^(photon count), the light-cone subsidiary condition evaluated per
color with the radiative operator, and an exact positive-semidefiniteness
check for transverse physical states.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple

__all__ = [
    "METRIC_DIAGONAL",
    "Generator",
    "OperatorPolynomial",
    "FockState",
    "base_commutator",
    "commutator",
    "generator",
    "build_alpha",
    "build_a_rad",
    "build_h_ph",
    "apply_to_vacuum",
    "apply_to_state",
    "inner_product",
    "time_parity",
    "subsidiary_check",
    "transverse_positivity",
]

#: diag(eta) with signature (+,-,-,-)
METRIC_DIAGONAL = (Fraction(1), Fraction(-1), Fraction(-1), Fraction(-1))

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True, eq=True)
class Generator:
    """One photon ladder operator: color k (1-based), spacetime index mu."""

    color: int
    index: int
    dagger: bool

    def __post_init__(self):
        if not isinstance(self.color, int) or self.color < 1:
            raise ValueError(f"color must be a positive integer, got {self.color!r}")
        if self.index not in (0, 1, 2, 3):
            raise ValueError(f"spacetime index must be 0..3, got {self.index!r}")
        object.__setattr__(self, "dagger", bool(self.dagger))

    def conjugate(self) -> "Generator":
        return Generator(self.color, self.index, not self.dagger)

    def __str__(self):
        name = "ad" if self.dagger else "a"
        return f"{name}({self.color},{self.index})"


def generator(color: int, index: int, dagger: bool = False) -> "OperatorPolynomial":
    """Single ladder operator as a polynomial."""
    return OperatorPolynomial({(Generator(color, index, dagger),): _ONE})


def _sort_key(g: Generator):
    return (g.color, g.index)


def base_commutator(g1: Generator, g2: Generator) -> Fraction:
    """Defining bracket [g1, g2] — exact rational scalar.

    Nonzero only for an (a, a-dagger) pair of distinct colors and equal
    indices, where it is -eta_{mu mu}; the antisymmetric partner order
    gives the negated value; like-dagger pairs commute.
    """
    if g1.dagger == g2.dagger:
        return _ZERO
    if not g1.dagger:  # [a, ad]
        if g1.color == g2.color or g1.index != g2.index:
            return _ZERO
        return -METRIC_DIAGONAL[g1.index]
    return -base_commutator(g2, g1)


@lru_cache(maxsize=None)
def _normal_order_monomial(monomial: Tuple[Generator, ...]):
    """Normal ordering of one monomial: map canonical-monomial -> coeff.

    All daggered generators move left of undaggered ones via the bracket;
    within each block the (mutually commuting) generators are sorted, so
    keys are canonical.  Returned as a tuple of (monomial, coeff) pairs.
    """
    for i in range(len(monomial) - 1):
        g1, g2 = monomial[i], monomial[i + 1]
        if (not g1.dagger) and g2.dagger:
            swapped = monomial[:i] + (g2, g1) + monomial[i + 2:]
            out = {}
            for m, c in _normal_order_monomial(swapped):
                out[m] = out.get(m, _ZERO) + c
            bracket = base_commutator(g1, g2)
            if bracket != 0:
                contracted = monomial[:i] + monomial[i + 2:]
                for m, c in _normal_order_monomial(contracted):
                    out[m] = out.get(m, _ZERO) + bracket * c
            return tuple((m, c) for m, c in out.items() if c != 0)
    daggered = sorted((g for g in monomial if g.dagger), key=_sort_key)
    plain = sorted((g for g in monomial if not g.dagger), key=_sort_key)
    return ((tuple(daggered) + tuple(plain), _ONE),)


def _monomial_print_key(monomial: Tuple[Generator, ...]):
    return (
        len(monomial),
        tuple((not g.dagger, g.color, g.index) for g in monomial),
    )


class OperatorPolynomial:
    """Finite rational combination of ladder-operator monomials.

    Stored and compared in normal-ordered canonical form; all arithmetic
    is exact.  The empty monomial is the identity operator.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=None, *, _canonical=False):
        collected = {}
        if terms:
            for monomial, coeff in dict(terms).items():
                monomial = tuple(monomial)
                for g in monomial:
                    if not isinstance(g, Generator):
                        raise TypeError(f"monomials hold Generator entries, got {type(g).__name__}")
                coeff = Fraction(coeff)
                if coeff == 0:
                    continue
                if _canonical:
                    collected[monomial] = collected.get(monomial, _ZERO) + coeff
                else:
                    for m, c in _normal_order_monomial(monomial):
                        collected[m] = collected.get(m, _ZERO) + coeff * c
        self._terms = {m: c for m, c in collected.items() if c != 0}

    @classmethod
    def zero(cls) -> "OperatorPolynomial":
        return cls({})

    @classmethod
    def identity(cls) -> "OperatorPolynomial":
        return cls({(): _ONE})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def scalar_part(self) -> Fraction:
        """Coefficient of the identity monomial."""
        return self._terms.get((), _ZERO)

    def __add__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, _ZERO) + c
        return OperatorPolynomial(out, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, _ZERO) - c
        return OperatorPolynomial(out, _canonical=True)

    def __neg__(self):
        return OperatorPolynomial(
            {m: -c for m, c in self._terms.items()}, _canonical=True
        )

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return OperatorPolynomial(
                {m: c * Fraction(other) for m, c in self._terms.items()},
                _canonical=True,
            )
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        out = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                for m, c in _normal_order_monomial(m1 + m2):
                    out[m] = out.get(m, _ZERO) + c1 * c2 * c
        return OperatorPolynomial(out, _canonical=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.__mul__(other)
        return NotImplemented

    def conjugate(self) -> "OperatorPolynomial":
        """Hermitian conjugate: reverse each monomial and toggle daggers."""
        out = {}
        for m, c in self._terms.items():
            key = tuple(g.conjugate() for g in reversed(m))
            out[key] = out.get(key, _ZERO) + c
        return OperatorPolynomial(out)

    def __eq__(self, other):
        if not isinstance(other, OperatorPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=_monomial_print_key):
            c = self._terms[m]
            body = " ".join(str(g) for g in m) if m else "1"
            parts.append(f"({c}) {body}" if m else f"({c})")
        return " + ".join(parts)

    def __repr__(self):
        return f"OperatorPolynomial({self})"


def commutator(a: OperatorPolynomial, b: OperatorPolynomial) -> OperatorPolynomial:
    """[a, b] = ab - ba, normal-ordered, exact."""
    return a * b - b * a


def build_alpha(n_colors: int, index: int, dagger: bool = False) -> OperatorPolynomial:
    """alpha_mu = sum over colors of a_mu^(j) / (N-1)."""
    n_colors = int(n_colors)
    if n_colors < 2:
        raise ValueError(f"the algebra needs at least two colors, got {n_colors}")
    weight = Fraction(1, n_colors - 1)
    return OperatorPolynomial(
        {(Generator(j, index, dagger),): weight for j in range(1, n_colors + 1)}
    )


def build_a_rad(n_colors: int, color: int, index: int, dagger: bool = False) -> OperatorPolynomial:
    """Radiative operator for one color: alpha_mu minus its own ladder."""
    n_colors = int(n_colors)
    color = int(color)
    if n_colors < 2:
        raise ValueError(f"the algebra needs at least two colors, got {n_colors}")
    if not 1 <= color <= n_colors:
        raise ValueError(f"color must be 1..{n_colors}, got {color}")
    own = OperatorPolynomial({(Generator(color, index, dagger),): _ONE})
    return build_alpha(n_colors, index, dagger) - own


def build_h_ph(n_colors: int, omega) -> OperatorPolynomial:
    """Single-mode Hamiltonian, normal-ordered and exactly Hermitian.

    H = -omega * sum_k sum_mu eta^{mu mu} a_rad(k)_mu^dagger a_mu^(k).
    Annihilates the vacuum; alpha^dagger|0> is an omega-eigenstate.
    """
    n_colors = int(n_colors)
    if n_colors < 2:
        raise ValueError(f"the algebra needs at least two colors, got {n_colors}")
    omega = Fraction(omega)
    if omega <= 0:
        raise ValueError(f"mode frequency must be positive, got {omega}")
    total = OperatorPolynomial.zero()
    for k in range(1, n_colors + 1):
        for mu in range(4):
            raised = METRIC_DIAGONAL[mu]  # diagonal metric: eta^{mu mu} = eta_{mu mu}
            term = build_a_rad(n_colors, k, mu, dagger=True) * generator(k, mu)
            total = total + (-omega * raised) * term
    return total


# --------------------------------------------------------------------------
# states


class FockState:
    """Creation polynomial applied to the vacuum, exact and unnormalized."""

    __slots__ = ("_components",)

    def __init__(self, components=None):
        collected = {}
        if components:
            for monomial, coeff in dict(components).items():
                monomial = tuple(monomial)
                if any(not g.dagger for g in monomial):
                    raise ValueError("state monomials hold creation operators only")
                key = tuple(sorted(monomial, key=_sort_key))
                coeff = Fraction(coeff)
                if coeff != 0:
                    collected[key] = collected.get(key, _ZERO) + coeff
        self._components = {m: c for m, c in collected.items() if c != 0}

    @classmethod
    def vacuum(cls) -> "FockState":
        return cls({(): _ONE})

    @classmethod
    def zero(cls) -> "FockState":
        return cls({})

    @property
    def components(self) -> dict:
        return dict(self._components)

    def is_zero(self) -> bool:
        return not self._components

    def as_polynomial(self) -> OperatorPolynomial:
        return OperatorPolynomial(self._components, _canonical=True)

    def __add__(self, other):
        if not isinstance(other, FockState):
            return NotImplemented
        out = dict(self._components)
        for m, c in other._components.items():
            out[m] = out.get(m, _ZERO) + c
        return FockState(out)

    def __sub__(self, other):
        if not isinstance(other, FockState):
            return NotImplemented
        out = dict(self._components)
        for m, c in other._components.items():
            out[m] = out.get(m, _ZERO) - c
        return FockState(out)

    def __mul__(self, scalar):
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        return FockState(
            {m: c * Fraction(scalar) for m, c in self._components.items()}
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, FockState):
            return NotImplemented
        return self._components == other._components

    def __hash__(self):
        return hash(frozenset(self._components.items()))

    def __str__(self):
        if not self._components:
            return "0"
        parts = []
        for m in sorted(self._components, key=_monomial_print_key):
            c = self._components[m]
            body = " ".join(str(g) for g in m)
            parts.append(f"({c}) {body} |0>" if m else f"({c}) |0>")
        return " + ".join(parts)

    def __repr__(self):
        return f"FockState({self})"


def apply_to_vacuum(p: OperatorPolynomial) -> FockState:
    """P|0>: normal-order and drop every monomial that still annihilates."""
    kept = {}
    for m, c in p.terms.items():
        if any(not g.dagger for g in m):
            continue
        kept[m] = kept.get(m, _ZERO) + c
    return FockState(kept)


def apply_to_state(p: OperatorPolynomial, state: FockState) -> FockState:
    """P|s> for a creation-polynomial state."""
    return apply_to_vacuum(p * state.as_polynomial())


def inner_product(s1: FockState, s2: FockState) -> Fraction:
    """<s1|s2> by full Wick contraction — indefinite, exact."""
    bra = s1.as_polynomial().conjugate()
    ket = s2.as_polynomial()
    return (bra * ket).scalar_part()


def time_parity(state: FockState):
    """(-1)^(photon count) per homogeneous component; "mixed" otherwise."""
    counts = {len(m) for m in state._components}
    if not counts:
        return +1  # the zero state carries no grading violation
    parities = {(-1) ** (count % 2) for count in counts}
    if len(parities) > 1:
        return "mixed"
    return parities.pop()


def _as_lightlike(lam) -> Tuple[Fraction, ...]:
    lam = tuple(Fraction(x) for x in lam)
    if len(lam) != 4:
        raise ValueError(f"mode direction must have 4 components, got {len(lam)}")
    norm = lam[0] * lam[0] - lam[1] * lam[1] - lam[2] * lam[2] - lam[3] * lam[3]
    if norm != 0:
        raise ValueError(f"mode direction must be lightlike, got lambda.lambda = {norm}")
    if all(x == 0 for x in lam):
        raise ValueError("mode direction must be nonzero")
    return lam


def subsidiary_check(n_colors: int, state: FockState, lam) -> Tuple[bool, ...]:
    """Light-cone subsidiary condition per color.

    True for color k iff lambda^mu a_rad(k)_mu |state> is the zero state,
    with lambda an exact lightlike four-vector.
    """
    lam = _as_lightlike(lam)
    n_colors = int(n_colors)
    if n_colors < 2:
        raise ValueError(f"the algebra needs at least two colors, got {n_colors}")
    results = []
    for k in range(1, n_colors + 1):
        op = OperatorPolynomial.zero()
        for mu in range(4):
            if lam[mu] != 0:
                op = op + lam[mu] * build_a_rad(n_colors, k, mu)
        results.append(apply_to_state(op, state).is_zero())
    return tuple(results)


# --------------------------------------------------------------------------
# exact positivity of the physical (transverse) sector


def _is_psd_exact(gram) -> Tuple[bool, Optional[tuple]]:
    """Exact positive-semidefiniteness of a symmetric rational matrix.

    Pivoted rational Cholesky: recursively eliminate a strictly positive
    diagonal pivot; a negative diagonal is an immediate certificate, and a
    zero diagonal requires its whole row to vanish.  Returns (verdict,
    certificate index pair or None).
    """
    n = len(gram)
    active = list(range(n))
    g = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    while active:
        pivot = None
        for i in active:
            if g[i][i] > 0:
                pivot = i
                break
            if g[i][i] < 0:
                return False, (i, i)
        if pivot is None:
            # all active diagonals are zero: PSD iff all entries vanish
            for i in active:
                for j in active:
                    if g[i][j] != 0:
                        return False, (i, j)
            return True, None
        active.remove(pivot)
        d = g[pivot][pivot]
        for i in active:
            for j in active:
                g[i][j] -= g[i][pivot] * g[pivot][j] / d
    return True, None


def transverse_positivity(n_colors: int, max_photons: int = 3) -> dict:
    """Exact norm positivity of the transverse physical sector.

    The physical states are built from the *symmetric* transverse creation
    operators (alpha with spatial indices 1 and 2, the mode running along
    the 3-axis): the report enumerates every such monomial up to
    ``max_photons`` photons, verifies each passes the subsidiary condition
    for every color with lambda = (1, 0, 0, 1), and checks the exact Gram
    matrix is positive semidefinite.

    Color-resolved transverse monomials also pass the subsidiary condition
    (pure index orthogonality), but their sector is indefinite — the
    difference of two colors' transverse photons has exact negative norm.
    The report carries that certificate: positivity is a property of the
    observed symmetric combination, not of individual colors.
    """
    n_colors = int(n_colors)
    if n_colors < 2:
        raise ValueError(f"the algebra needs at least two colors, got {n_colors}")
    max_photons = int(max_photons)
    if max_photons < 1:
        raise ValueError("max_photons must be at least 1")
    lam = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))
    alphas = [build_alpha(n_colors, index, dagger=True) for index in (1, 2)]
    basis = []
    for count in range(max_photons + 1):
        for combo in itertools.combinations_with_replacement((0, 1), count):
            poly = OperatorPolynomial.identity()
            for which in combo:
                poly = alphas[which] * poly
            basis.append(apply_to_vacuum(poly))
    subsidiary_ok = all(
        all(subsidiary_check(n_colors, s, lam)) for s in basis
    )
    gram = [[inner_product(si, sj) for sj in basis] for si in basis]
    psd, certificate = _is_psd_exact(gram)
    # the color-resolved contrast: a transverse color-difference state
    # passes the subsidiary condition yet has negative norm
    difference = apply_to_vacuum(
        generator(1, 1, dagger=True) - generator(2, 1, dagger=True)
    )
    difference_norm = inner_product(difference, difference)
    difference_passes = all(subsidiary_check(n_colors, difference, lam))
    return {
        "n_colors": n_colors,
        "max_photons": max_photons,
        "dimension": len(basis),
        "subsidiary_all_pass": subsidiary_ok,
        "gram_positive_semidefinite": psd,
        "certificate": certificate,
        "color_difference_norm": difference_norm,
        "color_difference_passes_subsidiary": difference_passes,
    }
