#!/usr/bin/env python3
"""Tests for qec.zmod."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import primerange
from sympy.ntheory.residue_ntheory import sqrt_mod as sympy_sqrt_mod

from qec.errors import DimensionMismatchError, ModulusError
from qec.zmod import LinearSystem, Modulus, inverse, is_prime, legendre_symbol, null_space_basis, particular_solution, rank, require_odd_prime, solve_univariate_quadratic, sqrt_mod

SMALL_PRIMES = [3, 5, 7, 11, 13]


class TestModulus:
    """Test the Modulus value type."""

    def test_prime_flag(self):
        """Primality is precomputed."""
        assert Modulus(7).is_prime
        assert Modulus(7).is_odd_prime
        assert not Modulus(9).is_prime
        assert Modulus(2).is_prime and not Modulus(2).is_odd_prime

    def test_rejects_small_modulus(self):
        """m < 2 is not a modulus."""
        with pytest.raises(ModulusError):
            Modulus(1)

    def test_is_prime_matches_sympy_range(self):
        """is_prime agrees with sympy's prime list."""
        primes = {int(p) for p in primerange(2, 200)}
        assert {n for n in range(2, 200) if is_prime(n)} == primes

    def test_require_odd_prime(self):
        """Only odd primes pass through."""
        assert require_odd_prime(7) == 7
        for bad in (2, 4, 9, 1, 0):
            with pytest.raises(ModulusError, match="requires odd prime"):
                require_odd_prime(bad)


class TestInverse:
    """Test modular inverses."""

    def test_inverse(self):
        """3 * 5 = 15 = 1 mod 7."""
        assert inverse(3, 7) == 5
        assert Modulus(7).inverse(3) == 5

    def test_non_unit(self):
        """3 has no inverse mod 9."""
        with pytest.raises(ModulusError, match="not invertible"):
            inverse(3, 9)


class TestLegendreSymbol:
    """Test the Legendre symbol."""

    def test_examples(self):
        """Squares mod 7 are {1, 2, 4}."""
        assert legendre_symbol(0, 7) == 0
        assert legendre_symbol(2, 7) == 1
        assert legendre_symbol(3, 7) == -1

    def test_reduces_argument(self):
        """Negative and large arguments are reduced first."""
        assert legendre_symbol(-5, 7) == legendre_symbol(2, 7)
        assert legendre_symbol(14, 7) == 0

    @pytest.mark.parametrize("p", [int(p) for p in primerange(3, 1000)])
    def test_half_of_units_are_squares(self, p):
        """Exactly (p - 1) / 2 nonzero residues are squares."""
        assert sum(1 for x in range(1, p) if legendre_symbol(x, p) == 1) == (p - 1) // 2

    @pytest.mark.parametrize("bad", [2, 8, 9])
    def test_rejects_non_odd_prime(self, bad):
        """Even or composite moduli raise."""
        with pytest.raises(ModulusError, match="requires odd prime"):
            legendre_symbol(1, bad)


class TestSqrtMod:
    """Test square roots mod p."""

    def test_examples(self):
        """Roots come back ascending."""
        assert sqrt_mod(0, 7) == (0, 0)
        assert sqrt_mod(2, 7) == (3, 4)
        assert sqrt_mod(5, 7) is None

    def test_p_one_mod_eight(self):
        """The full Tonelli-Shanks loop runs when 8 divides p - 1."""
        assert sqrt_mod(5, 41) == (13, 28)
        assert sqrt_mod(2, 17) == (6, 11)

    @pytest.mark.parametrize("p", [3, 5, 7, 13, 17, 41, 73, 97, 113, 257])
    def test_roots_square_back(self, p):
        """Every residue gets roots whose square is the residue."""
        for x in range(p):
            roots = sqrt_mod(x, p)
            if legendre_symbol(x, p) == -1:
                assert roots is None
                continue
            assert roots is not None
            small, large = roots
            assert small <= large
            assert small * small % p == x
            assert (small + large) % p == 0

    @pytest.mark.parametrize("p", [7, 11, 13, 17, 41])
    def test_matches_sympy(self, p):
        """Root sets agree with sympy."""
        for x in range(1, p):
            ours = sqrt_mod(x, p)
            theirs = sorted(sympy_sqrt_mod(x, p, all_roots=True))
            assert (sorted(set(ours)) if ours else []) == theirs


class TestSolveUnivariateQuadratic:
    """Test a*x^2 + b*x + c = 0 over Z_p."""

    def test_examples(self):
        """Examples over Z_7."""
        assert solve_univariate_quadratic(1, 0, 5, 7) == [3, 4]
        assert solve_univariate_quadratic(1, 1, 1, 7) == [2, 4]
        assert solve_univariate_quadratic(0, 0, 0, 7) == list(range(7))

    def test_linear_and_constant(self):
        """a = 0 degrades to a linear or constant equation."""
        assert solve_univariate_quadratic(0, 3, 1, 7) == [2]
        assert solve_univariate_quadratic(0, 0, 3, 7) == []

    def test_no_roots(self):
        """x^2 = 3 has no solution mod 7."""
        assert solve_univariate_quadratic(1, 0, -3, 7) == []

    @pytest.mark.parametrize("p", [3, 5, 7, 11])
    def test_matches_brute_force(self, p):
        """Every coefficient triple agrees with direct evaluation."""
        for a, b, c in itertools.product(range(p), repeat=3):
            expected = [x for x in range(p) if (a * x * x + b * x + c) % p == 0]
            assert solve_univariate_quadratic(a, b, c, p) == expected


class TestLinearSystem:
    """Test elimination over Z_p."""

    def test_rows_are_canonicalised(self):
        """Coefficients and right-hand sides are reduced."""
        system = LinearSystem.of(7, 2, [((8, -1), 15)])
        assert system.rows == (((1, 6), 1),)

    def test_requires_prime(self):
        """Elimination needs a field."""
        with pytest.raises(ModulusError):
            LinearSystem.of(9, 2, [((1, 0), 1)])

    def test_row_length(self):
        """Rows must match the dimension."""
        with pytest.raises(DimensionMismatchError):
            LinearSystem.of(7, 3, [((1, 0), 1)])

    def test_empty_system(self):
        """No rows: the whole space, basis e_1..e_d."""
        system = LinearSystem.of(7, 3, [])
        assert particular_solution(system) == (0, 0, 0)
        assert null_space_basis(system) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]

    def test_unit_rows(self):
        """x_1 = 4, x_2 = 4 in Z_7^5 leaves e_3, e_4, e_5 free."""
        system = LinearSystem.of(7, 5, [((1, 0, 0, 0, 0), 4), ((0, 1, 0, 0, 0), 4)])
        assert particular_solution(system) == (4, 4, 0, 0, 0)
        assert null_space_basis(system) == [(0, 0, 1, 0, 0), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1)]
        assert rank(system) == 2

    def test_free_variables_zero(self):
        """The particular solution sets free variables to 0."""
        system = LinearSystem.of(7, 5, [((1, 2, 0, 0, 0), 4), ((0, 0, 1, 1, 0), 5)])
        assert particular_solution(system) == (4, 0, 5, 0, 0)

    def test_basis_of_one_row(self):
        """x + 2y + 3z = 0 over Z_5."""
        system = LinearSystem.of(5, 3, [((1, 2, 3), 0)])
        assert null_space_basis(system) == [(3, 1, 0), (2, 0, 1)]

    def test_inconsistent(self):
        """x + y = 0 and 2x + 2y = 1 has no solution."""
        system = LinearSystem.of(7, 2, [((1, 1), 0), ((2, 2), 1)])
        assert particular_solution(system) is None
        assert rank(system) == 1


@st.composite
def linear_systems(draw):
    p = draw(st.sampled_from(SMALL_PRIMES[:4]))
    d = draw(st.integers(min_value=1, max_value=5))
    row_count = draw(st.integers(min_value=0, max_value=4))
    coeff = st.integers(min_value=0, max_value=p - 1)
    rows = [(tuple(draw(st.lists(coeff, min_size=d, max_size=d))), draw(coeff)) for _ in range(row_count)]
    return LinearSystem.of(p, d, rows)


class TestLinearSystemProperties:
    """Property tests for particular solutions and null spaces."""

    @settings(max_examples=200, deadline=None)
    @given(linear_systems())
    def test_basis_solves_homogeneous_system(self, system):
        """Each basis vector solves the homogeneous system and rank + nullity = d."""
        basis = null_space_basis(system)
        homogeneous = system.homogeneous()
        assert all(homogeneous.is_solution(v) for v in basis)
        assert len(basis) + rank(system) == system.d
        assert rank(LinearSystem.of(system.p, system.d, [(v, 0) for v in basis])) == len(basis)

    @settings(max_examples=200, deadline=None)
    @given(linear_systems())
    def test_particular_solution(self, system):
        """A returned solution solves the system; None only when nothing does."""
        x = particular_solution(system)
        if x is not None:
            assert system.is_solution(x)
        elif system.p**system.d <= 1331:
            assert not any(system.is_solution(y) for y in itertools.product(range(system.p), repeat=system.d))
