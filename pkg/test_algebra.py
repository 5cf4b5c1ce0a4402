#!/usr/bin/env python3
"""Tests for F_p, F_p[x], Smith normal form and module decomposition."""
import itertools
import random

import pytest

from khtorsion.algebra import (
    FieldElement,
    ModuleDecomposition,
    Polynomial,
    PolyMatrix,
    Summand,
    check_prime,
    field_homology_dimension,
    field_matrix,
    field_nullspace,
    module_decompose,
    poly_gcd,
    snf,
)
from khtorsion.errors import ComposeNotZero, ConfigError, NonMonomialTorsion, NotHomogeneous

P = 7


def X(p=P):
    return Polynomial.x(p)


@pytest.mark.parametrize("bad", [2, 1, 0, 9, 32004, "abc", None])
def test_check_prime_rejects(bad):
    with pytest.raises(ConfigError):
        check_prime(bad)


def test_check_prime_accepts_odd_primes():
    assert check_prime(3) == 3
    assert check_prime("32003") == 32003


def test_field_element_arithmetic():
    a = FieldElement(3, P)
    assert (a * a.inverse()).value == 1
    assert (a + 5).value == 1
    assert (2 - a).value == 6
    assert FieldElement(6, P).signed() == -1
    assert str(FieldElement(-1, P)) == "-1"
    with pytest.raises(ZeroDivisionError):
        FieldElement(0, P).inverse()


def test_polynomial_normalises_trailing_zeros():
    f = Polynomial((1, 0, 0), P)
    assert f.coeffs == (1,)
    assert f.degree == 0 and f.is_unit
    assert Polynomial((0, 0), P).degree == -1
    assert not Polynomial.zero(P)


def test_polynomial_ring_operations():
    x = X()
    assert (x + 1) * (x - 1) == Polynomial((6, 0, 1), P)
    q, r = divmod(x ** 3 + 1, x + 1)
    assert q == x ** 2 - x + 1
    assert not r
    assert (x + 1).divides(x ** 3 + 1)
    assert x.shift(2) == x ** 3
    assert (x ** 3 + x + 1).truncate(2) == x + 1
    assert (x ** 4).valuation == 4 and (x ** 4).is_monomial
    assert not (x + 1).is_monomial


def test_polynomial_rejects_mixed_fields():
    with pytest.raises(ValueError):
        Polynomial.x(5) + Polynomial.x(7)


def test_polynomial_powers():
    x = X()
    assert (x + 1) ** 0 == Polynomial.one(P)
    assert (x + 1) ** 2 == x ** 2 + 2 * x + 1
    with pytest.raises(ValueError):
        x ** -1


def test_polynomial_str():
    assert str(Polynomial((1, -2, 0, 1), P)) == "x^3 - 2x + 1"
    assert str(Polynomial.zero(P)) == "0"
    assert str(-X()) == "-x"


def test_poly_gcd_is_bezout():
    x = X()
    a = (x + 1) * (x + 2) * x
    b = (x + 2) * (x - 3)
    g, u, v = poly_gcd(a, b)
    assert g == x + 2
    assert u * a + v * b == g


def test_snf_of_two_by_two():
    x = X()
    A = PolyMatrix.from_rows([[x, 1], [0, x]], P)
    sf = snf(A)
    assert sf.rank == 2
    assert sf.invariant_factors == (Polynomial.one(P), x ** 2)
    assert sf.holds_for(A)


def test_snf_zero_and_empty():
    assert snf(PolyMatrix.zeros(2, 3, P)).rank == 0
    assert snf(PolyMatrix.zeros(0, 4, P)).rank == 0


@pytest.mark.parametrize("seed", range(8))
def test_snf_random_matrices(seed):
    rng = random.Random(seed)
    rows, cols = rng.randint(1, 4), rng.randint(1, 4)
    A = PolyMatrix.from_rows(
        [[Polynomial(tuple(rng.randrange(P) for _ in range(rng.randint(0, 3))), P) for _ in range(cols)]
         for _ in range(rows)], P)
    sf = snf(A)
    assert sf.holds_for(A)
    factors = sf.invariant_factors
    for d in factors:
        assert d.leading_coefficient.value == 1
    for d, e in zip(factors, factors[1:]):
        assert d.divides(e)


def test_poly_gcd_edge_cases():
    zero = Polynomial.zero(P)
    g, u, v = poly_gcd(zero, zero)
    assert not g
    x5 = Polynomial.x(5)
    g, u, v = poly_gcd(x5 + 1, x5 - 1)
    assert g == Polynomial.one(5)
    assert u * (x5 + 1) + v * (x5 - 1) == g


def random_polynomial(rng, max_degree=3):
    return Polynomial(tuple(rng.randrange(P) for _ in range(rng.randint(0, max_degree + 1))), P)


@pytest.mark.parametrize("seed", range(20))
def test_poly_gcd_bezout_on_random_pairs(seed):
    rng = random.Random(seed)
    common = random_polynomial(rng, 2)
    a, b = random_polynomial(rng) * common, random_polynomial(rng) * common
    g, u, v = poly_gcd(a, b)
    assert u * a + v * b == g
    if g:
        assert g.leading_coefficient.value == 1
        assert g.divides(a) and g.divides(b)
        assert common.divides(g)
    else:
        assert not a and not b


def test_snf_orders_the_diagonal():
    x = X()
    sf = snf(PolyMatrix.diagonal([x ** 2, x], P))
    assert sf.invariant_factors == (x, x ** 2)


def random_matrix(rng):
    rows, cols = rng.randint(1, 4), rng.randint(1, 4)
    return PolyMatrix.from_rows([[random_polynomial(rng, 2) for _ in range(cols)] for _ in range(rows)], P)


def determinant_divisor(A, k):
    """Monic gcd of the k x k minors of A, zero when they all vanish."""
    g = Polynomial.zero(P)
    for rows in itertools.combinations(range(A.rows), k):
        for cols in itertools.combinations(range(A.cols), k):
            g = poly_gcd(g, A.submatrix(rows, cols).determinant())[0]
    return g


def check_snf(A):
    sf = snf(A)
    assert sf.holds_for(A)
    factors = sf.invariant_factors
    assert len(factors) == sf.rank
    for d in factors:
        assert d.leading_coefficient.value == 1
    for d, e in zip(factors, factors[1:]):
        assert d.divides(e)
    product = Polynomial.one(P)
    for k in range(1, min(A.rows, A.cols) + 1):
        if k <= sf.rank:
            product = product * factors[k - 1]
            assert determinant_divisor(A, k) == product
        else:
            assert not determinant_divisor(A, k)


@pytest.mark.parametrize("seed", range(20))
def test_snf_matches_determinant_divisors(seed):
    check_snf(random_matrix(random.Random(seed)))


@pytest.mark.slow
def test_snf_on_many_random_matrices():
    rng = random.Random(2024)
    for _ in range(500):
        check_snf(random_matrix(rng))


def test_poly_matrix_basics():
    x = X()
    A = PolyMatrix.from_rows([[x, 1, 0], [0, x, 2]], P)
    assert A.shape == (2, 3)
    assert PolyMatrix.identity(2, P) @ A == A
    assert A.transpose().shape == (3, 2)
    assert A.transpose()[2, 1] == Polynomial.constant(2, P)
    assert PolyMatrix.from_rows([[x, 1], [0, x]], P).determinant() == x ** 2
    with pytest.raises(IndexError):
        PolyMatrix.from_entries({(2, 0): 1}, 2, 2, P)


def test_module_decompose_drops_units():
    x = X()
    presentation = PolyMatrix.from_rows([[x ** 2, 0, 0], [0, 1, 0]], P)
    dec = module_decompose(presentation)
    assert dec.free_rank == 1
    assert dec.torsion_exponents == (2,)
    assert dec.torsion_order == 2


def test_module_decompose_grades_generators():
    presentation = PolyMatrix.from_rows([[X(), 0]], P)
    dec = module_decompose(presentation, [(0, 1), (0, -1)])
    assert sorted(dec.summands, key=lambda s: s.order) == [Summand(0, (0, -1)), Summand(1, (0, 1))]


def test_module_decompose_rejects_non_monomial_torsion():
    with pytest.raises(NonMonomialTorsion):
        module_decompose(PolyMatrix.from_rows([[X() + 1]], P))


def test_module_decompose_rejects_mixed_grades():
    x = X()
    presentation = PolyMatrix.from_rows([[x, x]], P)
    with pytest.raises(NotHomogeneous):
        module_decompose(presentation, [(0, 1), (0, 5)])


def test_times_x_power():
    dec = ModuleDecomposition((Summand(0, (0, 1)), Summand(1, (2, 5)), Summand(3, (1, 3))))
    shifted = dec.times_x_power(1)
    assert shifted.signature() == ModuleDecomposition((Summand(0, (0, -1)), Summand(2, (1, 1)))).signature()
    assert dec.by_grade()[(2, 5)].torsion_exponents == (1,)


def test_field_homology_dimension():
    dA = field_matrix({(0, 0): 1}, (2, 1), P)
    dB = field_matrix({(0, 1): 1}, (1, 2), P)
    assert field_homology_dimension(dA, dB) == 0
    assert field_homology_dimension(field_matrix({}, (2, 1), P), dB) == 1
    with pytest.raises(ComposeNotZero):
        field_homology_dimension(dA, field_matrix({(0, 0): 1}, (1, 2), P))


def test_field_nullspace():
    M = field_matrix({(0, 0): 1, (0, 1): 1}, (1, 2), P)
    (v,) = field_nullspace(M, P)
    assert (v[0] + v[1]) % P == 0 and any(v)
    assert field_nullspace(field_matrix({}, (0, 2), P), P) == [[1, 0], [0, 1]]
