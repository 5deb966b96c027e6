import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dunklriesz.polyalg import (
    DimensionMismatch,
    NonzeroRemainder,
    Polynomial,
    divide_linear,
    get_algebra,
)
from dunklriesz.qfield import Surd, SQRT2
from dunklriesz.reflection import root_system


def P(d, terms):
    return Polynomial(d, {e: Surd.of(c) for e, c in terms.items()})


def test_ring_basics():
    x = Polynomial.variable(1, 1)
    assert (x * x).terms == {(2,): 1}
    p = P(2, {(2, 0): 1, (0, 1): 1})
    assert p.eval((2, 3)) == Surd.of(7)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        Polynomial.variable(1, 1) + Polynomial.variable(1, 2)


def test_compose_linear_reflection():
    # pullback through the coordinate reflection flips x1
    x1 = Polynomial.variable(1, 2)
    sig = ((-1.0, 0.0), (0.0, 1.0))
    assert x1.compose_linear(sig).terms == {(1, 0): -1.0}


def test_degree_sentinel():
    assert Polynomial.zero(3).degree == float("-inf")
    assert P(1, {(4,): 2}).degree == 4


small_polys = st.builds(
    lambda coeffs: Polynomial(2, {e: Fraction(c) for e, c in coeffs.items() if c}),
    st.dictionaries(
        st.tuples(st.integers(0, 3), st.integers(0, 3)),
        st.integers(-9, 9),
        max_size=5,
    ),
)


@given(small_polys, small_polys, small_polys)
@settings(max_examples=60)
def test_ring_axioms(p, q, r):
    assert (p + q) * r == p * r + q * r
    assert p * q == q * p
    assert (p - q) + q == p


def test_divided_difference_examples():
    rs1 = root_system("z2", multiplicity=1)
    alg = get_algebra(rs1)
    x = alg.variable(1)
    assert alg.divided_difference(x * x, 0).is_zero()
    dd = alg.divided_difference(x, 0)
    assert dd.terms == {(0,): SQRT2}
    rs2 = root_system("z2^2", multiplicity=[1, 1])
    alg2 = get_algebra(rs2)
    p = alg2.monomial((1, 1))
    dd2 = alg2.divided_difference(p, 0)
    assert dd2.terms == {(0, 1): SQRT2}


def test_divide_linear_remainder_guard():
    # x1^2 + 1 is not divisible by x1
    p = P(1, {(2,): 1, (0,): 1})
    with pytest.raises(NonzeroRemainder):
        divide_linear(p, [Surd.of(1)], exact=True)


@pytest.mark.parametrize("kappa,expect", [(0, 1), (Fraction(1, 2), 2), (1, 3), (2, 5)])
def test_dunkl_on_x(kappa, expect):
    rs = root_system("z2", multiplicity=kappa)
    alg = get_algebra(rs)
    out = alg.dunkl(1, alg.variable(1))
    assert out.terms == {(0,): Surd.of(expect)}  # 1 + 2 kappa


def test_dunkl_classical_reduction():
    rs = root_system("z2^2", multiplicity=[0, 0])
    alg = get_algebra(rs)
    p = alg.monomial((2, 1))
    assert alg.dunkl(1, p) == alg.monomial((1, 1), 2)
    assert alg.dunkl(2, p) == alg.monomial((2, 0))


def test_dunkl_kills_constants():
    alg = get_algebra(root_system("a2", multiplicity=1))
    assert alg.dunkl(1, alg.constant(5)).is_zero()


def test_dunkl_lowers_degree_homogeneous(a2_one):
    alg = get_algebra(a2_one)
    p = alg.monomial((2, 2))
    for j in (1, 2):
        out = alg.dunkl(j, p)
        assert out.degree == 3


def test_laplacian_examples():
    rs = root_system("z2", multiplicity=Fraction(1, 2))
    alg = get_algebra(rs)
    x = alg.variable(1)
    assert alg.laplacian(x * x).terms == {(0,): Surd.of(4)}  # 2 + 4 kappa
    rs0 = root_system("z2^2", multiplicity=[0, 0])
    alg0 = get_algebra(rs0)
    q = alg0.monomial((2, 0)) + alg0.monomial((0, 2))
    assert alg0.laplacian(q).terms == {(0, 0): Surd.of(4)}
    assert alg0.laplacian(alg0.variable(1)).is_zero()


def test_exp_laplacian_examples():
    rs = root_system("z2", multiplicity=Fraction(1, 2))
    alg = get_algebra(rs)
    x = alg.variable(1)
    out = alg.exp_laplacian(x * x, Fraction(-1, 4))
    assert out == x * x - alg.constant(1)  # x^2 - (1+2k)/2 at k=1/2
    c = alg.constant(3)
    assert alg.exp_laplacian(c, Fraction(7, 2)) == c
    assert alg.exp_laplacian(x * x, 0) == x * x


@given(small_polys, st.integers(-3, 3))
@settings(max_examples=30)
def test_exp_laplacian_inverse(p, num):
    rs = root_system("z2^2", multiplicity=[Fraction(1, 2), Fraction(3, 2)])
    alg = get_algebra(rs)
    p = p.map_coefficients(Surd.of)
    s = Fraction(num, 4)
    assert alg.exp_laplacian(alg.exp_laplacian(p, s), -s) == p


@pytest.mark.parametrize("kappa", [0, Fraction(1, 2), 2])
def test_conjugated_oscillator_ground_state(kappa):
    rs = root_system("z2", multiplicity=kappa)
    alg = get_algebra(rs)
    out = alg.conjugated_oscillator(alg.constant(1))
    assert out.terms == {(0,): Surd.of(1 + 2 * Fraction(kappa))}


def test_conjugated_oscillator_degree_one():
    rs = root_system("z2", multiplicity=Fraction(1, 2))
    alg = get_algebra(rs)
    x = alg.variable(1)
    assert alg.conjugated_oscillator(x) == x.scale(Surd.of(4))  # (3+2k)x


def test_conjugated_oscillator_classical_dim():
    rs = root_system("z2^3", multiplicity=0)
    alg = get_algebra(rs)
    out = alg.conjugated_oscillator(alg.constant(1))
    assert out.terms == {(0, 0, 0): Surd.of(3)}


def test_oscillator_preserves_degree(a2_one):
    alg = get_algebra(a2_one)
    p = alg.monomial((3, 1)) + alg.monomial((1, 0))
    assert alg.conjugated_oscillator(p).degree == 4


def test_leibniz_with_invariant_factor():
    """T_j(p q) = (T_j p) q + p (T_j q) when q is G-invariant (here |x|^2)."""
    rs = root_system("z2^2", multiplicity=[Fraction(1, 2), 1])
    alg = get_algebra(rs)
    q = alg.monomial((2, 0)) + alg.monomial((0, 2))
    rng_terms = [((1, 2), Fraction(3)), ((2, 0), Fraction(-1, 2)), ((0, 1), Fraction(5))]
    p = Polynomial(2, {e: Surd.of(c) for e, c in rng_terms})
    for j in (1, 2):
        lhs = alg.dunkl(j, p * q)
        rhs = alg.dunkl(j, p) * q + p * alg.dunkl(j, q)
        assert lhs == rhs


def test_leibniz_with_invariant_factor_a2(a2_one):
    alg = get_algebra(a2_one)
    q = alg.monomial((2, 0)) + alg.monomial((0, 2))
    p = alg.monomial((2, 1)) + alg.monomial((1, 0), Fraction(-2, 3))
    for j in (1, 2):
        assert alg.dunkl(j, p * q) == alg.dunkl(j, p) * q + p * alg.dunkl(j, q)


def test_float_mode_matches_exact():
    rs_e = root_system("z2^2", multiplicity=[Fraction(1, 2), 1])
    rs_f = root_system("z2^2", multiplicity=[0.5, 1.0])
    alg_e = get_algebra(rs_e, exact=True)
    alg_f = get_algebra(rs_f, exact=False)
    p_e = alg_e.monomial((2, 2))
    p_f = alg_f.monomial((2, 2))
    out_e = alg_e.conjugated_oscillator(p_e)
    out_f = alg_f.conjugated_oscillator(p_f)
    for e, c in out_e.terms.items():
        assert out_f.terms[e] == pytest.approx(float(c), rel=1e-12)
