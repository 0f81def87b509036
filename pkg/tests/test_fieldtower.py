import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from henselqf.fieldtower import (
    FieldError,
    ValuationError,
    is_square,
    leading_coefficient,
    lift,
    residue,
    square_class,
    unit_part,
    valuation,
)
from henselqf.oracle import random_element, truncated_sqrt

from conftest import E, F, elements


def test_arithmetic_examples():
    K = F("GF(5)((t))")
    assert E("(1+t) + (1-t)", K) == 2
    assert E("(1-t^2)/(1-t)", K) == E("1+t", K)
    P = F("GF(5)((t:Q))")
    assert E("t * t^(1/2)", P) == P.monomial((Fraction(3, 2),))


def test_division_by_zero():
    K = F("GF(5)((t))")
    with pytest.raises(ZeroDivisionError):
        E("t", K) / K.zero()
    with pytest.raises(ZeroDivisionError):
        K.zero().inverse()


def test_valuation_examples():
    K = F("GF(5)((t))((s))")
    assert valuation(E("t^2*s + t*s^2", K)) == (1, 2)
    assert valuation(E("3/2", "Qp(3)")) == (1,)
    assert valuation(K.one()) == (0, 0)
    with pytest.raises(ValuationError):
        valuation(K.zero())


def test_residue_examples():
    K = F("GF(7)((t))")
    assert residue(E("(3+t)/(1+2*t)", K)) == 3
    assert residue(E("t", K)) == 0
    Qt = F("Qp(3)((t))")
    r = residue(E("5+3*t", Qt))
    assert r.field == F("Qp(3)") and r == 5
    r2 = residue(r)
    assert r2.field == F("GF(3)") and r2 == 2
    with pytest.raises(ValuationError):
        residue(E("1/t", K))


def test_unit_part_examples():
    K = F("GF(5)((t))")
    m, u = unit_part(E("t^3*(1+t)", K))
    assert m == E("t^3", K) and u == E("1+t", K)
    m, u = unit_part(E("18", "Qp(3)"))
    assert m == 9 and u == 2
    P = F("GF(5)((t:Q))((s))")
    a = E("t^(1/2)*s*(2+s)", P)
    assert valuation(a) == (1, Fraction(1, 2))
    m, u = unit_part(a)
    assert m == E("t^(1/2)*s", P) and u == E("2+s", P)


def test_is_square_examples():
    assert not is_square(E("2", "GF(5)"))
    K = F("GF(5)((t))")
    a = E("t^2*(1+t)", K)
    assert is_square(a)
    # series square root to order t^5: t*(1+t)^(1/2)
    shift, g = truncated_sqrt(a, 6)
    assert shift == 1 and g[0] == 1
    for tower in ("GF(5)((t))", "RCF((s))((t))", "Qp(3)((t))"):
        assert not is_square(E("t", tower))
    assert is_square(F("GF(5)").zero())


def test_truncated_sqrt_squares_back():
    K = F("GF(5)((t))")
    a = E("t^2*(1+t)", K)
    shift, g = truncated_sqrt(a, 6)
    g_elem = sum((K.monomial((k + shift,), c) for k, c in enumerate(g)), K.zero())
    diff = g_elem * g_elem - a
    assert diff.is_zero() or valuation(diff)[0] >= 2 + 6


def test_square_class_examples():
    K = F("GF(5)((t))((s))")
    sc = square_class(E("t*s", K))
    assert sc.parity == (1, 1) and sc.square
    sc = square_class(E("2*t", "GF(5)((t))"))
    assert sc.parity == (1,) and not sc.square
    sc = square_class(E("t", "GF(5)((t:Q))"))
    assert sc.parity == (0,) and sc.square and sc.trivial
    with pytest.raises(ValuationError):
        square_class(K.zero())


def test_field_validation():
    from henselqf.fieldtower import FieldDesc, FiniteField, Level, PadicBottom

    for bad in (lambda: FiniteField(4), lambda: FiniteField(6), lambda: PadicBottom(2), lambda: PadicBottom(9)):
        with pytest.raises(FieldError):
            bad()
    with pytest.raises(FieldError):
        FieldDesc(FiniteField(5), (Level("t"), Level("t")))
    with pytest.raises(FieldError):
        FieldDesc(FiniteField(9), (Level("z"),))


def test_field_mismatch():
    with pytest.raises(FieldError):
        E("t", "GF(5)((t))") + E("t", "GF(7)((t))")


@given(elements(), st.integers(0, 2**32))
def test_field_axioms(a, seed):
    K = a.field
    rng = random.Random(seed)
    b, c = random_element(K, rng), random_element(K, rng)
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * a.inverse() == 1
    assert a - a == 0
    assert (a / b) * b == a


@given(elements(), st.integers(0, 2**32))
def test_valuation_properties(a, seed):
    b = random_element(a.field, random.Random(seed))
    va, vb = valuation(a), valuation(b)
    assert valuation(a * b) == tuple(x + y for x, y in zip(va, vb))
    s = a + b
    if not s.is_zero():
        assert valuation(s) >= min(va, vb)
        if va != vb:
            assert valuation(s) == min(va, vb)


@given(elements())
def test_unit_part_reconstruction(a):
    m, u = unit_part(a)
    assert m * u == a
    assert not any(valuation(u))
    assert m.is_monomial()


@given(elements(), st.integers(0, 2**32))
def test_square_class_multiplicative(a, seed):
    b = random_element(a.field, random.Random(seed))
    assert square_class(a * b) == square_class(a) * square_class(b)
    assert (square_class(a) == square_class(b)) == is_square(a * b)
    assert is_square(a * a)


@given(st.integers(0, 2**32))
def test_residue_is_multiplicative_on_units(seed):
    rng = random.Random(seed)
    K = F(rng.choice(["GF(7)((t))", "GF(3)((s))((t))", "Qp(5)((t))", "Qp(3)"]))

    def unit():
        return unit_part(random_element(K, rng))[1]

    a, b = unit(), unit()
    assert residue(a * b) == residue(a) * residue(b)
    assert residue(a + b) == residue(a) + residue(b)


def test_lift_then_residue():
    K = F("GF(5)((s))((t))")
    a = E("2+s", K.residue_field())
    assert residue(lift(a, K)) == a
    Q3 = F("Qp(3)")
    assert lift(E("2", "GF(3)"), Q3) == 2


@pytest.mark.parametrize("n", [0, 1, 2])
def test_square_class_count(n):
    src = "GF(5)" + "".join(f"((t{i}))" for i in range(n))
    K = F(src)
    rng = random.Random(n)
    classes = {square_class(random_element(K, rng)) if n else square_class(K.element(rng.randint(1, 4))) for _ in range(400)}
    assert len(classes) == 2 ** (n + 1)


def test_leading_coefficient_padic():
    assert leading_coefficient(E("18", "Qp(3)")) == 2
    assert leading_coefficient(E("(2+t)/(3-t)", "RCF((t))")) == Fraction(2, 3)
