import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from henselqf.dyadic import (
    NotFoundWithinBound,
    RatGram,
    SingularFormError,
    TameWitness,
    check_tame,
    find_tame_binary,
    normalize_pair,
    v2,
    verify_witness,
)


def test_v2():
    assert v2(12) == 2 and v2(Fraction(3, 8)) == -3 and v2(0) == float("inf")


def test_hyperbolic_plane_is_tame():
    phi = RatGram(2, {(0, 1): 1})
    w = find_tame_binary(phi, 8)
    assert isinstance(w, TameWitness)
    assert check_tame(w.c, w.d) and verify_witness(phi, w)
    assert w.d == 0


def test_norm_form_is_tame():
    phi = RatGram(2, {(0, 0): 1, (0, 1): 1, (1, 1): 1})
    w = find_tame_binary(phi, 8)
    assert isinstance(w, TameWitness)
    assert verify_witness(phi, w)
    assert v2(1 - 4 * w.d) == 0


def test_sum_of_two_squares_not_found():
    assert find_tame_binary(RatGram(2, {(0, 0): 1, (1, 1): 1}), 8) == NotFoundWithinBound(8)


def test_check_tame_examples():
    assert check_tame(1, 1)
    assert not check_tame(1, Fraction(1, 2))
    assert check_tame(1, 2)


def test_condition_ii_data_on_witness():
    phi = RatGram(3, {(0, 1): 1, (2, 2): 3})
    w = find_tame_binary(phi, 4)
    e, f = w.basis
    y = tuple(a / w.c for a in f)
    assert phi.b(e, y) == 1
    assert phi.phi(e) * phi.phi(y) == w.d


def test_rejects_singular_and_bad_bound():
    with pytest.raises(SingularFormError):
        find_tame_binary(RatGram(2, {(0, 0): 1}), 4)
    with pytest.raises(ValueError):
        find_tame_binary(RatGram(2, {(0, 1): 1}), 0)


def test_unary_form_has_no_binary_subform():
    assert isinstance(find_tame_binary(RatGram(1, {(0, 0): 3}), 4), NotFoundWithinBound)


def test_from_symmetric_convention():
    phi = RatGram.from_symmetric([[0, Fraction(1, 2)], [Fraction(1, 2), 0]])
    assert phi.coeffs == {(0, 1): 1}
    with pytest.raises(ValueError):
        RatGram.from_symmetric([[0, 1], [2, 0]])


def test_normalize_basis_pair():
    phi = RatGram(2, {(0, 1): 1})
    w = normalize_pair(phi, (1, 0), (0, 1))
    assert verify_witness(phi, w)


def test_result_serialization():
    w = find_tame_binary(RatGram(2, {(0, 1): 1}), 2)
    d = w.to_dict()
    assert d["found"] is True and len(d["basis"]) == 2
    assert NotFoundWithinBound(3).to_dict() == {"found": False, "bound": 3}


small = st.fractions(min_value=-6, max_value=6, max_denominator=4)


@given(st.lists(small, min_size=6, max_size=6))
def test_every_found_witness_is_sound(cs):
    n = 3
    keys = [(i, j) for i in range(n) for j in range(i, n)]
    phi = RatGram(n, dict(zip(keys, cs)))
    if phi.determinant() == 0:
        return
    res = find_tame_binary(phi, 2)
    if isinstance(res, TameWitness):
        assert verify_witness(phi, res)


@given(st.integers(0, 2**32))
def test_isotropic_forms_always_found(seed):
    rng = random.Random(seed)
    k = rng.randint(0, 2)
    coeffs = {(0, 1): Fraction(rng.choice([1, -1, 2, 3, Fraction(1, 2)]))}
    for i in range(k):
        coeffs[(i + 2, i + 2)] = Fraction(rng.randint(1, 9) * rng.choice([1, -1]), rng.choice([1, 2, 4]))
    phi = RatGram(2 + k, coeffs)
    res = find_tame_binary(phi, 2)
    assert isinstance(res, TameWitness) and verify_witness(phi, res)


@given(st.integers(0, 2**32))
def test_monotone_in_bound(seed):
    rng = random.Random(seed)
    cs = {(i, j): Fraction(rng.randint(-4, 4), rng.choice([1, 2])) for i in range(2) for j in range(i, 2)}
    phi = RatGram(2, cs)
    if phi.determinant() == 0:
        return
    small_res = find_tame_binary(phi, 2)
    if isinstance(small_res, TameWitness):
        for B in (3, 4):
            big = find_tame_binary(phi, B)
            assert isinstance(big, TameWitness) and verify_witness(phi, big)
            # the earlier pair stays admissible
            normalize_pair(phi, small_res.x, small_res.y)
