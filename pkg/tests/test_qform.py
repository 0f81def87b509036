import random
from itertools import product

import pytest
from hypothesis import given, strategies as st

from conftest import E, F, Q
from henselqf.fieldtower import FieldError, residue, square_class, valuation
from henselqf.oracle import exhaustive_isotropy_base, random_diag_form, witt_index_base
from henselqf.qform import (
    DiagForm,
    FormError,
    GramForm,
    NotUnimodularError,
    SingularFormError,
    build_bl_form,
    coset_decompose,
    diagonalize,
    is_anisotropic,
    is_hyperbolic,
    is_isotropic,
    is_torsion,
    lift_form,
    orderings,
    represents,
    residue_form,
    signature,
    torsion_multiple_check,
    witt_decompose,
    witt_equivalent,
    witt_equivalent_by_cosets,
    witt_index,
)


def entries(phi):
    return [str(a) for a in phi.entries]


def same_class_multiset(phi, psi):
    key = lambda f: sorted(repr(square_class(a)) for a in f.entries)  # noqa: E731
    return key(phi) == key(psi)


# ------------------------------------------------------------ diagonalize


def test_diagonalize_hyperbolic_plane_gf5():
    K = F("GF(5)")
    d = diagonalize(Q("gram[[0,1/2],[1/2,0]]", K))
    assert d.dim == 2
    assert square_class(d.entries[0] * d.entries[1]) == square_class(E("-1", K))
    assert is_isotropic(d)


def test_diagonalize_keeps_diagonal_input():
    K = F("GF(5)((t))")
    phi = Q("<1, t, 3>", K)
    assert entries(diagonalize(GramForm.from_diag(phi))) == entries(phi)


def test_diagonalize_x2_xy_y2_gf7():
    K = F("GF(7)")
    g = Q('poly"x1^2 + x1*x2 + x2^2"', K)
    d = diagonalize(g)
    assert square_class(d.entries[0] * d.entries[1]) == square_class(E("3", K))


def test_diagonalize_rejects_singular():
    K = F("GF(5)((t))")
    with pytest.raises(SingularFormError):
        diagonalize(Q("gram[[1,t],[t,t^2]]", K))


@given(st.integers(0, 2**32), st.sampled_from(["GF(5)((t))", "RCF((t))", "Qp(3)((t))", "GF(3)((t))((s))"]))
def test_diagonalize_preserves_determinant_class(seed, src):
    K = F(src)
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    S = [[None] * n for _ in range(n)]
    from henselqf.oracle import random_element

    for i in range(n):
        for j in range(i, n):
            S[i][j] = S[j][i] = random_element(K, rng) if rng.random() < 0.8 else K.zero()
    g = GramForm.from_symmetric(S, K)
    det = g.determinant()
    if det.is_zero():
        with pytest.raises(SingularFormError):
            diagonalize(g)
        return
    d = diagonalize(g)
    prod = K.one()
    for a in d.entries:
        prod = prod * a
    assert square_class(det * prod).trivial


# ------------------------------------------------------------ cosets and residues


def test_coset_decompose_example():
    K = F("GF(5)((t))")
    cd = coset_decompose(Q("<1, t, t^2, 3*t^3>", K))
    parts = {str(c): entries(f) for c, f in cd.parts}
    assert parts == {"1": ["1", "1"], "t": ["1", "3"]}
    assert same_class_multiset(cd.reassemble(), Q("<1, t, t^2, 3*t^3>", K))


def test_coset_decompose_unimodular_single_part():
    K = F("GF(5)((t))")
    cd = coset_decompose(Q("<2, 1+t>", K))
    assert len(cd.parts) == 1 and str(cd.parts[0][0]) == "1"


def test_coset_decompose_three_parities():
    K = F("GF(5)((t))((s))")
    cd = coset_decompose(Q("<t, s, t*s>", K))
    assert len(cd.parts) == 3
    assert all(f.dim == 1 for _, f in cd.parts)


@given(st.integers(0, 2**32), st.sampled_from(["GF(5)((t))", "GF(3)((t))((s))", "Qp(3)((t))", "GF(7)((t:Q))"]))
def test_coset_reassembly_matches_square_classes(seed, src):
    K = F(src)
    phi = random_diag_form(K, 4, random.Random(seed))
    cd = coset_decompose(phi)
    assert same_class_multiset(cd.reassemble(), phi)
    pars = [repr(square_class(c).parity) for c, _ in cd.parts]
    assert len(set(pars)) == len(pars)
    for _, f in cd.parts:
        assert all(not any(valuation(u)) for u in f.entries)


def test_residue_form_examples():
    r = residue_form(Q("<3+t, 2/(1+t)>", "GF(7)((t))"))
    assert str(r.field) == "GF(7)" and entries(r) == ["3", "2"]
    r = residue_form(Q("<5+3*t>", "Qp(3)((t))"))
    assert str(r.field) == "Qp(3)" and entries(r) == ["5"]
    assert entries(residue_form(Q("<1>", "GF(5)((t))"))) == ["1"]


def test_residue_form_rejects_nonunit():
    with pytest.raises(NotUnimodularError):
        residue_form(Q("<1, t>", "GF(5)((t))"))


def test_lift_form_examples():
    K = F("GF(5)((t))")
    lifted = lift_form(Q("<1, 2>", "GF(5)"), K)
    assert lifted.field == K and entries(lifted) == ["1", "2"]
    assert is_anisotropic(lifted)
    assert entries(lift_form(Q("<5>", "Qp(3)"), F("Qp(3)((t))"))) == ["5"]


@given(st.integers(0, 2**32))
def test_lift_of_anisotropic_is_anisotropic(seed):
    K = F("GF(3)((t))((s))")
    psi = random_diag_form(K.residue_field(), random.Random(seed).randint(1, 3), random.Random(seed))
    lifted = lift_form(psi, K)
    assert [str(residue(a)) for a in lifted.entries] == entries(psi)
    if is_anisotropic(psi):
        assert is_anisotropic(lifted)


# ------------------------------------------------------------ decisions


@pytest.mark.parametrize(
    "src, field, expected",
    [
        ("<1, t>", "GF(5)((t))", False),
        ("<1, t^2>", "GF(5)((t))", True),
        ("<1, -1>", "GF(3)((t))((s))", True),
        ("<1, -1>", "RCF((t))", True),
        ("<1, -1>", "Qp(5)((t))", True),
        ("<1, 1, 1>", "RCF", False),
        ("<1, 1>", "QC", True),
        ("<1>", "QC", False),
        ("<1, 2>", "GF(5)", False),
        ("<1, 1, 1>", "GF(3)", True),
    ],
)
def test_isotropy_examples(src, field, expected):
    assert is_isotropic(Q(src, field)).value is expected


def test_isotropic_witness_over_finite_field_is_valid():
    phi = Q("<1, 1>", "GF(5)")
    x = exhaustive_isotropy_base(phi)
    assert x is not None and phi.evaluate(x).is_zero()


@pytest.mark.parametrize(
    "src, field, expected",
    [
        ("<1, -1, t, -t>", "GF(5)((t))", True),
        ("<1, 1>", "GF(5)", True),
        ("<1, t>", "GF(5)((t))", False),
        ("<1, 1>", "GF(3)", False),
        ("<1, -1, 1>", "RCF", False),
        ("<1, 1>", "QC", True),
    ],
)
def test_hyperbolic_examples(src, field, expected):
    assert is_hyperbolic(Q(src, field)).value is expected


@pytest.mark.parametrize(
    "src, field, expected",
    [
        ("<1, t>", "RCF((t))", False),
        ("<1, t, 2*t^3, 3>", "GF(5)((t))", True),
        ("<1, -1>", "RCF", True),
        ("<1, -t>", "RCF((t))", False),
        ("<1, -1, t, -t>", "RCF((t))", True),
    ],
)
def test_torsion_examples(src, field, expected):
    assert is_torsion(Q(src, field)).value is expected


def test_verdict_trace_shape():
    v = is_isotropic(Q("<1, t>", "GF(5)((t))"))
    assert v.trace["version"] == "trace_v1"
    assert v.trace["op"] == "isotropy"
    assert len(v.trace["root"]["cosets"]) == 2


def test_zero_entry_rejected():
    K = F("GF(5)((t))")
    with pytest.raises(FormError):
        DiagForm((K.one(), K.zero()), K)


# ------------------------------------------------------------ Witt data


def test_witt_decompose_example():
    wd = witt_decompose(Q("<1, 1, 1, t>", "GF(5)((t))"))
    assert wd.witt_index == 1
    assert wd.anisotropic_part.dim == 2
    assert witt_equivalent(wd.anisotropic_part, Q("<1, t>", "GF(5)((t))"))


def test_witt_index_base_examples():
    phi = Q("<1, 2, 3, 4>", "GF(5)")
    assert witt_index(phi) == 2 == witt_index_base(phi)
    assert witt_index(Q("<1, 1, 1>", "GF(5)")) == 1


def test_hyperbolic_input_has_empty_anisotropic_part():
    wd = witt_decompose(Q("<1, -1, t, -t, s, -s>", "GF(3)((t))((s))"))
    assert wd.witt_index == 3 and wd.anisotropic_part.dim == 0


@pytest.mark.parametrize("field, idx", [("RCF", 1), ("QC", 1)])
def test_witt_index_other_bases(field, idx):
    assert witt_index(Q("<1, -1, 1>", field)) == idx


@given(st.integers(0, 2**32), st.sampled_from(["GF(5)((t))", "GF(3)((t))((s))", "RCF((t))", "Qp(3)((t))"]))
def test_witt_reconstruction(seed, src):
    K = F(src)
    rng = random.Random(seed)
    phi = random_diag_form(K, rng.randint(1, 5), rng)
    wd = witt_decompose(phi)
    assert 2 * wd.witt_index + wd.anisotropic_part.dim == phi.dim
    assert is_anisotropic(wd.anisotropic_part)
    if wd.anisotropic_part.dim:
        assert witt_equivalent(phi, wd.anisotropic_part)
    else:
        assert is_hyperbolic(phi)


def test_witt_equivalence_examples():
    K = F("GF(5)((t))")
    assert witt_equivalent(Q("<1, t>", K), Q("<4, 4*t>", K))
    assert not witt_equivalent(Q("<1, t>", K), Q("<2, t>", K))
    phi = Q("<1, 2*t, 3+t>", K)
    assert witt_equivalent(phi, phi)
    assert witt_equivalent_by_cosets(Q("<1, t>", K), Q("<4, 4*t>", K))
    assert not witt_equivalent_by_cosets(Q("<1, t>", K), Q("<2, t>", K))


def test_witt_equivalence_field_mismatch():
    with pytest.raises(FieldError):
        witt_equivalent(Q("<1>", "GF(5)((t))"), Q("<1>", "GF(7)((t))"))


# ------------------------------------------------------------ represents


def test_represents_examples():
    K = F("GF(5)((t))")
    assert not represents(Q("<1, 2>", K), E("t", K))
    assert represents(Q("<1, 1>", "GF(5)"), E("3", "GF(5)"))
    assert represents(Q("<2*t+1>", K), E("2*t+1", K))


def test_represents_rejects_zero():
    K = F("GF(5)((t))")
    with pytest.raises(FormError):
        represents(Q("<1, t>", K), K.zero())


@given(st.integers(0, 2**32), st.sampled_from(["GF(5)((t))", "RCF((t))((s))", "Qp(3)((t))"]))
def test_form_represents_its_entries(seed, src):
    K = F(src)
    rng = random.Random(seed)
    phi = random_diag_form(K, rng.randint(1, 4), rng)
    for a in phi.entries:
        assert represents(phi, a)


def test_represents_matches_base_enumeration():
    K = F("GF(7)")
    for a, b, c in product(range(1, 7), repeat=3):
        phi = DiagForm((K.element(a), K.element(b)), K)
        found = any((a * x * x + b * y * y) % 7 == c for x in range(7) for y in range(7))
        assert represents(phi, K.element(c)).value is found


# ------------------------------------------------------------ invariance


@given(st.integers(0, 2**32), st.sampled_from(["GF(5)((t))", "GF(3)((t))((s))", "RCF((t))"]))
def test_square_scaling_invariance(seed, src):
    K = F(src)
    rng = random.Random(seed)
    from henselqf.oracle import random_element

    phi = random_diag_form(K, rng.randint(1, 4), rng)
    s = random_element(K, rng)
    i = rng.randrange(phi.dim)
    ent = list(phi.entries)
    ent[i] = ent[i] * s * s
    psi = DiagForm(tuple(ent), K)
    for f in (is_isotropic, is_hyperbolic, is_torsion):
        assert f(phi).value == f(psi).value
    assert witt_index(phi) == witt_index(psi)
    c = random_element(K, rng)
    assert is_isotropic(phi.scale(c)).value == is_isotropic(phi).value
    assert witt_index(phi.scale(c)) == witt_index(phi)


@given(st.integers(0, 2**32), st.sampled_from(["GF(5)((t))", "GF(3)((t))((s))", "Qp(3)((t))"]))
def test_isotropy_goes_down_to_residue(seed, src):
    K = F(src)
    rng = random.Random(seed)
    ent = []
    for _ in range(rng.randint(1, 4)):
        a = random_diag_form(K, 1, rng).entries[0]
        from henselqf.fieldtower import unit_part

        ent.append(unit_part(a)[1])
    phi = DiagForm(tuple(ent), K)
    if is_isotropic(phi):
        assert is_isotropic(residue_form(phi))


# ------------------------------------------------------------ real towers


def test_signature_examples():
    K = F("RCF((t))((s))")
    assert signature(Q("<1, t, -t*s, s>", K), {"t": 1, "s": 1}) == 2
    assert signature(Q("<1, -1>", K), {"t": -1, "s": 1}) == 0
    assert signature(Q("<t>", "RCF((t))"), {"t": -1}) == -1


def test_signature_rejects_nonreal():
    with pytest.raises(FieldError):
        signature(Q("<1>", "GF(5)((t))"), {"t": 1})


def test_puiseux_orderings_forced_positive():
    K = F("RCF((t:Q))((s))")
    assert orderings(K) == [{"t": 1, "s": 1}, {"t": 1, "s": -1}]


@given(st.integers(0, 2**32), st.sampled_from(["RCF((t))", "RCF((t))((s))"]))
def test_signature_parity_and_torsion_principle(seed, src):
    K = F(src)
    rng = random.Random(seed)
    phi = random_diag_form(K, rng.randint(1, 5), rng)
    sigs = [signature(phi, o) for o in orderings(K)]
    assert all((s - phi.dim) % 2 == 0 for s in sigs)
    assert is_torsion(phi).value is all(s == 0 for s in sigs)


# ------------------------------------------------------------ constructions


def test_bl_form_examples():
    K = F("GF(5)((t))")
    bl = build_bl_form(Q("<1, 2>", K), [E("t", K)])
    assert entries(bl) == ["1", "2", "t", "2*t"]
    assert is_anisotropic(bl)
    assert entries(build_bl_form(Q("<1, 2>", K), [])) == ["1", "2"]
    K2 = F("GF(5)((t))((s))")
    bl2 = build_bl_form(Q("<1>", K2), [E("t", K2), E("s", K2)])
    assert sorted(entries(bl2)) == sorted(["1", "t", "s", "t*s"]) and is_anisotropic(bl2)


def test_bl_form_rejects_dependent_representatives():
    K = F("GF(5)((t))")
    with pytest.raises(FormError):
        build_bl_form(Q("<1>", K), [E("t", K), E("t^3", K)])


@pytest.mark.parametrize("src, gens", [("GF(3)((t))", ["t"]), ("GF(7)((t))((s))", ["t", "s"])])
def test_bl_form_realizes_u(src, gens):
    from henselqf.invariants import u_of

    K = F(src)
    bl = build_bl_form(Q("<1, -3>" if "GF(7)" in src else "<1, 1>", K), [E(g, K) for g in gens])
    assert bl.dim == u_of(K)
    assert is_anisotropic(bl)


def test_torsion_multiple_examples():
    K = F("GF(5)((t))")
    assert torsion_multiple_check(Q("<1, t>", K), E("2", K), 1, [1, 1])
    assert torsion_multiple_check(Q("<1, t>", K), E("1", K), 0, [1])
    R = F("RCF((t))")
    v = torsion_multiple_check(Q("<1>", R), E("2", R), 1, [1, 1])
    assert v and v.trace["k"] == 1


def test_torsion_multiple_rejects_bad_decomposition():
    K = F("GF(5)((t))")
    with pytest.raises(FormError):
        torsion_multiple_check(Q("<1>", K), E("3", K), 1, [1, 1])
    with pytest.raises(FormError):
        torsion_multiple_check(Q("<1>", K), E("2", K), 1, [1])


def test_base_isotropy_matches_enumeration():
    for q in (3, 5, 7, 9):
        K = F(f"GF({q})")
        rng = random.Random(q)
        for _ in range(60):
            phi = random_diag_form(K, rng.randint(1, 3), rng)
            assert is_isotropic(phi).value is (exhaustive_isotropy_base(phi) is not None)
