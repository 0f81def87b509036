"""Quadratic forms over henselian towers with residue characteristic not 2.

Every decision reduces a regular diagonal form to residue forms one valuation
level at a time.  Entries are grouped by the class of their value modulo 2vK;
each group is a coset representative times a unimodular form, and the form is
anisotropic / hyperbolic / torsion exactly when every residue form is.  At the
bottom of the chain the base field rules take over (finite, real closed,
quadratically closed).
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Any

from .fieldtower import (
    Element,
    FieldDesc,
    FieldError,
    FiniteField,
    QuadClosed,
    RealClosed,
    base_is_square,
    base_value,
    coset_representative,
    leading_coefficient,
    lift,
    parity,
    residue,
    square_class,
    unit_part,
    valuation,
)

TRACE_VERSION = "trace_v1"


class FormError(ValueError):
    """Malformed form input (zero diagonal entry, field mismatch, ...)."""


class SingularFormError(FormError):
    """The symmetric matrix of the form has determinant zero."""


class NotUnimodularError(FormError):
    """An entry has nonzero valuation where a unit was required."""


# ---------------------------------------------------------------- form types


@dataclass(frozen=True)
class DiagForm:
    """``<a1, ..., an>`` over ``field``; all entries nonzero."""

    entries: tuple
    field: FieldDesc

    def __post_init__(self):
        entries = tuple(self.field.element(a) for a in self.entries)
        for a in entries:
            if a.is_zero():
                raise FormError("zero diagonal entry: the form is not regular")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def __str__(self):
        from .dsl import render_form

        return render_form(self)

    def perp(self, other: "DiagForm") -> "DiagForm":
        _same_field(self, other)
        return DiagForm(self.entries + other.entries, self.field)

    def scale(self, c) -> "DiagForm":
        c = self.field.element(c)
        return DiagForm(tuple(c * a for a in self.entries), self.field)

    def __neg__(self):
        return self.scale(-1)

    def times(self, m: int) -> "DiagForm":
        """The m-fold orthogonal sum ``m x phi``."""
        return DiagForm(self.entries * m, self.field)

    def evaluate(self, x) -> Element:
        K = self.field
        total = K.zero()
        for a, xi in zip(self.entries, x):
            xi = K.element(xi)
            total = total + a * xi * xi
        return total

    def determinant(self) -> Element:
        d = self.field.one()
        for a in self.entries:
            d = d * a
        return d


@dataclass(frozen=True)
class GramForm:
    """``sum_{i<=j} c_ij X_i X_j``; ``coeffs`` maps 0-based ``(i, j)``, ``i <= j``."""

    n: int
    coeffs: dict
    field: FieldDesc

    def __post_init__(self):
        K = self.field
        clean = {}
        for (i, j), c in self.coeffs.items():
            if not (0 <= i <= j < self.n):
                raise FormError(f"coefficient index {(i, j)} outside upper triangle of size {self.n}")
            c = K.element(c)
            if not c.is_zero():
                clean[(i, j)] = c
        object.__setattr__(self, "coeffs", clean)

    def __str__(self):
        from .dsl import render_form

        return render_form(self)

    @classmethod
    def from_symmetric(cls, S, field: FieldDesc) -> "GramForm":
        """From the symmetric matrix ``S`` with ``phi = X S X^t``."""
        n = len(S)
        coeffs = {}
        for i in range(n):
            if len(S[i]) != n:
                raise FormError("Gram matrix must be square")
            for j in range(i, n):
                a, b = field.element(S[i][j]), field.element(S[j][i])
                if a != b:
                    raise FormError(f"Gram matrix not symmetric at {(i, j)}")
                coeffs[(i, j)] = a if i == j else a + b
        return cls(n, coeffs, field)

    @classmethod
    def from_diag(cls, phi: DiagForm) -> "GramForm":
        return cls(phi.dim, {(i, i): a for i, a in enumerate(phi.entries)}, phi.field)

    def symmetric_matrix(self) -> list[list[Element]]:
        K = self.field
        half = K.element(2).inverse()
        S = [[K.zero() for _ in range(self.n)] for _ in range(self.n)]
        for (i, j), c in self.coeffs.items():
            if i == j:
                S[i][i] = c
            else:
                S[i][j] = S[j][i] = c * half
        return S

    def evaluate(self, x) -> Element:
        K = self.field
        x = [K.element(v) for v in x]
        total = K.zero()
        for (i, j), c in self.coeffs.items():
            total = total + c * x[i] * x[j]
        return total

    def polar(self, x, y) -> Element:
        """``b(x, y) = phi(x + y) - phi(x) - phi(y)``."""
        K = self.field
        x = [K.element(v) for v in x]
        y = [K.element(v) for v in y]
        total = K.zero()
        for (i, j), c in self.coeffs.items():
            if i == j:
                total = total + 2 * c * x[i] * y[i]
            else:
                total = total + c * (x[i] * y[j] + x[j] * y[i])
        return total

    def determinant(self) -> Element:
        return _det(self.symmetric_matrix(), self.field)


def _same_field(*forms):
    fields = {f.field for f in forms}
    if len(fields) != 1:
        raise FieldError("forms over different fields: " + ", ".join(sorted(map(str, fields))))


def _det(M, K: FieldDesc) -> Element:
    M = [row[:] for row in M]
    n = len(M)
    det = K.one()
    for c in range(n):
        piv = next((r for r in range(c, n) if not M[r][c].is_zero()), None)
        if piv is None:
            return K.zero()
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c]
        inv = M[c][c].inverse()
        for r in range(c + 1, n):
            if not M[r][c].is_zero():
                f = M[r][c] * inv
                M[r] = [M[r][k] - f * M[c][k] for k in range(n)]
    return det


# ---------------------------------------------------------------- verdicts


@dataclass
class Verdict:
    """Boolean decision with optional witness and explanation trace."""

    value: bool
    witness: Any = None
    trace: dict | None = None

    def __bool__(self):
        return self.value


@dataclass(frozen=True)
class CosetDecomp:
    """``phi ~ c1 phi1 _|_ ... _|_ cr phir`` with monomial ``ci`` and unimodular ``phii``."""

    parts: tuple  # of (c, DiagForm)
    field: FieldDesc

    def reassemble(self) -> DiagForm:
        entries = []
        for c, form in self.parts:
            entries.extend(c * u for u in form.entries)
        return DiagForm(tuple(entries), self.field)


@dataclass
class WittData:
    witt_index: int
    anisotropic_part: DiagForm
    trace: dict = dc_field(default_factory=dict)


# ---------------------------------------------------------------- diagonalize


def diagonalize(g: GramForm | DiagForm) -> DiagForm:
    """Isometric diagonal form, by repeatedly splitting off a represented value.

    With ``x`` such that ``b = phi(x) != 0``, the vectors
    ``e_i - (2b)^-1 b_phi(x, e_i) x`` span the orthogonal complement of ``x``.
    """
    if isinstance(g, DiagForm):
        return g
    K = g.field
    S = g.symmetric_matrix()
    det_in = _det(S, K)
    if det_in.is_zero():
        raise SingularFormError("singular form: determinant is zero")
    entries = []
    while S:
        n = len(S)
        x, k = _represented_vector(S)
        if x is None:
            raise SingularFormError("singular form: determinant is zero")
        Sx = [sum((x[i] * S[i][j] for i in range(n) if x[i]), K.zero()) for j in range(n)]
        b = sum((Sx[j] * x[j] for j in range(n) if x[j]), K.zero())
        entries.append(b)
        binv = b.inverse()
        # basis of x-perp: e_i - (x S e_i / b) x for i != k
        basis = []
        for i in range(n):
            if i == k:
                continue
            coef = Sx[i] * binv
            basis.append([(K.one() if j == i else K.zero()) - coef * x[j] for j in range(n)])
        S = _restrict(S, basis, K)
    out = DiagForm(tuple(entries), K)
    # determinant square class is an isometry invariant
    if not square_class(det_in * out.determinant()).trivial:
        raise AssertionError("diagonalization changed the determinant class")
    return out


def _represented_vector(S):
    n = len(S)
    for i in range(n):
        if not S[i][i].is_zero():
            x = [0] * n
            x[i] = 1
            return _as_elems(x, S), i
    for i in range(n):
        for j in range(i + 1, n):
            if not S[i][j].is_zero():
                x = [0] * n
                x[i] = x[j] = 1
                return _as_elems(x, S), i
    return None, None


def _as_elems(x, S):
    K = S[0][0].field
    return [K.element(v) for v in x]


def _restrict(S, basis, K):
    n = len(S)
    SB = [[sum((S[i][j] * v[j] for j in range(n) if v[j]), K.zero()) for i in range(n)] for v in basis]
    return [[sum((u[i] * SB[b][i] for i in range(n) if u[i]), K.zero()) for b in range(len(basis))] for u in basis]


def as_diag(phi) -> DiagForm:
    return diagonalize(phi) if isinstance(phi, GramForm) else phi


# ---------------------------------------------------------------- decomposition


def coset_decompose(phi: DiagForm) -> CosetDecomp:
    """Group entries by the class of their value in vK/2vK.

    Each entry ``a`` becomes ``c * u``: ``c`` the canonical monomial of the
    parity of ``v(a)`` and ``u`` the unit part of ``a``; the leftover monomial
    ``a / (c u)`` has even exponents, hence is a square.
    """
    phi = as_diag(phi)
    K = phi.field
    groups: dict[tuple, list] = {}
    for a in phi.entries:
        par = parity(valuation(a), K)
        _, u = unit_part(a)
        groups.setdefault(par, []).append(u)
    parts = tuple(
        (coset_representative(par, K), DiagForm(tuple(us), K)) for par, us in sorted(groups.items())
    )
    return CosetDecomp(parts, K)


def residue_form(phi: DiagForm) -> DiagForm:
    """Entrywise residue of a unimodular form (top level stripped)."""
    K = phi.field
    kv = K.residue_field()
    entries = []
    for a in phi.entries:
        if any(valuation(a)):
            raise NotUnimodularError(f"entry {a} is not a unit")
        entries.append(residue(a))
    return DiagForm(tuple(entries), kv)


def lift_form(psi: DiagForm, K: FieldDesc) -> DiagForm:
    """Re-read a form over the residue field of ``K`` as constant in the top variable."""
    return DiagForm(tuple(lift(a, K) for a in psi.entries), K)


# ---------------------------------------------------------------- base rules


def _base_signs(phi: DiagForm):
    pos = sum(1 for a in phi.entries if base_value(a) > 0)
    return pos, phi.dim - pos


def _base_disc_square(phi: DiagForm) -> bool:
    """Is ``(-1)^m * prod(a_i)`` a square, m = dim // 2 (finite base)."""
    K = phi.field
    d = phi.determinant()
    if (phi.dim // 2) % 2:
        d = -d
    return base_is_square(K, base_value(d))


def _base_isotropic(phi: DiagForm) -> bool:
    b = phi.field.base
    n = phi.dim
    if isinstance(b, FiniteField):
        if n >= 3:
            return True
        if n == 2:
            return _base_disc_square(phi)
        return False
    if isinstance(b, RealClosed):
        pos, neg = _base_signs(phi)
        return pos > 0 and neg > 0
    if isinstance(b, QuadClosed):
        return n >= 2
    raise FieldError(f"no base rule for {b}")


def _base_hyperbolic(phi: DiagForm) -> bool:
    b = phi.field.base
    n = phi.dim
    if isinstance(b, FiniteField):
        return n % 2 == 0 and _base_disc_square(phi)
    if isinstance(b, RealClosed):
        pos, neg = _base_signs(phi)
        return pos == neg
    if isinstance(b, QuadClosed):
        return n % 2 == 0
    raise FieldError(f"no base rule for {b}")


def _base_torsion(phi: DiagForm) -> bool:
    b = phi.field.base
    if isinstance(b, RealClosed):
        pos, neg = _base_signs(phi)
        return pos == neg
    if isinstance(b, (FiniteField, QuadClosed)):
        return True
    raise FieldError(f"no base rule for {b}")


def _base_witt(phi: DiagForm) -> tuple[int, DiagForm]:
    """Witt index and an anisotropic part, from dim/discriminant/sign counts."""
    K = phi.field
    b = K.base
    n = phi.dim
    if isinstance(b, FiniteField):
        if n % 2:
            # phi ~ m H _|_ <d>,  prod(a) = (-1)^m d
            m = n // 2
            d = phi.determinant() * (-1) ** m
            return m, DiagForm((d,), K)
        if _base_hyperbolic(phi):
            return n // 2, DiagForm((), K)
        # phi ~ (m-1) H _|_ <1, x>,  prod(a) = (-1)^(m-1) x
        m = n // 2
        x = phi.determinant() * (-1) ** (m - 1)
        return m - 1, DiagForm((K.one(), x), K)
    if isinstance(b, RealClosed):
        pos, neg = _base_signs(phi)
        sign = 1 if pos > neg else -1
        return min(pos, neg), DiagForm((K.element(sign),) * abs(pos - neg), K)
    if isinstance(b, QuadClosed):
        return n // 2, DiagForm((K.one(),) * (n % 2), K)
    raise FieldError(f"no base rule for {b}")


_BASE_RULES = {"isotropic": _base_isotropic, "hyperbolic": _base_hyperbolic, "torsion": _base_torsion}


# ---------------------------------------------------------------- recursion


def _decide(phi: DiagForm, prop: str) -> tuple[bool, dict]:
    K = phi.field
    if K.depth == 0:
        value = _BASE_RULES[prop](phi)
        return value, {"field": str(K), "form": str(phi), "base_rule": str(K.base), prop: value}
    cosets = []
    verdicts = []
    for c, unimod in coset_decompose(phi).parts:
        res = residue_form(unimod)
        v, sub = _decide(res, prop)
        verdicts.append(v)
        cosets.append({"c": str(c), "residue_form": str(res), prop: v, "sub": sub})
    # isotropic iff some residue form is; hyperbolic/torsion iff all are
    value = any(verdicts) if prop == "isotropic" else all(verdicts)
    return value, {"field": str(K), "form": str(phi), prop: value, "cosets": cosets}


def _wrap_trace(op: str, trace: dict) -> dict:
    return {"version": TRACE_VERSION, "op": op, "root": trace}


def is_isotropic(phi) -> Verdict:
    phi = as_diag(phi)
    value, trace = _decide(phi, "isotropic")
    return Verdict(value, None, _wrap_trace("isotropy", trace))


def is_anisotropic(phi) -> bool:
    return not is_isotropic(phi).value


def is_hyperbolic(phi) -> Verdict:
    phi = as_diag(phi)
    value, trace = _decide(phi, "hyperbolic")
    return Verdict(value, None, _wrap_trace("hyperbolic", trace))


def is_torsion(phi) -> Verdict:
    phi = as_diag(phi)
    value, trace = _decide(phi, "torsion")
    return Verdict(value, None, _wrap_trace("torsion", trace))


def _witt(phi: DiagForm) -> tuple[int, DiagForm, dict]:
    K = phi.field
    if K.depth == 0:
        idx, anis = _base_witt(phi)
        return idx, anis, {"field": str(K), "form": str(phi), "witt_index": idx, "anisotropic": str(anis)}
    total = 0
    entries = []
    cosets = []
    for c, unimod in coset_decompose(phi).parts:
        res = residue_form(unimod)
        idx, anis, sub = _witt(res)
        total += idx
        lifted = lift_form(anis, K)
        entries.extend(c * a for a in lifted.entries)
        cosets.append(
            {"c": str(c), "residue_form": str(res), "witt_index": idx, "lift": str(lifted), "sub": sub}
        )
    anis = DiagForm(tuple(entries), K)
    return total, anis, {"field": str(K), "form": str(phi), "witt_index": total, "cosets": cosets}


def witt_decompose(phi) -> WittData:
    """Witt index and anisotropic part; anisotropic parts of residue forms are
    lifted as top-level constants and rescaled by their coset representative."""
    phi = as_diag(phi)
    idx, anis, trace = _witt(phi)
    return WittData(idx, anis, _wrap_trace("witt", trace))


def witt_index(phi) -> int:
    return witt_decompose(phi).witt_index


def witt_equivalent(phi, psi) -> Verdict:
    phi, psi = as_diag(phi), as_diag(psi)
    if phi.field != psi.field:
        raise FieldError(f"field mismatch: {phi.field} vs {psi.field}")
    v = is_hyperbolic(phi.perp(-psi))
    v.trace["op"] = "equiv"
    return v


def witt_equivalent_by_cosets(phi, psi) -> bool:
    """Coset-wise criterion: for every class c in vK/2vK, the residue forms of
    the c-parts of ``phi`` and ``psi`` are Witt equivalent one level down."""
    phi, psi = as_diag(phi), as_diag(psi)
    K = phi.field
    if K != psi.field:
        raise FieldError(f"field mismatch: {phi.field} vs {psi.field}")
    if K.depth == 0:
        return _base_hyperbolic(phi.perp(-psi))
    A = {str(c): f for c, f in coset_decompose(phi).parts}
    B = {str(c): f for c, f in coset_decompose(psi).parts}
    kv = K.residue_field()
    empty = DiagForm((), kv)
    for key in set(A) | set(B):
        ra = residue_form(A[key]) if key in A else empty
        rb = residue_form(B[key]) if key in B else empty
        if not witt_equivalent_by_cosets(ra, rb):
            return False
    return True


def represents(phi, b) -> Verdict:
    """``phi`` represents ``b != 0`` iff ``phi`` is isotropic or ``phi _|_ <-b>`` is."""
    phi = as_diag(phi)
    b = phi.field.element(b)
    if b.is_zero():
        raise FormError("represents() needs b != 0; use is_isotropic for zero")
    iso = is_isotropic(phi)
    if iso.value:
        iso.trace["op"] = "represents"
        iso.trace["reason"] = "regular isotropic forms are universal"
        return iso
    v = is_isotropic(phi.perp(DiagForm((-b,), phi.field)))
    v.trace["op"] = "represents"
    return v


# ---------------------------------------------------------------- real towers


def orderings(K: FieldDesc) -> list[dict]:
    """All sign assignments for the variables of a real tower.

    Puiseux variables are forced positive.
    """
    if not K.is_real:
        raise FieldError(f"{K} is not a real tower")
    choices = [((1, -1) if not lv.puiseux else (1,)) for lv in K.levels]
    return [{lv.name: s for lv, s in zip(K.levels, combo)} for combo in product(*choices)]


def element_sign(a: Element, ordering: dict) -> int:
    K = a.field
    v = valuation(a)
    s = 1 if leading_coefficient(a) > 0 else -1
    for lv, e in zip(K.top_first, v):
        sign = ordering.get(lv.name, 1)
        if lv.puiseux and sign != 1:
            raise FieldError(f"Puiseux variable {lv.name} must be positive")
        if sign == -1 and int(e) % 2:
            s = -s
    return s


def signature(phi, ordering: dict) -> int:
    phi = as_diag(phi)
    K = phi.field
    if not K.is_real:
        raise FieldError(f"signature needs a real closed base, got {K.base}")
    unknown = set(ordering) - {lv.name for lv in K.levels}
    if unknown:
        raise FieldError(f"ordering names unknown variables {sorted(unknown)}")
    return sum(element_sign(a, ordering) for a in phi.entries)


# ---------------------------------------------------------------- constructions


def _f2_independent(vectors) -> bool:
    rows = [int("".join(map(str, v)) or "0", 2) for v in vectors]
    basis = []
    for r in rows:
        for b in basis:
            r = min(r, r ^ b)
        if r == 0:
            return False
        basis.append(r)
    return True


def build_bl_form(Phi: DiagForm, cs) -> DiagForm:
    """``_|_`` over all subsets I of ``{1..r}`` of ``c_I * Phi``, ``c_I = prod_{i in I} c_i``."""
    K = Phi.field
    cs = [K.element(c) for c in cs]
    if any(c.is_zero() for c in cs):
        raise FormError("coset representatives must be nonzero")
    pars = [parity(valuation(c), K) for c in cs]
    if not _f2_independent(pars):
        raise FormError("representatives are dependent in vK/2vK")
    entries = []
    for mask in range(2 ** len(cs)):
        cI = K.one()
        for i, c in enumerate(cs):
            if mask >> i & 1:
                cI = cI * c
        entries.extend(cI * a for a in Phi.entries)
    return DiagForm(tuple(entries), K)


def torsion_multiple_check(theta: DiagForm, c, k: int, squares) -> Verdict:
    """Check that ``2^k x (theta _|_ -c theta)`` is hyperbolic, given ``c`` as
    the sum of the squares of the ``2^k`` caller-supplied elements."""
    K = theta.field
    c = K.element(c)
    squares = [K.element(s) for s in squares]
    if c.is_zero():
        raise FormError("c must be nonzero")
    if len(squares) != 2**k:
        raise FormError(f"expected {2**k} square roots, got {len(squares)}")
    if sum((s * s for s in squares), K.zero()) != c:
        raise FormError("supplied squares do not sum to c")
    form = theta.perp(theta.scale(-c)).times(2**k)
    v = is_hyperbolic(form)
    v.trace["op"] = "torsion_multiple"
    v.trace["k"] = k
    return v
