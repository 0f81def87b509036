"""Brute-force verifiers, independent of the residue-form recursion.

Truncated witnesses are certified by exact evaluation.  A vector ``x`` counts as
a witness when ``v(phi(x)) > min_i v(a_i x_i^2)``: the leading terms cancel, so
the residue of the dominant part has a zero with all coordinates nonzero and, the
tower being henselian for the composite valuation, ``1 + m`` consists of squares
and the form is isotropic.  Exact zeros need not exist in the rational-function
carrier (``<1, 1 + t>`` over GF(5)((t)) is isotropic but has no zero with
rational-function coordinates), so exact zeros are a special case of this
certificate.

Replacing each coordinate of a witness by its leading monomial keeps the
certificate (the dominant terms are unchanged), so searching monomial vectors
``xi_i * t^e_i`` loses nothing.  For a target value ``m`` the eligible coordinates
are those with ``(m - v(a_i)) / 2`` on the exponent lattice inside the window; a
witness at ``m`` is a nonzero zero of the base-field form of their leading
coefficients.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import lcm

from .basefields import PrimeField
from .fieldtower import (
    Element,
    FieldDesc,
    FiniteField,
    base_value,
    leading_coefficient,
    valuation,
)
from .qform import DiagForm, is_isotropic, witt_decompose

DEFAULT_BUDGET = 2_000_000


class OracleBudgetError(RuntimeError):
    """The enumeration would exceed its budget."""


class OracleUnsupported(ValueError):
    """The oracle has no enumeration for this base field."""


# ---------------------------------------------------------------- base level


def _residue_ring(K: FieldDesc):
    if K.padic:
        return PrimeField(K.padic)
    if not isinstance(K.base, FiniteField):
        raise OracleUnsupported(f"no finite enumeration over {K.base}")
    return K.ring


def _projective_points(R, n):
    """Vectors whose first nonzero coordinate is 1."""
    elems = list(R.elements())
    one = R.one
    for lead in range(n):
        for tail in product(elems, repeat=n - lead - 1):
            yield (R.zero,) * lead + (one,) + tuple(tail)


def _eval_diag(R, coeffs, x):
    total = R.zero
    for a, xi in zip(coeffs, x):
        if not R.is_zero(xi):
            total = R.add(total, R.mul(a, R.mul(xi, xi)))
    return total


def _count_points(q, n):
    return (q**n - 1) // (q - 1)


def exhaustive_isotropy_base(phi: DiagForm, budget: int = DEFAULT_BUDGET):
    """A nonzero zero of ``phi`` over GF(q) by projective enumeration, or None."""
    K = phi.field
    if K.depth or not isinstance(K.base, FiniteField):
        raise OracleUnsupported("exhaustive_isotropy_base needs a level-free finite field")
    R = K.ring
    n = phi.dim
    if n == 0:
        return None
    if _count_points(R.q, n) > budget:
        raise OracleBudgetError(f"{_count_points(R.q, n)} projective points exceed budget {budget}")
    coeffs = [base_value(a) for a in phi.entries]
    for x in _projective_points(R, n):
        if R.is_zero(_eval_diag(R, coeffs, x)):
            return tuple(x)
    return None


@lru_cache(maxsize=65536)
def _residue_zero(R, coeffs: tuple):
    """Nonzero zero of ``sum c_i x_i^2`` over the finite ring ``R`` (memoized)."""
    for x in _projective_points(R, len(coeffs)):
        if R.is_zero(_eval_diag(R, coeffs, x)):
            return tuple(x)
    return None


def witt_index_base(phi: DiagForm, budget: int = DEFAULT_BUDGET) -> int:
    """Largest totally isotropic subspace, by depth-first search over isotropic points."""
    K = phi.field
    if K.depth or not isinstance(K.base, FiniteField):
        raise OracleUnsupported("witt_index_base needs a level-free finite field")
    R = K.ring
    n = phi.dim
    if n == 0:
        return 0
    if R.q > 7 or n > 6:
        raise OracleBudgetError("witt_index_base is limited to q <= 7 and dim <= 6")
    coeffs = [base_value(a) for a in phi.entries]
    pts = [x for x in _projective_points(R, n) if R.is_zero(_eval_diag(R, coeffs, x))]

    def bil(x, y):
        total = R.zero
        for a, xi, yi in zip(coeffs, x, y):
            total = R.add(total, R.mul(a, R.mul(xi, yi)))
        return total

    def in_span(v, basis):
        # all combinations of the (tiny) basis
        for cs in product(list(R.elements()), repeat=len(basis)):
            w = tuple(R.zero for _ in range(n))
            for c, b in zip(cs, basis):
                w = tuple(R.add(wi, R.mul(c, bi)) for wi, bi in zip(w, b))
            if w == tuple(v):
                return True
        return False

    target = n // 2
    best = 0
    visited = 0

    def dfs(chosen, cand):
        nonlocal best, visited
        best = max(best, len(chosen))
        if best == target:
            return True
        for k, y in enumerate(cand):
            visited += 1
            if visited > budget:
                raise OracleBudgetError("witt_index_base exceeded its budget")
            if in_span(y, chosen):
                continue
            rest = [z for z in cand[k + 1 :] if R.is_zero(bil(y, z))]
            if dfs(chosen + [y], rest) or best == target:
                return True
        return False

    dfs([], pts)
    return best


# ---------------------------------------------------------------- truncated search


@dataclass(frozen=True)
class TruncWindow:
    """Per value component exponent range ``[lo, hi]`` (p-adic component last)."""

    lo: int
    hi: int
    puiseux_den: int = 2

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("window needs lo <= hi")

    @classmethod
    def default(cls, phi: DiagForm) -> "TruncWindow":
        d = max(phi.dim, 1)
        return cls(-d, d)

    def doubled(self) -> "TruncWindow":
        return TruncWindow(2 * self.lo, 2 * self.hi, self.puiseux_den)


@dataclass(frozen=True)
class TruncWitness:
    x: tuple  # Elements
    target: tuple  # min_i v(a_i x_i^2)
    exact_zero: bool


def _component_steps(phi: DiagForm, w: TruncWindow):
    K = phi.field
    steps = []
    vals = [valuation(a) for a in phi.entries]
    for k, z in enumerate(K.zmask):
        if z:
            steps.append(Fraction(1))
        else:
            dens = [Fraction(v[k]).denominator for v in vals] + [w.puiseux_den]
            steps.append(Fraction(1, 2 * lcm(*dens)))
    return steps


def _grid(lo, hi, step):
    k = Fraction(lo)
    out = []
    while k <= hi:
        out.append(k)
        k += step
    return out


def certify(phi: DiagForm, x) -> TruncWitness | None:
    """Check the Hensel certificate for ``x`` by exact evaluation."""
    terms = [a * xi * xi for a, xi in zip(phi.entries, x) if not xi.is_zero()]
    if not terms:
        return None
    m = min(valuation(t) for t in terms)
    value = phi.evaluate(x)
    if value.is_zero():
        return TruncWitness(tuple(x), m, True)
    if valuation(value) > m:
        return TruncWitness(tuple(x), m, False)
    return None


def truncated_witness_search(phi: DiagForm, window: TruncWindow | None = None, budget: int = DEFAULT_BUDGET):
    """First certified witness among monomial vectors with exponents in the window.

    Targets ``m`` are scanned by size, then lexicographically; returns None when
    the window holds no witness.
    """
    K = phi.field
    R = _residue_ring(K)
    window = window or TruncWindow.default(phi)
    n = phi.dim
    if n == 0:
        return None
    steps = _component_steps(phi, window)
    vals = [tuple(Fraction(c) for c in valuation(a)) for a in phi.entries]
    lcs = [leading_coefficient(a) for a in phi.entries]
    grids = [_grid(window.lo, window.hi, s) for s in steps]
    size = 1
    for g in grids:
        size *= len(g)
    if size * n > budget:
        raise OracleBudgetError(f"window has {size * n} candidate targets, budget {budget}")
    targets = set()
    for v in vals:
        for e in product(*grids):
            targets.add(tuple(vi + 2 * ei for vi, ei in zip(v, e)))
    explored = 0
    for m in sorted(targets, key=lambda m: (max((abs(c) for c in m), default=0), m)):
        eligible = []
        for i, v in enumerate(vals):
            e = tuple((mi - vi) / 2 for mi, vi in zip(m, v))
            if all(window.lo <= ei <= window.hi and (ei / s).denominator == 1 for ei, s in zip(e, steps)):
                eligible.append((i, e))
        if len(eligible) < 2:
            continue
        explored += _count_points(R.q, len(eligible))
        if explored > budget:
            raise OracleBudgetError("residue enumeration exceeded the budget")
        xi = _residue_zero(R, tuple(lcs[i] for i, _ in eligible))
        if xi is None:
            continue
        x = [K.zero()] * n
        for (i, e), c in zip(eligible, xi):
            if R.is_zero(c):
                continue
            x[i] = _monomial(K, e, c)
        wit = certify(phi, x)
        if wit is None:
            raise AssertionError(f"monomial candidate failed its certificate: {x}")
        return wit
    return None


def _monomial(K: FieldDesc, e, c) -> Element:
    exps = e[: K.nvars]
    if K.padic:
        return K.monomial(exps, Fraction(int(c)) * Fraction(K.padic) ** int(e[-1]))
    return K.monomial(exps, 1) * K.element(c)


# ---------------------------------------------------------------- series


def series_coefficients(a: Element, order: int) -> tuple[int, list]:
    """Laurent expansion ``(v, [c_v, c_{v+1}, ...])`` to ``order`` terms, one level over GF(p)."""
    K = a.field
    if K.nvars != 1 or K.padic or not isinstance(K.ring, PrimeField):
        raise OracleUnsupported("series expansion needs GF(p)((t))")
    R = K.ring

    def dense(f):
        lo = min(e[0] for e in f)
        out = [0] * (max(e[0] for e in f) - lo + 1)
        for e, c in f.items():
            out[e[0] - lo] = c
        return lo, out

    ln, num = dense(a.num)
    ld, den = dense(a.den)
    # strip leading zeros is unnecessary: dense() starts at the lowest term
    inv0 = R.inv(den[0])
    out = []
    for k in range(order):
        c = num[k] if k < len(num) else 0
        for j in range(1, min(k, len(den) - 1) + 1):
            c = R.sub(c, R.mul(den[j], out[k - j]))
        out.append(R.mul(c, inv0))
    return ln - ld, out


def truncated_sqrt(a: Element, order: int):
    """Series ``g`` with ``g^2 = a`` modulo ``t^(v(a) + order)``, or None if impossible.

    Fails when ``v(a)`` is odd or the leading coefficient is not a square.
    """
    v, c = series_coefficients(a, order)
    R = a.field.ring
    if v % 2:
        return None
    g0 = next((x for x in R.elements() if R.mul(x, x) == c[0]), None)
    if g0 is None:
        return None
    g = [g0]
    inv2g0 = R.inv(R.mul(2, g0))
    for k in range(1, order):
        s = c[k]
        for j in range(1, k):
            s = R.sub(s, R.mul(g[j], g[k - j]))
        g.append(R.mul(s, inv2g0))
    return v // 2, g


# ---------------------------------------------------------------- agreement contract


def random_element(K: FieldDesc, rng: random.Random, max_deg: int = 2, max_shift: int = 2) -> Element:
    """Nonzero rational function: random numerator/denominator times ``t^e``."""
    R = K.ring
    if isinstance(K.base, FiniteField):
        elems = list(R.elements())
    else:
        # small rationals; for a p-adic bottom these spread over several p-adic values
        elems = [Fraction(a, b) for a in range(-9, 10) for b in (1, 2, 3)]

    def poly():
        while True:
            f = {}
            for d in range(max_deg + 1 if K.nvars else 1):
                c = rng.choice(elems)
                if not R.is_zero(c):
                    f[((d,) + (0,) * (K.nvars - 1)) if K.nvars else ()] = c
            if f:
                return f

    num, den = poly(), poly()
    a = Element(K, num, den)
    e = [rng.randint(-max_shift, max_shift) for _ in range(K.nvars)]
    return a * K.monomial(e, 1)


def random_diag_form(K: FieldDesc, dim: int, rng: random.Random) -> DiagForm:
    return DiagForm(tuple(random_element(K, rng) for _ in range(dim)), K)


@dataclass
class Agreement:
    form: str
    engine: bool
    oracle: bool
    window: tuple


def check_agreement(phi: DiagForm, window: TruncWindow | None = None) -> Agreement:
    """Engine isotropy vs. certified truncated witness, doubling the window once on a miss."""
    window = window or TruncWindow.default(phi)
    engine = is_isotropic(phi).value
    wit = truncated_witness_search(phi, window)
    if engine and wit is None:
        window = window.doubled()
        wit = truncated_witness_search(phi, window)
    return Agreement(str(phi), engine, wit is not None, (window.lo, window.hi))


def check_family(field: FieldDesc, count: int, seed: int, max_dim: int = 5, window: int | None = None):
    """Seeded random forms; returns (checked, disagreements)."""
    rng = random.Random(seed)
    bad = []
    for _ in range(count):
        dim = rng.randint(1, max_dim)
        phi = random_diag_form(field, dim, rng)
        w = TruncWindow(-window, window) if window else None
        res = check_agreement(phi, w)
        if res.engine != res.oracle:
            bad.append(res)
    return count, bad


def check_witt_base(phi: DiagForm) -> bool:
    return witt_index_base(phi) == witt_decompose(phi).witt_index


__all__ = [
    "OracleBudgetError",
    "OracleUnsupported",
    "TruncWindow",
    "TruncWitness",
    "exhaustive_isotropy_base",
    "truncated_witness_search",
    "witt_index_base",
    "certify",
    "series_coefficients",
    "truncated_sqrt",
    "random_element",
    "random_diag_form",
    "check_agreement",
    "check_family",
]
