"""Henselian valued field towers and exact elements.

A tower ``base((t1))...((tn))`` is described by a :class:`FieldDesc`.  Elements
are quotients of sparse Laurent polynomials in ``t1..tn`` (rational exponents at
Puiseux levels) with coefficients in the base ring; they live in the rational
function subfield, but every verdict built on top of them is about the full
henselian tower (iterated Laurent/Puiseux series, or Q_p at the bottom).

The valuation is the composite one: the value group is ordered lexicographically
with the topmost variable dominant, followed by the p-adic component when the
base is ``Qp(p)``.  :func:`residue` strips one level at a time.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

from . import laurent as lp
from .basefields import (
    ExtensionField,
    PrimeField,
    RationalField,
    factor_prime_power,
    is_prime,
    padic_valuation,
)


class FieldError(ValueError):
    """Invalid field descriptor or an element used outside its field."""


class ValuationError(ValueError):
    """Valuation-theoretic precondition violated (zero input, negative value)."""


# ---------------------------------------------------------------- descriptors


@dataclass(frozen=True)
class FiniteField:
    q: int

    def __post_init__(self):
        pk = factor_prime_power(self.q)
        if pk is None:
            raise FieldError(f"GF({self.q}): {self.q} is not a prime power")
        if pk[0] == 2:
            raise FieldError(f"GF({self.q}): even prime power (residue characteristic 2)")

    def __str__(self):
        return f"GF({self.q})"


@dataclass(frozen=True)
class RealClosed:
    def __str__(self):
        return "RCF"


@dataclass(frozen=True)
class QuadClosed:
    def __str__(self):
        return "QC"


@dataclass(frozen=True)
class PadicBottom:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise FieldError(f"Qp({self.p}): {self.p} is not prime")
        if self.p == 2:
            raise FieldError("Qp(2): dyadic bottom not supported")

    def __str__(self):
        return f"Qp({self.p})"


BaseKind = Union[FiniteField, RealClosed, QuadClosed, PadicBottom]


@dataclass(frozen=True)
class Level:
    name: str
    puiseux: bool = False

    def __str__(self):
        return f"(({self.name}:Q))" if self.puiseux else f"(({self.name}))"


@dataclass(frozen=True)
class FieldDesc:
    """Base field plus valuation levels, innermost first."""

    base: BaseKind
    levels: tuple[Level, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        names = [lv.name for lv in self.levels]
        if len(set(names)) != len(names):
            raise FieldError(f"duplicate variable names in {names}")
        if isinstance(self.base, FiniteField) and "z" in names:
            pk = factor_prime_power(self.base.q)
            if pk[1] > 1:
                raise FieldError("'z' is reserved for the generator of GF(p^k)")

    def __str__(self):
        return str(self.base) + "".join(str(lv) for lv in self.levels)

    @cached_property
    def ring(self):
        if isinstance(self.base, FiniteField):
            p, k = factor_prime_power(self.base.q)
            return PrimeField(p) if k == 1 else ExtensionField(p, k)
        return RationalField()

    @property
    def nvars(self) -> int:
        return len(self.levels)

    @property
    def padic(self) -> int | None:
        return self.base.p if isinstance(self.base, PadicBottom) else None

    @property
    def depth(self) -> int:
        """Number of valuation levels, counting the implicit p-adic one."""
        return self.nvars + (1 if self.padic else 0)

    @cached_property
    def top_first(self) -> tuple[Level, ...]:
        return tuple(reversed(self.levels))

    @cached_property
    def zmask(self) -> tuple[bool, ...]:
        """Per value-vector component: is it a Z-level (parity visible)?"""
        mask = tuple(not lv.puiseux for lv in self.top_first)
        return mask + ((True,) if self.padic else ())

    def var_index(self, name: str) -> int:
        """Position of a variable inside exponent tuples (topmost first)."""
        for i, lv in enumerate(self.top_first):
            if lv.name == name:
                return i
        raise FieldError(f"unbound variable {name!r} in {self}")

    def residue_field(self) -> "FieldDesc":
        if self.levels:
            return FieldDesc(self.base, self.levels[:-1])
        if self.padic:
            return FieldDesc(FiniteField(self.padic), ())
        raise FieldError(f"{self} carries the trivial valuation")

    def terminal(self) -> "FieldDesc":
        """The residue field at the bottom of the chain."""
        f = self
        while f.depth:
            f = f.residue_field()
        return f

    @property
    def is_real(self) -> bool:
        return isinstance(self.base, RealClosed)

    # element constructors
    def _zero_exp(self):
        return (0,) * self.nvars

    def element(self, value) -> "Element":
        if isinstance(value, Element):
            if value.field != self:
                raise FieldError(f"element of {value.field} used in {self}")
            return value
        R = self.ring
        if isinstance(value, int):
            c = R.from_int(value)
        elif isinstance(value, Fraction):
            c = R.from_fraction(value)
        elif isinstance(value, (str, float, bool)) or value is None:
            raise TypeError(f"cannot convert {value!r} to an element of {self}; parse strings with dsl.parse_element")
        else:
            c = value
        if R.is_zero(c):
            return Element(self, {}, {self._zero_exp(): R.one}, normalized=True)
        return Element(self, {self._zero_exp(): c}, {self._zero_exp(): R.one}, normalized=True)

    def zero(self) -> "Element":
        return self.element(0)

    def one(self) -> "Element":
        return self.element(1)

    def monomial(self, exps, coeff=1) -> "Element":
        """``coeff * prod t_i^e_i``; ``exps`` is topmost first."""
        exps = tuple(_norm_exp(Fraction(e)) for e in exps)
        if len(exps) != self.nvars:
            raise FieldError("exponent tuple length mismatch")
        for e, lv in zip(exps, self.top_first):
            if not lv.puiseux and not isinstance(e, int):
                raise FieldError(f"non-integer exponent {e} at Laurent level {lv.name}")
        c = self.element(coeff).num.get(self._zero_exp())
        if c is None:
            return self.zero()
        return Element(self, {exps: c}, {self._zero_exp(): self.ring.one}, normalized=True)

    def var(self, name: str) -> "Element":
        exps = [0] * self.nvars
        exps[self.var_index(name)] = 1
        return self.monomial(exps)

    def generator(self) -> "Element":
        R = self.ring
        if not isinstance(R, ExtensionField):
            raise FieldError(f"{self.base} has no named generator")
        return self.element(R.gen)

    def from_polys(self, num, den=None) -> "Element":
        if den is None:
            den = {self._zero_exp(): self.ring.one}
        return Element(self, num, den)


def _norm_exp(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


# ---------------------------------------------------------------- elements


class Element:
    """Exact element ``num / den`` of a field tower (value semantics)."""

    __slots__ = ("field", "num", "den")

    def __init__(self, field: FieldDesc, num: dict, den: dict, normalized: bool = False):
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.field = field
        if normalized:
            self.num, self.den = num, den
        else:
            self.num, self.den = _normalize(num, den, field.ring)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Element):
            if other.field != self.field:
                raise FieldError(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.element(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        R = self.field.ring
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return Element(self.field, lp.padd(self.num, other.num, R), self.den)
        num = lp.padd(lp.pmul(self.num, other.den, R), lp.pmul(other.num, self.den, R), R)
        return Element(self.field, num, lp.pmul(self.den, other.den, R))

    __radd__ = __add__

    def __neg__(self):
        return Element(self.field, lp.pneg(self.num, self.field.ring), self.den, normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        R = self.field.ring
        if not self.num or not other.num:
            return self.field.zero()
        return Element(self.field, lp.pmul(self.num, other.num, R), lp.pmul(self.den, other.den, R))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("division by zero element")
        return Element(self.field, self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by zero element")
        R = self.field.ring
        return Element(self.field, lp.pmul(self.num, other.den, R), lp.pmul(self.den, other.num, R))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.element(other)
        if not isinstance(other, Element):
            return NotImplemented
        if other.field != self.field:
            return False
        if self.den == other.den:
            return self.num == other.num
        R = self.field.ring
        return lp.pmul(self.num, other.den, R) == lp.pmul(other.num, self.den, R)

    __hash__ = None

    def is_monomial(self) -> bool:
        return len(self.num) == 1 and len(self.den) == 1

    def __repr__(self):
        from .dsl import render_element

        return f"Element({render_element(self)!r} in {self.field})"

    def __str__(self):
        from .dsl import render_element

        return render_element(self)


def _normalize(num, den, R):
    """Canonical-enough representative: monomial denominators folded into the
    numerator, shared monomial content removed, exact quotients taken, univariate
    gcds cancelled, and the denominator's lex-minimal coefficient made 1."""
    if not num:
        n = len(next(iter(den)))
        return {}, {(0,) * n: R.one}
    if len(den) == 1:
        (de, dc), = den.items()
        inv = R.inv(dc)
        n = len(de)
        return {lp.sub_exp(e, de): R.mul(c, inv) for e, c in num.items()}, {(0,) * n: R.one}
    q = lp.exact_div(num, den, R)
    if q is not None:
        n = len(next(iter(den)))
        return q, {(0,) * n: R.one}
    used = lp.variables_used(num, den)
    if len(used) == 1:
        (idx,) = used
        g = lp.univariate_gcd(num, den, idx, R)
        if len(g) > 1:
            num = lp.exact_div(num, g, R)
            den = lp.exact_div(den, g, R)
            if len(den) == 1:
                return _normalize(num, den, R)
    # shift so that the denominator's per-coordinate minimum exponent is 0
    shift = tuple(-lo for lo, _ in lp.exp_bounds(den))
    num, den = lp.pshift(num, shift), lp.pshift(den, shift)
    _, tc = lp.trail(den)
    inv = R.inv(tc)
    return lp.pscale(num, inv, R), lp.pscale(den, inv, R)


# ---------------------------------------------------------------- valuation

ValueVec = tuple  # per-level components, topmost first, p-adic last


def _poly_value(f, p):
    e, c = lp.trail(f)
    if p is None:
        return e, c
    return e + (padic_valuation(c, p),), c


def valuation(a: Element) -> ValueVec:
    """Composite valuation, topmost level first (p-adic component last)."""
    if not a.num:
        raise ValuationError("valuation of zero")
    p = a.field.padic
    vn, _ = _poly_value(a.num, p)
    vd, _ = _poly_value(a.den, p)
    return tuple(_norm_exp(x - y) for x, y in zip(vn, vd))


def top_valuation(a: Element):
    """Valuation of the topmost level only (p-adic for a bare ``Qp``)."""
    return valuation(a)[0]


def unit_part(a: Element) -> tuple[Element, Element]:
    """Split ``a = monomial * u`` with ``valuation(u) == 0``."""
    K = a.field
    v = valuation(a)
    exps = v[: K.nvars]
    coeff = 1
    if K.padic:
        coeff = Fraction(K.padic) ** v[-1]
    mono = K.monomial(exps, coeff)
    return mono, a / mono


def leading_coefficient(a: Element):
    """Base coefficient of the residue of the unit part, through the whole chain.

    Finite and rational bases return a base-ring value; a p-adic bottom returns
    the residue in GF(p).
    """
    K = a.field
    if not a.num:
        raise ValuationError("leading coefficient of zero")
    R = K.ring
    _, cn = lp.trail(a.num)
    _, cd = lp.trail(a.den)
    c = R.mul(cn, R.inv(cd))
    if K.padic:
        p = K.padic
        c = c / Fraction(p) ** padic_valuation(c, p)
        return PrimeField(p).from_fraction(c)
    return c


def residue(a: Element) -> Element:
    """Image of ``a`` in the residue field of the topmost level."""
    K = a.field
    kv = K.residue_field()
    if not a.num:
        return kv.zero()
    if K.nvars == 0:
        p = K.padic
        v = padic_valuation(_const(a), p)
        if v < 0:
            raise ValuationError(f"negative {p}-adic valuation")
        if v > 0:
            return kv.zero()
        return kv.element(PrimeField(p).from_fraction(_const(a)))
    etop_n = min(e[0] for e in a.num)
    etop_d = min(e[0] for e in a.den)
    if etop_n < etop_d:
        raise ValuationError("residue of an element with negative valuation")
    if etop_n > etop_d:
        return kv.zero()
    num = {e[1:]: c for e, c in a.num.items() if e[0] == etop_n}
    den = {e[1:]: c for e, c in a.den.items() if e[0] == etop_d}
    return Element(kv, num, den)


def lift(a: Element, K: FieldDesc) -> Element:
    """Constant-in-top-variable representative in ``K`` of a residue class."""
    kv = K.residue_field()
    if a.field != kv:
        raise FieldError(f"{a} does not live in the residue field {kv} of {K}")
    if K.nvars == 0:
        # GF(p) -> Q_p: the representative in [0, p)
        return K.element(Fraction(int(_const(a))))
    num = {(0,) + e: c for e, c in a.num.items()}
    den = {(0,) + e: c for e, c in a.den.items()}
    return Element(K, num, den, normalized=True)


def _const(a: Element):
    """Value of an element of a level-free field as a base-ring value."""
    R = a.field.ring
    if not a.num:
        return R.zero
    (n,) = a.num.values()
    (d,) = a.den.values()
    return R.mul(n, R.inv(d))


def base_value(a: Element):
    """Public alias for the coefficient of a level-free element."""
    if a.field.nvars:
        raise FieldError(f"{a.field} is not level-free")
    return _const(a)


# ---------------------------------------------------------------- squares


@dataclass(frozen=True)
class SquareClass:
    """``parity``: v(x) mod 2 per value component (0 at Puiseux levels);
    ``square``: whether the leading base coefficient is a square."""

    parity: tuple[int, ...]
    square: bool

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass(
            tuple(a ^ b for a, b in zip(self.parity, other.parity)),
            self.square == other.square,
        )

    @property
    def trivial(self) -> bool:
        return self.square and not any(self.parity)


def base_is_square(K: FieldDesc, c) -> bool:
    """Square test for a leading coefficient returned by :func:`leading_coefficient`."""
    if K.padic:
        return PrimeField(K.padic).is_square(c)
    if isinstance(K.base, FiniteField):
        return K.ring.is_square(c)
    if isinstance(K.base, RealClosed):
        return c > 0
    return c != 0


def parity(v: ValueVec, K: FieldDesc) -> tuple[int, ...]:
    return tuple(int(x) % 2 if z else 0 for x, z in zip(v, K.zmask))


def square_class(a: Element) -> SquareClass:
    if not a.num:
        raise ValuationError("square class of zero")
    K = a.field
    return SquareClass(parity(valuation(a), K), base_is_square(K, leading_coefficient(a)))


def is_square(a: Element) -> bool:
    """Square test in the henselian tower; ``is_square(0)`` is True by convention."""
    if not a.num:
        return True
    return square_class(a).trivial


def coset_representative(par: tuple[int, ...], K: FieldDesc) -> Element:
    """Canonical monomial with exponents in {0, 1} for a parity vector."""
    exps = par[: K.nvars]
    coeff = K.padic ** par[-1] if K.padic else 1
    return K.monomial(exps, coeff)
