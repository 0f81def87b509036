"""Coefficient rings for the bottom of a field tower.

Three concrete rings cover every supported base:

* ``PrimeField(p)``: integers modulo an odd prime, elements are ``int`` in ``[0, p)``.
* ``ExtensionField(p, k)``: GF(p^k) for k > 1, elements are tuples of ``k``
  residues (little-endian coefficients of a polynomial in the generator ``z``).
* ``RationalField``: exact ``Fraction`` coefficients, used for the real closed,
  quadratically closed and p-adic bottoms.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product


def factor_prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, k)`` with ``q == p**k`` and ``p`` prime, or ``None``."""
    if q < 2:
        return None
    p = 2
    while p * p <= q:
        if q % p == 0:
            break
        p += 1
    else:
        return q, 1
    k = 0
    while q % p == 0:
        q //= p
        k += 1
    return (p, k) if q == 1 else None


def is_prime(n: int) -> bool:
    pk = factor_prime_power(n)
    return pk is not None and pk[1] == 1


class PrimeField:
    """The field with ``p`` elements."""

    kind = "prime"

    def __init__(self, p: int):
        self.p = p
        self.q = p
        self.zero = 0
        self.one = 1

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    def from_int(self, n: int) -> int:
        return n % self.p

    def from_fraction(self, x: Fraction) -> int:
        den = x.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"denominator divisible by {self.p}")
        return x.numerator * pow(den, -1, self.p) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def is_zero(self, a) -> bool:
        return a == 0

    def is_square(self, a) -> bool:
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1

    def elements(self):
        return range(self.p)

    def render(self, a) -> str:
        return str(a)


def _poly_mulmod(a, b, modulus, p):
    k = len(modulus) - 1
    prod = [0] * (2 * k - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] = (prod[i + j] + ai * bj) % p
    # modulus is monic of degree k
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for j in range(k + 1):
                prod[d - k + j] = (prod[d - k + j] - c * modulus[j]) % p
    return tuple(prod[:k])


@lru_cache(maxsize=None)
def irreducible_modulus(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible polynomial of degree ``k`` over GF(p).

    Returned little-endian, leading 1 included.
    """
    for tail in product(range(p), repeat=k):
        cand = tuple(tail) + (1,)
        if cand[0] == 0:
            continue
        if _is_irreducible(cand, p):
            return cand
    raise ValueError(f"no irreducible polynomial of degree {k} over GF({p})")


def _poly_divmod(a, b, p):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    b = list(b)
    while b and b[-1] == 0:
        b.pop()
    inv_lead = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] = (a[shift + j] - c * bj) % p
        while a and a[-1] == 0:
            a.pop()
    return q, a


def _is_irreducible(f, p):
    k = len(f) - 1
    if k == 1:
        return True
    # no factor of degree <= k // 2: brute force over monic candidates
    for d in range(1, k // 2 + 1):
        for tail in product(range(p), repeat=d):
            g = tuple(tail) + (1,)
            _, r = _poly_divmod(f, g, p)
            if not r:
                return False
    return True


class ExtensionField:
    """GF(p^k), k > 1, as polynomials in ``z`` modulo a fixed irreducible."""

    kind = "extension"

    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = irreducible_modulus(p, k)
        self.zero = (0,) * k
        self.one = (1,) + (0,) * (k - 1)
        self.gen = (0, 1) + (0,) * (k - 2)

    def __repr__(self):
        return f"ExtensionField({self.p}, {self.k})"

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and (other.p, other.k) == (self.p, self.k)

    def __hash__(self):
        return hash(("GF", self.p, self.k))

    def from_int(self, n: int):
        return (n % self.p,) + (0,) * (self.k - 1)

    def from_fraction(self, x: Fraction):
        den = x.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"denominator divisible by {self.p}")
        return self.from_int(x.numerator * pow(den, -1, self.p))

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        return _poly_mulmod(a, b, self.modulus, self.p)

    def pow(self, a, e: int):
        result = self.one
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.q - 2)

    def is_zero(self, a) -> bool:
        return not any(a)

    def is_square(self, a) -> bool:
        return self.is_zero(a) or self.pow(a, (self.q - 1) // 2) == self.one

    def elements(self):
        return (tuple(c) for c in product(range(self.p), repeat=self.k))

    def render(self, a) -> str:
        terms = []
        for i in range(self.k - 1, -1, -1):
            c = a[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
                continue
            mon = "z" if i == 1 else f"z^{i}"
            terms.append(mon if c == 1 else f"{c}*{mon}")
        if not terms:
            return "0"
        return terms[0] if len(terms) == 1 else "(" + "+".join(terms) + ")"


class RationalField:
    """Exact rationals."""

    kind = "rational"
    q = None

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __repr__(self):
        return "RationalField()"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def from_fraction(self, x: Fraction) -> Fraction:
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def render(self, a) -> str:
        return str(a)


def padic_valuation(x: Fraction | int, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v
