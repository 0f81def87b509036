"""Tame binary subforms of rational quadratic forms under the 2-adic valuation.

A binary form is tame when it is isometric to ``c(X1^2 + X1X2 + dX2^2)`` with
``d`` a 2-adic integer and ``1 - 4d`` a 2-adic unit.  A nonsingular form has a
tame binary subform as soon as some pair of vectors satisfies
``v(b(x, y)) <= min(v(phi(x)), v(phi(y))) < inf``; from such a pair the
normalization below produces ``c``, ``d`` and the spanning vectors.

The search is a semidecision: :class:`NotFoundWithinBound` only says the
bounded lattice held no such pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

import numpy as np

INF = float("inf")


class SingularFormError(ValueError):
    pass


def v2(x) -> float:
    """2-adic valuation of a rational; ``inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    n, d = x.numerator, x.denominator
    return ((n & -n).bit_length() - 1) - ((d & -d).bit_length() - 1)


@dataclass(frozen=True)
class RatGram:
    """``phi(x) = sum_{i<=j} c_ij x_i x_j`` with rational coefficients (0-based keys)."""

    n: int
    coeffs: dict

    def __post_init__(self):
        clean = {}
        for (i, j), c in self.coeffs.items():
            if not 0 <= i <= j < self.n:
                raise ValueError(f"coefficient index {(i, j)} outside the upper triangle")
            c = Fraction(c)
            if c:
                clean[(i, j)] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def from_symmetric(cls, S) -> "RatGram":
        """From ``S`` with ``phi = X S X^t`` (off-diagonal coefficient ``2 S_ij``)."""
        n = len(S)
        coeffs = {}
        for i in range(n):
            for j in range(i, n):
                a, b = Fraction(S[i][j]), Fraction(S[j][i])
                if a != b:
                    raise ValueError(f"matrix not symmetric at {(i, j)}")
                coeffs[(i, j)] = a if i == j else 2 * a
        return cls(n, coeffs)

    def phi(self, x) -> Fraction:
        return sum((c * x[i] * x[j] for (i, j), c in self.coeffs.items()), Fraction(0))

    def b(self, x, y) -> Fraction:
        total = Fraction(0)
        for (i, j), c in self.coeffs.items():
            if i == j:
                total += 2 * c * x[i] * y[i]
            else:
                total += c * (x[i] * y[j] + x[j] * y[i])
        return total

    def bilinear_matrix(self) -> list[list[Fraction]]:
        """``M`` with ``b(x, y) = x M y^t``."""
        M = [[Fraction(0)] * self.n for _ in range(self.n)]
        for (i, j), c in self.coeffs.items():
            if i == j:
                M[i][i] = 2 * c
            else:
                M[i][j] = M[j][i] = c
        return M

    def determinant(self) -> Fraction:
        M = [row[:] for row in self.bilinear_matrix()]
        n = self.n
        det = Fraction(1)
        for c in range(n):
            piv = next((r for r in range(c, n) if M[r][c]), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                M[c], M[piv] = M[piv], M[c]
                det = -det
            det *= M[c][c]
            for r in range(c + 1, n):
                f = M[r][c] / M[c][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
        return det / 2**n


@dataclass(frozen=True)
class TameWitness:
    x: tuple  # pair found by the search, as returned
    y: tuple
    c: Fraction
    d: Fraction
    basis: tuple  # (e, f) with phi|span = c(X1^2 + X1X2 + dX2^2)

    def to_dict(self) -> dict:
        def vec(v):
            return [str(a) for a in v]

        return {
            "found": True,
            "c": str(self.c),
            "d": str(self.d),
            "x": vec(self.x),
            "y": vec(self.y),
            "basis": [vec(v) for v in self.basis],
        }


@dataclass(frozen=True)
class NotFoundWithinBound:
    bound: int

    def to_dict(self) -> dict:
        return {"found": False, "bound": self.bound}


def check_tame(c, d) -> bool:
    """``d`` integral and ``1 - 4d`` a unit, 2-adically (``c`` only scales the form)."""
    d = Fraction(d)
    return v2(d) >= 0 and v2(1 - 4 * d) == 0


def verify_witness(phi: RatGram, w: TameWitness) -> bool:
    """Restriction identity ``phi(a e + b f) = c(a^2 + ab + d b^2)``, coefficientwise."""
    e, f = w.basis
    return (
        phi.phi(e) == w.c
        and phi.b(e, f) == w.c
        and phi.phi(f) == w.c * w.d
        and check_tame(w.c, w.d)
    )


def normalize_pair(phi: RatGram, x, y) -> TameWitness:
    """Turn a pair satisfying the valuation criterion into tame data."""
    x0, y0 = tuple(x), tuple(y)
    px, py = phi.phi(x), phi.phi(y)
    if px == 0 or (py != 0 and v2(py) < v2(px)):
        x, y, px, py = y, x, py, px
    bxy = phi.b(x, y)
    y1 = tuple(a / bxy for a in y)  # now b(x, y1) = 1
    # the two degenerate cases of the normalization, kept in order
    if phi.phi(x) == 0 and phi.phi(y1) == 0:
        x = tuple(a + b for a, b in zip(x, y1))
    elif phi.phi(x) == 0:
        x, y1 = y1, x
    c = phi.phi(x)
    d = c * phi.phi(y1)
    y2 = tuple(c * a for a in y1)
    w = TameWitness(x0, y0, c, d, (tuple(x), y2))
    if not verify_witness(phi, w):
        raise AssertionError("tame normalization produced an invalid witness")
    return w


def _v2_array(a: np.ndarray) -> np.ndarray:
    out = np.full(a.shape, np.inf)
    nz = a != 0
    low = a[nz] & -a[nz]
    out[nz] = np.log2(low.astype(np.float64))
    return out


def _candidates(n: int, bound: int):
    """Integer vectors and 2-power scales in search order.

    Order key: (height, j, coordinates by (|c|, sign)), the scale being ``2^-j``.
    """
    js = [j for j in range(bound.bit_length()) if 2**j <= bound]
    vecs = [w for w in product(range(-bound, bound + 1), repeat=n) if any(w)]

    def key(w):
        return tuple((abs(c), c < 0) for c in w)

    vecs.sort(key=lambda w: (max(map(abs, w)), key(w)))
    items = [(max(map(abs, w)), j, key(w), w) for w in vecs for j in js]
    items.sort(key=lambda t: t[:3])
    W = np.array([t[3] for t in items], dtype=np.int64).reshape(len(items), n)
    H = np.array([t[0] for t in items], dtype=np.int64)
    J = np.array([t[1] for t in items], dtype=np.int64)
    return W, H, J


def find_tame_binary(phi: RatGram, bound: int, chunk: int = 512):
    """First pair, in (max height, key x, key y) order, meeting the criterion."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    if phi.determinant() == 0:
        raise SingularFormError("singular form: determinant is zero")
    n = phi.n
    if n < 2:
        return NotFoundWithinBound(bound)
    den = lcm(*(c.denominator for c in phi.coeffs.values()))
    M = np.array([[int(a * den) for a in row] for row in phi.bilinear_matrix()], dtype=object)
    if int(np.abs(M).max()) * n * n * bound * bound >= 2**60:
        raise OverflowError("coefficients too large for the vectorized search")
    M = M.astype(np.int64)
    W, H, J = _candidates(n, bound)
    WM = W @ M  # rows: x^t M
    # 2 den phi(w) = w M w^t; the extra 2 and den shift every valuation equally
    Q = np.einsum("ij,ij->i", WM, W)
    vq = _v2_array(Q) - 1 - 2 * J
    for h in range(1, bound + 1):
        rows = np.nonzero(H <= h)[0]
        cols = rows
        for start in range(0, len(rows), chunk):
            r = rows[start : start + chunk]
            B = WM[r] @ W[cols].T
            vb = _v2_array(B) - J[r][:, None] - J[cols][None, :]
            m = np.minimum(vq[r][:, None], vq[cols][None, :])
            ok = (vb <= m) & np.isfinite(m)
            # pairs in this layer need max height == h
            ok &= (H[r][:, None] == h) | (H[cols][None, :] == h)
            hit = np.argwhere(ok)
            if len(hit):
                i, k = hit[0]  # argwhere is row-major: lowest x key, then lowest y key
                x = _as_vec(W[r[i]], J[r[i]])
                y = _as_vec(W[cols[k]], J[cols[k]])
                return normalize_pair(phi, x, y)
    return NotFoundWithinBound(bound)


def _as_vec(w, j):
    s = Fraction(1, 2 ** int(j))
    return tuple(Fraction(int(a)) * s for a in w)
