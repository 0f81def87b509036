"""Sparse Laurent polynomials with rational exponents.

A polynomial is a ``dict`` mapping exponent tuples to nonzero coefficients of a
coefficient ring (see :mod:`henselqf.basefields`).  Exponent tuples are ordered
topmost level first, so Python's tuple order is the lexicographic order in which
the topmost variable dominates.  Products of monomials add exponent tuples, which
keeps lex order a group order on exponents: ``max(fg) = max(f) + max(g)``.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm


def add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub_exp(a, b):
    return tuple(x - y for x, y in zip(a, b))


def padd(f, g, R):
    out = dict(f)
    for e, c in g.items():
        if e in out:
            s = R.add(out[e], c)
            if R.is_zero(s):
                del out[e]
            else:
                out[e] = s
        else:
            out[e] = c
    return out


def pneg(f, R):
    return {e: R.neg(c) for e, c in f.items()}


def psub(f, g, R):
    return padd(f, pneg(g, R), R)


def pmul(f, g, R):
    if len(f) > len(g):
        f, g = g, f
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            c = R.mul(c1, c2)
            if e in out:
                s = R.add(out[e], c)
                if R.is_zero(s):
                    del out[e]
                else:
                    out[e] = s
            elif not R.is_zero(c):
                out[e] = c
    return out


def pscale(f, c, R):
    if R.is_zero(c):
        return {}
    return {e: R.mul(a, c) for e, a in f.items()}


def pshift(f, shift):
    """Multiply by the monomial with exponent tuple ``shift``."""
    return {add_exp(e, shift): c for e, c in f.items()}


def monomial(exp, c):
    return {tuple(exp): c}


def lead(f):
    """Lex-maximal term."""
    e = max(f)
    return e, f[e]


def trail(f):
    """Lex-minimal term; its exponent is the valuation of ``f``."""
    e = min(f)
    return e, f[e]


def exp_bounds(f):
    """Per-coordinate (min, max) exponents."""
    exps = list(f)
    n = len(exps[0])
    return [(min(e[i] for e in exps), max(e[i] for e in exps)) for i in range(n)]


def exact_div(f, g, R):
    """Return ``f / g`` if ``g`` divides ``f`` in the Laurent ring, else ``None``.

    Long division from the lex-maximal term.  Each coordinate of every quotient
    exponent is confined to ``[min_i(f) - min_i(g), max_i(f) - max_i(g)]`` since
    per-variable degrees add under multiplication; leaving that box means ``g``
    does not divide ``f``.  The box holds finitely many candidate exponents, which
    bounds the loop.
    """
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    if not f:
        return {}
    if len(g) == 1:
        (ge, gc), = g.items()
        inv = R.inv(gc)
        return {sub_exp(e, ge): R.mul(c, inv) for e, c in f.items()}
    fb, gb = exp_bounds(f), exp_bounds(g)
    box = [(fl - gl, fh - gh) for (fl, fh), (gl, gh) in zip(fb, gb)]
    if any(lo > hi for lo, hi in box):
        return None
    ge, gc = lead(g)
    ginv = R.inv(gc)
    rem = dict(f)
    quot = {}
    while rem:
        re, rc = lead(rem)
        qe = sub_exp(re, ge)
        if any(not (lo <= x <= hi) for x, (lo, hi) in zip(qe, box)):
            return None
        qc = R.mul(rc, ginv)
        quot[qe] = qc
        rem = psub(rem, pshift(pscale(g, qc, R), qe), R)
    return quot


def variables_used(*polys):
    """Indices of coordinates that are not constant across all terms."""
    used = set()
    for f in polys:
        if not f:
            continue
        bounds = exp_bounds(f)
        used.update(i for i, (lo, hi) in enumerate(bounds) if lo != hi)
    return used


def _to_dense(f, idx, step, R):
    """Univariate dense coefficient list in ``T = t_idx^step`` after shifting to degree 0."""
    lo = min(e[idx] for e in f)
    deg = {e: int((e[idx] - lo) / step) for e in f}
    out = [R.zero] * (max(deg.values()) + 1)
    for e, c in f.items():
        out[deg[e]] = c
    return out, lo


def _dense_trim(a, R):
    while a and R.is_zero(a[-1]):
        a.pop()
    return a


def _dense_divmod(a, b, R):
    a = _dense_trim(list(a), R)
    b = _dense_trim(list(b), R)
    inv = R.inv(b[-1])
    q = [R.zero] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        c = R.mul(a[-1], inv)
        s = len(a) - len(b)
        q[s] = c
        for j, bj in enumerate(b):
            a[s + j] = R.sub(a[s + j], R.mul(c, bj))
        a.pop()
        _dense_trim(a, R)
    return q, a


def _dense_gcd(a, b, R):
    a = _dense_trim(list(a), R)
    b = _dense_trim(list(b), R)
    while b:
        _, r = _dense_divmod(a, b, R)
        if r:  # monic remainders keep rational coefficients small
            inv = R.inv(r[-1])
            r = [R.mul(c, inv) for c in r]
        a, b = b, r
    return a


def univariate_gcd(f, g, idx, R):
    """Monic gcd of two polynomials whose exponents vary only at coordinate ``idx``.

    Returned as a sparse polynomial with trailing exponent 0 at ``idx`` and the
    shared constant exponents elsewhere set to 0.
    """
    dens = [Fraction(e[idx]).denominator for h in (f, g) for e in h]
    step = Fraction(1, lcm(*dens))
    a, _ = _to_dense(f, idx, step, R)
    b, _ = _to_dense(g, idx, step, R)
    d = _dense_gcd(a, b, R)
    inv = R.inv(d[-1])
    n = len(next(iter(f)))
    out = {}
    for k, c in enumerate(d):
        if not R.is_zero(c):
            e = [0] * n
            x = k * step
            e[idx] = int(x) if x.denominator == 1 else x
            out[tuple(e)] = R.mul(c, inv)
    return out
