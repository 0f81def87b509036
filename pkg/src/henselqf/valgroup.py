"""Finitely generated subgroups of Z^m: Smith normal form and n-torsion indices."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Union

INF = "inf"
CountOrInf = Union[int, str]


@dataclass(frozen=True)
class SnfResult:
    diag: tuple[int, ...]
    left: tuple[tuple[int, ...], ...]
    right: tuple[tuple[int, ...], ...]


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    if not A or not B:
        cols = len(B[0]) if B else 0
        return [[0] * cols for _ in A]
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def det(M) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [list(r) for r in M]
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[-1][-1]


def smith_normal_form(m) -> SnfResult:
    """``left @ m @ right == diag`` with unimodular transforms.

    Pivot: the nonzero entry of least absolute value in the remaining block,
    first in row-major order.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    A = [list(map(int, r)) for r in m]
    L, R = _identity(rows), _identity(cols)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for M in (A, R):
            for r in M:
                r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row dst += f * row src
        A[dst] = [a + f * b for a, b in zip(A[dst], A[src])]
        L[dst] = [a + f * b for a, b in zip(L[dst], L[src])]

    def add_col(dst, src, f):
        for M in (A, R):
            for r in M:
                r[dst] += f * r[src]

    k = 0
    while k < min(rows, cols):
        nz = [(abs(A[i][j]), i, j) for i in range(k, rows) for j in range(k, cols) if A[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(k, i)
        swap_cols(k, j)
        while True:
            p = A[k][k]
            dirty = False
            for i in range(k + 1, rows):
                q = A[i][k] // p
                if q:
                    add_row(i, k, -q)
                if A[i][k]:
                    dirty = True
            for j in range(k + 1, cols):
                q = A[k][j] // p
                if q:
                    add_col(j, k, -q)
                if A[k][j]:
                    dirty = True
            if not dirty:
                # divisibility: fold in any block entry the pivot does not divide
                bad = next(
                    ((i, j) for i in range(k + 1, rows) for j in range(k + 1, cols) if A[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                add_row(k, bad[0], 1)
                continue
            # a smaller remainder appeared in row/column k: move it to the pivot
            cand = [(abs(A[i][k]), i, k) for i in range(k + 1, rows) if A[i][k]]
            cand += [(abs(A[k][j]), k, j) for j in range(k + 1, cols) if A[k][j]]
            _, i, j = min(cand)
            if i != k:
                swap_rows(k, i)
            else:
                swap_cols(k, j)
        if A[k][k] < 0:
            A[k] = [-a for a in A[k]]
            L[k] = [-a for a in L[k]]
        k += 1
    diag = tuple(A[i][i] for i in range(min(rows, cols)))
    res = SnfResult(diag, tuple(map(tuple, L)), tuple(map(tuple, R)))
    _check_snf(m, res)
    return res


def _check_snf(m, res: SnfResult):
    rows = len(m)
    cols = len(m[0]) if rows else 0
    D = matmul(matmul([list(r) for r in res.left], [list(r) for r in m]), [list(r) for r in res.right])
    for i in range(rows):
        for j in range(cols):
            want = res.diag[i] if i == j else 0
            assert D[i][j] == want, "SNF reconstruction failed"
    for a, b in zip(res.diag, res.diag[1:]):
        assert (a == 0 and b == 0) or (a != 0 and b % a == 0), "SNF divisibility chain broken"
    assert abs(det(res.left)) == 1 and abs(det(res.right)) == 1, "SNF transform not unimodular"


def matrix_rank(m) -> int:
    return sum(1 for d in smith_normal_form(m).diag if d) if m else 0


def index_mod_n(rank: int, generators, n: int) -> tuple[CountOrInf, CountOrInf, int]:
    """``([G:nG], [H:nH], rrk(G/H))`` for ``G = Z^rank`` and ``H`` spanned by rows.

    H is free of rank ``rank(H)``, so ``[H:nH] = n^rank(H)``; the quotient has
    rational rank ``rank - rank(H)`` and the identity ``[G:nG] = n^r [H:nH]`` is
    checked before returning.
    """
    if n <= 0:
        raise ValueError("n must be a positive integer")
    generators = [list(r) for r in generators]
    for r in generators:
        if len(r) != rank:
            raise ValueError(f"generator {r} does not have {rank} entries")
    rk_h = matrix_rank(generators)
    index_g = n**rank
    index_h = n**rk_h
    r = rank - rk_h
    assert index_g == n**r * index_h
    return index_g, index_h, r


def lex_rank(levels: int) -> int:
    """Rank of Z^levels under the lexicographic order (count of nonzero convex subgroups)."""
    if levels < 0:
        raise ValueError("levels must be nonnegative")
    return levels


# ------------------------------------------------ independent cross-checks


def rational_rank(m) -> int:
    """Rank over Q by fraction-exact Gaussian elimination (independent of the SNF)."""
    from fractions import Fraction

    A = [[Fraction(x) for x in r] for r in m]
    rank = 0
    cols = len(A[0]) if A else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c] / A[rank][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


def hermite_basis(m) -> list[list[int]]:
    """Row-style Hermite basis of the lattice spanned by the rows (Euclid on columns)."""
    A = [list(r) for r in m if any(r)]
    cols = len(m[0]) if m else 0
    basis = []
    for c in range(cols):
        while True:
            nz = [r for r in A if r[c]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[c]))
            piv = nz[0]
            for r in nz[1:]:
                q = r[c] // piv[c]
                for j in range(cols):
                    r[j] -= q * piv[j]
            A = [r for r in A if any(r)]
        nz = [r for r in A if r[c]]
        if nz:
            piv = nz[0]
            if piv[c] < 0:
                piv[:] = [-x for x in piv]
            basis.append(piv)
            A = [r for r in A if r is not piv]
    return basis


def count_cosets_direct(rank: int, generators, n: int) -> tuple[int, int]:
    """``([G:nG], [H:nH])`` by explicit coset enumeration, for ``rank <= 2``.

    Cosets of nG in G: residues of Z^rank mod n.  Cosets of nH in H: integer
    combinations of a basis of H with coefficients in [0, n), deduplicated
    modulo the lattice nH (tested by solving in the basis coordinates).
    """
    if rank > 2:
        raise ValueError("direct enumeration only for rank <= 2")
    g_cosets = {tuple(v) for v in product(range(n), repeat=rank)}
    basis = hermite_basis(generators)
    k = len(basis)
    if k == 0:
        return len(g_cosets), 1
    reps = []
    for coeffs in product(range(n), repeat=k):
        v = [sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(rank)]
        if not any(_in_lattice([a - b for a, b in zip(v, w)], basis, n) for w in reps):
            reps.append(v)
    return len(g_cosets), len(reps)


def _in_lattice(v, basis, n):
    """Is ``v`` in ``n * span_Z(basis)``?  ``basis`` is in echelon form."""
    from fractions import Fraction

    v = [Fraction(x) for x in v]
    for b in basis:
        c = next(j for j, x in enumerate(b) if x)
        coef = v[c] / b[c]
        if coef.denominator != 1 or coef.numerator % n:
            return False
        v = [a - coef * x for a, x in zip(v, b)]
    return not any(v)


def convex_subgroups_lex(levels: int, box: int = 2) -> int:
    """Count convex subgroups of Z^levels (lex order) among coordinate subgroups.

    A candidate is ``{0}^k x Z^(levels-k)`` style subgroups spanned by subsets of
    unit vectors; convexity is checked on the box ``[-box, box]^levels``: if
    ``0 <= x <= h`` with ``h`` in the subgroup then ``x`` must be in it.
    Returns the number of convex ones, minus the trivial subgroup, i.e. the rank.
    """
    vectors = list(product(range(-box, box + 1), repeat=levels))
    count = 0
    for mask in range(2**levels):
        def member(v):
            return all(v[i] == 0 for i in range(levels) if not mask >> i & 1)

        ok = True
        for h in vectors:
            if not member(h) or h < tuple([0] * levels):
                continue
            for x in vectors:
                if tuple([0] * levels) <= x <= h and not member(x):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count - 1


__all__ = [
    "INF",
    "SnfResult",
    "smith_normal_form",
    "index_mod_n",
    "lex_rank",
    "matrix_rank",
    "rational_rank",
    "count_cosets_direct",
    "convex_subgroups_lex",
    "det",
]
