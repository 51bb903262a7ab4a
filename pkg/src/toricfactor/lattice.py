"""Exact integer linear algebra on the lattices N and M.

Vectors are plain tuples of Python ints and matrices are lists of rows, so
arithmetic is arbitrary precision throughout.  Rational numbers only show up
inside elimination routines, as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[int, ...]
Matrix = list[list[int]]


class LatticeError(ValueError):
    """Raised for invalid lattice input (zero vectors, non-primitive vectors...)."""


# ---------------------------------------------------------------------------
# vectors


def vec(entries: Iterable[int]) -> Vector:
    return tuple(int(x) for x in entries)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def add(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[int], v: Sequence[int]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def neg(u: Sequence[int]) -> Vector:
    return tuple(-a for a in u)


def scale(c: int, u: Sequence[int]) -> Vector:
    return tuple(c * a for a in u)


def content(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def is_primitive(v: Sequence[int]) -> bool:
    """True iff the gcd of the entries of the nonzero vector ``v`` is 1."""
    g = content(v)
    if g == 0:
        raise LatticeError("the zero vector has no primitivity")
    return g == 1


def primitive(v: Sequence) -> Vector:
    """The primitive integer vector on the ray through a nonzero rational ``v``."""
    if all(type(x) is int for x in v):
        g = content(v)
        if g == 0:
            raise LatticeError("the zero vector spans no ray")
        return tuple(x // g for x in v)
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = content(ints)
    if g == 0:
        raise LatticeError("the zero vector spans no ray")
    return tuple(x // g for x in ints)


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def matvec(m: Sequence[Sequence[int]], v: Sequence[int]) -> Vector:
    return tuple(dot(row, v) for row in m)


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# rational elimination


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in rows:
        if all(type(x) is int for x in row):
            out.append(list(row))
            continue
        den = math.lcm(*[Fraction(x).denominator for x in row]) if row else 1
        out.append([int(Fraction(x) * den) for x in row])
    return out


def _int_rref(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free reduced echelon form.

    Integer rows (each divided by its content) in which every pivot column is
    zero outside its pivot row.
    """
    a = [list(r) for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pr = a[r]
        pv = pr[c]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                row = [pv * x - f * y for x, y in zip(a[i], pr)]
                g = math.gcd(*row)
                a[i] = [x // g for x in row] if g > 1 else row
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    red, piv = _int_rref(_integer_rows(rows))
    return [[Fraction(x, row[c]) for x in row] for row, c in zip(red, piv)], piv


def rank(rows: Sequence[Sequence]) -> int:
    return len(_int_rref(_integer_rows(rows))[1]) if rows else 0


def in_span(v: Sequence, rows: Sequence[Sequence]) -> bool:
    return rank(list(rows) + [list(v)]) == rank(rows)


def solve_rational(rows: Sequence[Sequence], b: Sequence) -> tuple[Fraction, ...] | None:
    """One rational solution x of ``rows @ x = b`` (free variables zero), or None."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [bi] for r, bi in zip(rows, b)]
    red, piv = rref(aug)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(red, piv):
        x[c] = row[-1]
    return tuple(x)


def rational_kernel(rows: Sequence[Sequence], ncols: int) -> list[list[int]]:
    """A basis of the rational kernel of ``rows``, scaled to primitive integer vectors."""
    red, piv = _int_rref(_integer_rows(rows)) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    scale = math.lcm(*[row[c] for row, c in zip(red, piv)]) if piv else 1
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = scale
        for row, c in zip(red, piv):
            x[c] = -row[f] * (scale // row[c])
        g = math.gcd(*x)
        basis.append([v // g for v in x])
    return basis


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ m @ V == D`` and ``U``, ``V`` unimodular.

    ``D`` is diagonal with nonnegative entries ``d_1 | d_2 | ...``.  Pivots are
    chosen in the first nonzero column of the remaining block, taking the entry
    of least absolute value (lowest row on ties), so results are reproducible.
    """
    a = [list(map(int, row)) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row[dst] += f * row[src]
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):  # col[dst] += f * col[src]
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    t = 0
    while t < min(rows, cols):
        col = next((c for c in range(t, cols) if any(a[i][c] for i in range(t, rows))), None)
        if col is None:
            break
        swap_cols(t, col)
        while True:
            piv = min((i for i in range(t, rows) if a[i][t]), key=lambda i: (abs(a[i][t]), i))
            swap_rows(t, piv)
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
            if any(a[i][t] for i in range(t + 1, rows)):
                continue
            # column clear; now the row
            nz = [j for j in range(t + 1, cols) if a[t][j]]
            if nz:
                jmin = min([t] + nz, key=lambda j: (abs(a[t][j]), j))
                if jmin != t:
                    swap_cols(t, jmin)
                for j in range(t + 1, cols):
                    if a[t][j]:
                        add_col(j, t, -(a[t][j] // a[t][t]))
                if any(a[t][j] for j in range(t + 1, cols)) or any(
                    a[i][t] for i in range(t + 1, rows)
                ):
                    continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % a[t][t]),
                None,
            )
            if bad is not None:
                add_row(t, bad, 1)
                continue
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return u, a, v


def elementary_divisors(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith normal form."""
    _, d, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i]]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Zero rows are dropped.  Pivots are positive and entries above each pivot
    are reduced into ``[0, pivot)``, so the result is canonical for the lattice.
    """
    a = [list(map(int, r)) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(a[i][c]), i))
            a[r], a[p] = a[p], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < len(a) and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return [row for row in a[:r]]


def integer_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[Vector]:
    """A lattice basis of ``{x in Z^n : rows @ x = 0}``, in Hermite normal form."""
    if not rows or not any(any(r) for r in rows):
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    _, d, v = smith_normal_form(rows)
    r = sum(1 for i in range(min(len(d), ncols)) if d[i][i])
    basis = [tuple(v[i][j] for i in range(ncols)) for j in range(r, ncols)]
    return [tuple(row) for row in hermite_normal_form(basis)]


def saturation(rows: Sequence[Sequence[int]], ncols: int) -> list[Vector]:
    """Canonical lattice basis of ``span(rows) ∩ Z^n`` (Hermite normal form)."""
    if rank(rows) == 0:
        return []
    perp = integer_kernel(rows, ncols)
    if not perp:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    return integer_kernel(perp, ncols)


def solve_integer(rows: Sequence[Sequence[int]], b: Sequence[int]) -> Vector | None:
    """An integer solution of ``rows @ x = b`` or None if there is none."""
    nrows = len(rows)
    ncols = len(rows[0])
    u, d, v = smith_normal_form(rows)
    ub = matvec(u, b)
    y = [0] * ncols
    for i in range(nrows):
        di = d[i][i] if i < ncols else 0
        if di == 0:
            if ub[i] != 0:
                return None
        elif ub[i] % di:
            return None
        else:
            y[i] = ub[i] // di
    return matvec(v, y)


def inverse_unimodular(m: Sequence[Sequence[int]]) -> Matrix:
    n = len(m)
    aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise LatticeError("matrix is singular")
    inv = [[x for x in row[n:]] for row in red]
    if any(x.denominator != 1 for row in inv for x in row):
        raise LatticeError("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


# ---------------------------------------------------------------------------
# quotient by a one-parameter subgroup


@dataclass(frozen=True)
class QuotientLattice:
    """The projection ``π: N -> N / Z·a`` with a section.

    ``matrix`` is an (n-1) x n integer matrix with ``matrix @ a == 0`` and
    integer cokernel zero; ``section`` is n x (n-1) with
    ``matrix @ section == identity``.
    """

    a: Vector
    matrix: tuple[Vector, ...]
    section: tuple[Vector, ...]

    @property
    def source_rank(self) -> int:
        return len(self.a)

    @property
    def target_rank(self) -> int:
        return len(self.a) - 1

    def project(self, x: Sequence) -> tuple:
        return tuple(dot(row, x) for row in self.matrix)

    def lift(self, y: Sequence) -> tuple:
        return tuple(dot(row, y) for row in self.section)


def quotient_by(a: Sequence[int]) -> QuotientLattice:
    """Projection of ``Z^n`` along the primitive vector ``a``.

    The matrix is the tail of the row-reduction ``U`` that takes ``a`` (viewed
    as a column) to ``±e_1``.  Pivots prefer the last coordinate of least
    absolute value; when ``a`` has a unit entry at position ``k`` this gives
    ``π(x)_j = x_j - a_j a_k x_k``, e.g. ``π(x) = (x1+x3, x2+x3)`` for
    ``a = (1, 1, -1)`` and "drop the last coordinate" for ``a = e_n``.
    """
    a = vec(a)
    n = len(a)
    if not is_primitive(a):
        raise LatticeError(f"{a} is not primitive; the quotient would have torsion")
    col = list(a)
    u = identity(n)
    while True:
        nz = [i for i in range(n) if col[i]]
        k = min(nz, key=lambda i: (abs(col[i]), -i))
        others = [i for i in nz if i != k]
        if not others:
            break
        for i in others:
            q = col[i] // col[k]
            col[i] -= q * col[k]
            u[i] = [x - q * y for x, y in zip(u[i], u[k])]
    if col[k] < 0:
        u[k] = [-x for x in u[k]]
    proj = [tuple(u[i]) for i in range(n) if i != k]
    uinv = inverse_unimodular(u)
    section = tuple(tuple(uinv[r][i] for i in range(n) if i != k) for r in range(n))
    return QuotientLattice(a=a, matrix=tuple(proj), section=section)
