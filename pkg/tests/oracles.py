"""Brute-force oracles, independent of the library code paths they check."""

from __future__ import annotations

import itertools
from fractions import Fraction


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def box(n, bound):
    return itertools.product(range(-bound, bound + 1), repeat=n)


def in_simplicial_cone(rays, x) -> bool:
    """Cramer's rule membership test for a full-dimensional simplicial cone."""
    n = len(x)
    assert len(rays) == n
    det = _det([list(r) for r in rays])
    for i in range(n):
        m = [list(r) for r in rays]
        m[i] = list(x)
        if Fraction(_det(m), det) < 0:
            return False
    return True


def _det(m):
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return det


def hilbert_basis_2d(rays, bound):
    """Irreducible lattice points of a pointed 2-dimensional cone inside a box."""
    inside = [p for p in box(2, bound) if any(p) and in_simplicial_cone(rays, p)]
    pts = set(inside)
    out = []
    for p in inside:
        if not any(q != p and tuple(a - b for a, b in zip(p, q)) in pts for q in inside):
            out.append(p)
    return sorted(out)


def minimal_solutions(chars, alpha, bound):
    """Coordinatewise-minimal y >= 0 in [0, bound]^n with sum(y_i c_i) = alpha."""
    sols = [y for y in itertools.product(range(bound + 1), repeat=len(chars)) if dot(y, chars) == alpha]
    return sorted(
        y for y in sols
        if not any(z != y and all(a <= b for a, b in zip(z, y)) for z in sols)
    )


def integer_solutions_exist(rows, rhs, bound):
    n = len(rows[0])
    return any(all(dot(r, x) == b for r, b in zip(rows, rhs)) for x in box(n, bound))


def simplicial_membership(rays):
    """Membership test for a full-dimensional simplicial cone via its integer adjugate.

    x = Σ λ_i r_i with λ = adj·x / det, so x is in the cone iff every
    ``sign(det) * (adj·x)_i`` is nonnegative.
    """
    n = len(rays)
    cols = [list(r) for r in rays]  # the matrix with the rays as columns is the transpose
    det = _det(cols)
    sign = 1 if det > 0 else -1
    adj = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [[cols[c][r] for r in range(n) if r != j] for c in range(n) if c != i]
            row.append(int((-1) ** (i + j) * _det(minor)))
        adj.append(row)
    return lambda x: all(sign * dot(row, x) >= 0 for row in adj)


def clear_denominators(p):
    """Positive integer multiple of a rational vector (same cone membership)."""
    from math import lcm
    d = lcm(*(Fraction(x).denominator for x in p))
    return [int(Fraction(x) * d) for x in p]
