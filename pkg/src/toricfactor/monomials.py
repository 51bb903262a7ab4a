"""Monomial ideals on affine toric charts.

A chart is a strictly convex cone σ in N; monomials are exponent vectors m in
M ∩ σ^∨, and ``z^m`` divides ``z^m'`` on the chart iff ``m' - m`` lies in σ^∨.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import lattice as L
from .fans import Cone, Fan, Subdivision, intersect, parallelepiped_points
from .lattice import Vector


class IdealError(ValueError):
    pass


def in_dual(sigma: Cone, m: Sequence[int]) -> bool:
    return all(L.dot(m, v) >= 0 for v in sigma.rays)


def divides(sigma: Cone, m: Sequence[int], target: Sequence[int]) -> bool:
    """Whether z^m divides z^target on the chart σ."""
    return in_dual(sigma, L.sub(target, m))


def _pairings(sigma: Cone, m: Sequence[int]) -> tuple[int, ...]:
    return tuple(L.dot(m, v) for v in sigma.rays)


def minimalize(sigma: Cone, gens: Iterable[Sequence[int]]) -> tuple[Vector, ...]:
    """Minimal generators; among mutually divisible ones the smallest tuple is kept.

    ``z^m | z^m'`` iff the pairings of m with the rays are all at most those of m'.
    """
    best: dict[tuple[int, ...], Vector] = {}
    for g in gens:
        g = L.vec(g)
        y = _pairings(sigma, g)
        if y not in best or g < best[y]:
            best[y] = g
    kept: list[tuple[int, ...]] = []
    # a strict divisor has a strictly smaller pairing sum, so it is seen first
    for y in sorted(best, key=sum):
        if not any(all(a <= b for a, b in zip(k, y)) for k in kept):
            kept.append(y)
    return tuple(sorted(best[y] for y in kept))


@dataclass(frozen=True)
class MonomialIdeal:
    """A monomial ideal on the chart σ, stored by its minimal generators."""

    chart: Cone
    generators: tuple[Vector, ...]

    @classmethod
    def generated_by(cls, chart: Cone, gens: Iterable[Sequence[int]]) -> "MonomialIdeal":
        gens = [L.vec(g) for g in gens]
        if not gens:
            raise IdealError("the zero ideal is not supported")
        for g in gens:
            if len(g) != chart.rank:
                raise IdealError(f"exponent {g} has the wrong rank")
            if not in_dual(chart, g):
                raise IdealError(f"exponent {g} is not in the dual cone of {chart}")
        return cls(chart, minimalize(chart, gens))

    @classmethod
    def unit(cls, chart: Cone) -> "MonomialIdeal":
        return cls(chart, ((0,) * chart.rank,))

    @property
    def is_principal(self) -> bool:
        return len(self.generators) == 1

    @property
    def is_unit(self) -> bool:
        return self.is_principal and all(
            L.dot(self.generators[0], v) == 0 for v in self.chart.rays
        )

    def contains(self, m: Sequence[int]) -> bool:
        return any(divides(self.chart, g, m) for g in self.generators)

    def same_ideal(self, other: "MonomialIdeal") -> bool:
        """Equality as ideals: mutual divisibility of the generator sets."""
        return self.chart == other.chart and all(
            other.contains(g) for g in self.generators
        ) and all(self.contains(g) for g in other.generators)

    def order(self, v: Sequence) -> object:
        """Support function ``min_m <m, v>``."""
        return min(L.dot(m, v) for m in self.generators)


# ---------------------------------------------------------------------------
# Hilbert bases


def triangulate(cone: Cone) -> list[Cone]:
    """Pulling triangulation of a strictly convex cone using only its rays."""
    if cone.is_simplicial:
        return [cone]
    apex = cone.rays[0]
    out = []
    for facet in cone.facets():
        if apex in facet.rays:
            continue
        for simplex in triangulate(facet):
            out.append(Cone._trusted(simplex.rays + (apex,), cone.rank))
    return out


def _pointed_hilbert_basis(cone: Cone, grading=None, top=None) -> list[Vector]:
    candidates = set(cone.rays)
    for simplex in triangulate(cone):
        candidates.update(p for p, _ in parallelepiped_points(simplex))
    if grading is not None:
        # summands of a point of degree <= top have degree <= top as well
        candidates = {x for x in candidates if L.dot(grading, x) <= top}
    # x - y lies in the cone iff every facet pairing of y is at most that of x;
    # a proper summand has a strictly smaller pairing sum, so it comes first
    normals = cone.inequalities
    heights = {x: tuple(L.dot(w, x) for w in normals) for x in candidates}
    kept: list[Vector] = []
    for x in sorted(candidates, key=lambda x: (sum(heights[x]), x)):
        hx = heights[x]
        if not any(all(a <= b for a, b in zip(heights[y], hx)) for y in kept):
            kept.append(x)
    return sorted(kept)


def hilbert_basis(cone: Cone, grading: Sequence[int] | None = None, top: int | None = None) -> list[Vector]:
    """Minimal generating set of the monoid ``cone ∩ Z^n``.

    With a lineality space, the result is ``±`` a lattice basis of it plus lifts
    of the Hilbert basis of the pointed quotient cone.  Given a ``grading``
    that is nonnegative on the cone and vanishes on its lineality, only the
    elements of degree at most ``top`` are returned.
    """
    n = cone.rank
    if not cone.lineality:
        return _pointed_hilbert_basis(cone, grading, top)
    lin = [list(v) for v in cone.lineality]
    l = len(lin)
    _, _, q = L.smith_normal_form(lin)
    basis = L.inverse_unimodular(q)  # rows: a basis of Z^n whose first l rows span the lineality
    to_coords = lambda x: L.matvec(L.transpose(q), x)
    rays_q = [to_coords(r)[l:] for r in cone.rays]
    if n - l == 0 or not rays_q:
        pointed = []
    else:
        pointed_cone = Cone(rays_q, rank=n - l)
        graded = None if grading is None else [L.dot(grading, basis[l + i]) for i in range(n - l)]
        pointed = _pointed_hilbert_basis(pointed_cone, graded, top)
    out = []
    for h in pointed:
        coords = (0,) * l + h
        out.append(tuple(sum(coords[i] * basis[i][j] for i in range(n)) for j in range(n)))
    for v in cone.lineality:
        out += [tuple(v), L.neg(v)]
    return sorted(set(out))


# ---------------------------------------------------------------------------
# character-graded (torific) ideals


def character(m: Sequence[int], a: Sequence[int]) -> int:
    """K*-character of ``z^m`` under the one-parameter subgroup a."""
    return L.dot(m, a)


def check_action(sigma: Cone, a: Sequence[int]) -> None:
    if not any(a):
        raise IdealError("the action vector is zero")
    if not L.is_primitive(a):
        raise IdealError(f"action vector {tuple(a)} is not primitive")
    if sigma.contains(a) or sigma.contains(L.neg(a)):
        raise IdealError(f"action vector {tuple(a)} lies in ±{sigma}")


def _reduce_mod(m: Vector, basis: Sequence[Sequence[int]]) -> Vector:
    """Canonical coset representative of m modulo a lattice given in HNF."""
    m = list(m)
    for row in basis:
        p = next(i for i, x in enumerate(row) if x)
        q = m[p] // row[p]
        if q:
            m = [x - q * y for x, y in zip(m, row)]
    return tuple(m)


def torific_generators(sigma: Cone, a: Sequence[int], alpha: int) -> MonomialIdeal:
    """Minimal generators of the ideal spanned by monomials of character α.

    These are the level-one elements of the Hilbert basis of the cone
    ``{(m, k) : m ∈ σ^∨, <m, a> = α k, k >= 0}`` in its lattice, which is a
    complete and finite description (every irreducible element lies in a
    fundamental parallelepiped of a simplex of the triangulation).
    """
    a = L.vec(a)
    check_action(sigma, a)
    n = sigma.rank
    if alpha == 0:
        return MonomialIdeal.unit(sigma)
    basis = L.integer_kernel([list(a) + [-alpha]], n + 1)  # n vectors in Z^{n+1}
    ineqs = [tuple(L.dot(b, tuple(v) + (0,)) for b in basis) for v in sigma.rays]
    ineqs.append(tuple(b[n] for b in basis))
    cone = Cone.from_inequalities(ineqs, rank=n)
    level_one = []
    for c in hilbert_basis(cone, [b[n] for b in basis], 1):
        point = tuple(sum(c[i] * basis[i][j] for i in range(n)) for j in range(n + 1))
        if point[n] == 1:
            level_one.append(point[:n])
    # invariant units z^u (u ∈ σ^⊥ ∩ a^⊥) exist only on charts with a torus factor
    units = L.integer_kernel([list(r) for r in sigma.rays] + [list(a)], n) if sigma.dim < n else []
    if units:
        level_one = [_reduce_mod(m, units) for m in level_one]
    if not level_one:
        raise IdealError(f"no monomial of character {alpha} on {sigma}")
    return MonomialIdeal.generated_by(sigma, level_one)


def ideal_product(i1: MonomialIdeal, i2: MonomialIdeal) -> MonomialIdeal:
    if i1.chart != i2.chart:
        raise IdealError("ideals live on different charts")
    return MonomialIdeal.generated_by(
        i1.chart, [L.add(m1, m2) for m1 in i1.generators for m2 in i2.generators]
    )


def product_of(ideals: Sequence[MonomialIdeal]) -> MonomialIdeal:
    out = ideals[0]
    for i in ideals[1:]:
        out = ideal_product(out, i)
    return out


# ---------------------------------------------------------------------------
# normalized blowups


def linearity_cells(sigma: Cone, ideal: MonomialIdeal) -> dict[Cone, Vector]:
    """Full-dimensional cells ``{v ∈ σ : <m, v> <= <m', v> for all m'}`` by generator."""
    if ideal.chart != sigma:
        raise IdealError("ideal is not on this chart")
    cells = {}
    ys = {m: _pairings(sigma, m) for m in ideal.generators}
    for m in ideal.generators:
        # m2 - m in σ∨ gives an inequality that holds on all of σ
        extra = {L.primitive(L.sub(m2, m)) for m2 in ideal.generators
                 if m2 != m and not all(a >= b for a, b in zip(ys[m2], ys[m]))}
        ineqs = list(sigma.inequalities) + sorted(extra)
        cell = Cone.from_inequalities(ineqs, sigma.equations, rank=sigma.rank)
        if cell.dim == sigma.dim:
            cells[cell] = m
    return cells


def newton_subdivision(sigma: Cone, ideal: MonomialIdeal) -> Subdivision:
    """Fan of the normalized blowup of the chart along a monomial ideal."""
    cells = linearity_cells(sigma, ideal)
    fan = Fan(cells, rank=sigma.rank)
    target = Fan([sigma], rank=sigma.rank)
    witness = {c: min((t for t in target.cones if t.contains_cone(c)), key=lambda t: t.dim)
               for c in fan.cones}
    return Subdivision(source=fan, target=target, witness=witness)


def newton_refinement(sigma: Cone, ideals: Sequence[MonomialIdeal]) -> Subdivision:
    """``newton_subdivision`` of the product of ``ideals`` without expanding it.

    The support function of a product is the sum of the factors' concave
    support functions, so its cells are the full-dimensional intersections
    of the factors' cells.
    """
    cells = [sigma]
    for ideal in ideals:
        pieces = list(linearity_cells(sigma, ideal))
        if len(pieces) == 1:
            continue
        cells = [c for c in (intersect(c1, c2) for c1 in cells for c2 in pieces) if c.dim == sigma.dim]
    fan = Fan(cells, rank=sigma.rank)
    target = Fan([sigma], rank=sigma.rank)
    witness = {c: min((t for t in target.cones if t.contains_cone(c)), key=lambda t: t.dim)
               for c in fan.cones}
    return Subdivision(source=fan, target=target, witness=witness)


def pullback_to_chart(ideal: MonomialIdeal, tau: Cone) -> MonomialIdeal:
    """The ideal generated by the same monomials on the chart of τ ⊆ σ."""
    if not ideal.chart.contains_cone(tau):
        raise IdealError(f"{tau} is not contained in the chart {ideal.chart}")
    return MonomialIdeal.generated_by(tau, ideal.generators)
