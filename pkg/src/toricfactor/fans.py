"""Rational polyhedral cones, fans and their subdivisions.

A :class:`Cone` keeps its extremal rays (primitive, sorted) and a lattice
basis of its lineality space; both are canonical, so cone equality is tuple
equality.  Facet normals and equations are derived lazily and exactly.

Facets are found by brute force over (d-1)-subsets of generators, which is
perfectly adequate at the ranks this package deals with (n <= 5 or so).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import lattice as L
from .lattice import Vector


class ConeError(ValueError):
    pass


class FanError(ValueError):
    """An invalid fan; ``pair`` holds the offending cones when there are two."""

    def __init__(self, message: str, pair: tuple["Cone", "Cone"] | None = None):
        super().__init__(message)
        self.pair = pair


def _orth_reduce(v: Sequence[int], basis: Sequence[Sequence[int]]) -> Vector:
    """Primitive vector along the orthogonal projection of v away from span(basis)."""
    if not basis:
        return L.primitive(v)
    # solve Gram system for the projection coefficients
    gram = [[L.dot(b1, b2) for b2 in basis] for b1 in basis]
    rhs = [L.dot(b, v) for b in basis]
    coef = L.solve_rational(gram, rhs)
    w = [Fraction(x) for x in v]
    for c, b in zip(coef, basis):
        w = [wi - c * bi for wi, bi in zip(w, b)]
    return L.primitive(w)


def _facets(gens: Sequence[Vector], n: int) -> tuple[list[Vector], list[Vector], int]:
    """H-representation of pos(gens): (facet normals, equations, dimension).

    Facet normals are taken orthogonal to the equations (standard pairing), so
    each facet has exactly one primitive normal.
    """
    gens = [g for g in gens if any(g)]
    eqs = L.integer_kernel(gens, n) if gens else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    d = n - len(eqs)
    if d == 0:
        return [], eqs, 0
    distinct = sorted(set(gens))
    normals: set[Vector] = set()
    seen_planes: set[frozenset] = set()
    for subset in itertools.combinations(distinct, d - 1):
        if d - 1 and L.rank(subset) != d - 1:
            continue
        ker = L.rational_kernel(list(eqs) + list(subset), n)
        if len(ker) != 1:
            continue
        w = L.primitive(ker[0])
        vals = [L.dot(w, g) for g in distinct]
        tight = frozenset(g for g, x in zip(distinct, vals) if x == 0)
        if tight in seen_planes:
            continue
        seen_planes.add(tight)
        if all(x >= 0 for x in vals) and any(x > 0 for x in vals):
            normals.add(w)
        elif all(x <= 0 for x in vals) and any(x < 0 for x in vals):
            normals.add(L.neg(w))
    return sorted(normals), eqs, d


def _extreme_rays(ineqs: Sequence[Vector], eqs: Sequence[Vector], n: int) -> tuple[list[Vector], list[Vector]]:
    """V-representation (rays, lineality basis) of ``{x : <e,x> = 0, <w,x> >= 0}``.

    Incremental double description with integer updates: inequalities are
    added one at a time; rays on opposite sides are combined when they are
    adjacent (no other ray is tight on everything both are tight on).
    Tight sets are kept as bitmasks over the inequalities added so far.
    """
    lin = L.integer_kernel(list(eqs), n) if eqs else [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays: dict[Vector, int] = {}
    for k, w in enumerate(ineqs):
        bit = 1 << k
        at = next((i for i, l in enumerate(lin) if L.dot(w, l)), None)
        if at is not None:
            pivot = lin[at]
            if L.dot(w, pivot) < 0:
                pivot = L.neg(pivot)
            wp = L.dot(w, pivot)

            def cut(g):
                wg = L.dot(w, g)
                return L.primitive([wp * x - wg * y for x, y in zip(g, pivot)]) if wg else g

            lin = [cut(l) for i, l in enumerate(lin) if i != at]
            # every earlier inequality vanishes on the old lineality, hence on pivot
            new = {}
            for r, mask in rays.items():
                new[cut(r)] = mask | bit
            new[pivot] = (1 << k) - 1
            rays = new
            continue
        vals = {r: L.dot(w, r) for r in rays}
        pos = [r for r, v in vals.items() if v > 0]
        neg = [r for r, v in vals.items() if v < 0]
        out = {r: (m | bit if vals[r] == 0 else m) for r, m in rays.items() if vals[r] >= 0}
        if neg:
            masks = list(rays.items())
            for p in pos:
                mp = rays[p]
                for q in neg:
                    common = mp & rays[q]
                    if any(r != p and r != q and common & m == common for r, m in masks):
                        continue
                    r = L.primitive([vals[p] * y - vals[q] * x for x, y in zip(p, q)])
                    out[r] = common | bit
        rays = out
    return list(rays), lin


class Cone:
    """A rational polyhedral cone ``pos(generators) + span(lineality)`` in Z^rank.

    Generators need not be primitive or extremal; the stored ``rays`` are the
    canonical extremal rays of the pointed part (orthogonal to the lineality
    space when there is one).
    """

    __slots__ = ("rank", "rays", "lineality", "__dict__")

    def __init__(self, generators: Iterable[Sequence[int]] = (), rank: int | None = None,
                 lineality: Iterable[Sequence[int]] = ()):
        gens = [L.vec(g) for g in generators]
        lin = [L.vec(g) for g in lineality]
        if rank is None:
            if not gens and not lin:
                raise ConeError("rank is required for a cone without generators")
            rank = len((gens or lin)[0])
        if any(len(g) != rank for g in gens + lin):
            raise ConeError("generator length does not match the ambient rank")
        allgens = [L.primitive(g) for g in gens if any(g)]
        for g in lin:
            if any(g):
                p = L.primitive(g)
                allgens += [p, L.neg(p)]
        ineqs, eqs, d = _facets(allgens, rank)
        # lineality = part of the span on which every facet vanishes
        lin_rows = L.integer_kernel(list(eqs) + list(ineqs), rank) if d else []
        lin_basis = tuple(lin_rows)
        l = len(lin_basis)
        rays = set()
        if d > l:
            for g in set(allgens):
                if l and L.in_span(g, lin_basis):
                    continue
                r = _orth_reduce(g, lin_basis)
                tight = [w for w in ineqs if L.dot(w, r) == 0]
                if L.rank(list(eqs) + tight) == rank - l - 1:
                    rays.add(r)
        self.rank = rank
        self.rays = tuple(sorted(rays))
        self.lineality = lin_basis
        self.__dict__["_hrep"] = (tuple(ineqs), tuple(eqs), d)

    @classmethod
    def _trusted(cls, rays: Iterable[Vector], rank: int) -> "Cone":
        """Strictly convex cone from rays already known to be primitive and extremal."""
        c = object.__new__(cls)
        c.rank = rank
        c.rays = tuple(sorted(set(rays)))
        c.lineality = ()
        return c

    @classmethod
    def from_inequalities(cls, inequalities: Iterable[Sequence[int]],
                          equations: Iterable[Sequence[int]] = (), rank: int | None = None) -> "Cone":
        """The cone ``{x : <w,x> >= 0, <e,x> = 0}``."""
        ineqs = [L.vec(w) for w in inequalities]
        eqs = [L.vec(e) for e in equations]
        if rank is None:
            rank = len((ineqs or eqs)[0])
        rays, lin = _extreme_rays(ineqs, eqs, rank)
        return cls(rays, rank=rank, lineality=lin)

    # -- representation -------------------------------------------------

    @property
    def _hrep_data(self):
        if "_hrep" not in self.__dict__:
            gens = list(self.rays)
            for g in self.lineality:
                gens += [g, L.neg(g)]
            ineqs, eqs, d = _facets(gens, self.rank)
            self.__dict__["_hrep"] = (tuple(ineqs), tuple(eqs), d)
        return self.__dict__["_hrep"]

    @property
    def inequalities(self) -> tuple[Vector, ...]:
        """Inward facet normals."""
        return self._hrep_data[0]

    @property
    def equations(self) -> tuple[Vector, ...]:
        """Lattice basis of the orthogonal complement of the span."""
        return self._hrep_data[1]

    @property
    def dim(self) -> int:
        return self._hrep_data[2]

    @property
    def key(self) -> tuple:
        return (self.rank, self.rays, self.lineality)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other: "Cone"):
        return (self.dim, self.rays, self.lineality) < (other.dim, other.rays, other.lineality)

    def __repr__(self):
        body = ", ".join(str(r) for r in self.rays)
        if self.lineality:
            body += " | lin " + ", ".join(str(r) for r in self.lineality)
        return f"Cone<{body}>"

    @property
    def is_strictly_convex(self) -> bool:
        return not self.lineality

    @property
    def generators(self) -> tuple[Vector, ...]:
        """Rays plus both signs of every lineality basis vector."""
        out = list(self.rays)
        for g in self.lineality:
            out += [g, L.neg(g)]
        return tuple(out)

    # -- membership -----------------------------------------------------

    def _check(self, x):
        if len(x) != self.rank:
            raise ConeError(f"point of length {len(x)} in a cone of rank {self.rank}")

    def contains(self, x: Sequence) -> bool:
        self._check(x)
        return all(L.dot(e, x) == 0 for e in self.equations) and all(
            L.dot(w, x) >= 0 for w in self.inequalities
        )

    def relint_contains(self, x: Sequence) -> bool:
        self._check(x)
        return all(L.dot(e, x) == 0 for e in self.equations) and all(
            L.dot(w, x) > 0 for w in self.inequalities
        )

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.generators)

    # -- combinatorics --------------------------------------------------

    @property
    def is_simplicial(self) -> bool:
        return self.is_strictly_convex and len(self.rays) == self.dim

    @cached_property
    def multiplicity(self) -> int:
        """Index of the lattice spanned by the rays in its saturation."""
        if not self.is_simplicial:
            raise ConeError("multiplicity is defined for simplicial cones only")
        if not self.rays:
            return 1
        out = 1
        for d in L.elementary_divisors(self.rays):
            out *= d
        return out

    @property
    def is_smooth(self) -> bool:
        return self.is_simplicial and self.multiplicity == 1

    def faces(self) -> list["Cone"]:
        """All faces (including the origin and the cone itself), sorted by dimension."""
        if not self.is_strictly_convex:
            raise ConeError("face enumeration needs a strictly convex cone")
        if "_faces" in self.__dict__:
            return self.__dict__["_faces"]
        full = frozenset(self.rays)
        facet_sets = {frozenset(r for r in self.rays if L.dot(w, r) == 0) for w in self.inequalities}
        found = {full}
        frontier = [full]
        while frontier:
            nxt = []
            for f in frontier:
                for g in facet_sets:
                    h = f & g
                    if h not in found:
                        found.add(h)
                        nxt.append(h)
            frontier = nxt
        found.add(frozenset())
        faces = sorted(Cone._trusted(f, self.rank) if f != full else self for f in found)
        self.__dict__["_faces"] = faces
        return faces

    def facets(self) -> list["Cone"]:
        return [f for f in self.faces() if f.dim == self.dim - 1]

    def is_face_of(self, other: "Cone") -> bool:
        if not set(self.rays) <= set(other.rays):
            return False
        tight = [w for w in other.inequalities if all(L.dot(w, r) == 0 for r in self.rays)]
        closure = {r for r in other.rays if all(L.dot(w, r) == 0 for w in tight)}
        return closure == set(self.rays)

    def barycenter(self) -> Vector:
        """Primitive vector along the sum of the rays."""
        return L.primitive([sum(c) for c in zip(*self.rays)])


def intersect(c1: Cone, c2: Cone) -> Cone:
    if c1.rank != c2.rank:
        raise ConeError("rank mismatch")
    return Cone.from_inequalities(
        list(c1.inequalities) + list(c2.inequalities),
        list(c1.equations) + list(c2.equations),
        rank=c1.rank,
    )


def dual_cone(sigma: Cone) -> Cone:
    """``σ^∨ = {m : <m, v> >= 0 for v in σ}``; lineality ``σ^⊥`` kept as a basis."""
    return Cone(sigma.inequalities, rank=sigma.rank, lineality=sigma.equations)


def contains(sigma: Cone, x: Sequence) -> bool:
    return sigma.contains(x)


def relint_contains(sigma: Cone, x: Sequence) -> bool:
    return sigma.relint_contains(x)


def is_smooth(sigma: Cone) -> bool:
    return sigma.is_smooth


def is_simplicial(sigma: Cone) -> bool:
    return sigma.is_simplicial


def cone_plus_span(gamma: Cone, tau: Cone) -> Cone:
    """``γ + span(τ)``: the image of γ in ``N / span(τ)``, pulled back to N."""
    return Cone(gamma.rays, rank=gamma.rank, lineality=list(tau.rays) + list(gamma.lineality))


def plus_span_contains(gamma: Cone, tau: Cone, x: Sequence, strict: bool = False) -> bool:
    """Membership in ``γ + span(τ)`` (its relative interior if ``strict``) for a face τ of γ.

    For a face, ``γ + span(τ)`` is cut out by the facets of γ containing τ, so
    no new cone is built.
    """
    if any(L.dot(e, x) for e in gamma.equations):
        return False
    for w in gamma.inequalities:
        if all(L.dot(w, r) == 0 for r in tau.rays):
            v = L.dot(w, x)
            if v < 0 or (strict and v == 0):
                return False
    return True


# ---------------------------------------------------------------------------
# fans


class Fan:
    """A finite face-closed collection of strictly convex cones meeting in faces."""

    def __init__(self, cones: Iterable[Cone], rank: int | None = None, check: bool = True):
        cones = list(cones)
        if rank is None:
            if not cones:
                raise FanError("rank is required for an empty fan")
            rank = cones[0].rank
        allcones: set[Cone] = set()
        for c in cones:
            if c.rank != rank:
                raise FanError(f"cone {c} has rank {c.rank}, fan has rank {rank}")
            if not c.is_strictly_convex:
                raise FanError(f"cone {c} is not strictly convex")
            allcones.update(c.faces())
        if not allcones:
            allcones.add(Cone._trusted((), rank))
        self.rank = rank
        self.cones = frozenset(allcones)
        ordered = sorted(self.cones)
        # a cone is maximal iff no other cone has a strictly larger ray set containing it
        maximal = []
        for c in sorted(ordered, key=lambda c: -c.dim):
            rs = set(c.rays)
            if not any(rs < set(m.rays) for m in maximal):
                maximal.append(c)
        self.maximal = tuple(sorted(maximal))
        if check:
            self.validate()

    @classmethod
    def from_rays(cls, rays: Sequence[Sequence[int]], cones: Sequence[Sequence[int]],
                  rank: int | None = None, check: bool = True) -> "Fan":
        if rank is None:
            rank = len(rays[0])
        return cls([Cone([rays[i] for i in idx], rank=rank) for idx in cones], rank=rank, check=check)

    def validate(self) -> None:
        maxes = self.maximal
        for i, c1 in enumerate(maxes):
            for c2 in maxes[i + 1:]:
                inter = intersect(c1, c2)
                if not inter.is_strictly_convex or not (inter.is_face_of(c1) and inter.is_face_of(c2)):
                    raise FanError(f"cones {c1} and {c2} do not meet in a common face", (c1, c2))

    @property
    def rays(self) -> tuple[Vector, ...]:
        return tuple(sorted(c.rays[0] for c in self.cones if c.dim == 1))

    @property
    def dim(self) -> int:
        return max(c.dim for c in self.cones)

    def cones_of_dim(self, d: int) -> list[Cone]:
        return sorted(c for c in self.cones if c.dim == d)

    def __eq__(self, other):
        return isinstance(other, Fan) and self.rank == other.rank and self.cones == other.cones

    def __hash__(self):
        return hash((self.rank, self.cones))

    def __iter__(self):
        return iter(sorted(self.cones))

    def __len__(self):
        return len(self.cones)

    def __contains__(self, cone: Cone) -> bool:
        return cone in self.cones

    def __repr__(self):
        return f"Fan(rank={self.rank}, maximal={list(self.maximal)})"

    def support_contains(self, x: Sequence) -> bool:
        return any(c.contains(x) for c in self.maximal)

    def carrier(self, x: Sequence) -> Cone | None:
        """The unique cone whose relative interior contains x."""
        for c in self.cones:
            if c.relint_contains(x):
                return c
        return None

    @property
    def is_smooth(self) -> bool:
        return all(c.is_smooth for c in self.maximal)

    @property
    def is_simplicial(self) -> bool:
        return all(c.is_simplicial for c in self.maximal)


def fans_equal(f1: Fan, f2: Fan) -> bool:
    return f1 == f2


# ---------------------------------------------------------------------------
# subdivisions


@dataclass(frozen=True)
class Subdivision:
    """``source`` refines ``target``; ``witness`` sends each source cone to the
    smallest target cone containing it.  ``steps`` lists the star-subdivision
    rays when the subdivision was produced by a sequence of them."""

    source: Fan
    target: Fan
    witness: dict = field(compare=False, repr=False)
    steps: tuple[Vector, ...] = ()

    def __bool__(self):
        return True


@dataclass(frozen=True)
class RefinementFailure:
    """Why a fan fails to refine another: an uncontained cone or an uncovered one."""

    reason: str
    cone: Cone

    def __bool__(self):
        return False


def covers(fan: Fan, cone: Cone) -> bool:
    """Exact test of ``cone ⊆ |fan|``.

    The pieces ``K ∩ cone`` for maximal K form a fan; the cone is covered iff
    full-dimensional pieces exist and every interior wall is shared by two of
    them (walls used once must lie on the boundary of ``cone``).
    """
    d = cone.dim
    if d == 0:
        return True
    cells = {intersect(k, cone) for k in fan.maximal}
    cells = [c for c in cells if c.dim == d]
    if not cells:
        return False
    walls: dict[Cone, int] = {}
    for c in cells:
        for f in c.facets():
            walls[f] = walls.get(f, 0) + 1
    for w, count in walls.items():
        if count > 2:
            return False
        if count == 1:
            on_boundary = any(all(L.dot(n, r) == 0 for r in w.rays) for n in cone.inequalities)
            if not on_boundary:
                return False
    return True


def is_refinement(finer: Fan, coarser: Fan) -> Subdivision | RefinementFailure:
    """Witness that ``finer`` subdivides ``coarser`` (same support, cones nested)."""
    if finer.rank != coarser.rank:
        raise FanError("rank mismatch")
    witness = {}
    coarse_sorted = sorted(coarser.cones)
    for c in sorted(finer.cones):
        w = next((t for t in coarse_sorted if t.contains_cone(c)), None)
        if w is None:
            return RefinementFailure("cone not contained in any cone of the coarser fan", c)
        witness[c] = w
    for t in coarser.maximal:
        if not covers(finer, t):
            return RefinementFailure("cone not covered by the finer fan", t)
    return Subdivision(source=finer, target=coarser, witness=witness)


def star_subdivision(fan: Fan, rho: Sequence[int], check: bool = True) -> Fan:
    """Star subdivision of ``fan`` at the primitive vector ``rho``."""
    rho = L.primitive(rho)
    if len(rho) != fan.rank:
        raise FanError("ray has the wrong rank")
    if rho in fan.rays:
        return fan
    if not fan.support_contains(rho):
        raise FanError(f"{rho} is not in the support of the fan")
    new = []
    for sigma in fan.maximal:
        if not sigma.contains(rho):
            new.append(sigma)
            continue
        for tau in sigma.faces():
            if not tau.contains(rho):
                new.append(Cone._trusted(tau.rays + (rho,), fan.rank))
    return Fan(new, rank=fan.rank, check=check)


def barycentric_subdivision(fan: Fan) -> Fan:
    """Star-subdivide at the barycenter of every cone, highest dimension first."""
    if not fan.is_simplicial:
        raise FanError("barycentric subdivision needs a simplicial fan")
    order = sorted((c for c in fan.cones if c.dim >= 2), key=lambda c: (-c.dim, c.rays))
    out = fan
    for c in order:
        out = star_subdivision(out, c.barycenter())
    return out


def parallelepiped_points(sigma: Cone) -> list[tuple[Vector, tuple[Fraction, ...]]]:
    """Nonzero lattice points ``Σ λ_i v_i`` with ``0 <= λ_i < 1`` of a simplicial cone."""
    rays = sigma.rays
    k = len(rays)
    u, d, _ = L.smith_normal_form(rays)
    divs = [d[i][i] for i in range(k)]
    den = divs[-1] if divs else 1  # each invariant divides the last one
    scale = [den // di for di in divs]
    out = []
    for ks in itertools.product(*(range(di) for di in divs)):
        if not any(ks):
            continue
        # den * λ_j, reduced into [0, den)
        num = [sum(ks[i] * scale[i] * u[i][j] for i in range(k)) % den for j in range(k)]
        pt = tuple(sum(num[j] * rays[j][c] for j in range(k)) // den for c in range(sigma.rank))
        out.append((pt, tuple(Fraction(x, den) for x in num)))
    return out


def _next_resolution_ray(fan: Fan) -> Vector | None:
    nonsimp = [c for c in fan.cones if not c.is_simplicial]
    if nonsimp:
        target = min(nonsimp, key=lambda c: (c.dim, c.rays))
        return target.barycenter()
    singular = [c for c in fan.cones if not c.is_smooth]
    if not singular:
        return None
    target = min(singular, key=lambda c: (c.dim, c.rays))
    candidates = parallelepiped_points(target)
    best = min(candidates, key=lambda pl: (sum(pl[1]), pl[0]))
    return L.primitive(best[0])


def desingularize(fan: Fan) -> Subdivision:
    """Resolve ``fan`` by star subdivisions.

    Rule: make the fan simplicial first (barycenter of the lowest-dimensional
    non-simplicial cone, smallest rays on ties); then, in the lowest-dimensional
    singular cone, subdivide at the nonzero point of the fundamental
    parallelepiped with least coefficient sum, lexicographically smallest on
    ties.  The chosen point is interior to that cone and every new cone through
    it has strictly smaller multiplicity.
    """
    steps = []
    current = fan
    while True:
        rho = _next_resolution_ray(current)
        if rho is None:
            break
        steps.append(rho)
        current = star_subdivision(current, rho)
    sub = is_refinement(current, fan)
    if not sub:
        raise FanError(f"resolution is not a refinement: {sub.reason}")
    return Subdivision(source=current, target=fan, witness=sub.witness, steps=tuple(steps))
