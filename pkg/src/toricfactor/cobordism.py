"""Fans with a one-parameter subgroup action: birational cobordisms.

Orbit limits are computed with the toric limit rule: for x in the orbit of a
free cone γ, ``lim_{t->0} t·x`` lies in the orbit of the unique cone δ ⊇ γ
whose image in ``N / span(γ)`` has the image of a in its relative interior
(``-a`` for ``t -> ∞``).  :func:`orbit_limit_oracle` recomputes the same
limits from monomial valuations and is only used to cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Hashable, Iterable, Mapping, Sequence

from . import lattice as L
from .fans import Cone, Fan, FanError, desingularize, dual_cone, plus_span_contains
from .lattice import QuotientLattice, Vector, quotient_by
from .monomials import MonomialIdeal, hilbert_basis, linearity_cells, pullback_to_chart

ZERO, INFINITY = "0", "inf"


class CobordismError(ValueError):
    pass


class CycleError(CobordismError):
    """The order on fixed-point components has a cycle; ``cycle`` lists it."""

    def __init__(self, cycle: list):
        super().__init__(f"cyclic chain of fixed point components: {cycle}")
        self.cycle = cycle


def check_action(fan: Fan, a: Sequence[int]) -> Vector:
    a = L.vec(a)
    if len(a) != fan.rank:
        raise CobordismError("action vector has the wrong rank")
    if not any(a) or not L.is_primitive(a):
        raise CobordismError(f"action vector {a} is not primitive")
    if fan.support_contains(a) or fan.support_contains(L.neg(a)):
        raise CobordismError(f"action vector {a} lies in ±|Σ|")
    return a


def is_dependent(cone: Cone, a: Sequence[int]) -> bool:
    return L.in_span(a, cone.rays) if cone.rays else False


def _direction(a: Vector, direction: str) -> Vector:
    if direction == ZERO:
        return a
    if direction == INFINITY:
        return L.neg(a)
    raise ValueError(f"direction must be {ZERO!r} or {INFINITY!r}")


# ---------------------------------------------------------------------------
# boundaries


@dataclass(frozen=True)
class BoundaryPair:
    lower: Fan
    upper: Fan
    lower_quotient: Fan
    upper_quotient: Fan
    quotient: QuotientLattice


def _boundary(fan: Fan, b: Vector) -> list[Cone]:
    out = []
    for tau in fan.cones:
        above = [g for g in fan.maximal if set(tau.rays) <= set(g.rays)]
        if not any(plus_span_contains(g, tau, b) for g in above):
            out.append(tau)
    return out


def project_cone(q: QuotientLattice, cone: Cone) -> Cone:
    return Cone([q.project(r) for r in cone.rays], rank=q.target_rank)


def project_fan(q: QuotientLattice, fan: Fan) -> Fan:
    return Fan([project_cone(q, c) for c in fan.maximal], rank=q.target_rank)


def boundary_fans(fan: Fan, a: Sequence[int]) -> BoundaryPair:
    """Lower and upper boundary fans and their images in ``N / Z·a``.

    τ is in the lower boundary iff no cone γ ⊇ τ has ``a ∈ γ + span(τ)``:
    points of relint τ leave the support when pushed along ``+a``.
    """
    a = check_action(fan, a)
    lower = _boundary(fan, a)
    upper = _boundary(fan, L.neg(a))
    lower_fan = Fan(lower, rank=fan.rank, check=False)
    upper_fan = Fan(upper, rank=fan.rank, check=False)
    if lower_fan.cones != frozenset(lower) or upper_fan.cones != frozenset(upper):
        raise CobordismError("boundary is not closed under faces")
    q = quotient_by(a)
    return BoundaryPair(lower_fan, upper_fan, project_fan(q, lower_fan), project_fan(q, upper_fan), q)


def quotient_cover_check(fan: Fan, a: Sequence[int], pair: BoundaryPair | None = None) -> bool:
    """Both quotient boundary fans subdivide ``π(|Σ|)`` (exact covering test)."""
    from .fans import covers

    pair = pair or boundary_fans(fan, a)
    q = pair.quotient
    images = [project_cone(q, c) for c in fan.maximal]
    for qf in (pair.lower_quotient, pair.upper_quotient):
        for c in qf.maximal:
            if not any(img.contains_cone(c) for img in images):
                return False
        for img in images:
            if not covers(qf, img):
                return False
    return True


# ---------------------------------------------------------------------------
# dependent cones, limits and the order


def dependent_cones(fan: Fan, a: Sequence[int]) -> list[Cone]:
    a = check_action(fan, a)
    return sorted(c for c in fan.cones if is_dependent(c, a))


def limit_cone(fan: Fan, a: Sequence[int], gamma: Cone, direction: str = ZERO) -> Cone | None:
    """Cone whose orbit holds the limit of the orbit of γ (γ itself when dependent)."""
    a = L.vec(a)
    if is_dependent(gamma, a):
        return gamma
    b = _direction(a, direction)
    found = [
        d for d in fan.cones
        if set(gamma.rays) <= set(d.rays) and plus_span_contains(d, gamma, b, strict=True)
    ]
    if len(found) > 1:
        raise CobordismError(f"limit of {gamma} is not unique: {found}")
    return found[0] if found else None


@lru_cache(maxsize=4096)
def _chart_monoid(delta: Cone) -> tuple[Vector, ...]:
    return tuple(hilbert_basis(dual_cone(delta)))


def orbit_limit_oracle(fan: Fan, a: Sequence[int], gamma: Cone, direction: str = ZERO) -> Cone | None:
    """Limit cone from monomial valuations on the charts δ ⊇ γ.

    On the chart of δ, a point x of the orbit of γ has ``z^m(x) != 0`` exactly
    for ``m ∈ γ^⊥``, and ``z^m(t·x) = t^<m,b> z^m(x)``.  The limit exists iff
    ``<m, b> >= 0`` for every monoid generator m with ``z^m(x) != 0``; it lies in
    the orbit of the face of δ killed by the generators that stay nonzero.
    """
    b = _direction(L.vec(a), direction)
    for delta in sorted(fan.cones):
        if not set(gamma.rays) <= set(delta.rays):
            continue
        alive = [m for m in _chart_monoid(delta)
                 if all(L.dot(m, r) == 0 for r in gamma.rays)]
        if any(L.dot(m, b) < 0 for m in alive):
            continue
        survivors = [m for m in alive if L.dot(m, b) == 0]
        face = [r for r in delta.rays if all(L.dot(m, r) == 0 for m in survivors)]
        return Cone(face, rank=fan.rank) if face else Cone((), rank=fan.rank)
    return None


def order_relation(fan: Fan, a: Sequence[int]) -> set[tuple[Cone, Cone]]:
    """Pairs ``(σ1, σ2)`` of dependent cones with σ1 ≺ σ2: some free orbit flows
    from σ2 (t -> ∞) to σ1 (t -> 0)."""
    a = check_action(fan, a)
    rel = set()
    for tau in fan.cones:
        if is_dependent(tau, a):
            continue
        lo = limit_cone(fan, a, tau, ZERO)
        hi = limit_cone(fan, a, tau, INFINITY)
        if lo is not None and hi is not None:
            rel.add((lo, hi))
    return rel


def fixed_components(fan: Fan, a: Sequence[int]) -> list[frozenset[Cone]]:
    """Dependent cones grouped by connectedness of their orbit closures."""
    deps = dependent_cones(fan, a)
    parent = {d: d for d in deps}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, d1 in enumerate(deps):
        for d2 in deps[i + 1:]:
            if set(d1.rays) <= set(d2.rays) or set(d2.rays) <= set(d1.rays):
                parent[find(d1)] = find(d2)
    groups: dict[Cone, set] = {}
    for d in deps:
        groups.setdefault(find(d), set()).add(d)
    return sorted((frozenset(g) for g in groups.values()), key=lambda g: min(g))


def topological_labels(nodes: Iterable[Hashable], edges: Iterable[tuple], key=None) -> dict:
    """Strictly increasing labels 0..k-1 for an acyclic digraph.

    Nodes are layered by longest path from a source and ordered by ``key``
    inside a layer.  A cycle raises :class:`CycleError` carrying it.
    """
    nodes = list(nodes)
    key = key or (lambda x: x)
    succ = {n: set() for n in nodes}
    for u, v in edges:
        succ[u].add(v)
    # cycle detection by DFS, reporting the cycle
    state = {n: 0 for n in nodes}
    stack: list = []

    def visit(u):
        state[u] = 1
        stack.append(u)
        for v in sorted(succ[u], key=key):
            if state[v] == 1:
                raise CycleError(stack[stack.index(v):] + [v])
            if state[v] == 0:
                visit(v)
        stack.pop()
        state[u] = 2

    for n in sorted(nodes, key=key):
        if state[n] == 0:
            visit(n)
    level = {}
    pending = {n: 0 for n in nodes}
    for u in nodes:
        for v in succ[u]:
            pending[v] += 1
    frontier = [n for n in nodes if pending[n] == 0]
    depth = 0
    while frontier:
        for n in frontier:
            level[n] = depth
        nxt = []
        for u in frontier:
            for v in succ[u]:
                pending[v] -= 1
                if pending[v] == 0:
                    nxt.append(v)
        frontier = nxt
        depth += 1
    ordered = sorted(nodes, key=lambda n: (level[n], key(n)))
    return {n: i for i, n in enumerate(ordered)}


def chi(fan: Fan, a: Sequence[int]) -> dict[Cone, int]:
    """A strictly increasing labelling of the dependent cones.

    Labels are constant on fixed-point components (a dependent cone and the
    dependent cones containing it give one connected fixed locus).
    """
    comps = fixed_components(fan, a)
    where = {d: c for c in comps for d in c}
    edges = {(where[s1], where[s2]) for s1, s2 in order_relation(fan, a)}
    labels = topological_labels(comps, edges, key=lambda c: min(c).key)
    return {d: labels[c] for c in comps for d in c}


def quasi_elementary_pieces(fan: Fan, a: Sequence[int], chi_map: Mapping[Cone, int]) -> list[tuple[int, Fan]]:
    """Subfans ``Σ_{a_i}``, one per value of χ, in increasing order.

    Σ_{a_i} drops every cone flowing (t -> ∞) into a component with χ < a_i and
    every cone flowing (t -> 0) into a component with χ > a_i.
    """
    a = check_action(fan, a)
    deps = dependent_cones(fan, a)
    missing = [d for d in deps if d not in chi_map]
    if missing:
        raise CobordismError(f"χ is missing on {missing}")
    limits = {g: (limit_cone(fan, a, g, ZERO), limit_cone(fan, a, g, INFINITY)) for g in fan.cones}
    pieces = []
    for value in sorted(set(chi_map[d] for d in deps)):
        kept = []
        for g, (lo, hi) in limits.items():
            if hi is not None and chi_map[hi] < value:
                continue
            if lo is not None and chi_map[lo] > value:
                continue
            kept.append(g)
        kept_set = set(kept)
        for g in kept:
            if not all(f in kept_set for f in g.faces()):
                raise CobordismError(f"piece for χ={value} is not closed under faces at {g}")
        pieces.append((value, Fan(kept, rank=fan.rank, check=False)))
    return pieces


# ---------------------------------------------------------------------------
# the cobordism value type


@dataclass(frozen=True)
class CobordismFan:
    """A fan Σ with a primitive one-parameter subgroup ``a ∉ ±|Σ|``."""

    fan: Fan
    a: Vector

    def __post_init__(self):
        object.__setattr__(self, "a", check_action(self.fan, self.a))

    @cached_property
    def boundaries(self) -> BoundaryPair:
        return boundary_fans(self.fan, self.a)

    @cached_property
    def dependent(self) -> list[Cone]:
        return dependent_cones(self.fan, self.a)

    @cached_property
    def relation(self) -> set[tuple[Cone, Cone]]:
        return order_relation(self.fan, self.a)

    @cached_property
    def chi(self) -> dict[Cone, int]:
        return chi(self.fan, self.a)

    def pieces(self) -> list[tuple[int, Fan]]:
        return quasi_elementary_pieces(self.fan, self.a, self.chi)


# ---------------------------------------------------------------------------
# construction from a blowup


def blowup_ideals(delta: Fan, center: Sequence[Sequence[int]]) -> dict[Cone, MonomialIdeal]:
    """Ideal of the orbit closure of the cone spanned by ``center``, chart by chart.

    On a maximal cone containing the center the ideal is ``(z_i : v_i ∈ center)``
    in the chart coordinates; elsewhere it is the unit ideal.
    """
    center = [L.primitive(v) for v in center]
    out = {}
    for sigma in delta.maximal:
        if not set(center) <= set(sigma.rays):
            out[sigma] = MonomialIdeal.unit(sigma)
            continue
        gens = []
        for v in center:
            rhs = [int(r == v) for r in sigma.rays]
            m = L.solve_integer(sigma.rays, rhs)
            if m is None:
                raise CobordismError(f"chart {sigma} has no dual coordinate for {v}")
            gens.append(m)
        out[sigma] = MonomialIdeal.generated_by(sigma, gens)
    return out


def check_compatible(delta: Fan, ideals: Mapping[Cone, MonomialIdeal]) -> None:
    maxes = delta.maximal
    for i, s1 in enumerate(maxes):
        for s2 in maxes[i + 1:]:
            common = Cone([r for r in s1.rays if r in s2.rays], rank=delta.rank)
            j1 = pullback_to_chart(ideals[s1], common)
            j2 = pullback_to_chart(ideals[s2], common)
            if not j1.same_ideal(j2):
                raise CobordismError(f"ideals on {s1} and {s2} disagree on {common}")


def _ideal_table(delta: Fan, ideals: Mapping[Cone, MonomialIdeal]) -> dict[Cone, MonomialIdeal]:
    table = {}
    for sigma in delta.maximal:
        ideal = ideals.get(sigma)
        table[sigma] = ideal if ideal is not None else MonomialIdeal.unit(sigma)
        if table[sigma].chart != sigma:
            raise CobordismError(f"ideal for {sigma} is given on another chart")
    unknown = [c for c in ideals if c not in table]
    if unknown:
        raise CobordismError(f"ideals given on cones that are not maximal: {unknown}")
    return table


def blowup_fan(delta: Fan, ideals: Mapping[Cone, MonomialIdeal]) -> Fan:
    """Fan of the normalized blowup of X(Δ) along the given ideal."""
    table = _ideal_table(delta, ideals)
    cells = []
    for sigma, ideal in table.items():
        cells.extend(linearity_cells(sigma, ideal))
    return Fan(cells, rank=delta.rank)


def build_cobordism(delta: Fan, ideals: Mapping[Cone, MonomialIdeal]) -> CobordismFan:
    """Toric cobordism between the blowup of X(Δ) along J (bottom) and X(Δ) (top).

    Blows up ``Δ × P^1`` along ``J + (w)`` on the charts over ``0 ∈ P^1``,
    resolves, and discards every cone through ``±e_{n+1}`` (the embedded copies
    of the two ends).  The action vector is ``e_{n+1}``.
    """
    if not all(c.is_smooth for c in delta.cones):
        raise CobordismError("Δ must be smooth")
    table = _ideal_table(delta, ideals)
    check_compatible(delta, table)
    n = delta.rank
    e = (0,) * n + (1,)
    me = L.neg(e)
    lift = lambda v: tuple(v) + (0,)
    cones = []
    for sigma, ideal in table.items():
        chart = Cone([lift(r) for r in sigma.rays] + [e], rank=n + 1)
        gens = [lift(m) for m in ideal.generators] + [e]
        cones.extend(linearity_cells(chart, MonomialIdeal.generated_by(chart, gens)))
        cones.append(Cone([lift(r) for r in sigma.rays] + [me], rank=n + 1))
    w = Fan(cones, rank=n + 1)
    resolved = desingularize(w).source
    kept = [c for c in resolved.cones if e not in c.rays and me not in c.rays]
    try:
        fan = Fan(kept, rank=n + 1, check=False)
    except FanError as exc:  # pragma: no cover - subfans of valid fans are valid
        raise CobordismError(str(exc)) from exc
    return CobordismFan(fan, e)
