"""Torific blowups of smooth charts and their combinatorial certificates."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import lattice as L
from .cobordism import boundary_fans
from .fans import Cone, Fan, Subdivision, star_subdivision
from .lattice import Vector
from .monomials import (
    MonomialIdeal,
    check_action,
    in_dual,
    linearity_cells,
    newton_refinement,
    newton_subdivision,
    product_of,
    pullback_to_chart,
    torific_generators,
)


class TorificError(ValueError):
    pass


@dataclass(frozen=True)
class CertificateFailure:
    """No integral functional splits ``ray`` off ``cone`` inside ``a^⊥``."""

    cone: Cone
    ray: Vector
    rational: tuple | None  # a rational solution when one exists

    def __bool__(self):
        return False


def dual_coordinates(sigma: Cone) -> tuple[Vector, ...]:
    """Functionals ``v_i*`` with ``<v_i*, v_j> = δ_ij`` on the rays of a smooth cone.

    On a cone that is not full-dimensional these are defined up to ``σ^⊥``; the
    solver's canonical solution is used.
    """
    if not sigma.is_smooth:
        raise TorificError(f"{sigma} is not smooth")
    out = []
    for i in range(len(sigma.rays)):
        rhs = [int(i == j) for j in range(len(sigma.rays))]
        m = L.solve_integer(sigma.rays, rhs)
        assert m is not None
        out.append(m)
    return tuple(out)


def tangent_characters(sigma: Cone, a: Sequence[int]) -> tuple[int, ...]:
    return tuple(L.dot(m, a) for m in dual_coordinates(sigma))


def toroidal_certificate(tau: Cone, ray: Sequence[int], a: Sequence[int]) -> Vector | CertificateFailure:
    """``m ∈ M`` with ``<m, ray> = 1``, ``<m, v> = 0`` on the other rays, ``<m, a> = 0``."""
    ray = L.vec(ray)
    if ray not in tau.rays:
        raise TorificError(f"{ray} is not a ray of {tau}")
    rows = list(tau.rays) + [L.vec(a)]
    rhs = [int(v == ray) for v in tau.rays] + [0]
    m = L.solve_integer(rows, rhs)
    if m is None:
        return CertificateFailure(tau, ray, L.solve_rational(rows, rhs))
    return m


@dataclass(frozen=True)
class TorificRun:
    chart: Cone
    a: Vector
    characters: tuple[int, ...]
    ideals: dict[int, MonomialIdeal]
    product: MonomialIdeal
    subdivision: Subdivision
    removed: tuple[Vector, ...]
    certificates: dict[tuple[Cone, Vector], Vector | CertificateFailure]
    coordinates: dict[tuple[Cone, Vector], Vector] = field(default_factory=dict)

    @property
    def fan(self) -> Fan:
        return self.subdivision.source

    @property
    def certified(self) -> bool:
        return all(bool(c) for c in self.certificates.values())

    def failures(self) -> list[CertificateFailure]:
        return [c for c in self.certificates.values() if not c]


def character_set(tangent: Iterable[int], extra: Iterable[int] = (), balanced: bool = False) -> tuple[int, ...]:
    chars: list[int] = []
    for c in list(tangent) + list(extra):
        if c not in chars:
            chars.append(c)
    total = sum(chars)
    if balanced and total:
        chars.append(-total)
    return tuple(chars)


def torify_chart(sigma: Cone, a: Sequence[int], extra_characters: Iterable[int] = (),
                 balanced: bool = False) -> TorificRun:
    """Normalized blowup of a smooth chart along the torific ideal of its characters."""
    a = L.vec(a)
    if not sigma.is_smooth:
        raise TorificError(f"{sigma} is not smooth")
    try:
        check_action(sigma, a)
    except ValueError as exc:
        raise TorificError(str(exc)) from exc
    duals = dual_coordinates(sigma)
    tangent = tuple(L.dot(m, a) for m in duals)
    chars = character_set(tangent, extra_characters, balanced)
    ideals = {c: torific_generators(sigma, a, c) for c in dict.fromkeys(chars)}
    product = product_of([ideals[c] for c in chars])
    sub = newton_refinement(sigma, [ideals[c] for c in chars])
    removed = tuple(v for v, c in zip(sigma.rays, tangent) if not ideals[c].is_principal)
    certificates, coordinates = {}, {}
    dual_of = dict(zip(sigma.rays, duals))
    for tau in sorted(sub.source.cones):
        for v in removed:
            if v not in tau.rays:
                continue
            cert = toroidal_certificate(tau, v, a)
            certificates[(tau, v)] = cert
            if cert and in_dual(sigma, L.sub(dual_of[v], cert)):
                # z_i / z^{m_i} is invariant and is the coordinate split off at v
                coordinates[(tau, v)] = L.sub(dual_of[v], cert)
    return TorificRun(sigma, a, chars, ideals, product, sub, removed, certificates, coordinates)


def iterated_torific_fan(sigma: Cone, a: Sequence[int], characters: Sequence[int]) -> Fan:
    """Blow up I_{c_1}, then the pullback of I_{c_2}, and so on, normalizing each time."""
    fan = Fan([sigma], rank=sigma.rank)
    for c in characters:
        ideal = torific_generators(sigma, a, c)
        cells = []
        for tau in fan.maximal:
            cells.extend(linearity_cells(tau, pullback_to_chart(ideal, tau)))
        fan = Fan(cells, rank=sigma.rank)
    return fan


def tor_isom_check(sigma: Cone, a: Sequence[int], alpha: int) -> bool:
    """Whether the blowup of ``I_α·I_{-α}`` has equal quotient boundary fans."""
    a = L.vec(a)
    if alpha == 0:
        raise TorificError("α must be nonzero")
    for c in tangent_characters(sigma, a):
        if c and alpha % c:
            raise TorificError(f"α = {alpha} is not divisible by the tangent character {c}")
    check_action(sigma, a)
    product = product_of([torific_generators(sigma, a, alpha), torific_generators(sigma, a, -alpha)])
    tilde = newton_subdivision(sigma, product).source
    pair = boundary_fans(tilde, a)
    return pair.lower_quotient == pair.upper_quotient


def divisible_alpha(sigma: Cone, a: Sequence[int]) -> int:
    """Least positive α divisible by all nonzero tangent characters."""
    return math.lcm(*[abs(c) for c in tangent_characters(sigma, a) if c] or [1])


# ---------------------------------------------------------------------------
# elementary factorization


@dataclass(frozen=True)
class ElementaryFactor:
    """``star(lower, π(r_minus)) == common == star(upper, π(r_plus))``.

    The rays are None when π maps σ isomorphically and lower == upper.
    """

    r_minus: Vector | None
    common: Fan
    r_plus: Vector | None
    lower: Fan
    upper: Fan


def _candidates(boundary: Fan) -> list[Vector]:
    found = set(boundary.rays)
    for cone in boundary.maximal:
        for k in range(2, len(cone.rays) + 1):
            for subset in itertools.combinations(cone.rays, k):
                found.add(L.primitive(list(map(sum, zip(*subset)))))
    return sorted(found)


def _slide(sigma: Cone, u: Vector, a: Vector, to_lower: bool) -> Vector:
    """Primitive point where the line ``u + R·a`` leaves σ (along +a for the
    lower boundary, along -a for the upper one)."""
    bounds = []
    for n in sigma.inequalities:
        na = L.dot(n, a)
        if (na < 0) if to_lower else (na > 0):
            bounds.append(Fraction(-L.dot(n, u), na))
    t = min(bounds) if to_lower else max(bounds)
    return L.primitive([x + t * y for x, y in zip(u, a)])


def elementary_factor(sigma: Cone, a: Sequence[int]) -> ElementaryFactor:
    """Express ``π(∂₋σ) ⇢ π(∂₊σ)`` as a star subdivision followed by an inverse one.

    Searches rays of the boundaries, primitive sums of subsets of boundary
    cone generators, and the points where lines parallel to a through those
    candidates cross the opposite boundary; pairs with equal images in ``N / Z·a`` are tried first.
    Raises :class:`TorificError` when nothing in the search space works.
    """
    a = L.vec(a)
    if not L.in_span(a, sigma.rays):
        raise TorificError(f"{sigma} is not dependent")
    if not sigma.is_simplicial:
        raise TorificError(f"{sigma} is not simplicial")
    pair = boundary_fans(Fan([sigma], rank=sigma.rank), a)
    lower, upper, q = pair.lower_quotient, pair.upper_quotient, pair.quotient
    if lower == upper:
        return ElementaryFactor(None, lower, None, lower, upper)
    lo, up = _candidates(pair.lower), _candidates(pair.upper)
    minus = sorted(set(lo) | {_slide(sigma, u, a, True) for u in up})
    plus = sorted(set(up) | {_slide(sigma, u, a, False) for u in lo})
    pairs = sorted(
        itertools.product(minus, plus),
        key=lambda rr: (q.project(rr[0]) != q.project(rr[1]), rr),
    )
    lower_stars: dict[Vector, Fan] = {}
    upper_stars: dict[Vector, Fan] = {}
    for rm, rp in pairs:
        pm, pp = L.primitive(q.project(rm)), L.primitive(q.project(rp))
        if pm not in lower_stars:
            lower_stars[pm] = star_subdivision(lower, pm)
        if pp not in upper_stars:
            upper_stars[pp] = star_subdivision(upper, pp)
        if lower_stars[pm] == upper_stars[pp]:
            return ElementaryFactor(rm, lower_stars[pm], rp, lower, upper)
    raise TorificError(f"no elementary factorization of {sigma} within the search space")


def torified_fan(fan: Fan, a: Sequence[int], extra_characters: Iterable[int] = (),
                 balanced: bool = False) -> tuple[Fan, list[TorificRun]]:
    """Glue the torific subdivisions of the maximal charts of a smooth fan.

    All charts use one character set: every tangent character of every chart
    plus the extras, so the product ideals agree on overlaps.
    """
    a = L.vec(a)
    tangent = []
    for sigma in fan.maximal:
        tangent.extend(tangent_characters(sigma, a))
    chars = character_set(sorted(set(tangent)), extra_characters, balanced)
    runs = [torify_chart(sigma, a, chars) for sigma in fan.maximal]
    cells = [c for run in runs for c in run.fan.maximal]
    return Fan(cells, rank=fan.rank), runs

