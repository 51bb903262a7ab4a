"""Factorization traces: the birational map of a cobordism as explicit fan steps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from . import lattice as L
from .cobordism import CobordismFan, boundary_fans
from .fans import Fan, is_refinement, star_subdivision
from .lattice import Vector
from .torific import ElementaryFactor, TorificError, TorificRun, elementary_factor, tangent_characters, torified_fan, torify_chart

STAR, INVERSE_STAR, TORIFIC, QUOTIENT = "star-subdivision", "inverse-star-subdivision", "torific-blowup", "quotient-map"


class TraceError(ValueError):
    """A certificate could not be produced; ``cone`` names the offender."""

    def __init__(self, message: str, cone=None):
        super().__init__(message)
        self.cone = cone


@dataclass(frozen=True)
class Step:
    kind: str
    result: Fan | None = None  # fan after the step (None for torific reports)
    ray: Vector | None = None
    lower: Fan | None = None
    upper: Fan | None = None
    common: Fan | None = None
    runs: tuple[TorificRun, ...] = ()
    piece: int | None = None


@dataclass
class FactorizationTrace:
    source: Fan
    target: Fan
    steps: list[Step] = field(default_factory=list)
    chi: dict = field(default_factory=dict)
    pieces: list[tuple[int, Fan]] = field(default_factory=list)

    @property
    def map_steps(self) -> list[Step]:
        return [s for s in self.steps if s.kind != TORIFIC]


def replay(trace: FactorizationTrace) -> bool:
    """Re-derive every fan step from the source and compare with the target."""
    current = trace.source
    for step in trace.map_steps:
        if step.kind == STAR:
            current = star_subdivision(current, step.ray)
            if current != step.result:
                return False
        elif step.kind == INVERSE_STAR:
            if star_subdivision(step.result, step.ray) != current:
                return False
            current = step.result
        elif step.kind == QUOTIENT:
            if current != step.lower:
                return False
            if not (is_refinement(step.common, step.lower) and is_refinement(step.common, step.upper)):
                return False
            current = step.upper
        else:
            return False
    return current == trace.target


def _elementary_steps(piece: Fan, cob: CobordismFan, lower: Fan, upper: Fan) -> list[Step] | None:
    """Blow up at π(r₋) and blow down at π(r₊) for every dependent maximal cone."""
    q = cob.boundaries.quotient
    factors: list[ElementaryFactor] = []
    for sigma in piece.maximal:
        if not L.in_span(cob.a, sigma.rays):
            continue
        try:
            factors.append(elementary_factor(sigma, cob.a))
        except TorificError:
            return None
    ups = [L.primitive(q.project(f.r_minus)) for f in factors if f.r_minus is not None]
    downs = [L.primitive(q.project(f.r_plus)) for f in factors if f.r_plus is not None]
    steps = []
    current = lower
    for rho in dict.fromkeys(ups):
        nxt = star_subdivision(current, rho)
        if nxt != current:
            steps.append(Step(STAR, nxt, rho))
        current = nxt
    chain = [upper]
    down_rays = []
    for rho in dict.fromkeys(downs):
        nxt = star_subdivision(chain[-1], rho)
        if nxt != chain[-1]:
            chain.append(nxt)
            down_rays.append(rho)
    if chain[-1] != current:
        return None
    for rho, before in zip(reversed(down_rays), reversed(chain[:-1])):
        steps.append(Step(INVERSE_STAR, before, rho))
    return steps


def _quotient_step(piece: Fan, cob: CobordismFan, lower: Fan, upper: Fan,
                   extra: Iterable[int], balanced: bool) -> Step:
    if not piece.is_smooth:
        raise TraceError("piece is not smooth; cannot torify", next(c for c in piece.maximal if not c.is_smooth))
    chars = []
    for sigma in piece.maximal:
        chars.extend(tangent_characters(sigma, cob.a))
    alpha = math.lcm(*[abs(c) for c in chars if c] or [1])
    tor, _ = torified_fan(piece, cob.a, list(extra) + [alpha, -alpha], balanced)
    pair = boundary_fans(tor, cob.a)
    common = pair.lower_quotient
    if common != pair.upper_quotient:
        raise TraceError("torified piece has different quotient boundaries")
    if not is_refinement(common, lower) or not is_refinement(common, upper):
        raise TraceError("common quotient does not refine both ends")
    return Step(QUOTIENT, upper, None, lower, upper, common)


def factor(cob: CobordismFan, extra_characters: Iterable[int] = (), balanced: bool = False) -> FactorizationTrace:
    """Factor ``π(∂₋Σ) ⇢ π(∂₊Σ)`` piece by piece.

    Raises :class:`CycleError` when the cobordism is not collapsible and
    :class:`TraceError` when a toroidal certificate fails.
    """
    extra = tuple(extra_characters)
    chi_map = cob.chi
    pieces = cob.pieces()
    whole = cob.boundaries
    trace = FactorizationTrace(whole.lower_quotient, whole.upper_quotient, chi=chi_map, pieces=pieces)
    for value, piece in pieces:
        pair = boundary_fans(piece, cob.a)
        lower, upper = pair.lower_quotient, pair.upper_quotient
        runs = []
        for sigma in piece.maximal:
            if not sigma.is_smooth or not sigma.dim:
                continue
            run = torify_chart(sigma, cob.a, extra, balanced)
            if not run.certified:
                bad = run.failures()[0]
                raise TraceError(f"toroidal certificate fails at {bad.ray} in {bad.cone}", bad.cone)
            runs.append(run)
        trace.steps.append(Step(TORIFIC, runs=tuple(runs), piece=value))
        if lower == upper:
            continue
        steps = _elementary_steps(piece, cob, lower, upper)
        if steps is None:
            steps = [_quotient_step(piece, cob, lower, upper, extra, balanced)]
        trace.steps.extend(Step(s.kind, s.result, s.ray, s.lower, s.upper, s.common, piece=value) for s in steps)
    return trace
