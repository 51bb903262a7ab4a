"""Acceptance suite: eight criteria, each timed against its budget.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``;
either way one PASS/FAIL line is printed per criterion.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, os.path.dirname(__file__))

import pytest
from click.testing import CliRunner

from toricfactor import cli, lattice as L, worked_example
from toricfactor.cobordism import (
    INFINITY,
    ZERO,
    CobordismFan,
    boundary_fans,
    limit_cone,
    order_relation,
    orbit_limit_oracle,
    quotient_cover_check,
)
from toricfactor.fans import Cone, Fan, barycentric_subdivision, desingularize, dual_cone, star_subdivision
from toricfactor.monomials import pullback_to_chart, torific_generators
from toricfactor.torific import (
    divisible_alpha,
    tangent_characters,
    tor_isom_check,
    toroidal_certificate,
    torify_chart,
)
from oracles import clear_denominators, minimal_solutions, simplicial_membership
from suite import chart_suite, cobordism_suite, random_fan

DATA = Path(__file__).resolve().parents[1] / "data"
E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


# ---------------------------------------------------------------------------
# criteria; each returns (ok, detail)


def worked_example_exact():
    a = (2, 3, -1)
    orthant = Cone([E1, E2, E3])
    pinned = {2: [(0, 1, 1), (1, 0, 0)], 3: [(0, 1, 0), (2, 0, 1)],
              6: [(0, 2, 0), (2, 1, 1), (3, 0, 0)], -1: [(0, 0, 1)]}
    ideals_ok = all(sorted(torific_generators(orthant, a, c).generators) == g for c, g in pinned.items())
    run = torify_chart(orthant, a, [6])
    fan_ok = sorted(run.fan.maximal) == sorted(worked_example.EXPECTED["fan"])
    sigma1 = Cone([E1, (1, 0, 1), (1, 1, 0)])
    witness_ok = toroidal_certificate(sigma1, E1, a) == (1, -1, -1)
    _, diff = worked_example.run()
    ok = ideals_ok and fan_ok and run.certified and witness_ok and not diff
    return ok, f"ideals={ideals_ok} fan={fan_ok} certificates={len(run.certificates)} all green={run.certified} witness={witness_ok}"


def blowup_pipeline():
    runner = CliRunner()
    with tempfile.TemporaryDirectory() as tmp:
        cob = Path(tmp) / "b.cob"
        res = runner.invoke(cli.main, ["cobordize", str(DATA / "orthant2.fan"), str(DATA / "point_center.ideal"),
                                       "--expect-source", str(DATA / "blowup2.fan"),
                                       "--expect-target", str(DATA / "orthant2.fan"), "--out", str(cob)])
        report = json.loads(res.output)
        res2 = runner.invoke(cli.main, ["factor", str(cob)])
        trace = json.loads(res2.output)
    steps = [s for s in trace["steps"] if s["kind"] != "torific-blowup"]
    one_step = len(steps) == 1 and steps[0]["ray"] == [1, 1] and "star-subdivision" in steps[0]["kind"]
    checks = report["checks"]
    ok = (res.exit_code == 0 and res2.exit_code == 0 and checks["lower_quotient_is_source"]
          and checks["upper_quotient_is_target"] and one_step and trace["replay"])
    return ok, f"boundaries match={checks['lower_quotient_is_source'] and checks['upper_quotient_is_target']} steps={[s['kind'] for s in steps]} replay={trace['replay']}"


def boundary_identities():
    cases = cobordism_suite(200)
    bad_cover = bad_chain = chains = 0
    for fan, a in cases:
        cob = CobordismFan(fan, a)
        if not quotient_cover_check(fan, a, cob.boundaries):
            bad_cover += 1
        pieces = [boundary_fans(p, a) for _, p in cob.pieces()]
        for lo, hi in zip(pieces, pieces[1:]):
            chains += 1
            if lo.upper != hi.lower:
                bad_chain += 1
    return not bad_cover and not bad_chain, f"{len(cases)} cases, cover failures={bad_cover}, consecutive pairs={chains}, mismatches={bad_chain}"


def torific_properties():
    cases = chart_suite(200)
    empty = wrong = incoherent = 0
    for sigma, a in cases:
        chars = tangent_characters(sigma, a)
        for alpha in range(-10, 11):
            ideal = torific_generators(sigma, a, alpha)
            if not ideal.generators:
                empty += 1
            if alpha in (-3, -1, 2, 5):
                ys = sorted(tuple(L.dot(m, v) for v in sigma.rays) for m in ideal.generators)
                bound = max(max(max(y) for y in ys), abs(alpha) + max(abs(c) for c in chars))
                if ys != minimal_solutions(chars, alpha, bound):
                    wrong += 1
        run = torify_chart(sigma, a)
        for tau in run.fan.maximal:
            for c, ideal in run.ideals.items():
                if not torific_generators(tau, a, c).same_ideal(pullback_to_chart(ideal, tau)):
                    incoherent += 1
    ok = not (empty or wrong or incoherent)
    return ok, f"{len(cases)} charts, empty={empty}, oracle mismatches={wrong}, pullback mismatches={incoherent}"


def tor_isom():
    cases = chart_suite(200)
    failures = 0
    for sigma, a in cases:
        if not tor_isom_check(sigma, a, divisible_alpha(sigma, a)):
            failures += 1
    return not failures, f"{len(cases)} charts, failures={failures}"


def barycentric_stability():
    fan = barycentric_subdivision(Fan([Cone([E1, E2, E3])]))
    triples = violations = 0
    for perm in itertools.permutations(range(3)):
        g = lambda v: tuple(v[perm[i]] for i in range(3))
        for sigma in fan.cones:
            for tau in sigma.rays:
                image = g(tau)
                if sigma.contains(image):
                    triples += 1
                    if image != tau:
                        violations += 1
    return not violations, f"{len(fan.maximal)} maximal cones, triples checked={triples}, violations={violations}"


def oracle_agreement():
    cases = cobordism_suite(200)
    free = limit_bad = order_bad = 0
    for fan, a in cases:
        rel = set()
        for gamma in fan.cones:
            if L.in_span(a, gamma.rays):
                continue
            free += 1
            lo, hi = (orbit_limit_oracle(fan, a, gamma, d) for d in (ZERO, INFINITY))
            if lo != limit_cone(fan, a, gamma, ZERO) or hi != limit_cone(fan, a, gamma, INFINITY):
                limit_bad += 1
            if lo is not None and hi is not None:
                rel.add((lo, hi))
        if rel != order_relation(fan, a):
            order_bad += 1
    ok = not (limit_bad or order_bad)
    return ok, f"{len(cases)} fans, free cones={free}, limit mismatches={limit_bad}, order mismatches={order_bad}"


def _sample_points(rng, rays, count):
    """Exact rational points in and around the cone: nonnegative or mixed-sign
    combinations of the rays, some on faces, a few nudged off them."""
    n = len(rays[0])
    for _ in range(count):
        k = rng.random()
        coeffs = [Fraction(rng.randint(-4 if k < 0.5 else 0, 9), rng.randint(1, 7)) for _ in rays]
        if k > 0.75:
            for i in rng.sample(range(len(rays)), rng.randint(1, len(rays) - 1)):
                coeffs[i] = Fraction(0)
        p = [sum(c * r[j] for c, r in zip(coeffs, rays)) for j in range(n)]
        if k < 0.1:
            p = [x + Fraction(rng.randint(-1, 1), rng.randint(2, 9)) for x in p]
        yield p


def duality_and_resolution():
    rng = random.Random(8)
    cones = []
    while len(cones) < 12:
        n = 2 + len(cones) % 3
        rays = [tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(n)]
        if L.determinant(rays) != 0:
            cones.append(Cone(rays))
    mism = points = 0
    for sigma in cones:
        dual = dual_cone(sigma)
        back = dual_cone(dual)
        if back != sigma:
            mism += 1
        inside = simplicial_membership(sigma.rays)
        for p in _sample_points(rng, sigma.rays, 10_000):
            points += 1
            q = clear_denominators(p)
            by_dual = all(L.dot(m, q) >= 0 for m in dual.rays)
            if by_dual != inside(q):
                mism += 1
    fans = [random_fan(random.Random(s), 2 + s % 2, 1) for s in range(10)]
    fans += [Fan([c]) for c in cones if c.rank <= 3]
    resolve_bad = 0
    for fan in fans:
        sub = desingularize(fan)
        current = fan
        for rho in sub.steps:
            current = star_subdivision(current, rho)
        if not sub.source.is_smooth or current != sub.source:
            resolve_bad += 1
    ok = not mism and not resolve_bad
    return ok, f"{len(cones)} cones x 10^4 points ({points}), mismatches={mism}; {len(fans)} fans resolved, failures={resolve_bad}"


CRITERIA = [
    (1, "worked A^3 example exact", worked_example_exact, 1.0),
    (2, "point blowup pipeline", blowup_pipeline, 1.0),
    (3, "boundary and quotient identities", boundary_identities, 30.0),
    (4, "torific ideal properties", torific_properties, 60.0),
    (5, "tor_isom_check on the suite", tor_isom, 30.0),
    (6, "barycentric stability", barycentric_stability, 1.0),
    (7, "limit and order oracle agreement", oracle_agreement, 30.0),
    (8, "duality and desingularization", duality_and_resolution, 60.0),
]


def evaluate(number, name, fn, limit):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    passed = ok and elapsed < limit
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {name} ({elapsed:.2f}s / limit {limit:g}s) {detail}"
    return passed, ok, elapsed, line


@pytest.mark.parametrize("number, name, fn, limit", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(number, name, fn, limit, capsys):
    passed, ok, elapsed, line = evaluate(number, name, fn, limit)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line
    assert elapsed < limit, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, _, _, line in results:
        print(line)
    sys.exit(0 if all(r[0] for r in results) else 1)
