import itertools

import pytest

from toricfactor import lattice as L
from toricfactor.fans import Cone, Fan, star_subdivision
from toricfactor.monomials import pullback_to_chart, torific_generators
from toricfactor.torific import (
    CertificateFailure,
    TorificError,
    character_set,
    divisible_alpha,
    elementary_factor,
    iterated_torific_fan,
    tangent_characters,
    tor_isom_check,
    toroidal_certificate,
    torified_fan,
    torify_chart,
)
from suite import chart_suite

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
A3 = Cone([E1, E2, E3])
W = (2, 3, -1)
SIGMA1 = Cone([E1, (1, 0, 1), (1, 1, 0)])
CHARTS = chart_suite(40, seed=5)


def test_worked_chart():
    run = torify_chart(A3, W, [6])
    assert sorted(run.characters) == [-1, 2, 3, 6]
    assert sorted(run.removed) == [E2, E1]
    assert len(run.fan.maximal) == 4
    assert run.certified
    assert run.certificates[(SIGMA1, E1)] == (1, -1, -1)
    assert run.coordinates[(SIGMA1, E1)] == (0, 1, 1)


def test_balanced_characters_sum_to_zero():
    run = torify_chart(A3, W, [6], balanced=True)
    assert sum(run.characters) == 0 and run.characters[-1] == -10
    assert run.certified
    assert character_set([1, -1], balanced=True) == (1, -1)


def test_planar_orthant_is_already_toroidal():
    sigma = Cone([(1, 0), (0, 1)])
    run = torify_chart(sigma, (1, -1))
    assert sorted(run.characters) == [-1, 1]
    assert run.product.is_principal
    assert run.fan == Fan([sigma]) and run.removed == ()


def test_torify_errors():
    with pytest.raises(TorificError):
        torify_chart(Cone([(1, 0), (0, 1)]), (1, 1))
    with pytest.raises(TorificError):
        torify_chart(Cone([(1, 0), (1, 2)]), (0, 1))


def test_certificate_examples():
    assert toroidal_certificate(SIGMA1, E1, W) == (1, -1, -1)
    assert toroidal_certificate(Cone([(1, 0), (0, 1)]), (1, 0), (0, 1)) == (1, 0)
    bad = toroidal_certificate(Cone([(1, 0), (1, 2)]), (1, 0), (0, 1))
    assert isinstance(bad, CertificateFailure) and not bad
    with pytest.raises(TorificError):
        toroidal_certificate(SIGMA1, E2, W)


def test_certificate_failure_matches_search():
    # exhaustive search confirms no integral functional exists
    hits = [m for m in itertools.product(range(-6, 7), repeat=2)
            if m[0] == 1 and m[0] + 2 * m[1] == 0 and m[1] == 0]
    assert hits == []


@pytest.mark.parametrize("case", range(len(CHARTS)))
def test_random_charts_are_certified(case):
    sigma, a = CHARTS[case]
    run = torify_chart(sigma, a)
    assert run.certified
    assert torify_chart(sigma, a, [1, -2]).certified
    for (tau, v), m in run.certificates.items():
        assert L.dot(m, v) == 1 and L.dot(m, a) == 0
        assert all(L.dot(m, r) == 0 for r in tau.rays if r != v)
    for v, c in zip(sigma.rays, tangent_characters(sigma, a)):
        assert (v in run.removed) == (not run.ideals[c].is_principal)
    for tau in run.fan.maximal:
        for c, ideal in run.ideals.items():
            assert torific_generators(tau, a, c).same_ideal(pullback_to_chart(ideal, tau))


@pytest.mark.parametrize("case", range(0, len(CHARTS), 4))
def test_iterated_blowups_agree_with_product(case):
    sigma, a = CHARTS[case]
    run = torify_chart(sigma, a)
    assert iterated_torific_fan(sigma, a, run.characters) == run.fan
    assert iterated_torific_fan(sigma, a, run.characters[::-1]) == run.fan


def test_worked_iterated_blowup():
    assert iterated_torific_fan(A3, W, (2, 3, 6, -1)) == torify_chart(A3, W, [6]).fan


def test_tor_isom_examples():
    assert tor_isom_check(A3, (1, 1, -1), 1)
    assert tor_isom_check(A3, W, 6)
    assert divisible_alpha(A3, W) == 6
    assert tor_isom_check(Cone([E1, E2], rank=3), (1, 1, -1), 1)
    with pytest.raises(TorificError):
        tor_isom_check(A3, W, 4)
    with pytest.raises(TorificError):
        tor_isom_check(A3, W, 0)


def test_elementary_factor_flip_free():
    f = elementary_factor(A3, (1, 1, -1))
    blowup = Fan([Cone([(1, 0), (1, 1)]), Cone([(1, 1), (0, 1)])])
    assert f.r_minus == (1, 1, 0)
    assert f.common == blowup == f.upper
    assert f.lower == Fan([Cone([(1, 0), (0, 1)])])


def test_elementary_factor_of_blowup_cobordism():
    f = elementary_factor(Cone([E1, E2, (1, 1, 1)]), E3)
    blowup = Fan([Cone([(1, 0), (1, 1)]), Cone([(1, 1), (0, 1)])])
    assert f.common == blowup == f.lower
    assert star_subdivision(f.upper, (1, 1)) == blowup


def test_elementary_factor_weighted():
    f = elementary_factor(A3, W)
    assert f.r_minus == (2, 3, 0)
    q = L.quotient_by(W)
    assert star_subdivision(f.lower, L.primitive(q.project(f.r_minus))) == f.common
    assert star_subdivision(f.upper, L.primitive(q.project(f.r_plus))) == f.common


def test_elementary_factor_trivial_and_errors():
    sigma = Cone([E1, E3], rank=3)
    f = elementary_factor(sigma, (1, 0, -1))
    assert f.r_minus is None and f.lower == f.upper == f.common
    with pytest.raises(TorificError):
        elementary_factor(Cone([E1, E2], rank=3), E3)


@pytest.mark.parametrize("case", range(len(CHARTS)))
def test_random_elementary_factors(case):
    sigma, a = CHARTS[case]
    if not L.in_span(a, sigma.rays):
        pytest.skip("chart is free")
    f = elementary_factor(sigma, a)
    q = L.quotient_by(a)
    if f.r_minus is not None:
        assert star_subdivision(f.lower, L.primitive(q.project(f.r_minus))) == f.common
        assert star_subdivision(f.upper, L.primitive(q.project(f.r_plus))) == f.common


def test_torified_fan_glues():
    fan = Fan([Cone([E1, E2, E3]), Cone([E2, E3, (-1, 0, 0)])], rank=3)
    glued, runs = torified_fan(fan, (0, 1, -1))
    assert len(runs) == 2 and all(r.certified for r in runs)
    assert glued.rank == 3 and glued.support_contains((0, 1, 1))
    assert all(set(r.characters) == set(runs[0].characters) for r in runs)


def test_normalization_can_enlarge_torific_ideals():
    # The coherence identity holds on charts of a single blowup before
    # normalization.  With the extra characters 1, -2 the normalized product
    # blowup has a cell whose dual holds the invariant monomial (-1,-1,2),
    # which is not a product of pulled-back generators.
    sigma, a = Cone([(-1, 1, 0), (-1, 2, 0), (0, -1, 1)]), (1, 1, 1)
    run = torify_chart(sigma, a, [1, -2])
    tau = Cone([(-3, 5, 1), (-2, 1, 1), (-1, 1, 0), (-1, 1, 1)])
    assert tau in run.fan.maximal and not tau.is_simplicial
    here = torific_generators(tau, a, -2)
    there = pullback_to_chart(run.ideals[-2], tau)
    assert here.generators == ((-1, 0, -1),) and there.generators == ((-2, -1, 1),)
    assert L.add(here.generators[0], (-1, -1, 2)) == there.generators[0]
    assert here.contains(there.generators[0]) and not there.contains(here.generators[0])
