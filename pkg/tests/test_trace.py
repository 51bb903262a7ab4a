import pytest

from toricfactor.cobordism import CobordismFan, blowup_ideals, build_cobordism
from toricfactor.fans import Cone, Fan, star_subdivision
from toricfactor.trace import INVERSE_STAR, QUOTIENT, STAR, TORIFIC, Step, factor, replay
from suite import cobordism_suite

ORTHANT2 = Fan([Cone([(1, 0), (0, 1)])])
ORTHANT3 = Fan([Cone([(1, 0, 0), (0, 1, 0), (0, 0, 1)])])


def test_point_blowup_trace():
    trace = factor(build_cobordism(ORTHANT2, blowup_ideals(ORTHANT2, [(1, 0), (0, 1)])))
    (step,) = trace.map_steps
    assert step.kind == INVERSE_STAR and step.ray == (1, 1)
    assert trace.source == star_subdivision(ORTHANT2, (1, 1)) and trace.target == ORTHANT2
    assert replay(trace)


def test_weighted_chart_trace():
    trace = factor(CobordismFan(ORTHANT3, (2, 3, -1)))
    assert [s.kind for s in trace.map_steps] == [STAR]
    assert trace.map_steps[0].ray == (2, 3)
    torific = [s for s in trace.steps if s.kind == TORIFIC]
    assert torific and all(r.certified for s in torific for r in s.runs)
    assert replay(trace)


def test_replay_rejects_tampering():
    trace = factor(build_cobordism(ORTHANT2, blowup_ideals(ORTHANT2, [(1, 0), (0, 1)])))
    step = trace.map_steps[0]
    trace.steps = [s for s in trace.steps if s.kind == TORIFIC] + [Step(STAR, step.result, (1, 2))]
    assert not replay(trace)
    trace.steps = [Step("bogus")]
    assert not replay(trace)


def test_quotient_step_replays():
    trace = factor(CobordismFan(ORTHANT3, (1, 1, -1)))
    fake = Step(QUOTIENT, trace.target, None, trace.source, trace.target, trace.target)
    trace.steps = [fake]
    assert replay(trace)


LOW_RANK = [(f, a) for f, a in cobordism_suite(90) if f.rank <= 3]


@pytest.mark.parametrize("case", range(len(LOW_RANK)))
def test_suite_traces_replay(case):
    fan, a = LOW_RANK[case]
    trace = factor(CobordismFan(fan, a))
    assert replay(trace)
