"""The A^3 chart with weights (2, 3, -1): pinned values and a self-check."""

from __future__ import annotations

import copy

from .fans import Cone
from .torific import torify_chart

V1, V2, V3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)
A = (2, 3, -1)
CHARACTERS = (2, 3, 6, -1)


def _c(*rays):
    return Cone(rays)


EXPECTED = {
    "ideals": {
        2: [(1, 0, 0), (0, 1, 1)],
        3: [(0, 1, 0), (2, 0, 1)],
        6: [(3, 0, 0), (0, 2, 0), (2, 1, 1)],
        -1: [(0, 0, 1)],
    },
    # the second and third cones are not simplicial
    "fan": [
        _c(V1, (1, 0, 1), (1, 1, 0)),
        _c((1, 1, 0), (1, 0, 1), (2, 3, 0), V3),
        _c((2, 3, 0), V3, (1, 2, 0), (0, 1, 1)),
        _c((1, 2, 0), (0, 1, 1), V2),
    ],
    "removed": [V1, V2],
    "witness": (_c(V1, (1, 0, 1), (1, 1, 0)), V1, (1, -1, -1)),
    "balancing": {"character": -10, "generators": [(0, 0, 10)]},
}


def expected(corrupt: bool = False) -> dict:
    exp = copy.deepcopy(EXPECTED)
    if corrupt:
        exp["ideals"][2] = [(1, 0, 0), (0, 1, 2)]
    return exp


def _norm(gens):
    return sorted(tuple(g) for g in gens)


def _plain(x):
    if isinstance(x, Cone):
        return [list(r) for r in x.rays]
    if isinstance(x, (list, tuple)):
        return [_plain(y) for y in x]
    return x


def run(balanced: bool = False, pinned: dict | None = None) -> tuple[dict, list[dict]]:
    """Recompute everything and diff it against ``pinned``; returns (report, diff)."""
    pinned = pinned if pinned is not None else expected()
    sigma = Cone([V1, V2, V3])
    extra = [c for c in CHARACTERS if c not in (2, 3, -1)]
    run_ = torify_chart(sigma, A, extra, balanced)
    diff: list[dict] = []

    def check(what, got, want):
        if got != want:
            diff.append({"item": what, "expected": _plain(want), "computed": _plain(got)})

    for c, gens in pinned["ideals"].items():
        check(f"I[{c}]", _norm(run_.ideals[c].generators), _norm(gens))
    check("fan", sorted(run_.fan.maximal), sorted(pinned["fan"]))
    check("removed rays", sorted(run_.removed), sorted(pinned["removed"]))
    cone, ray, m = pinned["witness"]
    check("witness", run_.certificates.get((cone, ray)), m)
    check("certificates", [str(f.cone) for f in run_.failures()], [])
    if balanced:
        check("character sum", sum(run_.characters), 0)
        bal = pinned["balancing"]
        check("balancing character", run_.characters[-1], bal["character"])
        ideal = run_.ideals.get(bal["character"])
        check(f"I[{bal['character']}]", _norm(ideal.generators) if ideal else None, _norm(bal["generators"]))
    report = {
        "action": list(A),
        "characters": list(run_.characters),
        "ideals": {str(c): [list(g) for g in i.generators] for c, i in run_.ideals.items()},
        "fan": [[list(r) for r in c.rays] for c in run_.fan.maximal],
        "non_simplicial": [[list(r) for r in c.rays] for c in run_.fan.maximal if not c.is_simplicial],
        "removed": [list(v) for v in run_.removed],
        "certificates": [
            {"cone": [list(r) for r in k[0].rays], "ray": list(k[1]), "witness": list(v) if v else None}
            for k, v in run_.certificates.items()
        ],
        "match": not diff,
    }
    return report, diff
