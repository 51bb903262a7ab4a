"""Line-oriented text formats for fans, cobordisms and monomial ideal data.

Fan / cobordism file::

    # comments and blank lines are ignored
    rank 3
    ray 1 0 0
    ray 0 1 0
    ray 0 0 1
    cone 0 1 2          # ray indices; maximal cones suffice
    action 1 1 -1       # cobordism files only

Ideal file (charts are maximal cones of the accompanying fan)::

    center 0 1                 # ideal of the orbit closure of <ray 0, ray 1>
    ideal 0 1 : 1 0 ; 0 1      # explicit generators on the chart <ray 0, ray 1>

Everything is an integer; there are no floats anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .cobordism import blowup_ideals
from .fans import Cone, Fan
from .lattice import Vector
from .monomials import MonomialIdeal


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


@dataclass(frozen=True)
class FanFile:
    rank: int
    rays: tuple[Vector, ...]
    cones: tuple[tuple[int, ...], ...]
    action: Vector | None = None
    extra: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def to_fan(self, check: bool = True) -> Fan:
        cones = [Cone([self.rays[i] for i in idx], rank=self.rank) for idx in self.cones]
        return Fan(cones, rank=self.rank, check=check)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            key, *rest = line.split()
            yield no, key, rest


def _ints(tokens, no) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in tokens)
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", no) from None


def parse_fan(text: str) -> FanFile:
    rank = None
    rays: list[Vector] = []
    cones: list[tuple[int, ...]] = []
    action = None
    extra = []
    for no, key, rest in _lines(text):
        if key == "rank":
            vals = _ints(rest, no)
            if len(vals) != 1 or vals[0] < 1:
                raise ParseError("rank takes one positive integer", no)
            rank = vals[0]
        elif key == "ray":
            rays.append(_ints(rest, no))
        elif key == "cone":
            cones.append(_ints(rest, no))
        elif key == "action":
            action = _ints(rest, no)
        elif key in ("center", "ideal"):
            extra.append((key, tuple(rest)))
        else:
            raise ParseError(f"unknown keyword {key!r}", no)
    if rank is None:
        raise ParseError("missing rank line")
    for r in rays:
        if len(r) != rank:
            raise ParseError(f"ray {r} does not have rank {rank}")
        if not any(r):
            raise ParseError("zero ray")
    for c in cones:
        if any(i < 0 or i >= len(rays) for i in c):
            raise ParseError(f"cone {c} refers to a missing ray")
    if action is not None and len(action) != rank:
        raise ParseError(f"action {action} does not have rank {rank}")
    return FanFile(rank, tuple(rays), tuple(cones), action, tuple(extra))


def read_fan(path: str | Path) -> FanFile:
    try:
        return parse_fan(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


def format_fan(fan: Fan, action: Vector | None = None) -> str:
    """Canonical text: rays sorted, maximal cones as sorted index lists."""
    rays = list(fan.rays)
    index = {r: i for i, r in enumerate(rays)}
    out = [f"rank {fan.rank}"]
    out += ["ray " + " ".join(map(str, r)) for r in rays]
    for c in fan.maximal:
        if c.dim:
            out.append("cone " + " ".join(str(i) for i in sorted(index[r] for r in c.rays)))
    if action is not None:
        out.append("action " + " ".join(map(str, action)))
    return "\n".join(out) + "\n"


def parse_ideals(text: str, fan: FanFile) -> dict[Cone, MonomialIdeal]:
    """Ideal datum on the maximal cones of ``fan``; unspecified charts get the unit ideal."""
    delta = fan.to_fan()
    parsed = parse_fan(f"rank {fan.rank}\n" + text) if not text.lstrip().startswith("rank") else parse_fan(text)
    out: dict[Cone, MonomialIdeal] = {}
    for key, tokens in parsed.extra:
        if key == "center":
            idx = _ints(tokens, None)
            try:
                center = [fan.rays[i] for i in idx]
            except IndexError:
                raise ParseError(f"center {idx} refers to a missing ray") from None
            for chart, ideal in blowup_ideals(delta, center).items():
                if not ideal.is_unit:
                    out[chart] = ideal
            continue
        if ":" not in tokens:
            raise ParseError("ideal line needs 'ray indices : generators'")
        cut = tokens.index(":")
        idx = _ints(tokens[:cut], None)
        gens, cur = [], []
        for t in tokens[cut + 1:] + (";",):
            if t == ";":
                if cur:
                    gens.append(_ints(cur, None))
                cur = []
            else:
                cur.append(t)
        try:
            chart = Cone([fan.rays[i] for i in idx], rank=fan.rank)
        except IndexError:
            raise ParseError(f"chart {idx} refers to a missing ray") from None
        if chart not in delta.maximal:
            raise ParseError(f"chart {idx} is not a maximal cone of the fan")
        if any(len(g) != fan.rank for g in gens):
            raise ParseError("generator of the wrong rank")
        out[chart] = MonomialIdeal.generated_by(chart, gens)
    return out


def read_ideals(path: str | Path, fan: FanFile) -> dict[Cone, MonomialIdeal]:
    try:
        return parse_ideals(Path(path).read_text(), fan)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc


# ---------------------------------------------------------------------------
# JSON-friendly views


def cone_json(cone: Cone) -> dict:
    out = {"rays": [list(r) for r in cone.rays]}
    if cone.lineality:
        out["lineality"] = [list(v) for v in cone.lineality]
    return out


def fan_json(fan: Fan) -> dict:
    return {"rank": fan.rank, "maximal": [[list(r) for r in c.rays] for c in fan.maximal]}


def vec_json(v) -> list[int] | None:
    return None if v is None else [int(x) for x in v]

