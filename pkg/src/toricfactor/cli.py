"""Command line interface: ``toricfactor <command> ...``.

Exit codes: 0 ok, 1 invalid input or mismatch, 2 parse error,
3 non-collapsible cobordism, 4 certificate failure.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from .cobordism import (
    CobordismError,
    CobordismFan,
    CycleError,
    blowup_fan,
    boundary_fans,
    build_cobordism,
    quotient_cover_check,
)
from .fans import FanError, dual_cone
from .formats import ParseError, cone_json, fan_json, format_fan, read_fan, read_ideals, vec_json
from .lattice import LatticeError
from .monomials import IdealError
from .torific import TorificError, torify_chart
from .trace import QUOTIENT, TORIFIC, TraceError, factor, replay
from . import worked_example

OK, INVALID, PARSE, CYCLE, CERTIFICATE = 0, 1, 2, 3, 4


def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            f"{pad}-\n{render_text(v, indent + 1)}" if isinstance(v, dict) else f"{pad}- {json.dumps(v)}"
            for v in obj
        )
    return pad + json.dumps(obj)


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, dict) for x in v) and len(json.dumps(v)) < 100


def emit(report: dict, ctx: click.Context, out: str | None = None) -> None:
    human = ctx.find_root().params.get("human", False)
    text = render_text(report) if human else json.dumps(report, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        click.echo(text)


def command(fn):
    """Map library exceptions to the exit-code contract."""

    @functools.wraps(fn)
    @click.pass_context
    def wrapper(ctx, *args, **kwargs):
        try:
            code = fn(ctx, *args, **kwargs) or OK
        except ParseError as exc:
            emit({"ok": False, "error": "parse", "message": str(exc)}, ctx)
            code = PARSE
        except CycleError as exc:
            emit({"ok": False, "error": "not collapsible", "cycle": [_cone_or_group(c) for c in exc.cycle]}, ctx)
            code = CYCLE
        except TraceError as exc:
            emit({"ok": False, "error": "certificate", "message": str(exc),
                  "cone": cone_json(exc.cone) if exc.cone is not None else None}, ctx)
            code = CERTIFICATE
        except FanError as exc:
            report = {"ok": False, "error": "invalid fan", "message": str(exc)}
            if exc.pair:
                report["pair"] = [cone_json(c) for c in exc.pair]
            emit(report, ctx)
            code = INVALID
        except (CobordismError, TorificError, IdealError, LatticeError, ValueError) as exc:
            emit({"ok": False, "error": "invalid", "message": str(exc)}, ctx)
            code = INVALID
        ctx.exit(code)

    return wrapper


def _cone_or_group(c):
    if isinstance(c, frozenset):
        return [cone_json(x) for x in sorted(c)]
    return cone_json(c) if hasattr(c, "rays") else str(c)


def _characters(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ParseError(f"--characters expects comma separated integers, got {text!r}") from None


def _load_cobordism(path: str) -> CobordismFan:
    ff = read_fan(path)
    if ff.action is None:
        raise ParseError("cobordism file needs an 'action' line")
    return CobordismFan(ff.to_fan(), ff.action)


@click.group()
@click.option("--human", is_flag=True, help="Readable text instead of JSON.")
def main(human):
    """Toric fans, cobordisms and torific blowups with exact integer arithmetic."""


@main.command()
@click.argument("fan_file")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the report here.")
@command
def check(ctx, fan_file, out):
    """Validate a fan and describe its cones."""
    fan = read_fan(fan_file).to_fan()
    emit({
        "ok": True,
        "valid": True,
        "rank": fan.rank,
        "rays": [list(r) for r in fan.rays],
        "smooth": fan.is_smooth,
        "simplicial": fan.is_simplicial,
        "support": {"dim": fan.dim, "full_dimensional": fan.dim == fan.rank, "maximal_cones": len(fan.maximal)},
        "maximal": [
            {**cone_json(c), "dim": c.dim, "simplicial": c.is_simplicial,
             "smooth": c.is_smooth, "multiplicity": c.multiplicity if c.is_simplicial else None}
            for c in fan.maximal
        ],
    }, ctx, out)


@main.command()
@click.argument("fan_file")
@click.option("--out", type=click.Path(dir_okay=False))
@command
def dual(ctx, fan_file, out):
    """Dual cones of the maximal cones."""
    fan = read_fan(fan_file).to_fan()
    emit({"ok": True, "duals": [{"cone": cone_json(c), "dual": cone_json(dual_cone(c))} for c in fan.maximal]},
         ctx, out)


@main.command()
@click.argument("cobordism_file")
@click.option("--out", type=click.Path(dir_okay=False))
@command
def boundary(ctx, cobordism_file, out):
    """Lower and upper boundary fans and their quotients."""
    cob = _load_cobordism(cobordism_file)
    pair = cob.boundaries
    covered = quotient_cover_check(cob.fan, cob.a, pair)
    emit({
        "ok": covered,
        "action": list(cob.a),
        "projection": [list(r) for r in pair.quotient.matrix],
        "lower": fan_json(pair.lower),
        "upper": fan_json(pair.upper),
        "lower_quotient": fan_json(pair.lower_quotient),
        "upper_quotient": fan_json(pair.upper_quotient),
        "quotients_subdivide_image": covered,
    }, ctx, out)
    return OK if covered else INVALID


@main.command()
@click.argument("fan_file")
@click.argument("ideal_file")
@click.option("--expect-source", type=click.Path(exists=True, dir_okay=False),
              help="Fan expected as the lower quotient (default: the blowup of the ideal).")
@click.option("--expect-target", type=click.Path(exists=True, dir_okay=False),
              help="Fan expected as the upper quotient (default: the input fan).")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the cobordism file here.")
@command
def cobordize(ctx, fan_file, ideal_file, expect_source, expect_target, out):
    """Build the cobordism of the blowup of FAN along the ideal."""
    ff = read_fan(fan_file)
    delta = ff.to_fan()
    ideals = read_ideals(ideal_file, ff)
    cob = build_cobordism(delta, ideals)
    source = read_fan(expect_source).to_fan() if expect_source else blowup_fan(delta, ideals)
    target = read_fan(expect_target).to_fan() if expect_target else delta
    pair = cob.boundaries
    checks = {
        "lower_quotient_is_source": pair.lower_quotient == source,
        "upper_quotient_is_target": pair.upper_quotient == target,
        "trivial": pair.lower_quotient == pair.upper_quotient,
    }
    text = format_fan(cob.fan, cob.a)
    if out:
        Path(out).write_text(text)
    ok = checks["lower_quotient_is_source"] and checks["upper_quotient_is_target"]
    emit({
        "ok": ok,
        "cobordism": {"fan": fan_json(cob.fan), "action": list(cob.a)},
        "cobordism_file": None if out else text,
        "lower_quotient": fan_json(pair.lower_quotient),
        "upper_quotient": fan_json(pair.upper_quotient),
        "checks": checks,
    }, ctx)
    return OK if ok else INVALID


@main.command()
@click.argument("cobordism_file")
@click.option("--out", type=click.Path(dir_okay=False))
@command
def chi(ctx, cobordism_file, out):
    """Dependent cones, the order between them and a strictly increasing labelling."""
    cob = _load_cobordism(cobordism_file)
    labels = cob.chi
    emit({
        "ok": True,
        "dependent": [cone_json(c) for c in cob.dependent],
        "relation": [[cone_json(s1), cone_json(s2)] for s1, s2 in sorted(cob.relation)],
        "chi": [{"cone": cone_json(c), "chi": labels[c]} for c in sorted(labels)],
    }, ctx, out)


@main.command()
@click.argument("cobordism_file")
@click.option("--out", type=click.Path(dir_okay=False))
@command
def pieces(ctx, cobordism_file, out):
    """Quasi-elementary pieces in increasing order of χ."""
    cob = _load_cobordism(cobordism_file)
    items, pairs = [], []
    for value, piece in cob.pieces():
        pair = boundary_fans(piece, cob.a)
        pairs.append(pair)
        items.append({"chi": value, "fan": fan_json(piece),
                      "lower_quotient": fan_json(pair.lower_quotient),
                      "upper_quotient": fan_json(pair.upper_quotient)})
    glued = all(p.upper == q.lower for p, q in zip(pairs, pairs[1:]))
    emit({"ok": glued, "pieces": items, "consecutive_boundaries_match": glued}, ctx, out)
    return OK if glued else INVALID


def _run_json(run) -> dict:
    return {
        "chart": cone_json(run.chart),
        "characters": list(run.characters),
        "ideals": {str(c): [list(g) for g in i.generators] for c, i in run.ideals.items()},
        "product": [list(g) for g in run.product.generators],
        "fan": fan_json(run.fan),
        "removed": [list(v) for v in run.removed],
        "certificates": [
            {"cone": cone_json(t), "ray": list(v), "witness": vec_json(m) if m else None,
             "coordinate": vec_json(run.coordinates.get((t, v)))}
            for (t, v), m in run.certificates.items()
        ],
        "certified": run.certified,
    }


@main.command()
@click.argument("cobordism_file")
@click.option("--characters", help="Extra characters c1,c2,...")
@click.option("--balanced", is_flag=True, help="Append the character making the sum zero.")
@click.option("--out", type=click.Path(dir_okay=False))
@command
def torify(ctx, cobordism_file, characters, balanced, out):
    """Torific blowup of every maximal chart."""
    ff = read_fan(cobordism_file)
    if ff.action is None:
        raise ParseError("torify needs an 'action' line")
    fan = ff.to_fan()
    extra = _characters(characters)
    runs = [torify_chart(sigma, ff.action, extra, balanced) for sigma in fan.maximal]
    ok = all(r.certified for r in runs)
    emit({"ok": ok, "action": list(ff.action), "runs": [_run_json(r) for r in runs]}, ctx, out)
    return OK if ok else CERTIFICATE


def _step_json(step) -> dict:
    out = {"kind": step.kind, "piece": step.piece}
    if step.kind == TORIFIC:
        out["runs"] = [_run_json(r) for r in step.runs]
    elif step.kind == QUOTIENT:
        out.update(lower=fan_json(step.lower), upper=fan_json(step.upper), common=fan_json(step.common))
    else:
        out.update(ray=vec_json(step.ray), result=fan_json(step.result))
    return out


@main.command(name="factor")
@click.argument("cobordism_file")
@click.option("--characters", help="Extra characters c1,c2,...")
@click.option("--balanced", is_flag=True)
@click.option("--out", type=click.Path(dir_okay=False))
@command
def factor_cmd(ctx, cobordism_file, characters, balanced, out):
    """Factor the birational map of a cobordism into explicit fan steps."""
    cob = _load_cobordism(cobordism_file)
    trace = factor(cob, _characters(characters), balanced)
    ok = replay(trace)
    emit({
        "ok": ok,
        "source": fan_json(trace.source),
        "target": fan_json(trace.target),
        "chi": [{"cone": cone_json(c), "chi": v} for c, v in sorted(trace.chi.items())],
        "pieces": [{"chi": v, "fan": fan_json(p)} for v, p in trace.pieces],
        "steps": [_step_json(s) for s in trace.steps],
        "map_steps": len(trace.map_steps),
        "replay": ok,
    }, ctx, out)
    return OK if ok else CERTIFICATE


@main.command(name="paper-example")
@click.option("--balanced", is_flag=True)
@click.option("--out", type=click.Path(dir_okay=False))
@command
def paper_example(ctx, balanced, out):
    """Recompute the built-in A^3 example and diff it against pinned values."""
    report, diff = worked_example.run(balanced)
    emit({"ok": not diff, "diff": diff, "report": report}, ctx, out)
    return OK if not diff else INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
