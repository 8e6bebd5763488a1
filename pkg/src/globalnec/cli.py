"""Command-line front end.

Exit codes: 0 success or all-pass, 1 logical failure (rejected proof,
failed case, exhausted search), 2 usage or file errors.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .corpus import cases, corpus_run, report
from .formula import gn, normalize, requote, to_text
from .parser import ParseError, parse
from .proofcheck import Mode, check, dump_proof, parse_proof
from .registry import names, registry
from .schema import SchemaError, UnknownSystem, parse_schema, parse_system
from .search import SearchConfig, countermodel_search, forward_search
from .semantics import (
    ModelFormatError,
    OracleUnknown,
    UnsupportedFormula,
    WitnessError,
    check_schema,
    check_sprime,
    evaluate,
    load_model,
    sprime_instances,
    theory_pool,
)
from .standardize import sprime_of, translate

LOGICAL_FAILURE = 1
USAGE = 2


def _text(f) -> str:
    return to_text(requote(f))


def _emit(as_json: bool, payload: dict, lines: list[str]) -> None:
    if as_json:
        click.echo(json.dumps(payload, indent=2))
    else:
        for line in lines:
            click.echo(line)


def _system(spec: str):
    """A registry name or a path to a ``.sys`` file."""
    if os.path.isfile(spec):
        with open(spec) as fh:
            return parse_system(fh.read(), spec)
    return registry(spec)


def _formula(text: str):
    try:
        return parse(text)
    except ParseError as e:
        raise click.UsageError(f"cannot parse {text!r}: {e}") from None


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise click.FileError(path, e.strerror) from None


class _Group(click.Group):
    """Map library errors about inputs onto the usage exit code."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (ParseError, SchemaError, UnknownSystem, ModelFormatError, WitnessError, ValueError, LookupError) as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(USAGE)


json_option = click.option("--json", "as_json", is_flag=True, help="Emit a JSON report.")


@click.group(cls=_Group)
def main():
    """Proof kernel and paradox workbench for global necessitation."""


@main.command("parse")
@click.argument("text")
@json_option
def parse_cmd(text, as_json):
    """Parse a formula and print its normal form."""
    f = normalize(_formula(text))
    _emit(as_json, {"formula": _text(f), "gn": str(gn(f))}, [_text(f)])


@main.command("gn")
@click.argument("text")
@json_option
def gn_cmd(text, as_json):
    """Print the Goedel numeral of a formula."""
    n = gn(_formula(text))
    _emit(as_json, {"formula": text, "gn": str(n)}, [str(n)])


@main.command("check")
@click.argument("proof_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["prefix", "dependency"]), default="prefix", show_default=True)
@click.option("--system", "system_spec", help="Registry name or .sys file overriding the proof header.")
@json_option
def check_cmd(proof_file, mode, system_spec, as_json):
    """Check a proof file."""
    system = _system(system_spec) if system_spec else None
    p = parse_proof(_read(proof_file), system)
    r = check(p, Mode(mode))
    lines = [f"{r.verdict} ({mode} mode, {len(p)} steps)"]
    if r.accepted:
        lines.append(f"conclusion: {_text(r.conclusion)}")
    lines += [f"step {k}: {why}" for k, why in r.diagnostics]
    _emit(as_json, {"file": proof_file, **r.to_json()}, lines)
    sys.exit(0 if r.accepted else LOGICAL_FAILURE)


@main.command("translate")
@click.argument("proof_file", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write the translated proof here.")
@json_option
def translate_cmd(proof_file, output, as_json):
    """Translate a proof into the axiom-only system (no necessitation)."""
    p = parse_proof(_read(proof_file))
    q = translate(p)
    r = check(q)
    text = dump_proof(q)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    ok = r.accepted and q.conclusion == p.conclusion
    payload = {"file": proof_file, "steps": len(p), "translated_steps": len(q), "system": q.system_name, "rechecks": ok}
    lines = [] if output else [text.rstrip("\n")]
    lines.append(f"# {len(p)} steps -> {len(q)} steps in {q.system_name}; re-check {'ok' if ok else 'FAILED'}")
    _emit(as_json, payload, lines)
    sys.exit(0 if ok else LOGICAL_FAILURE)


@main.command("eval")
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("formula")
@json_option
def eval_cmd(model_file, formula, as_json):
    """Evaluate a formula in a model file."""
    m = load_model(model_file)
    f = _formula(formula)
    try:
        v = evaluate(m, f)
    except (UnsupportedFormula, OracleUnknown) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(LOGICAL_FAILURE)
    _emit(as_json, {"model": m.name, "formula": _text(f), "value": v}, [str(v).lower()])


@main.command("schema-check")
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("system_spec")
@click.option("--pool-depth", default=2, show_default=True, type=click.IntRange(0))
@click.option("--schema", "schema_text", help="Check this schema instead of the S' lines of SYSTEM.")
@click.option("--target", "targets", multiple=True, help="Extra pool seed (repeatable).")
@json_option
def schema_check_cmd(model_file, system_spec, pool_depth, schema_text, targets, as_json):
    """Check a model against a system's S' pool instances, or one schema."""
    m = load_model(model_file)
    system = _system(system_spec)
    pool = theory_pool(system, [_formula(t) for t in targets], pool_depth)
    try:
        if schema_text:
            res = check_schema(m, parse_schema("schema", schema_text), pool)
            payload = {"model": m.name, "schema": schema_text, "holds": res.holds, "pool": len(pool)}
            lines = [f"AllHold ({res.checked} instances)" if res.holds else f"Fails at {res.describe()}"]
            ok = res.holds
        else:
            rows = check_sprime(m, sprime_of(system), pool)
            ok = all(r.holds for r in rows)
            payload = {
                "model": m.name,
                "system": system.name,
                "pool": len(pool),
                "lines": [
                    {"line": r.line, "checked": r.checked, "failure": None if r.holds else _text(r.failure)} for r in rows
                ],
                "holds": ok,
            }
            lines = [f"{r.line}: {r.checked} instances " + ("hold" if r.holds else f"FAIL {_text(r.failure)}") for r in rows]
    except (UnsupportedFormula, OracleUnknown) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(LOGICAL_FAILURE)
    _emit(as_json, payload, lines)
    sys.exit(0 if ok else LOGICAL_FAILURE)


def _pick_system(positional, option):
    spec = option or positional
    if not spec:
        raise click.UsageError("a system is required (argument or --system)")
    return _system(spec)


@main.command("search")
@click.argument("system_spec", required=False)
@click.option("--system", "system_opt", help="Registry name or .sys file.")
@click.option("--goal", default="Bot", show_default=True)
@click.option("--pool-depth", default=3, show_default=True, type=click.IntRange(0))
@click.option("--max-steps", default=4, show_default=True, type=click.IntRange(1), help="Saturation rounds.")
@click.option("--seed", "seeds", multiple=True, help="Extra formula for the search universe (repeatable).")
@click.option("--emit-proof", type=click.Path(dir_okay=False), help="Write a found proof here.")
@json_option
def search_cmd(system_spec, system_opt, goal, pool_depth, max_steps, seeds, emit_proof, as_json):
    """Bounded forward search for a derivation of GOAL."""
    system = _pick_system(system_spec, system_opt)
    cfg = SearchConfig(
        goal=_formula(goal), pool_depth=pool_depth, max_steps=max_steps, seeds=tuple(_formula(s) for s in seeds)
    )
    res = forward_search(system, cfg)
    if res.found:
        text = dump_proof(res.proof)
        if emit_proof:
            with open(emit_proof, "w") as fh:
                fh.write(text)
        payload = {"result": "Found", "rounds": res.rounds, "proof": text}
        lines = [f"Found after {res.rounds} rounds", text.rstrip("\n")]
    else:
        payload = {"result": "Exhausted", "rounds": res.rounds, "saturated": res.saturated}
        lines = [f"Exhausted after {res.rounds} rounds" + (" (saturated)" if res.saturated else "")]
    _emit(as_json, payload, lines)
    sys.exit(0 if res.found else LOGICAL_FAILURE)


@main.command("countermodel")
@click.argument("system_spec", required=False)
@click.argument("target", required=False)
@click.option("--system", "system_opt", help="Registry name or .sys file.")
@click.option("--goal", "goal_opt", help="Formula to falsify (alternative to TARGET).")
@click.option("--pool-depth", default=1, show_default=True, type=click.IntRange(0))
@click.option("--emit-model", type=click.Path(dir_okay=False), help="Write a found model here.")
@json_option
def countermodel_cmd(system_spec, target, system_opt, goal_opt, pool_depth, emit_model, as_json):
    """A knows-everything / reflection model of S'0 falsifying TARGET."""
    if system_opt and system_spec and not target:
        system_spec, target = None, system_spec
    system = _pick_system(system_spec, system_opt)
    if not (goal_opt or target):
        raise click.UsageError("a target formula is required")
    goal = _formula(goal_opt or target)
    pool = theory_pool(system, [goal], pool_depth)
    axioms = [f for _, f in sprime_instances(sprime_of(system), pool, ("l1", "l2", "l3", "l4"))]
    res = countermodel_search(axioms, goal, system.operators(), pool_depth=0)
    if res.found:
        text = res.model.to_text()
        if emit_model:
            with open(emit_model, "w") as fh:
                fh.write(text)
        _emit(as_json, {"found": True, "model": text}, [text.rstrip("\n")])
        sys.exit(0)
    _emit(as_json, {"found": False, "tried": res.tried}, [f"no countermodel among {res.tried} candidates"])
    sys.exit(LOGICAL_FAILURE)


@main.group("corpus")
def corpus_group():
    """Run or list the bundled case corpus."""


@corpus_group.command("run")
@click.argument("pattern", required=False)
@click.option("--no-timings", is_flag=True, help="Omit wall times (for golden diffs).")
@json_option
def corpus_run_cmd(pattern, no_timings, as_json):
    """Run every case matching PATTERN (default: all)."""
    results = corpus_run(pattern)
    if not results:
        click.echo(f"error: no case matches {pattern!r}", err=True)
        sys.exit(USAGE)
    lines = []
    for r in results:
        t = "" if no_timings else f" ({r.wall_time:.2f}s)"
        lines.append(f"{r.status:4} {r.case}{t}" + (f": {r.diagnostic}" if r.diagnostic else ""))
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} cases pass")
    _emit(as_json, report(results, timings=not no_timings), lines)
    sys.exit(0 if all(r.passed for r in results) else LOGICAL_FAILURE)


@corpus_group.command("list")
@json_option
def corpus_list_cmd(as_json):
    """List the cases and the registered systems."""
    cs = cases()
    _emit(
        as_json,
        {"cases": [{"case": c.name, "kind": c.kind, "checks": len(c.checks)} for c in cs], "systems": names()},
        [f"{c.name:20} {c.kind:20} {len(c.checks)} checks" for c in cs],
    )


if __name__ == "__main__":
    main()
