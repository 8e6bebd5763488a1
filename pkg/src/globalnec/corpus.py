"""The frozen case corpus and its runner.

Each case is a directory ``corpus/<case>/`` holding system files
(``<name>.sys``), proofs, models and an ``expect.json`` that lists the
checks to run::

    {"kind": "InconsistencyProof",
     "systems": {"surprise_original": "system.sys"},
     "checks": [{"check": "proof", "file": "bot.proof", "verdict": "Accepted"}, ...]}

Pool depths in the checks can be capped with ``GLOBALNEC_POOL_DEPTH``.
"""

from __future__ import annotations

import fnmatch
import json
import os
import time
from dataclasses import dataclass
from importlib import resources

from .formula import Formula, normalize, requote, to_text
from .parser import parse
from .proofcheck import Mode, Nec, check, parse_proof, reorder_for_prefix
from .registry import registry
from .schema import dump_system, parse_schema, parse_system
from .search import SearchConfig, countermodel_search, forward_search
from .semantics import (
    EVERYTHING,
    Model,
    UnsupportedFormula,
    check_schema,
    check_sprime,
    evaluate,
    kclosure_check,
    load_model,
    probe_schema,
    sprime_instances,
    theory_pool,
)
from .standardize import sprime_of, translate

REPORT_VERSION = 1
KINDS = ("InconsistencyProof", "ConsistencyWitness", "NonDerivability", "TranslationDemo", "SystemOnly")
POOL_ENV = "GLOBALNEC_POOL_DEPTH"


class CheckFailed(Exception):
    pass


@dataclass(frozen=True)
class CorpusCase:
    name: str
    kind: str
    path: str
    systems: dict
    checks: tuple

    @property
    def files(self) -> list[str]:
        out = list(self.systems.values())
        for c in self.checks:
            for key in ("file", "model", "seeds_from"):
                if key in c:
                    out.append(c[key] if key != "model" else c[key] + ".model")
        return out


@dataclass(frozen=True)
class CaseResult:
    case: str
    status: str  # "Pass" | "Fail"
    details: tuple = ()
    wall_time: float = 0.0
    diagnostic: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "Pass"

    def to_json(self, timings: bool = True) -> dict:
        out = {"case": self.case, "status": self.status, "details": list(self.details)}
        if self.diagnostic:
            out["diagnostic"] = self.diagnostic
        if timings:
            out["wall_time_ms"] = round(self.wall_time * 1000)
        return out


def corpus_root() -> str:
    return str(resources.files("globalnec") / "corpus")


def load_case(path: str) -> CorpusCase:
    with open(os.path.join(path, "expect.json")) as fh:
        spec = json.load(fh)
    kind = spec.get("kind")
    if kind not in KINDS:
        raise ValueError(f"{path}: unknown case kind {kind!r}")
    return CorpusCase(os.path.basename(path), kind, path, spec.get("systems", {}), tuple(spec.get("checks", ())))


def cases(root: str | None = None) -> list[CorpusCase]:
    root = root or corpus_root()
    return [load_case(os.path.join(root, d)) for d in sorted(os.listdir(root)) if os.path.isfile(os.path.join(root, d, "expect.json"))]


def pool_depth(requested: int) -> int:
    cap = os.environ.get(POOL_ENV)
    return min(requested, int(cap)) if cap else requested


# ---------------------------------------------------------------- checks


def _text(f: Formula) -> str:
    return to_text(requote(f))


class _Runner:
    def __init__(self, case: CorpusCase):
        self.case = case
        self.models: dict[str, Model] = {}

    def path(self, name: str) -> str:
        p = os.path.join(self.case.path, name)
        if not os.path.exists(p):
            raise CheckFailed(f"missing file {name}")
        return p

    def proof(self, name: str):
        with open(self.path(name)) as fh:
            return parse_proof(fh.read())

    def model(self, name: str) -> Model:
        if name not in self.models:
            load_model(self.path(name + ".model"), self.models)
        return self.models[name]

    def pool(self, c: dict):
        system = registry(c["system"])
        extra = [parse(t) for t in c.get("targets", ())]
        return theory_pool(system, extra, pool_depth(c.get("pool_depth", 2)))

    # one method per check kind; each returns a detail string or raises

    def check_system(self, name: str, file: str) -> str:
        with open(self.path(file)) as fh:
            parsed = parse_system(fh.read(), file)
        want = registry(name)
        if dump_system(parsed) != dump_system(want):
            raise CheckFailed(f"{file} differs from registered system {name}")
        return f"system {name}: {len(want.axioms)} axioms ({file})"

    def c_proof(self, c: dict) -> str:
        p = self.proof(c["file"])
        for mode in c.get("modes", ("prefix", "dependency")):
            r = check(p, Mode(mode))
            if r.verdict != c["verdict"]:
                first = r.diagnostics[0] if r.diagnostics else ""
                raise CheckFailed(f"{c['file']} [{mode}]: {r.verdict}, expected {c['verdict']} {first}")
            if "conclusion" in c and r.accepted and r.conclusion != normalize(parse(c["conclusion"])):
                raise CheckFailed(f"{c['file']}: concludes {_text(r.conclusion)}")
            if "diagnostic" in c and mode == c.get("diagnostic_mode", "prefix"):
                got = f"step {r.diagnostics[0][0]}: {r.diagnostics[0][1]}" if r.diagnostics else ""
                if got != c["diagnostic"]:
                    raise CheckFailed(f"{c['file']}: diagnostic {got!r}")
        if "steps" in c and len(p) != c["steps"]:
            raise CheckFailed(f"{c['file']}: {len(p)} steps, expected {c['steps']}")
        return f"{c['file']}: {c['verdict']} in {p.system_name} ({len(p)} steps)"

    def c_translate(self, c: dict) -> str:
        p = self.proof(c["file"])
        q = translate(p)
        if any(isinstance(s.just, Nec) for s in q.steps):
            raise CheckFailed("translation still uses necessitation")
        r = check(q)
        if not r.accepted or q.conclusion != p.conclusion:
            raise CheckFailed(f"translation of {c['file']} does not re-check: {r.diagnostics[:1]}")
        return f"{c['file']}: {len(p)} steps -> {len(q)} steps in {q.system_name}"

    def c_reorder(self, c: dict) -> str:
        p = self.proof(c["file"])
        q = reorder_for_prefix(p)
        r = check(q, Mode.PREFIX)
        if not r.accepted or q.conclusion != p.conclusion:
            raise CheckFailed(f"reordered {c['file']} is not prefix-accepted")
        return f"{c['file']}: prefix-sorted"

    def c_search(self, c: dict) -> str:
        seeds = ()
        if "seeds_from" in c:
            seeds = tuple(s.formula for s in self.proof(c["seeds_from"]).steps)
        cfg = SearchConfig(
            goal=parse(c.get("goal", "Bot")),
            pool_depth=pool_depth(c.get("pool_depth", 3)),
            max_steps=c.get("max_steps", 4),
            seeds=seeds,
        )
        res = forward_search(c["system"], cfg)
        got = "Found" if res.found else "Exhausted"
        where = f"pool depth {cfg.pool_depth}, {res.rounds} rounds"
        if res.found:
            if not check(res.proof).accepted:
                raise CheckFailed("search proof rejected by the checker")
            where += f", {len(res.proof)}-step proof"
        want = c.get("expect")
        if want is not None and got != want:
            raise CheckFailed(f"search for {c.get('goal', 'Bot')} in {c['system']}: {got} ({where}), expected {want}")
        label = "" if want is not None else " (no expected verdict)"
        return f"search {c.get('goal', 'Bot')} in {c['system']}: {got}{label} ({where})"

    def c_sprime(self, c: dict) -> str:
        m = self.model(c["model"])
        pool = self.pool(c)
        lines = check_sprime(m, sprime_of(registry(c["system"])), pool)
        bad = [r for r in lines if not r.holds]
        if bad:
            raise CheckFailed(f"{m.name} falsifies {bad[0].line} instance {_text(bad[0].failure)}")
        n = sum(r.checked for r in lines)
        return f"{m.name} satisfies {n} S' pool instances of {c['system']} (pool {len(pool)})"

    def c_schema(self, c: dict) -> str:
        m = self.model(c["model"])
        schema = parse_schema(c.get("name", "schema"), c["schema"])
        try:
            res = (probe_schema if c.get("probe") else check_schema)(m, schema, self.pool(c))
        except UnsupportedFormula as e:
            # quantified schemas are outside the propositional evaluator
            if c["expect"] != "Unsupported":
                raise CheckFailed(f"{c['schema']} in {m.name}: unsupported ({e})") from None
            return f"{c['schema']} in {m.name}: Unsupported ({e})"
        got = "AllHold" if res.holds else "Fails"
        if got != c["expect"]:
            raise CheckFailed(f"{c['schema']} in {m.name}: {got}" + ("" if res.holds else f" at {res.describe()}"))
        if not res.holds and "instance" in c and res.instance != normalize(parse(c["instance"])):
            raise CheckFailed(f"{c['schema']} in {m.name}: first failure {res.describe()}")
        return f"{c['schema']} in {m.name}: {got}" + ("" if res.holds else f" at {res.describe()}")

    def c_eval(self, c: dict) -> str:
        m = self.model(c["model"])
        v = evaluate(m, parse(c["formula"]))
        if v != c["value"]:
            raise CheckFailed(f"{c['formula']} is {v} in {m.name}")
        return f"{m.name} |= {c['formula']} is {str(v).lower()}"

    def c_oracle(self, c: dict) -> str:
        m = self.model(c["model"])
        ans = m.interps[c.get("op", "K")].oracle.query(parse(c["formula"]))
        got = "Proved" if ans.proved else "Refuted"
        if got != c["answer"]:
            raise CheckFailed(f"S'0 query {c['formula']}: {got} ({ans.source})")
        return f"S'0 of {m.interps[c.get('op', 'K')].oracle.system.name} vs {c['formula']}: {got} ({ans.source})"

    def c_countermodel(self, c: dict) -> str:
        system = registry(c["system"])
        sp = sprime_of(system)
        pool = self.pool(c)
        axioms = [f for _, f in sprime_instances(sp, pool, ("l1", "l2", "l3", "l4"))]
        res = countermodel_search(axioms, parse(c["target"]), system.operators(), pool_depth=0)
        if not res.found:
            raise CheckFailed(f"no countermodel for {c['target']}")
        m = res.model
        for key, want in c.get("valuation", {}).items():
            if m.valuation.get(key, False) != want:
                raise CheckFailed(f"countermodel {m!r} has {key}={m.valuation.get(key, False)}")
        for op, want in c.get("interps", {}).items():
            if str(m.interps[op]) != want:
                raise CheckFailed(f"countermodel {m!r} interprets {op} as {m.interps[op]}")
        return f"countermodel for {c['target']}: {m!r}"

    def c_kclosure(self, c: dict) -> str:
        m = self.model(c["model"])
        sp = sprime_of(registry(c["system"]))
        axioms = [f for _, f in sprime_instances(sp, self.pool(c), ("l1",))]
        res = kclosure_check(m, axioms, c.get("depth", 2), c.get("ops"))
        if not res.holds:
            raise CheckFailed(f"K-closure member {_text(res.formula)} fails in {m.name}")
        return f"K-closure of {len(axioms)} l1 instances holds in {m.name} to depth {c.get('depth', 2)}"

    def c_exam_day(self, c: dict) -> str:
        """For each day i, look for a knows-everything model of S'0 with
        the exam on a day j > k, j != i; report the days with none."""
        system = registry(c["system"])
        n, k = c["n"], c["k"]
        pool = self.pool(c)
        axioms = [f for _, f in sprime_instances(sprime_of(system), pool, ("l1", "l2", "l3", "l4"))]
        uncovered = []
        for i in range(1, n + 1):
            ok = False
            for j in range(k + 1, n + 1):
                if j == i:
                    continue
                val = {f"p{d}": d == j for d in range(1, n + 1)}
                m = Model(f"M{j}", val, {"K": EVERYTHING})
                if all(evaluate(m, f) for f in axioms):
                    ok = True
            if not ok:
                uncovered.append(i)
        if uncovered != c["uncovered"]:
            raise CheckFailed(f"days without a j>k witness: {uncovered}, expected {c['uncovered']}")
        return f"days without a j>{k} refuting model: {uncovered or 'none'}"


def run_case(case: CorpusCase) -> CaseResult:
    start = time.perf_counter()
    runner = _Runner(case)
    details: list[str] = []
    try:
        for name, file in sorted(case.systems.items()):
            details.append(runner.check_system(name, file))
        for c in case.checks:
            method = getattr(runner, "c_" + c["check"], None)
            if method is None:
                raise CheckFailed(f"unknown check {c['check']!r}")
            details.append(method(c))
    except (CheckFailed, OSError, ValueError, LookupError, RuntimeError) as e:
        return CaseResult(case.name, "Fail", tuple(details), time.perf_counter() - start, f"{type(e).__name__}: {e}")
    return CaseResult(case.name, "Pass", tuple(details), time.perf_counter() - start)


def corpus_run(pattern: str | None = None, root: str | None = None) -> list[CaseResult]:
    """Run every case whose name matches ``pattern`` (a glob or prefix)."""
    out = []
    for case in cases(root):
        if pattern and not (fnmatch.fnmatch(case.name, pattern) or case.name.startswith(pattern)):
            continue
        out.append(run_case(case))
    return sorted(out, key=lambda r: r.case)


def report(results: list[CaseResult], timings: bool = True) -> dict:
    return {
        "version": REPORT_VERSION,
        "pool_depth_cap": os.environ.get(POOL_ENV),
        "cases": [r.to_json(timings) for r in results],
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
    }
