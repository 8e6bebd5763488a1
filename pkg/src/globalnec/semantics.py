"""Propositional-modal models.

Each knowledge symbol gets one of three interpretations:

* ``KnowsEverything``: every ``K(phi)`` is true.
* ``TruthReflection``: ``K(phi)`` has the value of ``phi`` (operators only).
* ``Theoremhood``: ``K(phi)`` is true iff ``phi`` is derivable from the
  axiom-only theory ``S'0`` of a system, decided by a
  :class:`DerivabilityOracle`.

Atoms missing from a model's valuation are false.

Model file format::

    model N
    atom p1 = true
    interp K = theoremhood(surprise_weak)
    witness proved <formula> <proof-file>
    witness refuted <formula> <model-name>
    refuter self
"""

from __future__ import annotations

import itertools
import os
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .formula import (
    BOT,
    QUANTIFIERS,
    And,
    Atom,
    Bot,
    Formula,
    Iff,
    Imp,
    MetaF,
    ModApp,
    Not,
    Numeral,
    Or,
    PredApp,
    Quote,
    atoms,
    normalize,
    requote,
    subformula_pool,
    subformulas,
    to_text,
    try_ungn,
)
from .parser import parse
from .proofcheck import Proof, check, parse_proof, resolve_system
from .propositional import core, skeleton_atoms
from .schema import AxiomTag, Schema, pool_instances
from .standardize import SPrimeSystem


class UnsupportedFormula(ValueError):
    pass


class OracleUnknown(RuntimeError):
    def __init__(self, formula: Formula, why: str = ""):
        self.formula = formula
        super().__init__(f"derivability of {to_text(requote(formula))} is unknown{': ' + why if why else ''}")


class WitnessError(ValueError):
    pass


class ModelPreconditionError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


# ----------------------------------------------------- interpretations


@dataclass(frozen=True)
class KnowsEverything:
    def __str__(self) -> str:
        return "everything"


@dataclass(frozen=True)
class TruthReflection:
    def __str__(self) -> str:
        return "reflection"


@dataclass(frozen=True, eq=False)
class AtModels:
    """``K(phi)`` holds iff ``phi`` holds in each of a few fixed models (the
    accessible worlds).  Used only inside the oracle's refuter family."""

    models: tuple[Model, ...]

    def __str__(self) -> str:
        return "at(" + ", ".join(m.name for m in self.models) + ")"


@dataclass(frozen=True, eq=False)
class Theoremhood:
    oracle: DerivabilityOracle

    def __str__(self) -> str:
        return f"theoremhood({self.oracle.system.name})"


EVERYTHING = KnowsEverything()
REFLECTION = TruthReflection()


class Model:
    def __init__(self, name: str, valuation: dict[str, bool] | None = None, interps: dict[str, object] | None = None):
        self.name = name
        self.valuation = dict(valuation or {})
        self.interps = dict(interps or {})
        self._cache: dict[Formula, bool] = {}

    def __repr__(self) -> str:
        vals = ", ".join(f"{a}={'T' if v else 'F'}" for a, v in sorted(self.valuation.items()))
        ops = ", ".join(f"{o}:{i}" for o, i in sorted(self.interps.items()))
        return f"Model({self.name}: {vals}; {ops})"

    def with_valuation(self, extra: dict[str, bool], name: str | None = None) -> Model:
        return Model(name or self.name, {**self.valuation, **extra}, self.interps)

    def eval(self, f: Formula) -> bool:
        return evaluate(self, f)

    def to_text(self) -> str:
        lines = [f"model {self.name}"]
        for a, v in sorted(self.valuation.items()):
            lines.append(f"atom {a} = {'true' if v else 'false'}")
        for o, i in sorted(self.interps.items()):
            lines.append(f"interp {o} = {i}")
        return "\n".join(lines) + "\n"


def evaluate(m: Model, f: Formula) -> bool:
    """Truth value of ``f`` in ``m``.

    Raises UnsupportedFormula for quantifiers, metavariables, non-knowledge
    predicates and reflection over predicates; OracleUnknown when a
    theoremhood query cannot be settled.
    """
    hit = m._cache.get(f)
    if hit is not None:
        return hit
    cls = f.__class__
    if cls is Atom:
        out = m.valuation.get(f.name, False)
    elif cls is Bot:
        out = False
    elif cls is Not:
        out = not evaluate(m, f.f)
    elif cls is And:
        out = evaluate(m, f.left) and evaluate(m, f.right)
    elif cls is Or:
        out = evaluate(m, f.left) or evaluate(m, f.right)
    elif cls is Imp:
        # consequent first: a true consequent saves oracle queries
        out = evaluate(m, f.right) or not evaluate(m, f.left)
    elif cls is Iff:
        out = evaluate(m, f.left) == evaluate(m, f.right)
    elif cls is ModApp:
        out = _knowledge(m, f.op, f.f, pred=False)
    elif cls is PredApp:
        if len(f.args) != 1 or f.pred not in m.interps:
            raise UnsupportedFormula(f"predicate {f.pred} has no interpretation in {m.name}")
        arg = normalize(PredApp(f.pred, f.args)).args[0]
        inner = try_ungn(arg.n) if isinstance(arg, Numeral) else None
        if inner is None:
            out = False  # not the code of a formula
        else:
            out = _knowledge(m, f.pred, inner, pred=True)
    elif cls in QUANTIFIERS:
        raise UnsupportedFormula("quantified formulas have no propositional semantics")
    else:
        raise UnsupportedFormula(f"cannot evaluate {to_text(f)}")
    m._cache[f] = out
    return out


def _knowledge(m: Model, op: str, inner: Formula, pred: bool) -> bool:
    interp = m.interps.get(op)
    if interp is None:
        raise UnsupportedFormula(f"operator {op} has no interpretation in {m.name}")
    if isinstance(interp, KnowsEverything):
        return True
    if isinstance(interp, TruthReflection):
        if pred:
            raise UnsupportedFormula("truth reflection is impossible for a predicate symbol")
        return evaluate(m, inner)
    if isinstance(interp, AtModels):
        return all(evaluate(w, inner) for w in interp.models)
    return interp.oracle.query(inner).proved


# ------------------------------------------------------------- oracle


@dataclass(frozen=True)
class Answer:
    formula: Formula
    proved: bool
    source: str
    witness: object = None


def sprime_instances(
    sprime: SPrimeSystem,
    pool: Sequence[Formula],
    lines: Iterable[str] = ("l1", "l2", "l3", "l4", "l5"),
    k_depth: int = 1,
) -> list[tuple[str, Formula]]:
    """Instances of the S' lines with metavariables drawn from ``pool``."""
    lines = set(lines)
    out: dict[tuple[str, Formula], None] = {}
    base = sprime.base

    def add(line: str, f: Formula) -> None:
        out.setdefault((line, normalize(f)), None)

    s0: list[Formula] = []
    for a in base.axioms:
        tag_line = "l1" if a.tag is AxiomTag.GLOBAL else "l5"
        if tag_line not in lines and not (tag_line == "l1" and "l4" in lines):
            continue
        for _, inst in pool_instances(a.schema, pool, base.valid):
            if tag_line in lines:
                add(tag_line, inst)
            if tag_line == "l1":
                s0.append(inst)
    valid_pool = [a for a in pool if sprime.valid(a)] + [Imp(a, a) for a in pool]
    for m in sprime.modalities:
        for a in valid_pool:
            f = normalize(m.apply(a))
            if "l2" in lines:
                add("l2", f)
            s0.append(normalize(a))
        for a in pool:
            for b in pool:
                f = normalize(Imp(m.apply(Imp(a, b)), Imp(m.apply(a), m.apply(b))))
                if "l3" in lines:
                    add("l3", f)
                s0.append(f)
    if "l4" in lines:
        layer = [f for f in s0]
        for m in sprime.modalities:
            layer += [normalize(m.apply(a)) for a in valid_pool]
        for _ in range(k_depth):
            layer = [normalize(m.apply(f)) for f in layer for m in sprime.modalities]
            for f in layer:
                add("l4", f)
    return list(out)


def _with_distribution(system):
    """The global fragment plus K-distribution for every necessitation
    symbol: its theorems are exactly those of S'0 (up to search bounds)."""
    from dataclasses import replace

    from .schema import Axiom

    extra = []
    for m in system.nec:
        phi, psi = MetaF("phi"), MetaF("psi")
        def k(f, m=m):
            # quoted, not coded: the metavariables must stay open
            return PredApp(m.name, (Quote(f),)) if m.pred else ModApp(m.name, f)

        pattern = Imp(k(Imp(phi, psi)), Imp(k(phi), k(psi)))
        name = f"dist_{m.name}"
        while any(a.name == name for a in system.axioms):
            name += "_"
        extra.append(Axiom(Schema(name, pattern, ()), AxiomTag.GLOBAL))
    return replace(system, name=system.name.replace("#global", "#theory"), axioms=system.axioms + tuple(extra))


def theory_pool(system, extra: Iterable[Formula] = (), depth: int = 1) -> tuple[Formula, ...]:
    seeds = [BOT] + [Atom(a) for a in sorted(system.atoms())] + list(extra)
    return subformula_pool(seeds, depth, system.operators())


class DerivabilityOracle:
    """Decides ``S'0 |- phi`` for the theory of a system, where ``S'0`` is
    lines l1-l4 of the standardization.

    Answers come, in order, from: the cache; registered witnesses; direct
    membership in ``S'0`` or validity; the shallow model family
    (knows-everything, truth-reflection and one-step at-model
    interpretations, each validated on an instance pool); registered
    refuters, deep family models found earlier and the self models;
    propositional closure over earlier theorems; deep family levels;
    bounded forward search in the global fragment.  If all fail the query
    raises OracleUnknown.
    """

    def __init__(
        self,
        theory,
        family: bool = True,
        family_pool_depth: int = 1,
        family_levels: int = 3,
        search_pool_depth: int = 2,
        search_rounds: int = 3,
    ):
        self.system = resolve_system(theory)
        self.sprime = SPrimeSystem(self.system)
        self.global_system = self.system.global_fragment()
        self.search_system = _with_distribution(self.global_system)
        self.family = family
        self.family_pool_depth = family_pool_depth
        self.family_levels = family_levels
        self.search_pool_depth = search_pool_depth
        self.search_rounds = search_rounds
        self.answers: dict[Formula, Answer] = {}
        self.refuters: list[Model] = []
        self.self_models: list[Model] = []
        self.discovered: list[Model] = []  # validated deep family models, reused before search
        self._family_models: dict[tuple, list[Model]] = {}
        self._active: set[Formula] = set()
        self.stats = {"queries": 0, "search": 0}

    # registration

    def register_proved(self, f: Formula, proof: Proof) -> None:
        f = normalize(f)
        prev = self.answers.get(f)
        if prev is not None and not prev.proved:
            raise WitnessError(f"{to_text(requote(f))} is already refuted")
        target = proof.system if not isinstance(proof.system, str) else resolve_system(proof.system)
        if target not in (self.global_system, self.sprime) and getattr(target, "name", None) not in (
            self.global_system.name,
            self.sprime.name,
        ):
            raise WitnessError(f"witness proof is in {proof.system_name}, not in the theory of {self.system.name}")
        report = check(proof, system=target)
        if not report.accepted:
            raise WitnessError(f"witness proof rejected: {report.diagnostics[0]}")
        if proof.conclusion != f:
            raise WitnessError("witness proof concludes a different formula")
        self.answers[f] = Answer(f, True, "witness", proof)

    def register_refuted(self, f: Formula, model: Model, pool: Sequence[Formula] | None = None) -> None:
        f = normalize(f)
        prev = self.answers.get(f)
        if prev is not None and prev.proved:
            raise WitnessError(f"{to_text(requote(f))} is already proved")
        if evaluate(model, f):
            raise WitnessError(f"{model.name} does not falsify {to_text(requote(f))}")
        bad = self.violation(model, pool)
        if bad is not None:
            raise WitnessError(f"{model.name} falsifies theory instance {to_text(requote(bad))}")
        self.answers[f] = Answer(f, False, f"witness {model.name}", model)

    def add_refuter(self, model: Model, pool: Sequence[Formula] | None = None) -> None:
        bad = self.violation(model, pool)
        if bad is not None:
            raise WitnessError(f"{model.name} falsifies theory instance {to_text(requote(bad))}")
        self.refuters.append(model)

    def add_self(self, model: Model) -> None:
        """A model interpreting K by this very oracle, used as a refuter by
        recursion on modal depth.  It is validated separately, by schema
        checks of the theory against the model."""
        self.self_models.append(model)

    def violation(self, model: Model, pool: Sequence[Formula] | None = None) -> Formula | None:
        if pool is None:
            pool = theory_pool(self.system, depth=self.family_pool_depth)
        for _, inst in sprime_instances(self.sprime, pool, ("l1", "l2", "l3", "l4")):
            try:
                if not evaluate(model, inst):
                    return inst
            except UnsupportedFormula:
                return inst
        return None

    # queries

    def query(self, f: Formula) -> Answer:
        f = normalize(f)
        hit = self.answers.get(f)
        if hit is not None:
            return hit
        self.stats["queries"] += 1
        if f in self._active:
            raise OracleUnknown(f, "circular query")
        self._active.add(f)
        try:
            ans = self._decide(f)
        finally:
            self._active.discard(f)
        self.answers[f] = ans
        return ans

    def _decide(self, f: Formula) -> Answer:
        line = self.sprime.line_of(f)
        if line in ("l1", "l2", "l3", "l4"):
            return Answer(f, True, f"axiom {line}")
        if self.sprime.valid(f):
            return Answer(f, True, "valid")
        for m in self._family(f, 0) + self._family(f, 1):
            found = self._falsify(m, f)
            if found is not None:
                return Answer(f, False, f"family {found.name}", found)
        for m in self.refuters:
            found = self._falsify(m, f)
            if found is not None:
                return Answer(f, False, f"refuter {m.name}", found)
        for m in self.discovered:
            found = self._falsify(m, f)
            if found is not None:
                return Answer(f, False, f"family {found.name}", found)
        for m in self.self_models:
            try:
                if not evaluate(m, f):
                    return Answer(f, False, f"self {m.name}", m)
            except OracleUnknown:
                pass
        lemmas = self._closure(f)
        if lemmas is not None:
            return Answer(f, True, "closure", tuple(lemmas))
        if self.family:
            for level in range(2, self.family_levels):
                found = self._deep_refuter(f, level)
                if found is not None:
                    return Answer(f, False, f"family {found.name}", found)
        try:
            return self._search(f)
        except OracleUnknown:
            pass
        raise OracleUnknown(f, "no witness, no refuting model, search exhausted")

    def _closure(self, f: Formula) -> list[Formula] | None:
        """Earlier search or witness theorems that propositionally entail
        ``f`` (S'0 holds every tautology and is closed under MP)."""
        mine = set(skeleton_atoms(f))
        lemmas = [
            a.formula
            for a in self.answers.values()
            if a.proved and a.source in ("search", "witness", "closure") and mine & set(skeleton_atoms(a.formula))
        ]
        return core(lemmas, f) if lemmas else None

    def _falsify(self, m: Model, f: Formula) -> Model | None:
        extra = sorted(atoms(f) - set(m.valuation))
        if len(extra) > 6:
            extra = extra[:6]
        for bits in itertools.product((False, True), repeat=len(extra)):
            variant = m.with_valuation(dict(zip(extra, bits))) if extra else m
            try:
                if not evaluate(variant, f):
                    return variant
            except UnsupportedFormula:
                return None
        return None

    def _family(self, f: Formula, level: int) -> list[Model]:
        """Validated refuters over the system's atoms and those of ``f``.

        Level 0 holds every knows-everything / reflection combination.
        Level 1 adds models whose operators look at one or two level-0
        models (accessible worlds) ; each further level shifts a single
        operator onto the previous level while the others stay near level 0.
        Levels are built on demand.
        """
        if not self.family or level >= self.family_levels:
            return []
        names = tuple(sorted(set(self.system.atoms()) | atoms(f)))
        state = self._family_models.get(names)
        if state is None:
            state = self._family_models[names] = self._family_state(names)
        levels = state["levels"]
        while len(levels) <= level:
            levels.append(self._next_level(state, len(levels)))
        return levels[level]

    def _family_state(self, names) -> dict:
        extra = [Atom(a) for a in names]
        pool = theory_pool(self.system, extra, depth=self.family_pool_depth)
        return {
            "names": names,
            "ops": self.system.operators(),
            "instances": [inst for _, inst in sprime_instances(self.sprime, pool, ("l1", "l2", "l3", "l4"))],
            "signature": theory_pool(self.system, extra, depth=self.family_pool_depth + 1),
            "seen": set(),
            "levels": [],
        }

    def _distinct(self, state, ms: list[Model]) -> list[Model]:
        # models agreeing on the signature pool are interchangeable as worlds
        out = []
        for m in ms:
            try:
                sig = tuple(evaluate(m, g) for g in state["signature"])
            except UnsupportedFormula:
                sig = (m.name,)
            if sig not in state["seen"]:
                state["seen"].add(sig)
                out.append(m)
        return out

    def _combos(self, state, level: int) -> list[tuple]:
        ops = state["ops"]
        basic = [[EVERYTHING] if m.pred else [EVERYTHING, REFLECTION] for m in ops]
        if level == 0:
            return list(itertools.product(*basic))
        base, frontier = state["levels"][0], state["levels"][level - 1]
        worlds = [AtModels((m,)) for m in frontier]
        worlds += [AtModels((b, m)) for m in frontier for b in base if b is not m]
        if level == 1:
            shifted = [c + worlds for c in basic]
            return [c for c in itertools.product(*shifted) if any(i in worlds for i in c)]
        # the other operators may still look at a single level-0 model
        near = [c + [AtModels((b,)) for b in base] for c in basic]
        single = [c[:k] + (w,) + c[k + 1:] for c in itertools.product(*near) for k in range(len(ops)) for w in worlds]
        # every operator looking at the same deeper world
        shared = [(w,) * len(ops) for w in worlds] if len(ops) > 1 else []
        return shared + single

    def _next_level(self, state, level: int) -> list[Model]:
        combos = self._combos(state, level)
        return self._distinct(state, self._validated(state["names"], state["ops"], combos, state["instances"]))

    def _deep_refuter(self, f: Formula, level: int) -> Model | None:
        """A validated model at ``level`` falsifying ``f``.

        Deep levels are too large to validate wholesale, so candidates are
        filtered by ``f`` first and only falsifiers are checked on the pool.
        """
        self._family(f, level - 1)
        state = self._family_models[tuple(sorted(set(self.system.atoms()) | atoms(f)))]
        combos = state.setdefault("deep", {})
        if level not in combos:
            combos[level] = self._combos(state, level)
        verdicts = state.setdefault("verdicts", {})
        for m in self._models(state["names"], state["ops"], combos[level]):
            try:
                if evaluate(m, f):
                    continue
            except UnsupportedFormula:
                continue
            ok = verdicts.get(m.name)
            if ok is None:
                ok = verdicts[m.name] = self._valid_on(m, state["instances"])
            if ok:
                self.discovered.append(m)
                return m
        return None

    @staticmethod
    def _valid_on(m: Model, instances) -> bool:
        try:
            return all(evaluate(m, inst) for inst in instances)
        except UnsupportedFormula:
            return False

    @staticmethod
    def _models(names, ops, combos):
        for interps in combos:
            for bits in itertools.product((True, False), repeat=len(names)):
                val = dict(zip(names, bits))
                label = ",".join(f"{a}={'T' if v else 'F'}" for a, v in val.items())
                label += ";" + ",".join(f"{o.name}:{i}" for o, i in zip(ops, interps))
                yield Model(f"[{label}]", val, {o.name: i for o, i in zip(ops, interps)})

    def _validated(self, names, ops, combos, instances) -> list[Model]:
        return [m for m in self._models(names, ops, combos) if self._valid_on(m, instances)]

    def _search(self, f: Formula) -> Answer:
        from .search import SearchConfig, forward_search

        self.stats["search"] += 1
        base = [Not(m.apply(x)) for m in self.system.operators() for x in [BOT] + [Atom(a) for a in sorted(atoms(f))]]
        # explosion lemmas: clashing modal arguments reach any base seed through Bot
        args = [g.f for g in subformulas(f) if isinstance(g, ModApp)]
        lemmas = [Imp(a, Imp(b, BOT)) for a in args for b in args if a != b] + [Imp(BOT, x) for x in base]
        # the lemma-seeded stage is shallow: the lemmas already carry the depth
        stages = [(base, self.search_pool_depth), (base + lemmas, min(1, self.search_pool_depth))]
        for seeds, depth in stages:
            try:
                res = forward_search(
                    self.search_system,
                    SearchConfig(goal=f, pool_depth=depth, max_steps=self.search_rounds, seeds=tuple(seeds)),
                )
            except UnsupportedFormula:
                raise OracleUnknown(f, "search unsupported") from None
            if res.found:
                return Answer(f, True, "search", res.proof)
        raise OracleUnknown(f, "search exhausted")


# ------------------------------------------------------ schema checking


@dataclass(frozen=True)
class AllHold:
    checked: int
    pool_size: int

    @property
    def holds(self) -> bool:
        return True


@dataclass(frozen=True)
class Fails:
    instance: Formula
    binding: dict

    @property
    def holds(self) -> bool:
        return False

    def describe(self) -> str:
        b = ", ".join(f"?{k}={to_text(requote(v))}" for k, v in sorted(self.binding.items()))
        return f"{to_text(requote(self.instance))}" + (f" [{b}]" if b else "")


def check_schema(m: Model, schema: Schema, pool: Sequence[Formula], valid=None) -> AllHold | Fails:
    """Evaluate every instance over ``pool`` (in pool order); first failure wins."""
    kwargs = {} if valid is None else {"valid": valid}
    n = 0
    for binding, inst in pool_instances(schema, pool, **kwargs):
        n += 1
        if not evaluate(m, inst):
            return Fails(inst, binding)
    return AllHold(n, len(pool))


HoldsInModel = AllHold
FailsWith = Fails


def probe_schema(m: Model, schema: Schema, pool: Sequence[Formula]) -> AllHold | Fails:
    """Candidate-axiom probe: a schema holding in a model of a system is
    consistent with it as a local axiom."""
    return check_schema(m, schema, pool)


@dataclass(frozen=True)
class LineResult:
    line: str
    checked: int
    failure: Formula | None

    @property
    def holds(self) -> bool:
        return self.failure is None


def check_sprime(m: Model, sprime: SPrimeSystem, pool: Sequence[Formula], k_depth: int = 1) -> list[LineResult]:
    """Evaluate the S' pool instances line by line."""
    by_line: dict[str, list[Formula]] = {}
    for line, f in sprime_instances(sprime, pool, k_depth=k_depth):
        by_line.setdefault(line, []).append(f)
    out = []
    for line in ("l1", "l2", "l3", "l4", "l5"):
        fs = by_line.get(line, [])
        bad = next((f for f in fs if not evaluate(m, f)), None)
        out.append(LineResult(line, len(fs), bad))
    return out


@dataclass(frozen=True)
class Holds:
    checked: int

    @property
    def holds(self) -> bool:
        return True


@dataclass(frozen=True)
class CounterInstance:
    formula: Formula

    @property
    def holds(self) -> bool:
        return False


def kclosure_check(m: Model, axioms: Iterable[Formula], depth: int, ops: Iterable[str] | None = None) -> Holds | CounterInstance:
    """Every member of the K-closure of ``axioms`` up to ``depth`` nested
    applications is true, for K ranging over the reflection operators."""
    axioms = [normalize(a) for a in axioms]
    if ops is None:
        ops = [o for o, i in sorted(m.interps.items()) if isinstance(i, TruthReflection)]
    ops = list(ops)
    for o in ops:
        if not isinstance(m.interps.get(o), TruthReflection):
            raise ModelPreconditionError(f"{o} is not interpreted by truth reflection in {m.name}")
    for a in axioms:
        if not evaluate(m, a):
            raise ModelPreconditionError(f"axiom {to_text(a)} is false in {m.name}")
    layer, n = list(axioms), len(axioms)
    for _ in range(depth):
        layer = [ModApp(o, f) for f in layer for o in ops]
        for f in layer:
            n += 1
            if not evaluate(m, f):
                return CounterInstance(f)
    return Holds(n)


# ---------------------------------------------------------- file format

_INTERP = re.compile(r"^(everything|reflection|theoremhood\((?P<theory>[^)]+)\))$")


def parse_model(text: str, base_dir: str = ".", loaded: dict | None = None) -> Model:
    """Parse a model file; referenced proofs and models are read relative
    to ``base_dir``."""
    loaded = {} if loaded is None else loaded
    name = None
    valuation: dict[str, bool] = {}
    interps: dict[str, object] = {}
    oracles: dict[str, DerivabilityOracle] = {}
    witnesses: list[tuple[int, str, str]] = []
    refuters: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "model":
                name = rest
            elif word == "atom":
                a, _, v = rest.partition("=")
                v = v.strip()
                if v not in ("true", "false"):
                    raise ModelFormatError("atom value must be true or false")
                valuation[a.strip()] = v == "true"
            elif word == "interp":
                op, _, spec = rest.partition("=")
                spec = spec.strip()
                mt = _INTERP.match(spec)
                if mt is None:
                    raise ModelFormatError(f"unknown interpretation {spec!r}")
                if spec == "everything":
                    interps[op.strip()] = EVERYTHING
                elif spec == "reflection":
                    interps[op.strip()] = REFLECTION
                else:
                    theory = mt.group("theory").strip()
                    if theory not in oracles:
                        oracles[theory] = DerivabilityOracle(theory)
                    interps[op.strip()] = Theoremhood(oracles[theory])
            elif word == "witness":
                kind, _, rest2 = rest.partition(" ")
                body, _, ref = rest2.rpartition(" ")
                if kind not in ("proved", "refuted") or not body:
                    raise ModelFormatError("expected 'witness proved|refuted <formula> <ref>'")
                witnesses.append((lineno, kind, body + "\0" + ref))
            elif word == "refuter":
                refuters.append((lineno, rest))
            else:
                raise ModelFormatError(f"unknown directive {word!r}")
        except ModelFormatError as e:
            raise ModelFormatError(f"line {lineno}: {e}") from None
    if name is None:
        raise ModelFormatError("missing 'model <name>' header")
    model = Model(name, valuation, interps)
    loaded[name] = model
    only = list(oracles.values())

    def the_oracle(lineno):
        if len(only) != 1:
            raise ModelFormatError(f"line {lineno}: witnesses need exactly one theoremhood theory")
        return only[0]

    for lineno, ref in refuters:
        o = the_oracle(lineno)
        if ref == "self":
            o.add_self(model)
        else:
            o.add_refuter(load_model(os.path.join(base_dir, ref + ".model"), loaded))
    for lineno, kind, payload in witnesses:
        body, ref = payload.split("\0")
        f = parse(body)
        o = the_oracle(lineno)
        if kind == "proved":
            with open(os.path.join(base_dir, ref)) as fh:
                o.register_proved(f, parse_proof(fh.read()))
        else:
            o.register_refuted(f, load_model(os.path.join(base_dir, ref + ".model"), loaded))
    return model


def load_model(path: str, loaded: dict | None = None) -> Model:
    loaded = {} if loaded is None else loaded
    stem = os.path.splitext(os.path.basename(path))[0]
    if stem in loaded:
        return loaded[stem]
    with open(path) as fh:
        return parse_model(fh.read(), os.path.dirname(path) or ".", loaded)
