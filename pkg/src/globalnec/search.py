"""Bounded forward proof search and countermodel search.

``forward_search`` saturates a finite fact set.  The universe is a
subformula pool grown from the goal, the ground axioms and the atoms.
Each round

1. instantiates every axiom schema at the modal subformulas ("triggers")
   of current facts that lie in the universe,
2. checks whether the facts tautologically entail the goal,
3. necessitates every universe formula entailed by the globally pure
   facts (and every formula whose necessitation already occurs in a fact).

Modus ponens closure is implicit in the entailment checks.  A found goal
is turned into an explicit proof from unsat cores, so every returned
proof goes through the checker.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .formula import (
    BOT,
    And,
    Atom,
    Formula,
    MetaF,
    Modality,
    ModApp,
    Not,
    PredApp,
    atoms,
    imps,
    metavars,
    normalize,
    subformula_pool,
    subformulas,
)
from .parser import parse
from .proofcheck import MP, GlobalAx, LocalAx, Mode, Nec, Proof, Step, Valid, check, resolve_system
from .propositional import core, entails, satisfy, skeleton_atoms
from .propositional import evaluate as skeleton_eval
from .schema import AxiomTag, Schema, SchemaError, instantiate, match, pool_instances
from .semantics import EVERYTHING, REFLECTION, Model, UnsupportedFormula, evaluate


@dataclass(frozen=True)
class SearchConfig:
    goal: Formula = BOT
    pool_depth: int = 3
    max_steps: int = 4
    nec_operators: frozenset[str] | None = None  # None: every rule of the system
    seeds: tuple[Formula, ...] = ()

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if self.pool_depth < 0:
            raise ValueError("pool_depth must be >= 0")
        goal = parse(self.goal) if isinstance(self.goal, str) else self.goal
        object.__setattr__(self, "goal", normalize(goal))
        object.__setattr__(self, "seeds", tuple(normalize(parse(s) if isinstance(s, str) else s) for s in self.seeds))
        if self.nec_operators is not None:
            object.__setattr__(self, "nec_operators", frozenset(self.nec_operators))


@dataclass(frozen=True)
class Found:
    proof: Proof
    rounds: int
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def found(self) -> bool:
        return True


@dataclass(frozen=True)
class Exhausted:
    rounds: int
    stats: dict = field(default_factory=dict, compare=False)
    saturated: bool = False

    @property
    def found(self) -> bool:
        return False


@dataclass
class _Fact:
    formula: Formula
    pure: bool
    kind: str  # "global" | "local" | "nec"
    name: str = ""  # axiom name or operator
    inner: Formula | None = None
    snapshot: int = 0  # number of pure facts available when necessitated


class _Val(dict):
    def __missing__(self, key):
        return False


def _unquoted(seeds: Sequence[Formula], preds: Sequence[Modality]) -> list[Formula]:
    """Seeds plus the formulas coded inside knowledge-predicate applications."""
    out = list(seeds)
    todo = list(seeds)
    while todo and preds:
        f = todo.pop()
        for g in subformulas(f):
            for m in preds:
                inner = m.unwrap(g)
                if inner is not None and inner not in out:
                    out.append(inner)
                    todo.append(inner)
    return out


def _triggers(schema: Schema) -> list[Schema]:
    mv = set(schema.metavars)
    out = []
    for g in subformulas(schema.pattern):
        if isinstance(g, (ModApp, PredApp)) and mv and metavars(g) == mv:
            out.append(Schema(schema.name + "@trigger", g, ()))
    return out


class _Search:
    def __init__(self, system, cfg: SearchConfig):
        self.system = system
        self.cfg = cfg
        ops = [m for m in system.nec if cfg.nec_operators is None or m.name in cfg.nec_operators]
        self.nec = ops
        ground = [instantiate(a.schema, {}, system.valid) for a in system.axioms if a.schema.is_ground]
        for f in [cfg.goal, *ground]:
            if any(isinstance(g, MetaF) for g in subformulas(f)):
                raise UnsupportedFormula("goal contains metavariables")
        seeds = [cfg.goal, BOT, *cfg.seeds, *ground] + [Atom(a) for a in system.atoms()]
        seeds = _unquoted(seeds, [m for m in system.operators() if m.pred])
        self.universe = subformula_pool(seeds, cfg.pool_depth, system.operators())
        self.uset = set(self.universe)
        self.facts: list[_Fact] = []
        self.index: dict[Formula, int] = {}
        self.pure: list[Formula] = []
        self.used_triggers: set[tuple[str, Formula]] = set()
        self.schemas = [(a, _triggers(a.schema)) for a in system.axioms if not a.schema.is_ground]
        for a in system.axioms:
            if a.schema.is_ground:
                self.add(_Fact(instantiate(a.schema, {}, system.valid), a.tag is AxiomTag.GLOBAL, str(a.tag), a.name))

    def add(self, fact: _Fact) -> bool:
        fact.formula = normalize(fact.formula)
        k = self.index.get(fact.formula)
        if k is not None:
            old = self.facts[k]
            if old.pure or not fact.pure:
                return False
            # a pure derivation supersedes a local one
            self.facts[k] = fact
            self.pure.append(fact.formula)
            return True
        self.index[fact.formula] = len(self.facts)
        self.facts.append(fact)
        if fact.pure:
            self.pure.append(fact.formula)
        return True

    def instantiate_round(self) -> int:
        sources = [self.cfg.goal] + [f.formula for f in self.facts]
        triggers: dict[Formula, None] = {}
        for s in sources:
            for g in subformulas(s):
                if isinstance(g, (ModApp, PredApp)) and g in self.uset:
                    triggers.setdefault(g, None)
        added = 0
        for ax, pats in self.schemas:
            for t in triggers:
                key = (ax.name, t)
                if key in self.used_triggers:
                    continue
                self.used_triggers.add(key)
                for pat in pats:
                    b = match(pat, t)
                    if b is None:
                        continue
                    try:
                        inst = instantiate(ax.schema, b, self.system.valid)
                    except SchemaError:  # side condition not met
                        continue
                    added += self.add(_Fact(inst, ax.tag is AxiomTag.GLOBAL, str(ax.tag), ax.name))
        return added

    def _samples(self, premises: Sequence[Formula], limit: int = 24) -> list[_Val]:
        extra: list[Formula] = []
        out = []
        skel = []
        for f in premises:
            skel.extend(skeleton_atoms(f))
        skel = list(dict.fromkeys(skel))
        for _ in range(limit):
            m = satisfy(list(premises) + extra)
            if m is None:
                break
            out.append(_Val(m))
            lits = [a if m.get(a, False) else Not(a) for a in skel]
            if not lits:
                break
            extra.append(Not(_balanced(lits)))
        return out

    def nec_round(self) -> int:
        if not self.nec:
            return 0
        pure = list(self.pure)
        samples = self._samples(pure)
        if not samples:
            return 0  # pure facts inconsistent; the goal check handles it
        demand: dict[Formula, None] = {}
        for f in [self.cfg.goal] + [f.formula for f in self.facts]:
            for g in subformulas(f):
                if isinstance(g, (ModApp, PredApp)):
                    demand.setdefault(g, None)
        candidates: dict[tuple[Modality, Formula], None] = {}
        for m in self.nec:
            for f in self.universe:
                if m.apply(f) in self.uset:
                    candidates.setdefault((m, f), None)
            for g in demand:
                inner = m.unwrap(g)
                if inner is not None:
                    candidates.setdefault((m, normalize(inner)), None)
        added = 0
        snapshot = len(pure)
        for m, f in candidates:
            target = normalize(m.apply(f))
            k = self.index.get(target)
            if k is not None and self.facts[k].pure:
                continue
            if not all(_safe_eval(f, v) for v in samples):
                continue
            if entails(pure, f):
                added += self.add(_Fact(target, True, "nec", m.name, f, snapshot))
        return added

    def run(self) -> Found | Exhausted:
        stats = {"universe": len(self.universe)}
        for r in range(1, self.cfg.max_steps + 1):
            new = self.instantiate_round()
            if self._goal_reached():
                return self._found(r, stats)
            new += self.nec_round()
            if self._goal_reached():
                return self._found(r, stats)
            stats.update(rounds=r, facts=len(self.facts), pure=len(self.pure))
            if not new:
                return Exhausted(r, stats, saturated=True)
        return Exhausted(self.cfg.max_steps, stats)

    def _goal_reached(self) -> bool:
        return entails([f.formula for f in self.facts], self.cfg.goal)

    def _found(self, r: int, stats: dict) -> Found:
        stats.update(rounds=r, facts=len(self.facts), pure=len(self.pure))
        em = _ProofBuilder(self)
        em.derive_from([f.formula for f in self.facts], self.cfg.goal)
        p = Proof(self.system, tuple(em.steps), "search")
        report = check(p, Mode.DEPENDENCY)
        if not report.accepted:  # pragma: no cover - a bug, not a search outcome
            raise AssertionError(f"search produced a rejected proof: {report.diagnostics}")
        return Found(p, r, stats)


def _balanced(parts: Sequence[Formula]) -> Formula:
    # blocking clauses can mention hundreds of atoms; keep them shallow
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return And(_balanced(parts[:mid]), _balanced(parts[mid:]))


def _safe_eval(f: Formula, val: _Val) -> bool:
    return skeleton_eval(f, val)


class _ProofBuilder:
    def __init__(self, search: _Search):
        self.search = search
        self.steps: list[Step] = []
        self.at: dict[Formula, int] = {}

    def emit(self, f: Formula, just) -> int:
        self.steps.append(Step(f, just))
        self.at[f] = len(self.steps)
        return len(self.steps)

    def fact(self, f: Formula) -> int:
        if f in self.at:
            return self.at[f]
        fact = self.search.facts[self.search.index[f]]
        if fact.kind == "global":
            return self.emit(f, GlobalAx(fact.name))
        if fact.kind == "local":
            return self.emit(f, LocalAx(fact.name))
        j = self.derive_from(self.search.pure[: fact.snapshot], fact.inner)
        return self.emit(f, Nec(fact.name, j))

    def derive_from(self, premises: Sequence[Formula], goal: Formula) -> int:
        goal = normalize(goal)
        if goal in self.at:
            return self.at[goal]
        if goal in self.search.index and goal in premises:
            return self.fact(goal)
        used = core(premises, goal)
        idx = [self.fact(c) for c in used]
        chain = normalize(imps(*used, goal))
        k = self.at.get(chain) or self.emit(chain, Valid())
        for i in idx:
            chain = chain.right
            k = self.at.get(chain) or self.emit(chain, MP(i, k))
        return k


def forward_search(system, cfg: SearchConfig) -> Found | Exhausted:
    """Deterministic bounded saturation; Found proofs pass the checker."""
    return _Search(resolve_system(system), cfg).run()


# ------------------------------------------------------- countermodels


@dataclass(frozen=True)
class FoundModel:
    model: Model

    @property
    def found(self) -> bool:
        return True


@dataclass(frozen=True)
class NoneInFamily:
    tried: int

    @property
    def found(self) -> bool:
        return False


def countermodel_search(
    axioms: Iterable[Formula | Schema],
    target: Formula,
    ops: Iterable[str | Modality],
    pool_depth: int = 1,
) -> FoundModel | NoneInFamily:
    """First model in the knows-everything / truth-reflection family that
    satisfies every axiom (schemas checked over a pool) and falsifies the
    target.  Enumeration order: interpretations, then valuations with true
    before false."""
    target = normalize(target)
    schemas = [a if isinstance(a, Schema) else Schema("axiom", normalize(a), ()) for a in axioms]
    mods = [m if isinstance(m, Modality) else Modality(m) for m in ops]
    names = set(atoms(target))
    for s in schemas:
        names |= atoms(s.pattern)
    names = sorted(names)
    instances = []
    if any(not s.is_ground for s in schemas):
        seeds = [BOT, target] + [Atom(a) for a in names]
        seeds += [s.pattern for s in schemas if s.is_ground]
        pool = subformula_pool(seeds, pool_depth, mods)
    for s in schemas:
        if s.is_ground:
            instances.append(normalize(s.pattern))
        else:
            instances.extend(f for _, f in pool_instances(s, pool))
    choices = [[EVERYTHING] if m.pred else [EVERYTHING, REFLECTION] for m in mods]
    tried = 0
    for interps in itertools.product(*choices):
        for bits in itertools.product((True, False), repeat=len(names)):
            tried += 1
            val = dict(zip(names, bits))
            label = ",".join(f"{m.name}={i}" for m, i in zip(mods, interps))
            m = Model(f"countermodel[{label}]", val, {mm.name: i for mm, i in zip(mods, interps)})
            try:
                if evaluate(m, target):
                    continue
                if all(evaluate(m, f) for f in instances):
                    return FoundModel(m)
            except UnsupportedFormula:
                continue
    return NoneInFamily(tried)
