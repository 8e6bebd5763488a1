"""Elimination of global necessitation.

``sprime_of(S)`` is the axiom-only system with five lines:

    l1  the global axioms of S
    l2  K[phi] for phi valid
    l3  K[phi -> psi] -> K[phi] -> K[psi]
    l4  K[phi] for phi an instance of l1-l4
    l5  the local axioms of S

one copy of l2-l4 per necessitation symbol.  ``translate`` turns a proof
in S into a proof in ``sprime_of(S)`` with the same conclusion and no
necessitation steps.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .formula import Forall, Formula, Imp, MetaF, Modality, free_vars, imps, normalize, to_text
from .proofcheck import (
    MP,
    GlobalAx,
    LocalAx,
    NotAccepted,
    Proof,
    Step,
    Valid,
    check,
    premises,
    resolve_system,
)
from .propositional import is_tautology
from .schema import AxiomTag, UnknownAxiomName
from .validity import is_valid


class OracleFailure(RuntimeError):
    pass


LINES = ("l1", "l2", "l3", "l4", "l5")


@dataclass(frozen=True)
class SPrimeAxiom:
    name: str
    tag: AxiomTag
    description: str


class SPrimeSystem:
    """Duck-compatible with ``schema.System`` for checking purposes."""

    def __init__(self, base, k_closure_depth: int = 2):
        self.base = base
        self.k_closure_depth = k_closure_depth
        self.name = base.name + "#sprime"
        self.validity_mode = base.validity_mode
        self.modalities: tuple[Modality, ...] = tuple(base.nec)
        self.nec: tuple[Modality, ...] = ()
        ks = ", ".join(str(m) for m in self.modalities) or "none"
        self.axioms = (
            SPrimeAxiom("l1", AxiomTag.GLOBAL, f"global axioms of {base.name}"),
            SPrimeAxiom("l2", AxiomTag.GLOBAL, f"K[phi] for valid phi (K in {ks})"),
            SPrimeAxiom("l3", AxiomTag.GLOBAL, "K[phi -> psi] -> K[phi] -> K[psi]"),
            SPrimeAxiom("l4", AxiomTag.GLOBAL, "K[phi] for phi an instance of l1-l4"),
            SPrimeAxiom("l5", AxiomTag.LOCAL, f"local axioms of {base.name}"),
        )

    def __repr__(self) -> str:
        return f"SPrimeSystem({self.base.name!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, SPrimeSystem) and other.base == self.base

    def __hash__(self) -> int:
        return hash(("sprime", self.base))

    # System interface

    def axiom(self, name: str) -> SPrimeAxiom:
        for a in self.axioms:
            if a.name == name:
                return a
        raise UnknownAxiomName(f"{self.name} has no axiom {name!r} (lines are l1-l5)")

    def modality(self, name: str):
        return None

    def valid(self, f: Formula) -> bool:
        return is_valid(f, self.validity_mode).certified

    def is_instance(self, name: str, f: Formula) -> bool:
        f = normalize(f)
        tests = {
            "l1": self.in_l1,
            "l2": self.in_l2,
            "l3": self.in_l3,
            "l4": self.in_l4,
            "l5": self.in_l5,
        }
        try:
            return tests[name](f)
        except KeyError:
            raise UnknownAxiomName(name) from None

    # line membership

    def _base_tagged(self, tag: AxiomTag, f: Formula) -> bool:
        return any(a.tag is tag and self.base.is_instance(a.name, f) for a in self.base.axioms)

    def in_l1(self, f: Formula) -> bool:
        return self._base_tagged(AxiomTag.GLOBAL, f)

    def in_l5(self, f: Formula) -> bool:
        return self._base_tagged(AxiomTag.LOCAL, f)

    def _closure_bodies(self, f: Formula):
        yield f
        if self.validity_mode == "taut+fo":
            seen = []
            while isinstance(f, Forall):
                seen.append(f.var)
                f = f.body
                if set(seen) == free_vars(f):
                    yield f

    def in_l2(self, f: Formula) -> bool:
        for body in self._closure_bodies(f):
            for m in self.modalities:
                inner = m.unwrap(body)
                if inner is not None and self.valid(inner):
                    return True
        return False

    def in_l3(self, f: Formula) -> bool:
        if not (isinstance(f, Imp) and isinstance(f.right, Imp)):
            return False
        for m in self.modalities:
            imp, a, b = m.unwrap(f.left), m.unwrap(f.right.left), m.unwrap(f.right.right)
            if imp is not None and a is not None and b is not None and imp == Imp(a, b):
                return True
        return False

    def in_l4(self, f: Formula) -> bool:
        for m in self.modalities:
            inner = m.unwrap(f)
            if inner is not None and self.in_s0(inner):
                return True
        return False

    def in_s0(self, f: Formula) -> bool:
        return self.in_l1(f) or self.in_l2(f) or self.in_l3(f) or self.in_l4(f)

    def line_of(self, f: Formula) -> str | None:
        f = normalize(f)
        for name in LINES:
            if self.is_instance(name, f):
                return name
        return None

    # presentation

    def expanded_lines(self) -> list[str]:
        """One entry per axiom or axiom family, with l3 omitted when a
        global axiom of the base already is that distribution schema."""
        out = [f"{a.schema.text()}" for a in self.base.axioms if a.tag is AxiomTag.GLOBAL]
        global_patterns = {normalize(a.schema.pattern) for a in self.base.axioms if a.tag is AxiomTag.GLOBAL}
        phi, psi = MetaF("phi"), MetaF("psi")
        for m in self.modalities:
            out.append(f"{to_text(m.apply(phi)) if not m.pred else m.name + '{?phi}'} for valid ?phi")
        for m in self.modalities:
            if m.pred:
                out.append(f"{m.name}{{?phi -> ?psi}} -> {m.name}{{?phi}} -> {m.name}{{?psi}}")
                continue
            dist = Imp(m.apply(Imp(phi, psi)), Imp(m.apply(phi), m.apply(psi)))
            if dist not in global_patterns:
                out.append(to_text(dist))
        for m in self.modalities:
            out.append(f"{m.name}[?phi] for ?phi an instance of the lines above")
        out += [a.schema.text() for a in self.base.axioms if a.tag is AxiomTag.LOCAL]
        return out

    def to_text(self) -> str:
        lines = [f"# {self.name}: axioms only, no necessitation"]
        lines += [f"# {a.name}: {a.description}" for a in self.axioms]
        lines += [f"#   {t}" for t in self.expanded_lines()]
        return "\n".join(lines) + "\n"


def sprime_of(system, k_closure_depth: int = 2) -> SPrimeSystem:
    return SPrimeSystem(resolve_system(system), k_closure_depth)


# ---------------------------------------------------------- discharge


@dataclass(frozen=True)
class Discharge:
    implication: Formula
    method: str  # "direct" | "hilbert"
    steps: tuple[tuple[Formula, object], ...] = ()


def _hilbert_discharge(leaves: Sequence[Formula], goal: Formula, subproof: Proof) -> list[tuple[Formula, object]]:
    """Deduction theorem, one leaf at a time, from the last leaf inwards.

    ``subproof`` uses only leaves, Valid steps and MP.  The result is a
    list of (formula, just) with just "valid" or ("mp", i, j), indices
    0-based, ending in ``leaves[0] -> ... -> leaves[-1] -> goal``.
    """
    # current derivation: entries (formula, kind) where kind is "hyp",
    # "valid" or ("mp", i, j)
    leaf_set = set(leaves)
    cur: list[tuple[Formula, object]] = []
    for s in subproof.steps:
        j = s.just
        if isinstance(j, MP):
            cur.append((s.formula, ("mp", j.i - 1, j.j - 1)))
        elif s.formula in leaf_set:
            cur.append((s.formula, "hyp"))
        elif isinstance(j, Valid):
            cur.append((s.formula, "valid"))
        else:
            raise OracleFailure(f"subproof step {to_text(s.formula)} is neither a leaf, valid, nor MP")
    hyps = list(leaves)
    while hyps:
        h = hyps.pop()
        out: list[tuple[Formula, object]] = []
        where: dict[int, int] = {}
        for k, (chi, kind) in enumerate(cur):
            if chi == h and kind == "hyp":
                out.append((Imp(h, chi), "valid"))
            elif kind in ("hyp", "valid"):
                out.append((chi, kind))
                out.append((Imp(chi, Imp(h, chi)), "valid"))
                out.append((Imp(h, chi), ("mp", len(out) - 2, len(out) - 1)))
            else:
                _, i, j = kind
                if cur[j][0] == Imp(cur[i][0], chi):
                    minor, major = i, j
                else:
                    minor, major = j, i
                alpha = cur[minor][0]
                out.append((Imp(Imp(h, Imp(alpha, chi)), Imp(Imp(h, alpha), Imp(h, chi))), "valid"))
                out.append((Imp(Imp(h, alpha), Imp(h, chi)), ("mp", where[major], len(out) - 1)))
                out.append((Imp(h, chi), ("mp", where[minor], len(out) - 1)))
            where[k] = len(out) - 1
        cur = out
    return cur


def deduction_discharge(
    leaves: Sequence[Formula],
    goal: Formula,
    subproof: Proof | None = None,
    direct: bool = True,
) -> Discharge:
    """Certify ``s1 -> ... -> sn -> goal``."""
    implication = normalize(imps(*leaves, goal))
    if direct and is_tautology(implication):
        return Discharge(implication, "direct")
    if subproof is None:
        raise OracleFailure(f"cannot certify {to_text(implication)}")
    steps = _hilbert_discharge(list(leaves), goal, subproof)
    if not steps or steps[-1][0] != implication:
        raise OracleFailure("deduction transformation did not reach the implication")
    for f, kind in steps:
        if kind == "valid" and not is_tautology(f):
            raise OracleFailure(f"deduction step {to_text(f)} is not a tautology")
        if kind == "hyp":
            raise OracleFailure("undischarged hypothesis")
        if isinstance(kind, tuple):
            _, i, j = kind
            a, b = steps[i][0], steps[j][0]
            if not (b == Imp(a, f) or a == Imp(b, f)):
                raise OracleFailure("bad modus ponens in deduction transformation")
    return Discharge(implication, "hilbert", tuple(steps))


# ---------------------------------------------------------- translation


class _Emitter:
    """Appends steps, reusing an earlier copy of a formula unless that copy
    depends on a local axiom and the new one would not."""

    def __init__(self):
        self.steps: list[Step] = []
        self.pure: list[bool] = []
        self.index: dict[Formula, int] = {}

    def emit(self, f: Formula, just) -> int:
        f = normalize(f)
        pure = not isinstance(just, LocalAx) and all(self.pure[i - 1] for i in premises(just))
        k = self.index.get(f)
        if k is not None and (self.pure[k - 1] or not pure):
            return k
        self.steps.append(Step(f, just))
        self.pure.append(pure)
        k = len(self.steps)
        if f not in self.index or pure:
            self.index[f] = k
        return k

    def mp(self, minor: int, major: int) -> int:
        f = self.steps[major - 1].formula
        assert isinstance(f, Imp) and f.left == self.steps[minor - 1].formula
        return self.emit(f.right, MP(minor, major))

    def cone(self, k: int) -> list[int]:
        seen, todo = set(), [k]
        while todo:
            i = todo.pop()
            if i not in seen:
                seen.add(i)
                todo.extend(premises(self.steps[i - 1].just))
        return sorted(seen)


def translate(p: Proof, direct: bool = True) -> Proof:
    """Lemma-style translation into ``sprime_of(p.system)``."""
    system = resolve_system(p.system)
    report = check(p, system=system)
    if not report.accepted:
        raise NotAccepted(f"{p.name}: {report.diagnostics[0][1]} (step {report.diagnostics[0][0]})")
    target = SPrimeSystem(system)
    out = _Emitter()
    where: dict[int, int] = {}
    for k, step in enumerate(p.steps, start=1):
        j = step.just
        if isinstance(j, LocalAx):
            where[k] = out.emit(step.formula, LocalAx("l5"))
        elif isinstance(j, GlobalAx):
            where[k] = out.emit(step.formula, GlobalAx("l1"))
        elif isinstance(j, Valid):
            where[k] = out.emit(step.formula, Valid())
        elif isinstance(j, MP):
            where[k] = out.emit(step.formula, MP(where[j.i], where[j.j]))
        else:
            m = system.modality(j.op)
            where[k] = _necessitate(out, target, m, where[j.j], direct)
    # the conclusion must be the last step
    last = where[len(p)]
    steps = out.steps
    if last != len(steps):
        keep = out.cone(last)
        renum = {old: new for new, old in enumerate(keep, start=1)}

        def fix(just):
            if isinstance(just, MP):
                return MP(renum[just.i], renum[just.j])
            return just

        steps = [Step(steps[i - 1].formula, fix(steps[i - 1].just)) for i in keep]
    return Proof(target, tuple(steps), p.name + "#sprime")


def _necessitate(out: _Emitter, target: SPrimeSystem, m: Modality, t: int, direct: bool) -> int:
    phi = out.steps[t - 1].formula
    goal = normalize(m.apply(phi))
    if goal in out.index and out.pure[out.index[goal] - 1]:
        return out.index[goal]
    just = out.steps[t - 1].just
    if isinstance(just, Valid):
        return out.emit(goal, GlobalAx("l2"))
    if isinstance(just, GlobalAx):
        return out.emit(goal, GlobalAx("l4"))
    cone = out.cone(t)
    leaf_steps = [i for i in cone if not isinstance(out.steps[i - 1].just, MP)]
    leaves = [out.steps[i - 1].formula for i in leaf_steps]
    sub = Proof(target, tuple(out.steps[i - 1] for i in cone))
    # re-index the sub-proof so deduction_discharge can follow it
    renum = {old: new for new, old in enumerate(cone, start=1)}
    sub = Proof(
        target,
        tuple(
            Step(s.formula, MP(renum[s.just.i], renum[s.just.j]) if isinstance(s.just, MP) else s.just)
            for s in sub.steps
        ),
    )
    d = deduction_discharge(leaves, phi, sub, direct)
    cur = out.emit(m.apply(d.implication), GlobalAx("l2"))
    rest = d.implication
    for i, s in zip(leaf_steps, leaves):
        leaf_just = out.steps[i - 1].just
        k_leaf = out.emit(m.apply(s), GlobalAx("l2" if isinstance(leaf_just, Valid) else "l4"))
        rest = rest.right
        l3 = out.emit(Imp(m.apply(Imp(s, rest)), Imp(m.apply(s), m.apply(rest))), GlobalAx("l3"))
        cur = out.mp(cur, l3)
        cur = out.mp(k_leaf, cur)
    return cur
