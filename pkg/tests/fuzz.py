"""Seeded generators for random formulas, small systems and proofs."""

from __future__ import annotations

import random

from globalnec.formula import BOT, And, Atom, Iff, Imp, ModApp, Not, Or
from globalnec.proofcheck import MP, GlobalAx, LocalAx, Nec, Proof, Step, Valid
from globalnec.schema import parse_system

ATOMS = ("p1", "p2", "p3")
OPS = ("K", "Box")


def random_formula(rng: random.Random, depth: int, atoms=ATOMS, ops=OPS) -> object:
    if depth <= 1 or rng.random() < 0.25:
        return BOT if rng.random() < 0.08 else Atom(rng.choice(atoms))
    k = rng.randrange(5 + (2 if ops else 0))
    if k == 0:
        return Not(random_formula(rng, depth - 1, atoms, ops))
    if k <= 4:
        cls = (And, Or, Imp, Iff)[k - 1]
        return cls(random_formula(rng, depth - 1, atoms, ops), random_formula(rng, depth - 1, atoms, ops))
    return ModApp(rng.choice(ops), random_formula(rng, depth - 1, atoms, ops))


def random_system(rng: random.Random, idx: int = 0):
    """Ground global and local axioms, one or two necessitation rules."""
    ops = OPS[: rng.randint(1, 2)]
    lines = [f"system fz{idx}"]
    for k in range(rng.randint(1, 3)):
        lines.append(f"global g{k}: {random_formula(rng, 3, ops=ops)}")
    for k in range(rng.randint(1, 2)):
        lines.append(f"local l{k}: {random_formula(rng, 3, ops=ops)}")
    if rng.random() < 0.5:
        lines.append("global dist: K(?phi -> ?psi) -> K(?phi) -> K(?psi)")
    lines += [f"nec {o}" for o in ops]
    return parse_system("\n".join(lines) + "\n")


def _valid_step(rng: random.Random, a, b):
    """A tautology whose antecedent is ``a`` (so MP can fire next)."""
    return rng.choice(
        [
            Imp(a, Or(a, b)),
            Imp(a, Or(b, a)),
            Imp(a, Imp(b, a)),
            Imp(a, Not(Not(a))),
            Imp(a, a),
        ]
    )


def random_proof(rng: random.Random, system, max_len: int = 8, impure_nec: bool = False) -> Proof:
    """A proof that is accepted in dependency mode unless ``impure_nec``
    allows necessitation over steps that depend on a local axiom."""
    ground = {a.name: a.schema.pattern for a in system.axioms if a.schema.is_ground}
    globals_ = [n for n in ground if system.axiom(n).tag.value == "global"]
    locals_ = [n for n in ground if system.axiom(n).tag.value == "local"]
    ops = [m.name for m in system.nec]
    steps: list[Step] = []
    pure: list[bool] = []
    n = rng.randint(1, max_len)
    while len(steps) < n:
        k = len(steps)
        mps = [
            (i, j)
            for i in range(k)
            for j in range(k)
            if isinstance(steps[j].formula, Imp) and steps[j].formula.left == steps[i].formula
        ]
        nec_ok = [j for j in range(k) if pure[j] or impure_nec]
        roll = rng.random()
        if mps and roll < 0.35:
            i, j = rng.choice(mps)
            steps.append(Step(steps[j].formula.right, MP(i + 1, j + 1)))
            pure.append(pure[i] and pure[j])
        elif nec_ok and roll < 0.6:
            j = rng.choice(nec_ok)
            op = rng.choice(ops)
            steps.append(Step(ModApp(op, steps[j].formula), Nec(op, j + 1)))
            pure.append(pure[j])
        elif k and roll < 0.8:
            a = rng.choice(steps).formula
            steps.append(Step(_valid_step(rng, a, random_formula(rng, 2, ops=ops)), Valid()))
            pure.append(True)
        elif locals_ and roll < 0.9:
            name = rng.choice(locals_)
            steps.append(Step(ground[name], LocalAx(name)))
            pure.append(False)
        else:
            name = rng.choice(globals_)
            steps.append(Step(ground[name], GlobalAx(name)))
            pure.append(True)
    return Proof(system, tuple(steps), "fuzz")


def fuzz_proofs(count: int, seed: int = 0, impure_nec: bool = False) -> list[Proof]:
    rng = random.Random(seed)
    out = []
    for idx in range(count):
        out.append(random_proof(rng, random_system(rng, idx), impure_nec=impure_nec))
    return out
