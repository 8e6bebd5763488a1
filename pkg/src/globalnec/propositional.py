"""Boolean skeleton of formulas and a small complete decision procedure.

Modal applications, predicate applications, quantified formulas and
metavariables are opaque: each maximal such subformula is a fresh boolean
atom.  Decisions are exhaustive case splits over those atoms (DPLL with
unit propagation), so every answer is exact.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .formula import And, Bot, Formula, Iff, Imp, Not, Or

_CONNECTIVES = (Not, And, Or, Imp, Iff)


def is_opaque(f: Formula) -> bool:
    return f.__class__ not in _CONNECTIVES and f.__class__ is not Bot


def skeleton_atoms(f: Formula) -> list[Formula]:
    """Opaque atoms of ``f`` in first-occurrence order."""
    out: dict[Formula, None] = {}

    def go(g: Formula) -> None:
        cls = g.__class__
        if cls is Not:
            go(g.f)
        elif cls in (And, Or, Imp, Iff):
            go(g.left)
            go(g.right)
        elif cls is not Bot:
            out.setdefault(g, None)

    go(f)
    return list(out)


def evaluate(f: Formula, val) -> bool:
    """Evaluate the skeleton; ``val`` maps opaque atoms to booleans."""
    cls = f.__class__
    if cls is Not:
        return not evaluate(f.f, val)
    if cls is And:
        return evaluate(f.left, val) and evaluate(f.right, val)
    if cls is Or:
        return evaluate(f.left, val) or evaluate(f.right, val)
    if cls is Imp:
        return (not evaluate(f.left, val)) or evaluate(f.right, val)
    if cls is Iff:
        return evaluate(f.left, val) == evaluate(f.right, val)
    if cls is Bot:
        return False
    return val[f]


class _Encoder:
    def __init__(self):
        self.var_of: dict[Formula, int] = {}
        self.atoms: dict[int, Formula] = {}
        self.clauses: list[list[int]] = []
        self.n = 0

    def fresh(self) -> int:
        self.n += 1
        return self.n

    def lit(self, f: Formula) -> int:
        cls = f.__class__
        if cls is Not:
            return -self.lit(f.f)
        v = self.var_of.get(f)
        if v is not None:
            return v
        if cls is Bot:
            v = self.fresh()
            self.clauses.append([-v])
        elif cls in (And, Or, Imp, Iff):
            a, b = self.lit(f.left), self.lit(f.right)
            v = self.fresh()
            c = self.clauses
            if cls is And:
                c += [[-v, a], [-v, b], [v, -a, -b]]
            elif cls is Or:
                c += [[-v, a, b], [v, -a], [v, -b]]
            elif cls is Imp:
                c += [[-v, -a, b], [v, a], [v, -b]]
            else:
                c += [[-v, -a, b], [-v, a, -b], [v, a, b], [v, -a, -b]]
        else:
            v = self.fresh()
            self.atoms[v] = f
        self.var_of[f] = v
        return v


def _dpll(clauses: list[list[int]], nvars: int) -> dict[int, bool] | None:
    occurs: dict[int, list[int]] = {}
    for ci, cl in enumerate(clauses):
        for l in cl:
            occurs.setdefault(-l, []).append(ci)  # clauses hurt when l becomes false
    assign: dict[int, bool] = {}
    trail: list[int] = []

    def value(l: int):
        v = assign.get(abs(l))
        if v is None:
            return None
        return v if l > 0 else not v

    def propagate(queue: list[int]) -> bool:
        while queue:
            l = queue.pop()
            for ci in occurs.get(l, ()):
                unassigned = None
                count = 0
                sat = False
                for m in clauses[ci]:
                    val = value(m)
                    if val is True:
                        sat = True
                        break
                    if val is None:
                        count += 1
                        unassigned = m
                        if count > 1:
                            break
                if sat or count > 1:
                    continue
                if count == 0:
                    return False
                assign[abs(unassigned)] = unassigned > 0
                trail.append(abs(unassigned))
                queue.append(unassigned)
        return True

    def set_lit(l: int) -> bool:
        assign[abs(l)] = l > 0
        trail.append(abs(l))
        return propagate([l])

    def undo(mark: int) -> None:
        while len(trail) > mark:
            del assign[trail.pop()]

    for cl in clauses:
        if not cl:
            return None
        if len(cl) == 1:
            val = value(cl[0])
            if val is False:
                return None
            if val is None and not set_lit(cl[0]):
                return None

    def pick() -> int | None:
        for cl in clauses:
            free = None
            for m in cl:
                val = value(m)
                if val is True:
                    free = None
                    break
                if val is None and free is None:
                    free = m
            else:
                if free is not None:
                    return free
        return None

    def search() -> bool:
        l = pick()
        if l is None:
            return True
        mark = len(trail)
        for choice in (l, -l):
            if set_lit(choice) and search():
                return True
            undo(mark)
        return False

    if not search():
        return None
    return assign


def satisfy(formulas: Iterable[Formula]) -> dict[Formula, bool] | None:
    """A valuation of opaque atoms making every formula true, or None."""
    enc = _Encoder()
    for f in formulas:
        enc.clauses.append([enc.lit(f)])
    model = _dpll(enc.clauses, enc.n)
    if model is None:
        return None
    return {a: model.get(v, False) for v, a in enc.atoms.items()}


def counterexample(f: Formula) -> dict[Formula, bool] | None:
    """A falsifying valuation of the skeleton of ``f``, or None if tautology."""
    return satisfy([Not(f)])


def is_tautology(f: Formula) -> bool:
    return counterexample(f) is None


def entails(premises: Sequence[Formula], goal: Formula) -> bool:
    return satisfy(list(premises) + [Not(goal)]) is None


def core(premises: Sequence[Formula], goal: Formula) -> list[Formula] | None:
    """A subset-minimal list of premises that still entails ``goal``.

    Deletion runs in halving chunks; the final pass of single deletions
    makes the result minimal."""
    if not entails(premises, goal):
        return None
    kept = list(premises)
    chunk = max(1, len(kept) // 2)
    while True:
        i = 0
        while i < len(kept):
            trial = kept[:i] + kept[i + chunk:]
            if entails(trial, goal):
                kept = trial
            else:
                i += chunk
        if chunk == 1:
            return kept
        chunk //= 2
