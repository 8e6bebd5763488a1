"""Pluggable logical-validity oracles.

``taut`` decides the boolean skeleton exactly.  ``taut+fo`` also accepts
three first-order shapes at the top level: existential generalization,
universal instantiation and distribution of a universal over an
implication.  Anything else must be supplied as an axiom.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import (
    Exists,
    Forall,
    Formula,
    Imp,
    Term,
    Var,
    iter_terms,
    normalize,
    substitute,
)
from .propositional import counterexample

MODES = ("taut", "taut+fo")


@dataclass(frozen=True)
class Certified:
    rule: str = "taut"

    @property
    def certified(self) -> bool:
        return True


@dataclass(frozen=True)
class NotCertified:
    witness: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return False


def _instance_term(body: Formula, var: str, target: Formula) -> Term | None:
    """A term ``t`` with ``body(var|t) == target``, if one exists."""
    seen: set[Term] = set()
    for t in [Var(var), *iter_terms(target)]:
        if t in seen:
            continue
        seen.add(t)
        out = substitute(body, var, t)
        if out is not None and out == target:
            return t
    return None


def fo_rule(f: Formula) -> str | None:
    if not isinstance(f, Imp):
        return None
    a, b = f.left, f.right
    if isinstance(b, Exists) and _instance_term(b.body, b.var, a) is not None:
        return "eg"
    if isinstance(a, Forall) and _instance_term(a.body, a.var, b) is not None:
        return "ui"
    if (
        isinstance(a, Forall)
        and isinstance(a.body, Imp)
        and isinstance(b, Imp)
        and b.left == Forall(a.var, a.body.left)
        and b.right == Forall(a.var, a.body.right)
    ):
        return "dist"
    return None


def is_valid(f: Formula, mode: str = "taut") -> Certified | NotCertified:
    if mode not in MODES:
        raise ValueError(f"unknown validity mode {mode!r}")
    f = normalize(f)
    cex = counterexample(f)
    if cex is None:
        return Certified("taut")
    if mode == "taut+fo":
        rule = fo_rule(f)
        if rule:
            return Certified(rule)
    return NotCertified(cex)
