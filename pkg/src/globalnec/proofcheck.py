"""Proof objects and the derivability checker.

A step is justified by a local axiom, a global axiom, validity, modus
ponens or necessitation.  Necessitation over step ``j`` is legal when no
local axiom is involved:

* ``Prefix`` mode reads the rule literally: no step ``k <= j`` may be a
  local axiom instance.
* ``Dependency`` mode only looks at the steps that ``j`` actually uses.

Proof file format::

    proof surprise_tn in surprise_weak
    1: p1 | p2 ; global exam
    2: K(p1 | p2) ; nec K 1
"""

from __future__ import annotations

import enum
import re
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Union

from .formula import Formula, Imp, normalize, requote, to_text
from .parser import ParseError, parse
from .schema import AxiomTag
from .validity import is_valid


class MalformedIndex(ValueError):
    pass


class ProofFormatError(ValueError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class NotAccepted(ValueError):
    pass


class Mode(enum.Enum):
    PREFIX = "prefix"
    DEPENDENCY = "dependency"


# ------------------------------------------------------- justifications


@dataclass(frozen=True)
class LocalAx:
    name: str

    def __str__(self) -> str:
        return f"local {self.name}"


@dataclass(frozen=True)
class GlobalAx:
    name: str

    def __str__(self) -> str:
        return f"global {self.name}"


@dataclass(frozen=True)
class Valid:
    def __str__(self) -> str:
        return "valid"


@dataclass(frozen=True)
class MP:
    """Modus ponens; one premise must be the implication from the other."""

    i: int
    j: int

    def __str__(self) -> str:
        return f"mp {self.i} {self.j}"


@dataclass(frozen=True)
class Nec:
    op: str
    j: int

    def __str__(self) -> str:
        return f"nec {self.op} {self.j}"


Justification = Union[LocalAx, GlobalAx, Valid, MP, Nec]


def premises(just: Justification) -> tuple[int, ...]:
    if isinstance(just, MP):
        return (just.i, just.j)
    if isinstance(just, Nec):
        return (just.j,)
    return ()


@dataclass(frozen=True)
class Step:
    formula: Formula
    just: Justification


@dataclass(frozen=True)
class Proof:
    """Steps are numbered from 1."""

    system: object  # a registry name, or a system object
    steps: tuple[Step, ...]
    name: str = "proof"

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(Step(normalize(s.formula), s.just) for s in self.steps))

    @property
    def conclusion(self) -> Formula:
        return self.steps[-1].formula

    @property
    def system_name(self) -> str:
        return self.system if isinstance(self.system, str) else self.system.name

    def __len__(self) -> int:
        return len(self.steps)

    def formula(self, k: int) -> Formula:
        return self.steps[k - 1].formula

    def just(self, k: int) -> Justification:
        return self.steps[k - 1].just

    def to_text(self) -> str:
        return dump_proof(self)


def proof(system, *steps: tuple[Formula | str, Justification], name: str = "proof") -> Proof:
    return Proof(
        system,
        tuple(Step(parse(f) if isinstance(f, str) else f, j) for f, j in steps),
        name,
    )


def resolve_system(system):
    if isinstance(system, str):
        from .registry import registry

        return registry(system)
    return system


# ------------------------------------------------------------- checking


@dataclass(frozen=True)
class CheckReport:
    verdict: str  # "Accepted" | "Rejected"
    conclusion: Formula | None
    diagnostics: tuple[tuple[int, str], ...]
    gpure_flags: tuple[bool, ...]
    mode: Mode = Mode.DEPENDENCY

    @property
    def accepted(self) -> bool:
        return self.verdict == "Accepted"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "mode": self.mode.value,
            "conclusion": to_text(requote(self.conclusion)) if self.conclusion is not None else None,
            "diagnostics": [{"step": k, "reason": r} for k, r in self.diagnostics],
            "gpure_flags": list(self.gpure_flags),
        }


def check_indices(p: Proof) -> None:
    if not p.steps:
        raise MalformedIndex("a proof needs at least one step")
    for k, step in enumerate(p.steps, start=1):
        for i in premises(step.just):
            if not 1 <= i < k:
                raise MalformedIndex(f"step {k}: {step.just} refers to step {i}")


def gpure_flags(p: Proof) -> list[bool]:
    """Flag ``k`` is set iff step ``k`` depends on no local axiom."""
    check_indices(p)
    flags: list[bool] = []
    for step in p.steps:
        j = step.just
        if isinstance(j, (GlobalAx, Valid)):
            flags.append(True)
        elif isinstance(j, LocalAx):
            flags.append(False)
        else:
            flags.append(all(flags[i - 1] for i in premises(j)))
    return flags


def _check_step(system, p: Proof, k: int, flags: Sequence[bool], first_local: int | None, mode: Mode) -> str | None:
    f, j = p.formula(k), p.just(k)
    if isinstance(j, (LocalAx, GlobalAx)):
        ax = system.axiom(j.name)
        want = AxiomTag.LOCAL if isinstance(j, LocalAx) else AxiomTag.GLOBAL
        if ax.tag is not want:
            return f"axiom {j.name} is {ax.tag} in {system.name}, cited as {want}"
        if not system.is_instance(j.name, f):
            return f"not an instance of {j.name}"
        return None
    if isinstance(j, Valid):
        r = is_valid(f, system.validity_mode)
        if not r.certified:
            w = ", ".join(f"{to_text(a)}={'T' if v else 'F'}" for a, v in r.witness.items())
            return f"not certified valid ({system.validity_mode}); falsified by {w}"
        return None
    if isinstance(j, MP):
        a, b = p.formula(j.i), p.formula(j.j)
        if b == Imp(a, f) or a == Imp(b, f):
            return None
        return f"modus ponens from steps {j.i} and {j.j} does not yield this formula"
    # necessitation
    m = system.modality(j.op)
    if m is None:
        return f"no necessitation rule for {j.op} in {system.name}"
    if f != normalize(m.apply(p.formula(j.j))):
        return f"necessitation of step {j.j} over {j.op} does not yield this formula"
    if mode is Mode.PREFIX:
        if first_local is not None and first_local <= j.j:
            return f"necessitation over prefix containing local axiom (step {first_local})"
    elif not flags[j.j - 1]:
        culprit = _first_local_in_cone(p, j.j)
        return f"necessitation over dependency cone containing local axiom (step {culprit})"
    return None


def _first_local_in_cone(p: Proof, j: int) -> int:
    seen, todo = set(), [j]
    while todo:
        k = todo.pop()
        if k in seen:
            continue
        seen.add(k)
        todo.extend(premises(p.just(k)))
    return min(k for k in seen if isinstance(p.just(k), LocalAx))


def check(p: Proof, mode: Mode | str = Mode.DEPENDENCY, system=None) -> CheckReport:
    """Check every step; diagnostics are listed earliest step first.

    Raises UnknownSystem, UnknownAxiomName or MalformedIndex for proofs that
    cannot be interpreted at all.
    """
    mode = Mode(mode) if isinstance(mode, str) else mode
    system = resolve_system(system if system is not None else p.system)
    flags = gpure_flags(p)
    for step in p.steps:
        if isinstance(step.just, (LocalAx, GlobalAx)):
            system.axiom(step.just.name)
    diagnostics: list[tuple[int, str]] = []
    first_local = None
    for k in range(1, len(p) + 1):
        if isinstance(p.just(k), LocalAx) and first_local is None:
            first_local = k
        why = _check_step(system, p, k, flags, first_local, mode)
        if why:
            diagnostics.append((k, why))
    ok = not diagnostics
    return CheckReport(
        "Accepted" if ok else "Rejected",
        p.conclusion if ok else None,
        tuple(diagnostics),
        tuple(flags),
        mode,
    )


def reorder_for_prefix(p: Proof) -> Proof:
    """Move every globally pure step in front of the first local one."""
    report = check(p, Mode.DEPENDENCY)
    if not report.accepted:
        raise NotAccepted(f"{p.name} is not accepted in dependency mode")
    flags = report.gpure_flags
    order = [k for k in range(1, len(p) + 1) if flags[k - 1]]
    order += [k for k in range(1, len(p) + 1) if not flags[k - 1]]
    # the conclusion must stay last
    last = len(p)
    if order[-1] != last:
        order.remove(last)
        order.append(last)
    new_index = {old: new for new, old in enumerate(order, start=1)}

    def renumber(j: Justification) -> Justification:
        if isinstance(j, MP):
            return MP(new_index[j.i], new_index[j.j])
        if isinstance(j, Nec):
            return Nec(j.op, new_index[j.j])
        return j

    steps = tuple(Step(p.formula(k), renumber(p.just(k))) for k in order)
    return Proof(p.system, steps, p.name)


# ---------------------------------------------------------- file format

_HEADER = re.compile(r"^proof\s+(?P<name>\S+)\s+in\s+(?P<system>\S+)\s*$")
_LINE = re.compile(r"^(?P<n>\d+)\s*:\s*(?P<formula>.*?)\s*;\s*(?P<just>[^;]*)$")


def parse_justification(text: str) -> Justification:
    parts = text.split()
    if not parts:
        raise ValueError("missing justification")
    kind, args = parts[0], parts[1:]
    if kind in ("local", "global") and len(args) == 1:
        return (LocalAx if kind == "local" else GlobalAx)(args[0])
    if kind == "valid" and not args:
        return Valid()
    if kind == "mp" and len(args) == 2 and all(a.isdigit() for a in args):
        return MP(int(args[0]), int(args[1]))
    if kind == "nec" and len(args) == 2 and args[1].isdigit():
        return Nec(args[0], int(args[1]))
    raise ValueError(f"bad justification {text!r}")


def parse_proof(text: str, system=None) -> Proof:
    name = sysname = None
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if name is None:
            m = _HEADER.match(line)
            if m is None:
                raise ProofFormatError("expected 'proof <name> in <system>'", lineno)
            name, sysname = m.group("name"), m.group("system")
            continue
        m = _LINE.match(line)
        if m is None:
            raise ProofFormatError("expected '<n>: <formula> ; <justification>'", lineno)
        if int(m.group("n")) != len(steps) + 1:
            raise ProofFormatError(f"expected step number {len(steps) + 1}", lineno)
        try:
            f = parse(m.group("formula"))
            j = parse_justification(m.group("just"))
        except ParseError as e:
            raise ProofFormatError(f"formula: {e}", lineno) from e
        except ValueError as e:
            raise ProofFormatError(str(e), lineno) from e
        steps.append(Step(f, j))
    if name is None:
        raise ProofFormatError("empty proof file")
    if not steps:
        raise ProofFormatError("proof has no steps")
    return Proof(system if system is not None else sysname, tuple(steps), name)


def dump_proof(p: Proof) -> str:
    width = len(str(len(p)))
    lines = [f"proof {p.name} in {p.system_name}"]
    for k, s in enumerate(p.steps, start=1):
        lines.append(f"{k:>{width}}: {to_text(requote(s.formula))} ; {s.just}")
    return "\n".join(lines) + "\n"
