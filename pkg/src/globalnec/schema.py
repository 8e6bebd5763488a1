"""Axiom schemas, global/local tagging and systems.

A system file looks like::

    system surprise_weak
    # comment
    validity taut
    local sound: K(?phi) -> ?phi
    global dist: K(?phi -> ?psi) -> K(?phi) -> K(?psi)
    global hc: forall x. (K(?phi) <-> InW(pair(x, quote{?phi}), 1)) where lonefree(?phi, x)
    nec K

Side conditions: ``lonefree(?m, x)`` (the binding's free variables are
exactly ``{x}``), ``valid(?m)`` (the binding is certified valid) and
``closed`` (instances are universal closures of the pattern).
"""

from __future__ import annotations

import enum
import re
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, replace

from .formula import (
    BINARY,
    QUANTIFIERS,
    Forall,
    Formula,
    MetaF,
    Modality,
    ModApp,
    Not,
    Numeral,
    PredApp,
    Quote,
    Succ,
    Term,
    Var,
    atoms,
    free_vars,
    metavars,
    normalize,
    to_text,
    try_ungn,
)
from .parser import ParseError, parse


class SchemaError(ValueError):
    pass


class UnknownSystem(LookupError):
    pass


class UnknownAxiomName(LookupError):
    pass


class AxiomTag(enum.Enum):
    GLOBAL = "global"
    LOCAL = "local"

    def __str__(self) -> str:
        return self.value


Binding = Mapping[str, Formula]


@dataclass(frozen=True)
class SideCondition:
    kind: str  # "lonefree" | "valid" | "closed"
    meta: str = ""
    var: str = ""

    def __str__(self) -> str:
        if self.kind == "lonefree":
            return f"lonefree(?{self.meta}, {self.var})"
        if self.kind == "valid":
            return f"valid(?{self.meta})"
        return "closed"


_SIDE = re.compile(
    r"^(?:lonefree\(\s*\?(?P<lm>\w+)\s*,\s*(?P<lv>\w+)\s*\)|valid\(\s*\?(?P<vm>\w+)\s*\)|(?P<closed>closed))$"
)


def parse_side_condition(text: str) -> SideCondition:
    m = _SIDE.match(text.strip())
    if m is None:
        raise SchemaError(f"unknown side condition {text!r}")
    if m.group("lm"):
        return SideCondition("lonefree", m.group("lm"), m.group("lv"))
    if m.group("vm"):
        return SideCondition("valid", m.group("vm"))
    return SideCondition("closed")


def _valid_default(f: Formula) -> bool:
    from .validity import is_valid

    return is_valid(f, "taut+fo").certified


@dataclass(frozen=True)
class Schema:
    name: str
    pattern: Formula
    conditions: tuple[SideCondition, ...] = ()

    @property
    def metavars(self) -> list[str]:
        return sorted(metavars(self.pattern))

    @property
    def closed(self) -> bool:
        return any(c.kind == "closed" for c in self.conditions)

    @property
    def is_ground(self) -> bool:
        return not metavars(self.pattern)

    def text(self) -> str:
        s = to_text(self.pattern)
        for c in self.conditions:
            s += f" where {c}"
        return s

    def violated(self, binding: Binding, valid: Callable[[Formula], bool] = _valid_default) -> str | None:
        for c in self.conditions:
            if c.kind == "lonefree":
                fv = free_vars(binding[c.meta])
                if fv != {c.var}:
                    return f"?{c.meta} must have lone free variable {c.var}, has {sorted(fv)}"
            elif c.kind == "valid":
                if not valid(binding[c.meta]):
                    return f"?{c.meta} is not certified valid"
        return None


def parse_schema(name: str, text: str) -> Schema:
    parts = re.split(r"\s+where\s+", text.strip())
    pattern = parse(parts[0])
    conds = tuple(parse_side_condition(p) for p in parts[1:])
    mv = metavars(pattern)
    for c in conds:
        if c.meta and c.meta not in mv:
            raise SchemaError(f"side condition mentions unknown metavariable ?{c.meta}")
    return Schema(name, pattern, conds)


# ------------------------------------------------------- instantiation


def _inst(f: Formula, b: Binding) -> Formula:
    cls = f.__class__
    if cls is MetaF:
        try:
            return b[f.name]
        except KeyError:
            raise SchemaError(f"no binding for ?{f.name}") from None
    if cls is Not:
        return Not(_inst(f.f, b))
    if cls in BINARY:
        return cls(_inst(f.left, b), _inst(f.right, b))
    if cls is ModApp:
        return ModApp(f.op, _inst(f.f, b))
    if cls is PredApp:
        return PredApp(f.pred, tuple(_inst_term(t, b) for t in f.args))
    if cls in QUANTIFIERS:
        return cls(f.var, _inst(f.body, b))
    return f


def _inst_term(t: Term, b: Binding) -> Term:
    cls = t.__class__
    if cls is Quote:
        return Quote(_inst(t.f, b))
    if cls is Succ:
        return Succ(_inst_term(t.t, b))
    if cls in (Var, Numeral):
        return t
    return cls(_inst_term(t.left, b), _inst_term(t.right, b))


def universal_closure(f: Formula) -> Formula:
    for v in sorted(free_vars(f), reverse=True):
        f = Forall(v, f)
    return f


def instantiate(schema: Schema, binding: Binding, valid: Callable[[Formula], bool] = _valid_default) -> Formula:
    missing = set(schema.metavars) - set(binding)
    if missing:
        raise SchemaError(f"{schema.name}: no binding for {', '.join('?' + m for m in sorted(missing))}")
    binding = {k: normalize(v) for k, v in binding.items()}
    why = schema.violated(binding, valid)
    if why:
        raise SchemaError(f"{schema.name}: {why}")
    out = normalize(_inst(schema.pattern, binding))
    if schema.closed:
        out = universal_closure(out)
    return out


# ------------------------------------------------------------ matching


def _match(p: Formula, f: Formula, b: dict[str, Formula]) -> bool:
    pc = p.__class__
    if pc is MetaF:
        prev = b.get(p.name)
        if prev is None:
            b[p.name] = f
            return True
        return prev == f
    if pc is not f.__class__:
        return False
    if pc is Not:
        return _match(p.f, f.f, b)
    if pc in BINARY:
        return _match(p.left, f.left, b) and _match(p.right, f.right, b)
    if pc is ModApp:
        return p.op == f.op and _match(p.f, f.f, b)
    if pc is PredApp:
        return (
            p.pred == f.pred
            and len(p.args) == len(f.args)
            and all(_match_term(s, t, b) for s, t in zip(p.args, f.args))
        )
    if pc in QUANTIFIERS:
        return p.var == f.var and _match(p.body, f.body, b)
    return p == f


def _match_term(s: Term, t: Term, b: dict[str, Formula]) -> bool:
    sc = s.__class__
    if sc is Quote:
        if isinstance(t, Quote):
            return _match(s.f, normalize(t.f), b)
        if isinstance(t, Numeral):
            g = try_ungn(t.n)
            return g is not None and _match(s.f, g, b)
        return False
    if sc is not t.__class__:
        return False
    if sc is Succ:
        return _match_term(s.t, t.t, b)
    if sc in (Var, Numeral):
        return s == t
    return _match_term(s.left, t.left, b) and _match_term(s.right, t.right, b)


def match(schema: Schema, f: Formula, valid: Callable[[Formula], bool] = _valid_default) -> dict[str, Formula] | None:
    """Binding ``b`` with ``instantiate(schema, b) == normalize(f)``, or None."""
    f = normalize(f)
    bodies = [f]
    if schema.closed:
        body = f
        while isinstance(body, Forall):
            body = body.body
            bodies.append(body)
    for body in bodies:
        b: dict[str, Formula] = {}
        if not _match(schema.pattern, body, b):
            continue
        try:
            if instantiate(schema, b, valid) == f:
                return b
        except SchemaError:
            continue
    return None


# -------------------------------------------------------------- systems


@dataclass(frozen=True)
class Axiom:
    schema: Schema
    tag: AxiomTag

    @property
    def name(self) -> str:
        return self.schema.name


@dataclass(frozen=True)
class System:
    name: str
    axioms: tuple[Axiom, ...]
    nec: tuple[Modality, ...] = ()
    validity_mode: str = "taut"
    source: str = ""

    def __post_init__(self):
        names = [a.name for a in self.axioms]
        dup = {n for n in names if names.count(n) > 1}
        if dup:
            raise SchemaError(f"duplicate axiom names in {self.name}: {sorted(dup)}")

    def axiom(self, name: str) -> Axiom:
        for a in self.axioms:
            if a.name == name:
                return a
        raise UnknownAxiomName(f"{self.name} has no axiom {name!r}")

    def modality(self, name: str) -> Modality | None:
        for m in self.nec:
            if m.name == name:
                return m
        return None

    def tagged(self, tag: AxiomTag) -> tuple[Axiom, ...]:
        return tuple(a for a in self.axioms if a.tag is tag)

    def global_fragment(self) -> System:
        return replace(self, name=self.name + "#global", axioms=self.tagged(AxiomTag.GLOBAL))

    def retag(self, axiom_name: str, tag: AxiomTag) -> System:
        self.axiom(axiom_name)
        axioms = tuple(Axiom(a.schema, tag) if a.name == axiom_name else a for a in self.axioms)
        return replace(self, axioms=axioms)

    def is_instance(self, name: str, f: Formula) -> bool:
        return match(self.axiom(name).schema, f, self.valid) is not None

    def valid(self, f: Formula) -> bool:
        from .validity import is_valid

        return is_valid(f, self.validity_mode).certified

    def atoms(self) -> list[str]:
        out: set[str] = set()
        for a in self.axioms:
            out |= atoms(a.schema.pattern)
        return sorted(out)

    def operators(self) -> list[Modality]:
        """Every knowledge-like symbol: declared necessitation modalities
        plus any other modal operators occurring in the axioms."""
        from .formula import operators

        out = {m.name: m for m in self.nec}
        for a in self.axioms:
            for o in sorted(operators(a.schema.pattern)):
                out.setdefault(o, Modality(o))
        return [out[k] for k in sorted(out)]

    def to_text(self) -> str:
        return dump_system(self)


def parse_system(text: str, source: str = "") -> System:
    name = None
    axioms: list[Axiom] = []
    nec: list[Modality] = []
    mode = "taut"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip() if not raw.lstrip().startswith("#") else ""
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "system":
                if name is not None:
                    raise SchemaError("more than one system header")
                name = rest
            elif word in ("global", "local"):
                ax_name, sep, body = rest.partition(":")
                if not sep or not ax_name.strip():
                    raise SchemaError("expected '<tag> <name>: <schema>'")
                axioms.append(Axiom(parse_schema(ax_name.strip(), body), AxiomTag(word)))
            elif word == "nec":
                parts = rest.split()
                if not parts or len(parts) > 2 or (len(parts) == 2 and parts[1] != "pred"):
                    raise SchemaError("expected 'nec <operator> [pred]'")
                nec.append(Modality(parts[0], len(parts) == 2))
            elif word == "validity":
                if rest not in ("taut", "taut+fo"):
                    raise SchemaError(f"unknown validity mode {rest!r}")
                mode = rest
            else:
                raise SchemaError(f"unknown directive {word!r}")
        except (SchemaError, ParseError) as e:
            raise SchemaError(f"line {lineno}: {e}") from e
    if name is None:
        raise SchemaError("missing 'system <name>' header")
    return System(name, tuple(axioms), tuple(nec), mode, source)


def dump_system(s: System) -> str:
    lines = [f"system {s.name}"]
    if s.validity_mode != "taut":
        lines.append(f"validity {s.validity_mode}")
    for a in s.axioms:
        lines.append(f"{a.tag} {a.name}: {a.schema.text()}")
    for m in s.nec:
        lines.append(f"nec {m}")
    return "\n".join(lines) + "\n"


def ground_instances(system: System, tag: AxiomTag | None = None) -> list[Formula]:
    return [
        normalize(a.schema.pattern)
        for a in system.axioms
        if a.schema.is_ground and (tag is None or a.tag is tag)
    ]


def pool_instances(
    schema: Schema,
    pool: Iterable[Formula],
    valid: Callable[[Formula], bool] = _valid_default,
) -> Iterable[tuple[dict[str, Formula], Formula]]:
    """All instances with metavariables drawn from ``pool``, in pool order."""
    import itertools

    mv = schema.metavars
    pool = list(pool)
    for combo in itertools.product(pool, repeat=len(mv)):
        b = dict(zip(mv, combo))
        if schema.violated(b, valid):
            continue
        yield b, instantiate(schema, b, valid)
