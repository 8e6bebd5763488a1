"""Formula and term languages.

Every node is an immutable, hashable value.  Quotation nodes (``Quote``)
exist only until :func:`normalize` replaces them with the numeral of the
quoted formula's Gödel number; proofs and models only ever see normalized
formulas.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, fields
from typing import Union


def _node(cls):
    """Frozen dataclass with a memoized structural hash."""
    cls = dataclass(frozen=True, repr=False)(cls)
    names = tuple(f.name for f in fields(cls))
    tag = cls.__name__

    def __hash__(self):
        h = self.__dict__.get("_h")
        if h is None:
            h = hash((tag,) + tuple(getattr(self, n) for n in names))
            object.__setattr__(self, "_h", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if other.__class__ is not self.__class__:
            return NotImplemented
        if hash(self) != hash(other):
            return False
        return all(getattr(self, n) == getattr(other, n) for n in names)

    cls.__hash__ = __hash__
    cls.__eq__ = __eq__
    return cls


# ---------------------------------------------------------------- terms


class Term:
    def __repr__(self) -> str:
        return f"<term {term_text(self)}>"

    def __str__(self) -> str:
        return term_text(self)


@_node
class Var(Term):
    name: str


@_node
class Numeral(Term):
    n: int


@_node
class Succ(Term):
    t: Term


@_node
class Plus(Term):
    left: Term
    right: Term


@_node
class Times(Term):
    left: Term
    right: Term


@_node
class Pair(Term):
    left: Term
    right: Term


@_node
class Quote(Term):
    f: Formula


ZERO = Numeral(0)


# ------------------------------------------------------------- formulas


class Formula:
    def __repr__(self) -> str:
        return f"<{to_text(self)}>"

    def __str__(self) -> str:
        return to_text(self)


@_node
class Atom(Formula):
    name: str


@_node
class Bot(Formula):
    pass


@_node
class Not(Formula):
    f: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Imp(Formula):
    left: Formula
    right: Formula


@_node
class Iff(Formula):
    left: Formula
    right: Formula


@_node
class ModApp(Formula):
    op: str
    f: Formula


@_node
class PredApp(Formula):
    pred: str
    args: tuple


@_node
class Forall(Formula):
    var: str
    body: Formula


@_node
class Exists(Formula):
    var: str
    body: Formula


@_node
class MetaF(Formula):
    """Schema metavariable standing for an arbitrary formula."""

    name: str


BOT = Bot()
PSI = Atom("Psi")
BINARY = (And, Or, Imp, Iff)
QUANTIFIERS = (Forall, Exists)

Node = Union[Formula, Term]


def imps(*parts: Formula) -> Formula:
    """Right-nested implication ``a -> b -> ... -> z``."""
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Imp(p, out)
    return out


def disj(parts: Sequence[Formula]) -> Formula:
    """Left-associated disjunction; used for the ``T<i>`` sugar."""
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def conj(parts: Sequence[Formula]) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def exam_disjunction(i: int) -> Formula:
    """``p1 | ... | p<i>``."""
    return disj([Atom(f"p{k}") for k in range(1, i + 1)])


# ------------------------------------------------------------- printing

_PREC = {Iff: 1, Imp: 2, Or: 3, And: 4}
_SYM = {Iff: "<->", Imp: "->", Or: "|", And: "&"}


def to_text(f: Formula, ctx: int = 0) -> str:
    """Print with the fewest parentheses that still re-parse to ``f``."""
    cls = f.__class__
    if cls is Atom:
        return f.name
    if cls is Bot:
        return "Bot"
    if cls is MetaF:
        return "?" + f.name
    if cls is Not:
        return "~" + to_text(f.f, 5)
    if cls in _PREC:
        p = _PREC[cls]
        if cls is Imp:
            lp, rp = p + 1, p
        else:
            lp, rp = p, p + 1
        s = f"{to_text(f.left, lp)} {_SYM[cls]} {to_text(f.right, rp)}"
        return f"({s})" if ctx > p else s
    if cls is ModApp:
        return f"{f.op}({to_text(f.f)})"
    if cls is PredApp:
        if f.pred == "InW" and len(f.args) == 2:
            return f"InW({term_text(f.args[0])}, {term_text(f.args[1])})"
        if len(f.args) == 1 and isinstance(f.args[0], Quote):
            return f"{f.pred}{{{to_text(f.args[0].f)}}}"
        return f"{f.pred}[{', '.join(term_text(t) for t in f.args)}]"
    if cls in QUANTIFIERS:
        kw = "forall" if cls is Forall else "exists"
        s = f"{kw} {f.var}. {to_text(f.body)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not a formula: {f!r}")


def term_text(t: Term, ctx: int = 0) -> str:
    cls = t.__class__
    if cls is Var:
        return t.name
    if cls is Numeral:
        return str(t.n)
    if cls is Succ:
        return f"S({term_text(t.t)})"
    if cls is Plus:
        s = f"{term_text(t.left, 1)} + {term_text(t.right, 2)}"
        return f"({s})" if ctx > 1 else s
    if cls is Times:
        s = f"{term_text(t.left, 2)} * {term_text(t.right, 3)}"
        return f"({s})" if ctx > 2 else s
    if cls is Pair:
        return f"pair({term_text(t.left)}, {term_text(t.right)})"
    if cls is Quote:
        return f"quote{{{to_text(t.f)}}}"
    raise TypeError(f"not a term: {t!r}")


# --------------------------------------------------- pairing and coding


def pair(x: int, y: int) -> int:
    """Cantor pairing."""
    return (x + y) * (x + y + 1) // 2 + y


def unpair(z: int) -> tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


_TAGS = {
    Atom: 1, Bot: 2, Not: 3, And: 4, Or: 5, Imp: 6, Iff: 7, ModApp: 8,
    PredApp: 9, Forall: 10, Exists: 11, MetaF: 12,
    Var: 13, Numeral: 14, Succ: 15, Plus: 16, Times: 17, Pair: 18,
}
_BY_TAG = {v: k for k, v in _TAGS.items()}


def _str_code(s: str) -> int:
    return int.from_bytes(s.encode("utf-8"), "big")


def _str_decode(n: int) -> str:
    return n.to_bytes((n.bit_length() + 7) // 8, "big").decode("utf-8")


def _list_code(codes: Sequence[int]) -> int:
    out = 0
    for c in reversed(codes):
        out = 1 + pair(c, out)
    return out


def _code(node: Node) -> int:
    cls = node.__class__
    if cls is Quote:
        return _code(Numeral(gn(node.f)))
    tag = _TAGS[cls]
    if cls in (Atom, MetaF, Var):
        payload = _str_code(node.name)
    elif cls is Bot:
        payload = 0
    elif cls is Numeral:
        payload = node.n
    elif cls in (Not, Succ):
        payload = _code(node.f if cls is Not else node.t)
    elif cls is ModApp:
        payload = pair(_str_code(node.op), _code(node.f))
    elif cls is PredApp:
        payload = pair(_str_code(node.pred), _list_code([_code(a) for a in node.args]))
    elif cls in QUANTIFIERS:
        payload = pair(_str_code(node.var), _code(node.body))
    else:
        payload = pair(_code(node.left), _code(node.right))
    return pair(tag, payload)


_GN_CACHE: dict[Formula, int] = {}


def gn(f: Formula) -> int:
    """Gödel number: constructor tag paired with the recursively coded payload.

    Quotations are coded as the numeral of the quoted formula's number, so
    ``gn(f) == gn(normalize(f))``.
    """
    n = _GN_CACHE.get(f)
    if n is None:
        n = _code(f)
        if len(_GN_CACHE) < 200_000:
            _GN_CACHE[f] = n
            # numerals of nested quotations are huge; decode them by lookup
            _UNGN_CACHE.setdefault(n, normalize(f) if has_quote(f) else f)
    return n


def _decode(z: int) -> Node:
    tag, payload = unpair(z)
    cls = _BY_TAG.get(tag)
    if cls is None:
        raise ValueError(f"no constructor with tag {tag}")
    if cls in (Atom, MetaF, Var):
        return cls(_str_decode(payload))
    if cls is Bot:
        if payload:
            raise ValueError("malformed Bot code")
        return BOT
    if cls is Numeral:
        return Numeral(payload)
    if cls is Not:
        return Not(_as_formula(_decode(payload)))
    if cls is Succ:
        return Succ(_as_term(_decode(payload)))
    a, b = unpair(payload)
    if cls is ModApp:
        return ModApp(_str_decode(a), _as_formula(_decode(b)))
    if cls is PredApp:
        args = []
        while b:
            c, b = unpair(b - 1)
            args.append(_as_term(_decode(c)))
        return PredApp(_str_decode(a), tuple(args))
    if cls in QUANTIFIERS:
        return cls(_str_decode(a), _as_formula(_decode(b)))
    left, right = _decode(a), _decode(b)
    if issubclass(cls, Formula):
        return cls(_as_formula(left), _as_formula(right))
    return cls(_as_term(left), _as_term(right))


def _as_formula(x: Node) -> Formula:
    if not isinstance(x, Formula):
        raise ValueError("expected a formula code")
    return x


def _as_term(x: Node) -> Term:
    if not isinstance(x, Term):
        raise ValueError("expected a term code")
    return x


_UNGN_CACHE: dict[int, Formula] = {}


def ungn(n: int) -> Formula:
    """Inverse of :func:`gn` on normalized formulas; ValueError otherwise."""
    f = _UNGN_CACHE.get(n)
    if f is None:
        f = _as_formula(_decode(n))
        if len(_UNGN_CACHE) < 200_000:
            _UNGN_CACHE[n] = f
            _GN_CACHE.setdefault(f, n)
    return f


def try_ungn(n: int) -> Formula | None:
    try:
        return ungn(n)
    except (ValueError, UnicodeDecodeError):
        return None


# -------------------------------------------------------- normalization


def normalize_term(t: Term) -> Term:
    cls = t.__class__
    if cls is Quote:
        return Numeral(gn(t.f))
    if cls in (Var, Numeral):
        return t
    if cls is Succ:
        inner = normalize_term(t.t)
        if isinstance(inner, Numeral):
            return Numeral(inner.n + 1)
        return Succ(inner)
    return cls(normalize_term(t.left), normalize_term(t.right))


def normalize(f: Formula) -> Formula:
    """Replace every quotation by its numeral; fold ``S(..S(0)..)`` chains."""
    cls = f.__class__
    if cls in (Atom, Bot, MetaF):
        return f
    if cls is Not:
        g = normalize(f.f)
        return f if g is f.f else Not(g)
    if cls in BINARY:
        a, b = normalize(f.left), normalize(f.right)
        return f if (a is f.left and b is f.right) else cls(a, b)
    if cls is ModApp:
        g = normalize(f.f)
        return f if g is f.f else ModApp(f.op, g)
    if cls is PredApp:
        args = tuple(normalize_term(t) for t in f.args)
        return f if args == f.args else PredApp(f.pred, args)
    if cls in QUANTIFIERS:
        g = normalize(f.body)
        return f if g is f.body else cls(f.var, g)
    raise TypeError(f"not a formula: {f!r}")


def has_quote(f: Formula) -> bool:
    return any(isinstance(t, Quote) for t in iter_terms(f))


# ------------------------------------------------------------ traversal


def children(f: Formula) -> tuple[Formula, ...]:
    cls = f.__class__
    if cls is Not:
        return (f.f,)
    if cls in BINARY:
        return (f.left, f.right)
    if cls is ModApp:
        return (f.f,)
    if cls in QUANTIFIERS:
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order, children before parents; does not enter quotations."""
    for c in children(f):
        yield from subformulas(c)
    yield f


def iter_terms(f: Formula) -> Iterator[Term]:
    for g in subformulas(f):
        if isinstance(g, PredApp):
            for t in g.args:
                yield from _subterms(t)


def _subterms(t: Term) -> Iterator[Term]:
    yield t
    cls = t.__class__
    if cls is Succ:
        yield from _subterms(t.t)
    elif cls in (Plus, Times, Pair):
        yield from _subterms(t.left)
        yield from _subterms(t.right)


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


def metavars(f: Formula) -> set[str]:
    out = {g.name for g in subformulas(f) if isinstance(g, MetaF)}
    for t in iter_terms(f):
        if isinstance(t, Quote):
            out |= metavars(t.f)
    return out


def operators(f: Formula) -> set[str]:
    return {g.op for g in subformulas(f) if isinstance(g, ModApp)}


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def depth(f: Formula) -> int:
    cs = children(f)
    return 1 + max((depth(c) for c in cs), default=0)


def modal_depth(f: Formula) -> int:
    cls = f.__class__
    if cls is ModApp:
        return 1 + modal_depth(f.f)
    if cls is PredApp:
        return 1 if f.pred != "InW" else 0
    return max((modal_depth(c) for c in children(f)), default=0)


def term_free_vars(t: Term) -> set[str]:
    cls = t.__class__
    if cls is Var:
        return {t.name}
    if cls in (Numeral, Quote):
        return set()
    if cls is Succ:
        return term_free_vars(t.t)
    return term_free_vars(t.left) | term_free_vars(t.right)


def free_vars(f: Formula) -> set[str]:
    cls = f.__class__
    if cls is PredApp:
        out: set[str] = set()
        for t in f.args:
            out |= term_free_vars(t)
        return out
    if cls in QUANTIFIERS:
        return free_vars(f.body) - {f.var}
    out = set()
    for c in children(f):
        out |= free_vars(c)
    return out


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def subst_term_in_term(t: Term, var: str, r: Term) -> Term:
    cls = t.__class__
    if cls is Var:
        return r if t.name == var else t
    if cls in (Numeral, Quote):
        return t
    if cls is Succ:
        return Succ(subst_term_in_term(t.t, var, r))
    return cls(subst_term_in_term(t.left, var, r), subst_term_in_term(t.right, var, r))


def substitute(f: Formula, var: str, r: Term) -> Formula | None:
    """``f(var|r)``; ``None`` when ``r`` is not free for ``var`` in ``f``."""
    rv = term_free_vars(r)

    def go(g: Formula) -> Formula | None:
        cls = g.__class__
        if cls is PredApp:
            return PredApp(g.pred, tuple(subst_term_in_term(t, var, r) for t in g.args))
        if cls in QUANTIFIERS:
            if g.var == var or var not in free_vars(g.body):
                return g
            if g.var in rv:
                return None
            b = go(g.body)
            return None if b is None else cls(g.var, b)
        if cls is Not:
            b = go(g.f)
            return None if b is None else Not(b)
        if cls is ModApp:
            b = go(g.f)
            return None if b is None else ModApp(g.op, b)
        if cls in BINARY:
            a, b = go(g.left), go(g.right)
            return None if a is None or b is None else cls(a, b)
        return g

    return go(f)


def replace_subformula(f: Formula, old: Formula, new: Formula) -> Formula:
    if f == old:
        return new
    cls = f.__class__
    if cls is Not:
        return Not(replace_subformula(f.f, old, new))
    if cls in BINARY:
        return cls(replace_subformula(f.left, old, new), replace_subformula(f.right, old, new))
    if cls is ModApp:
        return ModApp(f.op, replace_subformula(f.f, old, new))
    if cls in QUANTIFIERS:
        return cls(f.var, replace_subformula(f.body, old, new))
    return f


# ------------------------------------------------------------ modalities


@dataclass(frozen=True)
class Modality:
    """A knowledge-like symbol: a modal operator or a predicate over codes."""

    name: str
    pred: bool = False

    def apply(self, f: Formula) -> Formula:
        if self.pred:
            return PredApp(self.name, (Numeral(gn(f)),))
        return ModApp(self.name, f)

    def unwrap(self, g: Formula) -> Formula | None:
        """The formula ``f`` with ``g == self.apply(f)``, if any."""
        if self.pred:
            if isinstance(g, PredApp) and g.pred == self.name and len(g.args) == 1:
                arg = g.args[0]
                if isinstance(arg, Quote):
                    return normalize(arg.f)
                if isinstance(arg, Numeral):
                    return try_ungn(arg.n)
            return None
        if isinstance(g, ModApp) and g.op == self.name:
            return g.f
        return None

    def __str__(self) -> str:
        return f"{self.name} pred" if self.pred else self.name


# ----------------------------------------------------------------- pools


def closure(seeds: Iterable[Formula]) -> list[Formula]:
    out: dict[Formula, None] = {}
    for s in seeds:
        for g in subformulas(s):
            out.setdefault(g, None)
    return list(out)


def subformula_pool(
    seeds: Iterable[Formula],
    depth: int,
    modalities: Iterable[Modality] | None = None,
) -> tuple[Formula, ...]:
    """Finite instantiation pool grown from ``seeds``.

    Layer 0 is the subformula closure of the seeds.  Each further layer
    adds the negation and every modality applied to each member of the
    previous layer, together with implications between layer-0 members
    ({~, ->} is functionally complete).  Ordering is deterministic.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    seeds = list(seeds)
    base = closure(seeds)
    if modalities is None:
        ops = sorted(set().union(*(operators(s) for s in seeds)) if seeds else set())
        modalities = [Modality(o) for o in ops]
    modalities = list(modalities)
    out: dict[Formula, None] = dict.fromkeys(base)
    layer = list(base)
    for d in range(depth):
        fresh: list[Formula] = []
        for f in layer:
            fresh.append(Not(f))
            fresh.extend(m.apply(f) for m in modalities)
        if d == 0:
            fresh.extend(Imp(a, b) for a in base for b in base if a != b)
        for g in fresh:
            out.setdefault(g, None)
        layer = list(out)
    return tuple(out)


def requote(f: Formula, keep: Iterable[str] = ("InW",)) -> Formula:
    """Undo ``normalize`` for display: single numeral arguments of predicates
    (other than those in ``keep``) that decode to formulas become quotations."""
    keep = frozenset(keep)

    def go(g: Formula) -> Formula:
        cls = g.__class__
        if cls is PredApp:
            if g.pred not in keep and len(g.args) == 1 and isinstance(g.args[0], Numeral):
                inner = try_ungn(g.args[0].n)
                if inner is not None:
                    return PredApp(g.pred, (Quote(go(inner)),))
            return g
        if cls is Not:
            return Not(go(g.f))
        if cls in BINARY:
            return cls(go(g.left), go(g.right))
        if cls is ModApp:
            return ModApp(g.op, go(g.f))
        if cls in QUANTIFIERS:
            return cls(g.var, go(g.body))
        return g

    return go(f)
