import random

import pytest
from fuzz import random_formula
from hypothesis import given, settings
from hypothesis import strategies as st

from globalnec.formula import (
    BOT,
    And,
    Atom,
    Imp,
    ModApp,
    Not,
    Numeral,
    Or,
    PredApp,
    Quote,
    Succ,
    gn,
    has_quote,
    normalize,
    pair,
    subformula_pool,
    to_text,
    ungn,
    unpair,
)
from globalnec.parser import ParseError, parse

GN_P1_IMP_P1 = 57917375237499155487357848172958521

# ------------------------------------------------------------ strategies

atoms = st.sampled_from(["p1", "p2", "p3", "q", "Psi"]).map(Atom)


def _extend(children):
    return st.one_of(
        children.map(Not),
        st.tuples(children, children).map(lambda t: And(*t)),
        st.tuples(children, children).map(lambda t: Or(*t)),
        st.tuples(children, children).map(lambda t: Imp(*t)),
        st.tuples(st.sampled_from(["K", "Box"]), children).map(lambda t: ModApp(*t)),
        children.map(lambda f: PredApp("K", (Quote(f),))),
    )


formulas = st.recursive(st.one_of(atoms, st.just(BOT)), _extend, max_leaves=12)


# ---------------------------------------------------------------- parse


def test_parse_examples():
    assert parse("K(p1) -> p1") == Imp(ModApp("K", Atom("p1")), Atom("p1"))
    assert parse("Dia(K(q))") == Not(ModApp("Box", Not(ModApp("K", Atom("q")))))
    assert parse("K{p1 -> p1}") == PredApp("K", (Quote(Imp(Atom("p1"), Atom("p1"))),))


def test_print_examples():
    assert to_text(Imp(Atom("p1"), Atom("p1"))) == "p1 -> p1"
    assert to_text(ModApp("K", Or(Atom("p1"), Atom("p2")))) == "K(p1 | p2)"
    assert to_text(PredApp("K", (Quote(Atom("Psi")),))) == "K{Psi}"


def test_precedence_and_associativity():
    assert parse("~p1 & p2 | p3 -> q") == Imp(Or(And(Not(Atom("p1")), Atom("p2")), Atom("p3")), Atom("q"))
    assert parse("p1 -> p2 -> p3") == Imp(Atom("p1"), Imp(Atom("p2"), Atom("p3")))


def test_t_sugar_is_left_associated_disjunction():
    assert parse("T3") == Or(Or(Atom("p1"), Atom("p2")), Atom("p3"))


def test_bot_differs_from_contradiction():
    assert parse("Bot") == BOT
    assert parse("p1 & ~p1") != BOT


def test_parse_error_position_and_expected():
    with pytest.raises(ParseError) as e:
        parse("p1 -> ")
    assert (e.value.line, e.value.col) == (1, 7)
    assert "atom" in e.value.expected
    with pytest.raises(ParseError):
        parse("K(p1")


def test_parse_print_round_trip_10k():
    rng = random.Random(7)
    seen = {}
    for _ in range(10_000):
        f = random_formula(rng, rng.randint(1, 6))
        assert parse(to_text(f)) == f
        seen[f] = gn(f)
    # injectivity over the pool
    assert len(set(seen.values())) == len(seen)


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_round_trip_with_quotation(f):
    assert parse(to_text(f)) == f
    assert gn(parse(to_text(f))) == gn(f)


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_dia_sugar(f):
    text = to_text(f)
    assert parse(f"Dia({text})") == parse(f"~Box(~({text}))")


# ------------------------------------------------------------- encoding


def test_gn_golden():
    assert gn(parse("p1 -> p1")) == GN_P1_IMP_P1


def test_gn_distinct_atoms():
    assert gn(Atom("p1")) != gn(Atom("p2"))


def test_pair_examples():
    assert pair(0, 0) == 0
    assert pair(2, 3) == 18


def test_pair_bijection_on_grid():
    codes = {}
    for x in range(51):
        for y in range(51):
            z = pair(x, y)
            assert z == (x + y) * (x + y + 1) // 2 + y
            assert unpair(z) == (x, y)
            codes[z] = (x, y)
    assert len(codes) == 51 * 51


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_ungn_inverts_gn(f):
    assert ungn(gn(f)) == normalize(f)


# ------------------------------------------------------------ normalize


def test_normalize_examples():
    p1 = Atom("p1")
    assert normalize(PredApp("K", (Quote(p1),))) == PredApp("K", (Numeral(gn(p1)),))
    f = parse("K(p1) -> p2")
    assert normalize(f) == f


def test_numeral_equals_successors():
    three = PredApp("InW", (Numeral(3), Numeral(0)))
    succ = PredApp("InW", (Succ(Succ(Succ(Numeral(0)))), Numeral(0)))
    assert normalize(three) == normalize(succ)


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_normalize_idempotent_and_quote_free(f):
    g = normalize(f)
    assert normalize(g) == g
    assert not has_quote(g)
    assert normalize(parse(to_text(f))) == g


# ---------------------------------------------------------------- pools


def test_pool_examples():
    p1 = Atom("p1")
    assert set(subformula_pool([p1], 0)) == {p1}
    assert set(subformula_pool([ModApp("K", p1)], 0)) == {ModApp("K", p1), p1}


def test_pool_monotone_and_deterministic():
    seeds = [parse("K(p1) -> p2"), BOT]
    sizes, prev = [], []
    for d in range(4):
        pool = subformula_pool(seeds, d)
        assert pool == subformula_pool(seeds, d)
        if d:
            assert set(prev) <= set(pool)
        sizes.append(len(pool))
        prev = pool
    assert sizes == sorted(sizes)


def test_pool_rejects_negative_depth():
    with pytest.raises(ValueError):
        subformula_pool([BOT], -1)
