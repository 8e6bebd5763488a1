import pytest

from globalnec.formula import BOT, Atom
from globalnec.parser import parse
from globalnec.proofcheck import Mode, check
from globalnec.registry import SOUND, registry
from globalnec.schema import parse_schema
from globalnec.search import (
    Exhausted,
    Found,
    FoundModel,
    NoneInFamily,
    SearchConfig,
    countermodel_search,
    forward_search,
)
from globalnec.semantics import EVERYTHING, evaluate, sprime_instances, theory_pool
from globalnec.standardize import sprime_of


def _sprime0(system: str, targets=(), depth: int = 1):
    sp = sprime_of(system)
    pool = theory_pool(registry(system), extra=[parse(t) for t in targets], depth=depth)
    return [f for _, f in sprime_instances(sp, pool, ("l1", "l2", "l3", "l4"))]


# ------------------------------------------------------------ forward search


def test_surprise_original_finds_bot():
    r = forward_search("surprise_original", SearchConfig(goal=BOT, pool_depth=3))
    assert isinstance(r, Found)
    c = check(r.proof, Mode.PREFIX)
    assert c.accepted and c.conclusion == BOT


def test_surprise_weak_bot_search_exhausted():
    r = forward_search("surprise_weak", SearchConfig(goal=BOT, pool_depth=3))
    assert isinstance(r, Exhausted)


def test_fitch_weak_search_exhausted():
    r = forward_search("fitch_weak", SearchConfig(goal="q -> K(q)", pool_depth=3))
    assert isinstance(r, Exhausted)


def test_search_deterministic():
    cfg = SearchConfig(goal=BOT, pool_depth=2)
    a = forward_search("moore_flawed", cfg)
    b = forward_search("moore_flawed", cfg)
    assert isinstance(a, Found)
    assert a.proof.steps == b.proof.steps and a.rounds == b.rounds


def test_search_monotone_in_max_steps():
    for system, goal in [("moore_flawed", "Bot"), ("surprise_weak", "K(p1 | p2)"), ("surprise_weak", "Bot")]:
        found = [forward_search(system, SearchConfig(goal=goal, pool_depth=1, max_steps=k)).found for k in (1, 2, 3, 4)]
        for k in range(3):
            if found[k]:
                assert found[k + 1]


def test_found_proofs_check_in_both_modes():
    r = forward_search("surprise_weak", SearchConfig(goal="K(p1 | p2)", pool_depth=1))
    assert isinstance(r, Found)
    for mode in Mode:
        assert check(r.proof, mode).accepted


def test_search_config_bounds():
    with pytest.raises(ValueError):
        SearchConfig(max_steps=0)
    with pytest.raises(ValueError):
        SearchConfig(pool_depth=-1)


# ----------------------------------------------------------- countermodels


def test_countermodel_surprise_weak_p1():
    r = countermodel_search(_sprime0("surprise_weak", ["p1"]), Atom("p1"), ["K"])
    assert isinstance(r, FoundModel)
    m = r.model
    assert m.valuation["p2"] and not m.valuation["p1"]
    assert m.interps["K"] == EVERYTHING


def test_countermodel_fitch_weak_not_known():
    target = parse("~K(p1)")
    r = countermodel_search(_sprime0("fitch_weak", ["~K(p1)"]), target, ["K", "Box"])
    assert isinstance(r, FoundModel)
    assert r.model.interps["K"] == EVERYTHING


def test_countermodel_none_for_inconsistent_axioms():
    r = countermodel_search([Atom("p1"), parse("~p1")], Atom("p2"), ["K"])
    assert isinstance(r, NoneInFamily) and r.tried > 0


def test_countermodel_satisfies_axioms_and_falsifies_target():
    cases = [
        ([parse("p1 | p2"), parse_schema("sound", SOUND)], Atom("p1"), ["K"]),
        ([parse("p1 -> p2")], parse("K(p2)"), ["K"]),
        ([parse("Box(p1) | p2")], parse("~p1"), ["K", "Box"]),
    ]
    for axioms, target, ops in cases:
        r = countermodel_search(axioms, target, ops)
        assert isinstance(r, FoundModel)
        assert not evaluate(r.model, target)
        for a in axioms:
            if not hasattr(a, "pattern"):
                assert evaluate(r.model, a)


def test_countermodel_none_when_target_is_forced():
    r = countermodel_search([parse("p1")], Atom("p1"), ["K"])
    assert isinstance(r, NoneInFamily)
