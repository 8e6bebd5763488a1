"""Acceptance criteria, one test each, with the wall-clock limits of the suite.

Each test prints a single ``AC<n> PASS|FAIL`` line (run with ``-s`` or read
the terminal summary) and fails if the check or the time limit fails.
"""

import itertools
import os
import random
import time
from contextlib import contextmanager

import pytest
from fuzz import fuzz_proofs, random_formula
from helpers import corpus_proofs

from globalnec.corpus import POOL_ENV, corpus_root
from globalnec.formula import BOT, And, Atom, Iff, Imp, ModApp, Not, Or, gn, normalize, pair, unpair
from globalnec.parser import parse
from globalnec.proofcheck import Mode, Nec, check, parse_proof, reorder_for_prefix
from globalnec.registry import registry
from globalnec.schema import parse_schema
from globalnec.search import Exhausted, Found, SearchConfig, forward_search
from globalnec.semantics import (
    REFLECTION,
    Model,
    ModelPreconditionError,
    check_schema,
    check_sprime,
    evaluate,
    kclosure_check,
    load_model,
    theory_pool,
)
from globalnec.standardize import sprime_of, translate
from globalnec.validity import is_valid

RESULTS: dict[str, str] = {}


@pytest.fixture(autouse=True)
def _full_pools(monkeypatch):
    monkeypatch.delenv(POOL_ENV, raising=False)


@contextmanager
def criterion(name: str, limit: float, capsys):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t0
        within = dt < limit
        line = f"{name} {'PASS' if ok and within else 'FAIL'} ({dt:.2f}s, limit {limit:g}s)"
        RESULTS[name] = line
        with capsys.disabled():
            print(f"\n{line}")
    assert within, line


def _proof(case: str, name: str):
    with open(os.path.join(corpus_root(), case, name)) as fh:
        return parse_proof(fh.read())


def _model(case: str, name: str):
    return load_model(os.path.join(corpus_root(), case, name + ".model"))


# ------------------------------------------------------------------ AC1


def test_ac1_checker_fidelity(capsys):
    with criterion("AC1 checker fidelity", 1, capsys):
        p = _proof("moore_flawed", "bot.proof")
        r = check(p, Mode.PREFIX)
        assert r.accepted and r.conclusion == BOT
        # the same steps in moore_op: operator K, psi cited as the local axiom it is there
        with open(os.path.join(corpus_root(), "moore_flawed", "bot.proof")) as fh:
            text = fh.read()
        text = text.replace("in moore_flawed", "in moore_op").replace("{Psi}", "(Psi)")
        same = parse_proof(text.replace("global psi", "local psi"))
        r = check(same, Mode.PREFIX)
        assert r.verdict == "Rejected"
        assert r.diagnostics == ((2, "necessitation over prefix containing local axiom (step 1)"),)


# ------------------------------------------------------------------ AC2


def test_ac2_translation_round_trip(capsys):
    with criterion("AC2 translation round trip", 30, capsys):
        pool = [p for _, p, v in corpus_proofs() if v == "Accepted"]
        fuzz = fuzz_proofs(500, seed=2024)
        assert len(fuzz) >= 500 and all(len(p) <= 8 and check(p).accepted for p in fuzz)
        for p in pool + fuzz:
            q = translate(p)
            assert not any(isinstance(s.just, Nec) for s in q.steps)
            r = check(q)
            assert r.accepted and r.conclusion == p.conclusion


# ------------------------------------------------------------------ AC3


def test_ac3_surprise_exam(capsys):
    with criterion("AC3 surprise exam", 60, capsys):
        cfg = SearchConfig(goal=BOT, pool_depth=3)
        found = forward_search("surprise_original", cfg)
        assert isinstance(found, Found) and check(found.proof).accepted
        r = check(_proof("surprise_original", "backward_induction.proof"))
        assert r.accepted and r.conclusion == BOT
        n = _model("surprise_weak", "N")
        pool = theory_pool(registry("surprise_weak"), depth=2)
        assert all(line.holds for line in check_sprime(n, sprime_of("surprise_weak"), pool))
        assert isinstance(forward_search("surprise_weak", cfg), Exhausted)


# ------------------------------------------------------------------ AC4


def test_ac4_fitch(capsys):
    with criterion("AC4 Fitch", 60, capsys):
        r = check(_proof("fitch_original", "church_fitch.proof"))
        assert r.accepted and r.conclusion == parse("q -> K(q)")
        n = _model("fitch_weak", "N")
        pool = theory_pool(registry("fitch_weak"), [parse("q")], depth=2)
        assert all(line.holds for line in check_sprime(n, sprime_of("fitch_weak"), pool))
        assert evaluate(n, parse("q -> K(q)")) is False
        assert isinstance(forward_search("fitch_weak", SearchConfig(goal="q -> K(q)", pool_depth=3)), Exhausted)
        m = _model("fitch_keqbox", "M")
        pool = theory_pool(registry("fitch_keqbox"), [parse("q")], depth=2)
        assert check_schema(m, parse_schema("keqbox", "K(?phi) <-> Box(?phi)"), pool).holds


# ------------------------------------------------------------------ AC5


def test_ac5_kclosure(capsys):
    with criterion("AC5 K-closure", 10, capsys):
        rng = random.Random(5)
        atoms = ("p1", "p2", "p3")
        for _ in range(100):
            m = Model("r", {a: rng.random() < 0.5 for a in atoms}, {"K": REFLECTION, "Box": REFLECTION})
            axioms = []
            for _ in range(rng.randint(1, 4)):
                f = random_formula(rng, rng.randint(1, 3), atoms)
                axioms.append(f if evaluate(m, f) else Not(f))
            assert kclosure_check(m, axioms, 4).holds
            false = Not(axioms[0])
            with pytest.raises(ModelPreconditionError):
                kclosure_check(m, axioms + [false], 4)


# ------------------------------------------------------------------ AC6


def _truth(f, env):
    """Independent evaluator over the fixed alphabet."""
    t = type(f)
    if t is Atom or t is ModApp:
        return env[f]
    if f == BOT:
        return False
    if t is Not:
        return not _truth(f.f, env)
    x, y = _truth(f.left, env), _truth(f.right, env)
    return {And: x and y, Or: x or y, Imp: (not x) or y, Iff: x == y}[t]


def test_ac6_validity_oracle(capsys):
    with criterion("AC6 validity oracle", 60, capsys):
        alphabet = [Atom("p1"), Atom("p2"), ModApp("K", Atom("p1")), ModApp("Box", Atom("p2"))]
        level = alphabet + [BOT]
        upto2 = level + [Not(f) for f in level]
        upto2 += [c(a, b) for c in (And, Or, Imp, Iff) for a in level for b in level]
        upto3 = upto2 + [Not(f) for f in upto2]
        upto3 += [c(a, b) for c in (And, Or, Imp, Iff) for a in upto2 for b in upto2]
        envs = [dict(zip(alphabet, bits)) for bits in itertools.product((False, True), repeat=4)]
        n_valid = 0
        for f in upto3:
            truth = all(_truth(f, e) for e in envs)
            assert is_valid(f, "taut").certified == truth, f
            n_valid += truth
        assert len(upto3) > 48_000 and n_valid > 0


# ------------------------------------------------------------------ AC7


def test_ac7_mode_agreement(capsys):
    with criterion("AC7 mode agreement", 30, capsys):
        pool = fuzz_proofs(700, seed=77) + fuzz_proofs(700, seed=78, impure_nec=True)
        dep = [p for p in pool if check(p, Mode.DEPENDENCY).accepted]
        assert sum(not check(p, Mode.PREFIX).accepted for p in dep) > 0
        for p in dep:
            q = reorder_for_prefix(p)
            r = check(q, Mode.PREFIX)
            assert r.accepted and r.conclusion == p.conclusion


# ------------------------------------------------------------------ AC8


def test_ac8_selfcode(capsys):
    with criterion("AC8 selfcode", 5, capsys):
        conclusions = set()
        for name in ("inw.proof", "diag.proof", "nested.proof"):
            p = _proof("selfcode", name)
            assert registry(p.system_name).validity_mode == "taut+fo"
            r = check(p)
            assert r.accepted and type(r.conclusion).__name__ == "Exists"
            conclusions.add(r.conclusion)
        assert len(conclusions) == 3
        r = check(_proof("selfcode", "twofree.proof"))
        assert r.verdict == "Rejected" and "havingcode" in r.diagnostics[0][1]


# ------------------------------------------------------------------ AC9


def test_ac9_encoding_stability(capsys):
    with criterion("AC9 encoding stability", 5, capsys):
        assert gn(parse("p1 -> p1")) == 57917375237499155487357848172958521
        assert gn(normalize(parse("K{p1 -> p1}"))) == gn(parse("K{p1 -> p1}"))
        seen = set()
        for x in range(51):
            for y in range(51):
                z = pair(x, y)
                assert unpair(z) == (x, y)
                seen.add(z)
        assert len(seen) == 51 * 51
