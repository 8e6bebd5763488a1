import itertools

import pytest
from fuzz import fuzz_proofs
from helpers import corpus_proofs

from globalnec.formula import Atom, Formula, Imp, Numeral
from globalnec.parser import parse
from globalnec.proofcheck import (
    MP,
    GlobalAx,
    LocalAx,
    MalformedIndex,
    Mode,
    Nec,
    NotAccepted,
    Proof,
    ProofFormatError,
    Valid,
    check,
    dump_proof,
    gpure_flags,
    parse_proof,
    premises,
    proof,
    reorder_for_prefix,
)
from globalnec.schema import AxiomTag, UnknownAxiomName, UnknownSystem, parse_system
from globalnec.validity import is_valid

FUZZ = fuzz_proofs(1000, seed=11)


# -------------------------------------------------------------- examples


def test_surprise_weak_two_step():
    p = proof("surprise_weak", ("p1 | p2", GlobalAx("exam")), ("K(p1 | p2)", Nec("K", 1)))
    for mode in Mode:
        r = check(p, mode)
        assert r.accepted and r.conclusion == parse("K(p1 | p2)")


def test_moore_op_local_psi_rejected():
    p = proof("moore_op", ("Psi", LocalAx("psi")), ("K(Psi)", Nec("K", 1)))
    r = check(p, Mode.PREFIX)
    assert not r.accepted
    assert r.diagnostics == ((2, "necessitation over prefix containing local axiom (step 1)"),)
    r = check(p, Mode.DEPENDENCY)
    assert r.diagnostics == ((2, "necessitation over dependency cone containing local axiom (step 1)"),)


def test_moore_flawed_bot():
    p = proof(
        "moore_flawed",
        ("Psi", GlobalAx("psi")),
        ("K{Psi}", Nec("K", 1)),
        ("~K{Psi}", GlobalAx("unknown")),
        ("~K{Psi} -> K{Psi} -> Bot", Valid()),
        ("K{Psi} -> Bot", MP(3, 4)),
        ("Bot", MP(2, 5)),
    )
    r = check(p, Mode.PREFIX)
    assert r.accepted and r.conclusion == parse("Bot")


def test_mp_accepts_either_premise_order():
    s = parse_system("system s\nglobal a: p1\nglobal b: p1 -> p2\n")
    for just in (MP(1, 2), MP(2, 1)):
        p = proof(s, ("p1", GlobalAx("a")), ("p1 -> p2", GlobalAx("b")), ("p2", just))
        assert check(p).accepted


def test_rejections_report_earliest_step_first():
    s = parse_system("system s\nglobal a: p1\nlocal l: p2\nnec K\n")
    p = proof(s, ("p2", GlobalAx("a")), ("p1", LocalAx("l")), ("K(p3)", Nec("K", 1)), ("q", Valid()))
    r = check(p)
    assert [k for k, _ in r.diagnostics] == [1, 2, 3, 4]
    assert "not an instance" in r.diagnostics[0][1]


def test_tag_mismatch_is_rejected():
    p = proof("moore_op", ("Psi", GlobalAx("psi")))
    assert "cited as global" in check(p).diagnostics[0][1]


def test_errors():
    s = parse_system("system s\nglobal a: p1\nnec K\n")
    with pytest.raises(MalformedIndex):
        check(proof(s, ("p1", GlobalAx("a")), ("K(p1)", Nec("K", 2))))
    with pytest.raises(MalformedIndex):
        check(proof(s, ("p1", MP(0, 1))))
    with pytest.raises(UnknownAxiomName):
        check(proof(s, ("p1", GlobalAx("zz"))))
    with pytest.raises(UnknownSystem):
        check(proof("no_such_system", ("p1", Valid())))
    with pytest.raises(MalformedIndex):
        check(Proof(s, ()))


def test_predicate_necessitation_normalizes():
    s = parse_system("system s\nglobal a: p1\nnec K pred\n")
    p = proof(s, ("p1", GlobalAx("a")), ("K{p1}", Nec("K", 1)))
    assert check(p).accepted
    wrong = proof(s, ("p1", GlobalAx("a")), ("K(p1)", Nec("K", 1)))
    assert not check(wrong).accepted


# --------------------------------------------------------------- validity


def test_is_valid_examples():
    assert is_valid(parse("p -> p")).certified
    r = is_valid(parse("K(p) -> p"))
    assert not r.certified
    assert r.witness == {parse("K(p)"): True, Atom("p"): False}
    eg = parse("K(InW(2, 2)) -> exists e. K(InW(e, 2))")
    assert is_valid(eg, "taut+fo").certified
    assert not is_valid(eg, "taut").certified


def test_taut_fo_whitelist_only():
    assert is_valid(parse("(forall x. InW(x, 1)) -> InW(3, 1)"), "taut+fo").certified
    assert not is_valid(parse("InW(3, 1) -> forall x. InW(x, 1)"), "taut+fo").certified
    with pytest.raises(ValueError):
        is_valid(parse("p1"), "s5")


# -------------------------------------------------------------- gpure flags


def test_gpure_flags_examples():
    s = parse_system("system s\nglobal a: p1\nglobal b: p1 -> p2\nlocal l: p1\nnec K\n")
    assert gpure_flags(proof(s, ("p1", GlobalAx("a")), ("K(p1)", Nec("K", 1)))) == [True, True]
    p = proof(s, ("p1", LocalAx("l")), ("p1 -> p2", GlobalAx("b")), ("p2", MP(1, 2)))
    assert gpure_flags(p) == [False, True, False]
    p = proof(s, ("p1", GlobalAx("a")), ("p1 -> p2", GlobalAx("b")), ("p2", MP(1, 2)), ("K(p2)", Nec("K", 3)))
    assert all(gpure_flags(p))


def _cone_has_local(p: Proof, k: int) -> bool:
    seen, todo = set(), [k]
    while todo:
        j = todo.pop()
        if j not in seen:
            seen.add(j)
            todo.extend(premises(p.just(j)))
    return any(isinstance(p.just(j), LocalAx) for j in seen)


def test_gpure_flags_match_dependency_cones():
    for p in FUZZ[:300]:
        flags = gpure_flags(p)
        assert flags == [not _cone_has_local(p, k) for k in range(1, len(p) + 1)]


# ------------------------------------------------------------------ modes


def test_prefix_implies_dependency_on_fuzz():
    for p in FUZZ + fuzz_proofs(300, seed=12, impure_nec=True):
        if check(p, Mode.PREFIX).accepted:
            assert check(p, Mode.DEPENDENCY).accepted


def test_prefix_implies_dependency_on_corpus():
    for _, p, _ in corpus_proofs():
        if check(p, Mode.PREFIX).accepted:
            assert check(p, Mode.DEPENDENCY).accepted


def test_modes_differ_on_reordering():
    s = parse_system("system s\nglobal g: p1\nlocal l: q\nnec K\n")
    p = proof(s, ("q", LocalAx("l")), ("p1", GlobalAx("g")), ("K(p1)", Nec("K", 2)))
    assert check(p, Mode.DEPENDENCY).accepted
    assert not check(p, Mode.PREFIX).accepted
    q = reorder_for_prefix(p)
    assert check(q, Mode.PREFIX).accepted and q.conclusion == p.conclusion
    assert [type(s.just) for s in q.steps] == [GlobalAx, LocalAx, Nec]


def test_reorder_property_on_fuzz():
    n = 0
    for p in FUZZ:
        if not check(p, Mode.DEPENDENCY).accepted:
            continue
        q = reorder_for_prefix(p)
        r = check(q, Mode.PREFIX)
        assert r.accepted and q.conclusion == p.conclusion
        # a permutation: same formulas, same justification kinds
        assert sorted(str(st.formula) for st in q.steps) == sorted(str(st.formula) for st in p.steps)
        assert sorted(type(st.just).__name__ for st in q.steps) == sorted(type(st.just).__name__ for st in p.steps)
        n += 1
    assert n >= 500


def test_reorder_keeps_prefix_proofs():
    p = proof("surprise_weak", ("p1 | p2", GlobalAx("exam")), ("K(p1 | p2)", Nec("K", 1)))
    assert reorder_for_prefix(p).steps == p.steps


def test_reorder_rejects_unaccepted():
    p = proof("moore_op", ("Psi", LocalAx("psi")), ("K(Psi)", Nec("K", 1)))
    with pytest.raises(NotAccepted):
        reorder_for_prefix(p)


def test_mutation_global_to_local_flips_verdict():
    flipped = 0
    for p in FUZZ:
        system = p.system
        for k, step in enumerate(p.steps, start=1):
            if not isinstance(step.just, Nec):
                continue
            cone_axioms = set()
            todo = [step.just.j]
            while todo:
                j = todo.pop()
                if isinstance(p.just(j), GlobalAx):
                    cone_axioms.add(p.just(j).name)
                todo.extend(premises(p.just(j)))
            for name in sorted(cone_axioms):
                mutated_sys = system.retag(name, AxiomTag.LOCAL)
                steps = [
                    type(s)(s.formula, LocalAx(name)) if isinstance(s.just, GlobalAx) and s.just.name == name else s
                    for s in p.steps
                ]
                mutated = Proof(mutated_sys, tuple(steps), p.name)
                for mode in Mode:
                    assert not check(mutated, mode).accepted
                flipped += 1
    assert flipped >= 100


# ------------------------------------------------------------ file format


def test_proof_file_round_trip():
    for _, p, _ in corpus_proofs():
        q = parse_proof(dump_proof(p))
        assert q.steps == p.steps and q.system_name == p.system_name


def test_proof_file_errors():
    with pytest.raises(ProofFormatError):
        parse_proof("1: p1 ; valid\n")
    with pytest.raises(ProofFormatError):
        parse_proof("proof x in surprise_weak\n1: p1 ; frobnicate\n")
    with pytest.raises(ProofFormatError):
        parse_proof("proof x in surprise_weak\n2: p1 ; valid\n")


def test_corpus_proofs_have_expected_verdict_in_both_modes():
    seen = 0
    for path, p, verdict in corpus_proofs():
        assert verdict is not None, path
        for mode in Mode:
            assert check(p, mode).verdict == verdict, (path, mode)
        seen += 1
    assert seen >= 15


def test_steps_are_normalized():
    p = proof("moore_flawed", ("K{Psi}", Valid()))
    f: Formula = p.steps[0].formula
    assert isinstance(f.args[0], Numeral)


def test_small_exhaustive_tautologies():
    a, b = Atom("a"), Atom("b")
    for x, y in itertools.product([a, b], repeat=2):
        assert is_valid(Imp(x, Imp(y, x))).certified
