import pytest
from fuzz import fuzz_proofs
from helpers import corpus_proofs

from globalnec.formula import Atom, ModApp, normalize
from globalnec.parser import parse
from globalnec.proofcheck import MP, GlobalAx, LocalAx, Nec, NotAccepted, Valid, check, proof
from globalnec.propositional import is_tautology
from globalnec.standardize import OracleFailure, deduction_discharge, sprime_of, translate

# output size of translate stays below C * n**2 on the fuzz pool (measured max 1.0)
SIZE_C = 4

FUZZ = fuzz_proofs(600, seed=5)


def _nec_free(p) -> bool:
    return not any(isinstance(s.just, Nec) for s in p.steps)


def _round_trip(p):
    q = translate(p)
    r = check(q)
    assert r.accepted, r.diagnostics
    assert _nec_free(q)
    assert q.conclusion == p.conclusion
    return q


# ---------------------------------------------------------------- S' lines


def test_sprime_of_surprise_weak_has_seven_lines():
    lines = sprime_of("surprise_weak").expanded_lines()
    assert len(lines) == 7
    assert lines[-1] == "K(?phi) -> ?phi"


def test_sprime_line_membership():
    sp = sprime_of("surprise_weak")
    assert sp.line_of(parse("p1 | p2")) == "l1"
    assert sp.line_of(parse("K(p1 -> p1)")) == "l2"
    assert sp.line_of(parse("K(p1 -> p2) -> K(p1) -> K(p2)")) == "l1"
    assert sp.in_l3(parse("K(p1 -> p2) -> K(p1) -> K(p2)"))
    assert sp.line_of(parse("K(K(p1 | p2))")) == "l4"
    assert sp.line_of(parse("K(K(K(p1 -> p1)))")) == "l4"


def test_local_axiom_only_in_line_five():
    sp = sprime_of("surprise_weak")
    sound = parse("K(p1) -> p1")
    assert sp.line_of(sound) == "l5"
    assert not sp.in_l4(ModApp("K", sound))
    assert sp.line_of(ModApp("K", sound)) is None


def test_sprime_has_no_necessitation():
    sp = sprime_of("fitch_weak")
    assert sp.nec == ()
    assert [m.name for m in sp.modalities] == ["Box", "K"]


# ------------------------------------------------------------- translation


def test_translate_single_necessitation_is_line_four():
    p = proof("surprise_weak", ("p1 | p2", GlobalAx("exam")), ("K(p1 | p2)", Nec("K", 1)))
    q = _round_trip(p)
    assert q.steps[-1].just == GlobalAx("l4")


def test_translate_nec_free_proof_relabels_only():
    p = proof(
        "surprise_weak",
        ("p1 | p2", GlobalAx("exam")),
        ("K(p1) -> p1", LocalAx("sound")),
        ("(p1 | p2) -> (p1 | p2 | p1)", Valid()),
        ("p1 | p2 | p1", MP(1, 3)),
    )
    q = _round_trip(p)
    assert [s.formula for s in q.steps] == [s.formula for s in p.steps]
    assert [s.just for s in q.steps] == [GlobalAx("l1"), LocalAx("l5"), Valid(), MP(1, 3)]


def test_translate_nested_necessitation():
    p = proof(
        "surprise_weak",
        ("p1 | p2", GlobalAx("exam")),
        ("K(p1 | p2)", Nec("K", 1)),
        ("K(K(p1 | p2))", Nec("K", 2)),
    )
    q = _round_trip(p)
    assert sprime_of("surprise_weak").line_of(q.conclusion) == "l4"


def test_translate_necessitation_over_modus_ponens():
    p = proof(
        "surprise_weak",
        ("p1 | p2", GlobalAx("exam")),
        ("(p1 | p2) -> (p2 | p1)", Valid()),
        ("p2 | p1", MP(1, 2)),
        ("K(p2 | p1)", Nec("K", 3)),
    )
    q = _round_trip(p)
    assert any(s.just == GlobalAx("l3") for s in q.steps)


def test_translate_rejects_unaccepted():
    p = proof("moore_op", ("Psi", LocalAx("psi")), ("K(Psi)", Nec("K", 1)))
    with pytest.raises(NotAccepted):
        translate(p)


def test_translate_corpus():
    n = 0
    for path, p, verdict in corpus_proofs():
        if verdict == "Accepted":
            _round_trip(p)
            n += 1
    assert n >= 10


def test_translate_fuzz_round_trip_and_size():
    for p in FUZZ:
        q = _round_trip(p)
        assert len(q) <= SIZE_C * len(p) ** 2


def test_translate_idempotent_on_output():
    for p in FUZZ[:200]:
        q = translate(p)
        qq = translate(q)
        assert [s.formula for s in qq.steps] == [s.formula for s in q.steps]
        assert [type(s.just) for s in qq.steps] == [type(s.just) for s in q.steps]


def test_hilbert_route_agrees_with_direct_route():
    for p in FUZZ[:200]:
        a, b = translate(p, direct=True), translate(p, direct=False)
        assert check(b).accepted and b.conclusion == a.conclusion


# ---------------------------------------------------------------- discharge


def test_discharge_examples():
    p1, p2 = Atom("p1"), Atom("p2")
    assert deduction_discharge([p1], p1).implication == parse("p1 -> p1")
    d = deduction_discharge([p1, parse("p1 -> p2")], p2)
    assert d.implication == parse("p1 -> (p1 -> p2) -> p2") and d.method == "direct"
    leaves = [parse("K(p1 -> p2) -> K(p1) -> K(p2)"), parse("K(p1 -> p2)"), parse("K(p1)")]
    d = deduction_discharge(leaves, parse("K(p2)"))
    assert is_tautology(d.implication)


def test_discharge_hilbert_transformation():
    sub = proof(
        "surprise_weak#sprime",
        ("p1", GlobalAx("l1")),
        ("p1 -> p2", GlobalAx("l1")),
        ("p2", MP(1, 2)),
    )
    d = deduction_discharge([Atom("p1"), parse("p1 -> p2")], Atom("p2"), sub, direct=False)
    assert d.method == "hilbert"
    assert d.steps[-1][0] == normalize(parse("p1 -> (p1 -> p2) -> p2"))
    for f, kind in d.steps:
        if kind == "valid":
            assert is_tautology(f)


def test_discharge_failure():
    with pytest.raises(OracleFailure):
        deduction_discharge([Atom("p1")], Atom("p2"))
