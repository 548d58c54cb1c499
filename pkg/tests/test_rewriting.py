import random

import pytest

from tietze import fixtures as fx
from tietze.checker import check_derivation, check_hom_certificate, check_verdict
from tietze.core import Presentation, Pullback, word
from tietze.errors import CertificateError, PreconditionError
from tietze.rewriting import (
    Budget,
    Derivation,
    DerivationStep,
    Proved,
    Refuted,
    RewriteSystem,
    Unknown,
    count_elements,
    equivalent,
    knuth_bendix,
    neighbours,
    normal_form,
    separate,
)

from oracles import brute_separates, class_count, connected

FIXTURES = {"N": (fx.N, 4), "NxN": (fx.NxN, 10), "Z2": (fx.Z2, 2), "Z": (fx.Z, 7)}


def test_neighbours_order():
    steps = list(neighbours(("a", "b"), [(("a",), ("b",))]))
    assert [(s.left, s.direction) for s in steps] == [((), "fwd"), (("a",), "bwd")]


def test_equivalent_proves_with_replayable_derivation():
    P = fx.Z()
    res = equivalent(P, word("a a b"), word("a"))
    assert isinstance(res, Proved)
    assert check_derivation(P, res.derivation, word("a a b"), word("a")) == ("a",)
    assert str(res.derivation).splitlines()[0] == "start a a b"


def test_equivalent_refutes_with_certificate():
    P = fx.NxN()
    res = equivalent(P, word("a"), word("b"))
    assert isinstance(res, Refuted)
    res.certificate.validate(P)


def test_unknown_names_the_budget_dimension():
    P = Presentation.parse("a b", ["a b -> b a", "a -> a a"])
    res = equivalent(P, word("a b"), word("b"), Budget(max_expansions=5, max_size=1))
    assert isinstance(res, Unknown) and res.exhausted in {"expansions", "max_len", "max_size"}
    assert res.exhausted in str(res)
    tiny = equivalent(Presentation.parse("a", ["a -> a a"]), word("a"), word("1"), Budget(max_expansions=3, max_size=1))
    assert isinstance(tiny, Unknown) and tiny.exhausted == "expansions"
    capped = equivalent(Presentation.parse("a", ["a -> a a"]), word("a"), word("1"), Budget(max_len=3, max_size=1))
    assert isinstance(capped, Unknown) and capped.exhausted == "max_len"


def test_closed_class_is_refuted_or_reports_size():
    P = Presentation.parse("a", ["a a -> a a a"])
    res = equivalent(P, word("a"), word("a a"))
    assert res.status in ("refuted", "unknown")
    if isinstance(res, Refuted):
        res.certificate.validate(P)


def test_random_queries_agree_with_path_oracle():
    rng = random.Random(3)
    for _ in range(150):
        gens = ["a", "b"][: rng.randint(1, 2)]
        rels = []
        for _ in range(rng.randint(0, 2)):
            rels.append((tuple(rng.choices(gens, k=rng.randint(0, 2))), tuple(rng.choices(gens, k=rng.randint(0, 2)))))
        P = Presentation(gens, rels)
        u = tuple(rng.choices(gens, k=rng.randint(0, 3)))
        v = tuple(rng.choices(gens, k=rng.randint(0, 3)))
        res = equivalent(P, u, v, Budget(max_expansions=2000, max_len=8))
        check_verdict(P, res, u, v)
        if isinstance(res, Proved):
            assert connected(gens, rels, u, v, max(len(w) for w in res.derivation.words()))
        elif isinstance(res, Refuted):
            assert not connected(gens, rels, u, v, 10)


def test_separate_matches_brute_force_and_finds_noncommutative():
    P = Presentation.parse("a b", [])
    cert = separate(P, word("a b"), word("b a"))
    assert cert is not None and not cert.target.is_commutative and cert.target.size <= 4
    table = cert.target.mul.tolist()
    assert brute_separates(["a", "b"], [], ("a", "b"), ("b", "a"), table) is not None
    check_hom_certificate(P, cert)
    assert separate(fx.NxN(), word("a b"), word("b a")) is None


def test_separate_with_user_table():
    from tietze.monoids import cyclic

    P = Presentation.parse("a", ["a a a a a -> 1"])
    assert separate(P, word("a"), word("a a"), max_size=1, tables=(cyclic(5),)) is not None


def test_tampered_certificates_rejected():
    P = fx.Z()
    d = equivalent(P, word("a b"), word("1")).derivation
    bad = Derivation(d.start, (DerivationStep((), ("a",), ("b",), "fwd", ("b",)),))
    with pytest.raises(CertificateError):
        check_derivation(P, bad)
    cert = separate(fx.Z2(), word("a"), word("1"))
    forged = type(cert)(cert.target, cert.assignment, ("a",), ("a", "a", "a"))
    with pytest.raises(CertificateError):
        check_hom_certificate(fx.Z2(), forged)


def test_pullback_presentations_reduce_to_target():
    T = Presentation.parse("x", ["x x -> 1"], reflexive=True)
    Z = Presentation(["a", "b"], Pullback({"a": "x", "b": "x"}, T), reflexive=True)
    res = equivalent(Z, word("a b a"), word("b"))
    assert isinstance(res, Proved)
    check_derivation(Z, res.derivation, word("a b a"), word("b"))
    ref = equivalent(Z, word("a"), word("a b"))
    assert isinstance(ref, Refuted)
    ref.certificate.validate(Z)


@pytest.mark.parametrize("name", list(FIXTURES))
def test_kb_counts_match_class_oracle(name):
    make, expected = FIXTURES[name]
    P = make()
    R, zz = knuth_bendix(P, Budget(max_expansions=10_000))
    assert R.convergent and R.check_confluent()
    for L in (1, 2, 3):
        assert count_elements(R, L) == class_count(P.gens, P.relations, L)
    assert count_elements(R, 3) == expected
    assert zz.start == P and zz.end == R.presentation(P.reflexive)


def test_normal_form_of_commuting_words():
    R, _ = knuth_bendix(fx.NxN())
    assert normal_form(R, word("b a b a")) == word("a a b b")


def test_kb_orients_by_shortlex_and_reduces_with_derivation():
    R, _ = knuth_bendix(Presentation.parse("a b", ["b a -> a b"]))
    assert R.rules == ((("b", "a"), ("a", "b")),)
    d = R.reduce(word("b b a"))
    assert d.end == word("a b b")
    check_derivation(R.presentation(), d)


def test_kb_budget_exhaustion_returns_none():
    # the 3-strand braid monoid has no finite shortlex completion for a < b
    P = Presentation.parse("a b", ["a b a -> b a b"])
    assert knuth_bendix(P, Budget(kb_max_rules=20, kb_max_iterations=500)) is None


def test_normal_form_requires_convergence():
    R = RewriteSystem(("a",), [(("a", "a"), ("a",))])
    with pytest.raises(PreconditionError):
        normal_form(R, ("a",))
    with pytest.raises(PreconditionError):
        count_elements(R, 2)


def test_critical_pairs_of_overlapping_rules():
    R = RewriteSystem(("a", "b"), [(("a", "b"), ("b",)), (("b", "a"), ("a",))])
    assert R.critical_pairs()
    assert not R.check_confluent()
