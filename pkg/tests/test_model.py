import itertools
import random

import pytest

from tietze import category, model
from tietze.core import Morphism, Presentation, compose, identity, validate_morphism, word_map
from tietze.errors import CertificateError, PreconditionError
from tietze.fixtures import Z2, chain_example, n_inclusion, n_pair
from tietze.rewriting import Budget, Proved, Refuted, Unknown

from oracles import lifts_all_generating


def test_generating_cells():
    cells = list(model.generating_cofibrations(2))
    assert len(cells) == 10
    assert str(cells[0]) == "0 -> G" and str(cells[1]) == "r^{0,0}"
    for c in cells:
        assert validate_morphism(c.morphism) and category.is_mono(c.morphism)


def test_solve_lifting_square_checks():
    X = Presentation.parse("x y", ["x -> y"], reflexive=True)
    Y = Presentation.parse("z", [], reflexive=True)
    p = Morphism(X, Y, {"x": "z", "y": "z"})
    cell = category.r_inclusion(1, 1)
    f = Morphism(cell.src, X, {"a1": "x", "a2": "y"})
    g = Morphism(cell.tgt, Y, {"a1": "z", "a2": "z"})
    h = model.solve_lifting(cell, p, f, g)
    assert h is not None and compose(h, cell) == f and compose(p, h) == g
    f_back = Morphism(cell.src, X, {"a1": "y", "a2": "x"})
    assert model.solve_lifting(cell, p, f_back, g) is None
    with pytest.raises(PreconditionError):
        model.solve_lifting(cell, p, f, Morphism(cell.src, Y, {"a1": "z", "a2": "z"}))


def test_lifts_against_finds_square():
    f = n_inclusion()
    bad = model.lifts_against(model.GenCofibration("G").morphism, f)
    assert bad is not None
    assert model.lifts_against(model.GenCofibration("G").morphism, identity(Z2())) is None


def test_counterexample_triple():
    f = n_inclusion()
    assert model.is_pseudo_fibration(f) is True
    assert model.is_trivial_fibration(f) is False
    ok, why = model.trivial_fibration_reason(f)
    assert not ok and "not surjective on generators" in why
    res = model.certify_weak_equivalence(f, Budget(max_expansions=10_000))
    assert isinstance(res, Proved)
    res.certificate.validate(f)
    g = chain_example()
    assert model.is_pseudo_fibration(g) is True
    assert model.is_trivial_fibration(g) is False


def test_tfib_matches_first_principles_sample():
    rng = random.Random(5)
    gens = ("a", "b")
    words = [w for n in range(3) for w in itertools.product(gens, repeat=n)]
    checked = 0
    while checked < 150:
        Y = Presentation(gens[: rng.randint(1, 2)], [], reflexive=True)
        ywords = [w for w in words if set(w) <= set(Y.gens)]
        Y = Presentation(Y.gens, [(rng.choice(ywords), rng.choice(ywords)) for _ in range(rng.randint(0, 2))], True)
        xg = gens[: rng.randint(0, 2)]
        phi = {x: rng.choice(Y.gens) for x in xg}
        img = lambda w: tuple(phi[x] for x in w)  # noqa: E731
        xwords = [w for w in words if set(w) <= set(xg)]
        allowed = [(u, v) for u in xwords for v in xwords if u != v and (img(u) == img(v) or Y.has_relation(img(u), img(v)))]
        rels = rng.sample(allowed, min(len(allowed), rng.randint(0, 2)))
        X = Presentation(xg, rels, True)
        f = Morphism(X, Y, phi)
        expect = lifts_all_generating(xg, rels, Y.gens, list(Y.relations), phi)
        assert model.is_trivial_fibration(f) == expect
        checked += 1


def test_weq_refutations():
    N = Presentation.parse("a", [], reflexive=True)
    Z2r = Z2().as_reflexive()
    f = Morphism(N, Z2r, {"a": "a"})
    res = model.certify_weak_equivalence(f, Budget(max_expansions=2000))
    assert isinstance(res, Refuted) and isinstance(res.certificate, model.NonInjective)
    res.certificate.validate(f)

    two = Presentation.parse("a b", [], reflexive=True)
    g = Morphism(N, two, {"a": "a"})
    res = model.certify_weak_equivalence(g, Budget(max_expansions=2000))
    assert isinstance(res, Refuted) and isinstance(res.certificate, model.NonSurjective)
    res.certificate.validate(g)
    assert res.certificate.generator == "b"


def test_weq_certificate_tampering_detected():
    f = chain_example()
    res = model.certify_weak_equivalence(f, Budget(max_expansions=10_000))
    assert isinstance(res, Proved)
    cert = res.certificate
    cert.validate(f)
    broken = model.WeqCertificate(cert.dictionary, cert.back, cert.forth, ())
    with pytest.raises((CertificateError, KeyError)):
        broken.validate(f)


def test_factor_mono_tfib_contract():
    rng = random.Random(2)
    for f in [n_inclusion(), chain_example()] + [_random_morphism(rng) for _ in range(20)]:
        Z, i, p = model.factor_mono_tfib(f)
        assert compose(p, i) == f
        assert category.is_mono(i)
        assert model.is_trivial_fibration(p)
        assert validate_morphism(i) and validate_morphism(p)


def _random_morphism(rng):
    gens = ["a", "b"]
    while True:
        def pres(k):
            g = gens[:k]
            ws = [w for n in range(3) for w in itertools.product(g, repeat=n)]
            rels = [(rng.choice(ws), rng.choice(ws)) for _ in range(rng.randint(0, 2))] if ws else []
            return Presentation(g, rels, reflexive=True)
        P, Q = pres(rng.randint(0, 2)), pres(rng.randint(1, 2))
        f = Morphism(P, Q, {a: rng.choice(Q.gens) for a in P.gens})
        if validate_morphism(f):
            return f


def test_ken_brown_contracts():
    w = n_inclusion()
    kb = model.ken_brown_cospan(w)
    assert compose(kb.p, kb.i) == w
    assert compose(kb.p, kb.j) == identity(w.tgt)
    assert category.is_mono(kb.i) and category.is_mono(kb.j)
    assert model.is_trivial_fibration(kb.p)
    for leg in (kb.i, kb.j):
        res = model.certify_weak_equivalence(leg, Budget(max_expansions=10_000))
        assert isinstance(res, Proved)
        res.certificate.validate(leg)


def test_cellular_decomposition_replays():
    for f in (n_inclusion(), chain_example()):
        dec = model.cellular_decomposition(f)
        assert dec.replay() == f.tgt
    P, Q = n_pair()
    dec = model.cellular_decomposition(Morphism(P, Q, {"a": "a"}))
    assert [c.kind for c, _, _ in dec.cells] == ["G", "R", "R"]
    with pytest.raises(PreconditionError):
        model.cellular_decomposition(Morphism(Presentation.parse("a b"), P, {"a": "a", "b": "a"}))


def test_pseudo_fibration_conditions():
    P = Presentation.parse("a", ["a -> a a"], reflexive=True)
    Q = Presentation.parse("a", ["a -> a a", "a a -> a"], reflexive=True)
    f = Morphism(P, Q, {"a": "a"})
    ok, why = model.pseudo_fibration_reason(f)
    assert ok is False and "no lift" in why
    P = Presentation.parse("a", ["a a -> a a a"], reflexive=True)
    Q = Presentation.parse("a", ["a a -> a a a", "a a a -> a a"], reflexive=True)
    ok, why = model.pseudo_fibration_reason(Morphism(P, Q, {"a": "a"}))
    assert ok is False and "symmetric" in why
    assert model.is_pseudo_fibration(identity(Q))


def test_pseudo_fibrant_bounded():
    v = model.is_pseudo_fibrant(Z2().as_reflexive(), 2)
    assert v.status == "refuted"
    assert v.witness == ()


def test_replacement_small():
    r = model.pseudo_fibrant_replacement(Z2(), 1, 2)
    assert r.trace.end == r.presentation
    assert r.decomposition.replay() == r.presentation
    assert all(k in ("Tgen", "Tsym", "Ttrans", "Tctxt") for k in r.trace.kinds())


def test_surj_and_inj_factor():
    w = n_inclusion()
    s = model.surj_factor(w, "a", Budget(max_expansions=1000))
    assert s is not None
    s.check(w, "a")
    out = model.inj_factor(w, ("a",), ("a",), Budget(max_expansions=1000))
    assert out is not None
    assert validate_morphism(out.g2)
    assert compose(out.g2, out.g1) == out.target_equivalence.factor
    # b is congruent to the empty word, so it factors through G^0
    s = model.surj_factor(w, "b", Budget(max_expansions=1000))
    assert s.word == () and s.n == 0
    s.check(w, "b")
    free = Morphism(w.src, Presentation.parse("a b", [], True), {"a": "a"})
    assert model.surj_factor(free, "b", Budget(max_expansions=200), 2) is None
    assert word_map(w, ("a",)) == ("a",)


def test_unknown_names_dimension():
    w = Morphism(Presentation.parse("a b", [], True), Presentation.parse("a b", ["a b -> b a"], True), {"a": "a", "b": "b"})
    res = model.certify_weak_equivalence(w, Budget(max_expansions=50, max_size=1))
    assert isinstance(res, (Unknown, Refuted))
    if isinstance(res, Unknown):
        assert "max word" in res.exhausted
