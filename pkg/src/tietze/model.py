"""Lifting problems, fibration predicates, weak-equivalence certificates and factorizations.

Predicates here read presentations as reflexive ones: a pair of equal words
always counts as a relation, whatever the ``reflexive`` flag says.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import category
from .calculus import (
    EquivalencePresentation,
    JMorphism,
    TietzeTrace,
    Tctxt,
    Tgen,
    Tsym,
    Ttrans,
    j_pushout,
    make_equivalence_presentation,
    step_as_j_pushout,
)
from .core import (
    Morphism,
    Presentation,
    Pullback,
    Word,
    compose,
    fmt_relation,
    fmt_word,
    validate_morphism,
    word_map,
    words_up_to,
)
from .errors import CertificateError, PreconditionError, UnsupportedRepresentation, ValidationError
from .monoids import library
from .rewriting import (
    Budget,
    Derivation,
    HomCertificate,
    Proved,
    Refuted,
    Unknown,
    equivalent,
    separate,
)


def _rel(P: Presentation, u: Word, v: Word) -> bool:
    return u == v or P.has_relation(u, v)


def _fibres(f: Morphism) -> dict:
    fib = {}
    for a in f.src.gens:
        fib.setdefault(f.mapping[a], []).append(a)
    return fib


def preimages(f: Morphism, x: Word):
    """Every source word mapping letterwise onto ``x``."""
    fib = _fibres(f)
    return itertools.product(*(fib.get(b, ()) for b in x))


# ------------------------------------------------------- generating cells


@dataclass(frozen=True)
class GenCofibration:
    """``0 -> G`` (``kind='G'``) or ``r^{m,n}: G^{m+n} -> R^{m,n}`` (``kind='R'``)."""

    kind: str
    m: int = 0
    n: int = 0

    @property
    def morphism(self) -> Morphism:
        return category.g_inclusion() if self.kind == "G" else category.r_inclusion(self.m, self.n)

    def __str__(self):
        return "0 -> G" if self.kind == "G" else f"r^{{{self.m},{self.n}}}"


def generating_cofibrations(max_mn: int = 2):
    yield GenCofibration("G")
    for m in range(max_mn + 1):
        for n in range(max_mn + 1):
            yield GenCofibration("R", m, n)


# ----------------------------------------------------------------- lifting


def solve_lifting(i: Morphism, p: Morphism, f: Morphism, g: Morphism, length_bound: int | None = None):
    """First ``h: B -> X`` with ``h.i = f`` and ``p.h = g`` (lexicographic in X's order), or None."""
    A, B, X, Y = i.src, i.tgt, p.src, p.tgt
    if f.src != A or f.tgt != X or g.src != B or g.tgt != Y:
        raise PreconditionError("square has mismatched corners")
    for a in A.gens:
        if p.mapping[f.mapping[a]] != g.mapping[i.mapping[a]]:
            raise PreconditionError("square does not commute")
    forced = {}
    for a in A.gens:
        b, x = i.mapping[a], f.mapping[a]
        if forced.setdefault(b, x) != x:
            return None
    fib = _fibres(p)
    choices = [[forced[b]] if b in forced else fib.get(g.mapping[b], []) for b in B.gens]
    for images in itertools.product(*choices):
        h = Morphism(B, X, dict(zip(B.gens, images)))
        if validate_morphism(h, length_bound):
            return h
    return None


def lifts_against(cell: Morphism, p: Morphism, length_bound: int | None = None):
    """First square (f, g) over ``cell`` with no filler, or None if all squares lift."""
    A, B = cell.src, cell.tgt
    for f in category.all_morphisms(A, p.src):
        # g is only constrained on the image of the cell; enumerate the rest
        for images in itertools.product(p.tgt.gens, repeat=len(B.gens)):
            gm = dict(zip(B.gens, images))
            if any(gm[cell.mapping[a]] != p.mapping[f.mapping[a]] for a in A.gens):
                continue
            g = Morphism(B, p.tgt, gm)
            if not validate_morphism(g, length_bound):
                continue
            if solve_lifting(cell, p, f, g, length_bound) is None:
                return f, g
    return None


# ------------------------------------------------------ trivial fibrations


def trivial_fibration_reason(f: Morphism, bound: int = 3):
    """``(bool, reason)`` for the lifting condition against ``0 -> G`` and every ``r^{m,n}``.

    Exact for explicit source relations: a non-singleton fibre forces the
    infinitely many pairs ``(x w, y w)`` with ``f(x) = f(y)`` into the source,
    which a finite relation set cannot hold.  A pullback source along ``f``
    itself holds every required pair by construction.  Other intensional
    sources are checked on words up to ``bound``.
    """
    P, Q = f.src, f.tgt
    if not f.is_surjective:
        return False, "not surjective on generators"
    if isinstance(P.rels, Pullback):
        T = P.rels.target
        if dict(P.rels.mapping) == f.mapping and T.gens == Q.gens and T.as_reflexive() == Q.as_reflexive():
            return True, "relations are the full preimage of the target's"
    if P.is_extensional:
        if not f.is_injective and P.gens:
            return False, "non-injective on generators: the diagonal cannot be reflected by finitely many relations"
        for x, y in Q.relations:
            for u in preimages(f, x):
                for v in preimages(f, y):
                    if not _rel(P, u, v):
                        return False, f"relation {fmt_relation((x, y))} does not lift to {fmt_relation((u, v))}"
        return True, "surjective and reflects every relation"
    for u in words_up_to(P.gens, bound):
        for v in words_up_to(P.gens, bound):
            if _rel(Q, word_map(f, u), word_map(f, v)) and not _rel(P, u, v):
                return False, f"pair {fmt_relation((u, v))} is not reflected"
    return True, f"no unreflected pair up to length {bound}"


def is_trivial_fibration(f: Morphism) -> bool:
    return trivial_fibration_reason(f)[0]


def is_cofibration(f: Morphism) -> bool:
    return category.is_mono(f)


# ------------------------------------------------------ weak equivalences


@dataclass(frozen=True)
class WeqCertificate:
    """A generator dictionary ``tgt -> source words`` with the derivations that make it an inverse.

    ``back[b]``: ``f(g(b)) ~ b`` in the target; ``forth[a]``: ``g(f(a)) ~ a``
    in the source; ``relations``: ``g(x) ~ g(y)`` in the source for each
    explicit target relation.  For a pullback target along ``q`` into ``T``
    the last item is replaced by ``factor`` (a map ``h`` from ``T``'s
    generators), ``factor_fit[z]``: ``g(z) ~ h(q(z))`` and ``relations`` over
    ``T``'s relations.
    """

    dictionary: tuple
    back: tuple
    forth: tuple
    relations: tuple
    factor: tuple | None = None
    factor_fit: tuple = ()

    def as_dict(self) -> dict:
        return {b: w for b, w in self.dictionary}

    def validate(self, f: Morphism) -> None:
        from .checker import check_derivation

        P, Q = f.src, f.tgt
        g = self.as_dict()
        if set(g) != set(Q.gens):
            raise CertificateError("dictionary not total on target generators")
        gw = lambda w: tuple(x for b in w for x in g[b])  # noqa: E731
        back = dict(self.back)
        for b in Q.gens:
            check_derivation(Q, back[b], word_map(f, g[b]), (b,))
        forth = dict(self.forth)
        for a in P.gens:
            check_derivation(P, forth[a], gw((f.mapping[a],)), (a,))
        rels = dict(self.relations)
        if self.factor is None:
            if not Q.is_extensional:
                raise CertificateError("intensional target needs a factor map")
            for x, y in Q.relations:
                check_derivation(P, rels[(x, y)], gw(x), gw(y))
        else:
            if not isinstance(Q.rels, Pullback):
                raise CertificateError("factor map given for a non-pullback target")
            T, q = Q.rels.target, dict(Q.rels.mapping)
            h = dict(self.factor)
            hw = lambda w: tuple(x for t in w for x in h[t])  # noqa: E731
            fit = dict(self.factor_fit)
            for z in Q.gens:
                check_derivation(P, fit[z], g[z], h[q[z]])
            for x, y in T.relations:
                check_derivation(P, rels[(x, y)], hw(x), hw(y))


@dataclass(frozen=True)
class NonInjective:
    """``f(u) ~ f(v)`` in the target while a hom separates ``u`` and ``v`` in the source."""

    u: Word
    v: Word
    target_derivation: Derivation
    separation: HomCertificate

    def validate(self, f: Morphism) -> None:
        from .checker import check_derivation, check_hom_certificate

        check_derivation(f.tgt, self.target_derivation, word_map(f, self.u), word_map(f, self.v))
        if (self.separation.u, self.separation.v) != (self.u, self.v):
            raise CertificateError("separation is for a different pair")
        check_hom_certificate(f.src, self.separation)


@dataclass(frozen=True)
class NonSurjective:
    """A hom of the target whose value on ``generator`` lies outside the submonoid generated by the image of ``f``."""

    generator: str
    target: object
    assignment: tuple

    def validate(self, f: Morphism) -> None:
        from .checker import check_hom_certificate

        Q = f.tgt
        vals = dict(self.assignment)
        M = self.target
        # the assignment must be a hom: reuse the certificate checker with a dummy pair
        probe = HomCertificate(M, self.assignment, (self.generator,), ())
        try:
            check_hom_certificate(Q, probe)
        except CertificateError as exc:
            if "separate" not in str(exc):
                raise
        image = _submonoid(M, [vals[f.mapping[a]] for a in f.src.gens])
        if vals[self.generator] in image:
            raise CertificateError("generator value is reachable from the image")


def _submonoid(M, gens) -> set:
    seen = {M.unit}
    todo = [M.unit]
    while todo:
        x = todo.pop()
        for g in gens:
            y = int(M.mul[x, g])
            if y not in seen:
                seen.add(y)
                todo.append(y)
    return seen


def _dictionary_candidates(f, b, max_word, budget):
    """P-words ``w`` with a derivation ``f(w) ~ b``, shortlex order (separation tried first)."""
    P, Q = f.src, f.tgt
    for w in words_up_to(P.gens, max_word):
        x = word_map(f, w)
        if x != (b,):
            try:
                if separate(Q, x, (b,), budget.max_size) is not None:
                    continue
            except UnsupportedRepresentation:
                pass
        res = equivalent(Q, x, (b,), budget)
        if isinstance(res, Proved):
            yield w, res.derivation


def _prove(P, u, v, budget):
    res = equivalent(P, u, v, budget)
    return res.derivation if isinstance(res, Proved) else None


def _try_dictionary(f, g, back, budget):
    P, Q = f.src, f.tgt
    gw = lambda w: tuple(x for b in w for x in g[b])  # noqa: E731
    forth = []
    for a in P.gens:
        d = _prove(P, gw((f.mapping[a],)), (a,), budget)
        if d is None:
            return None
        forth.append((a, d))
    if Q.is_extensional:
        rels = []
        for x, y in Q.relations:
            d = _prove(P, gw(x), gw(y), budget)
            if d is None:
                return None
            rels.append(((x, y), d))
        return WeqCertificate(tuple(g.items()), tuple(back.items()), tuple(forth), tuple(rels))
    if not isinstance(Q.rels, Pullback):
        return None
    T, q = Q.rels.target, dict(Q.rels.mapping)
    section = {}
    for z in Q.gens:
        section.setdefault(q[z], z)
    if set(section) != set(T.gens):
        return None
    h = {t: g[section[t]] for t in T.gens}
    hw = lambda w: tuple(x for t in w for x in h[t])  # noqa: E731
    fit = []
    for z in Q.gens:
        d = _prove(P, g[z], h[q[z]], budget)
        if d is None:
            return None
        fit.append((z, d))
    rels = []
    for x, y in T.relations:
        d = _prove(P, hw(x), hw(y), budget)
        if d is None:
            return None
        rels.append(((x, y), d))
    return WeqCertificate(tuple(g.items()), tuple(back.items()), tuple(forth), tuple(rels),
                          factor=tuple(h.items()), factor_fit=tuple(fit))


def certify_weak_equivalence(f: Morphism, budget: Budget | None = None, max_word: int = 2, per_generator: int = 3):
    """Proved with a :class:`WeqCertificate`, Refuted with a non-injectivity or
    non-surjectivity certificate, or Unknown."""
    budget = budget or Budget()
    Q = f.tgt
    cands = []
    for b in Q.gens:
        found = list(itertools.islice(_dictionary_candidates(f, b, max_word, budget), per_generator))
        cands.append(found)
    if all(cands):
        for combo in itertools.product(*cands):
            g = {b: w for b, (w, _) in zip(Q.gens, combo)}
            back = {b: d for b, (_, d) in zip(Q.gens, combo)}
            cert = _try_dictionary(f, g, back, budget)
            if cert is not None:
                cert.validate(f)
                return Proved(cert)
    refutation = _refute_surjective(f, budget) if not all(cands) else None
    if refutation is None:
        refutation = _refute_injective(f, budget, max_word)
    if refutation is not None:
        refutation.validate(f)
        return Refuted(refutation)
    return Unknown(0, max_word, "dictionary search (max word length / candidates per generator)")


def _refute_injective(f, budget, max_word):
    P, Q = f.src, f.tgt
    if not P.is_extensional:
        return None
    words = list(words_up_to(P.gens, max_word))
    for u, v in itertools.combinations(words, 2):
        x, y = word_map(f, u), word_map(f, v)
        res = equivalent(Q, x, y, budget)
        if not isinstance(res, Proved):
            continue
        cert = separate(P, u, v, budget.max_size)
        if cert is not None:
            return NonInjective(u, v, res.derivation, cert)
    return None


def _refute_surjective(f, budget):
    Q = f.tgt
    if not Q.is_extensional:
        return None
    idx = Q.index
    rels = [(tuple(idx[x] for x in a), tuple(idx[x] for x in b)) for a, b in Q.relations]
    for M in library():
        if M.size > budget.max_size:
            continue
        for values in itertools.product(range(M.size), repeat=len(Q.gens)):
            ok = all(M.product(values[i] for i in a) == M.product(values[i] for i in b) for a, b in rels)
            if not ok:
                continue
            image = _submonoid(M, [values[idx[f.mapping[a]]] for a in f.src.gens])
            for b in Q.gens:
                if values[idx[b]] not in image:
                    return NonSurjective(b, M, tuple(zip(Q.gens, values)))
    return None


# ------------------------------------------------------------ factorizations


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "'"
    return name


def factor_mono_tfib(f: Morphism):
    """``f = p . i`` with ``i`` a monomorphism and ``p`` a trivial fibration.

    ``Z`` has the generators of both sides (target names primed on clash)
    and as relations every pair whose image under ``p`` is related in the
    reflexive target.
    """
    P, Q = f.src, f.tgt
    taken = set(P.gens)
    ren = {}
    for b in Q.gens:
        ren[b] = _fresh(b, taken)
        taken.add(ren[b])
    q = dict(f.mapping)
    q.update({ren[b]: b for b in Q.gens})
    gens = list(P.gens) + [ren[b] for b in Q.gens]
    Z = Presentation(gens, Pullback(q, Q.as_reflexive()), reflexive=True)
    i = Morphism(P, Z, {a: a for a in P.gens})
    p = Morphism(Z, Q, q)
    return Z, i, p


@dataclass(frozen=True)
class KenBrown:
    Z: Presentation
    i: Morphism
    j: Morphism
    p: Morphism
    coproduct: Presentation


def ken_brown_cospan(w: Morphism) -> KenBrown:
    """``P -i-> Z <-j- Q`` with ``p: Z -> Q``, ``p.i = w`` and ``p.j = id``."""
    P, Q = w.src, w.tgt
    S, i0, i1 = category.coproduct(P, Q)
    m = {i0.mapping[a]: w.mapping[a] for a in P.gens}
    m.update({i1.mapping[b]: b for b in Q.gens})
    Z, k, p = factor_mono_tfib(Morphism(S, Q, m))
    return KenBrown(Z, compose(k, i0), compose(k, i1), p, S)


# ------------------------------------------------------ cellular extensions


@dataclass
class CellularDecomposition:
    """Cells ``(cell, attaching map, fresh name)`` applied to ``start`` by pushout."""

    source: Presentation
    start: Presentation
    cells: list = field(default_factory=list)
    target: Presentation | None = None

    def replay(self) -> Presentation:
        cur = self.start
        for cell, attach, fresh in self.cells:
            if attach.tgt != cur:
                raise ValidationError("attaching map does not land in the current presentation")
            if isinstance(cell, JMorphism):
                cur, _ = j_pushout(cell, attach, fresh)
                continue
            S, h1, h2 = category.pushout(cell.morphism, attach)
            if cell.kind == "G":
                new = h1.mapping["a"]
                if new != fresh:
                    S = S.renamed({new: fresh})
            cur = S
        return cur

    def __len__(self):
        return len(self.cells)


def cellular_decomposition(f: Morphism) -> CellularDecomposition:
    """``f`` as generator cells then relation cells, starting from the image of ``f``."""
    if not f.is_injective:
        raise PreconditionError("cellular decomposition needs a monomorphism")
    P, Q = f.src, f.tgt
    if not (P.is_extensional and Q.is_extensional):
        raise UnsupportedRepresentation("cellular decomposition needs explicit relations")
    start_rels = [(word_map(f, u), word_map(f, v)) for u, v in P.relations]
    cur = Presentation([f.mapping[a] for a in P.gens], start_rels, Q.reflexive)
    start = cur
    dec = CellularDecomposition(P, start, [], Q)
    empty = category.initial()
    for b in Q.gens:
        if b in cur.index:
            continue
        cell = GenCofibration("G")
        dec.cells.append((cell, Morphism(empty, cur, {}), b))
        cur = cur.with_generator(b)
    for x, y in Q.relations:
        if cur.has_relation(x, y):
            continue
        cell = GenCofibration("R", len(x), len(y))
        src = category.G(len(x) + len(y))
        dec.cells.append((cell, Morphism(src, cur, dict(zip(src.gens, x + y))), None))
        cur = cur.with_relations([(x, y)])
    return dec


# ---------------------------------------------------------- pseudo-fibrations


def pseudo_fibration_reason(f: Morphism, bound: int = 3):
    """``(True|False|None, reason)`` for right lifting against the five J families.

    Exact for explicit relations: each condition only quantifies over
    explicit relations and the finitely many letterwise preimages of explicit
    target relations.  Intensional inputs get a bounded search that can only
    answer False or None.
    """
    P, Q = f.src, f.tgt
    if not (P.is_extensional and Q.is_extensional):
        return _pseudo_fibration_bounded(f, bound)
    Prels = [r for r in P.relations if r[0] != r[1]]
    Qrels = [r for r in Q.relations if r[0] != r[1]]
    fib = _fibres(f)
    # generator family: f(u) -> b in Q lifts to u -> a with f(a) = b
    for x, y in Qrels:
        if len(y) != 1:
            continue
        for u in preimages(f, x):
            if not any(_rel(P, u, (a,)) for a in fib.get(y[0], ())):
                return False, f"{fmt_word(u)} -> {y[0]} has no lift"
    # symmetry
    for u, v in Prels:
        if _rel(Q, word_map(f, v), word_map(f, u)) and not _rel(P, v, u):
            return False, f"symmetric of {fmt_relation((u, v))} does not lift"
    # transitivity
    by_src = {}
    for u, v in Prels:
        by_src.setdefault(u, []).append(v)
    for u, v in Prels:
        for w in by_src.get(v, ()):
            if _rel(Q, word_map(f, u), word_map(f, w)) and not _rel(P, u, w):
                return False, f"composite {fmt_relation((u, w))} does not lift"
    # context: an equal image would demand infinitely many contextual pairs
    for u, v in Prels:
        if word_map(f, u) == word_map(f, v) and P.gens:
            return False, f"{fmt_relation((u, v))} collapses; its contexts cannot all lift"
    for u, v in Prels:
        fu, fv = word_map(f, u), word_map(f, v)
        for x, y in Qrels:
            for s_len in range(len(x) - len(fu) + 1):
                t_len = len(x) - s_len - len(fu)
                s, t = x[:s_len], x[len(x) - t_len:]
                if x[s_len:s_len + len(fu)] != fu or y != s + fv + t:
                    continue
                for w in preimages(f, s):
                    for w2 in preimages(f, t):
                        if not _rel(P, w + u + w2, w + v + w2):
                            return False, f"context {fmt_word(w)} _ {fmt_word(w2)} of {fmt_relation((u, v))} does not lift"
    return True, "all five lifting conditions hold"


def _pseudo_fibration_bounded(f, bound):
    P, Q = f.src, f.tgt
    words = list(words_up_to(P.gens, bound))
    rels = P.enumerate_relations(bound)
    for u in words:
        for b in Q.gens:
            if _rel(Q, word_map(f, u), (b,)) and not any(_rel(P, u, (a,)) for a in P.gens if f.mapping[a] == b):
                return False, f"{fmt_word(u)} -> {b} has no lift"
    for u, v in rels:
        if _rel(Q, word_map(f, v), word_map(f, u)) and not _rel(P, v, u):
            return False, f"symmetric of {fmt_relation((u, v))} does not lift"
    return None, f"no violation up to length {bound}"


def is_pseudo_fibration(f: Morphism, bound: int = 3):
    return pseudo_fibration_reason(f, bound)[0]


@dataclass(frozen=True)
class BoundedVerdict:
    """``proved`` means: no violation among words of length at most ``bound``."""

    status: str
    bound: int
    witness: object = None
    reason: str = ""


def is_pseudo_fibrant(P: Presentation, L: int) -> BoundedVerdict:
    """Generator representatives for every word up to ``L`` and a congruence up to ``L``."""
    for u in words_up_to(P.gens, L):
        if len(u) == 1:
            continue
        if not any(P.has_relation(u, (a,)) for a in P.gens):
            return BoundedVerdict("refuted", L, u, f"{fmt_word(u)} has no generator representative")
    rels = [r for r in P.enumerate_relations(L) if r[0] != r[1]]
    relset = set(rels)
    has = lambda u, v: u == v or (u, v) in relset or P.has_relation(u, v)  # noqa: E731
    for u, v in rels:
        if not has(v, u):
            return BoundedVerdict("refuted", L, (v, u), "not symmetric")
    by_src = {}
    for u, v in rels:
        by_src.setdefault(u, []).append(v)
    for u, v in rels:
        for w in by_src.get(v, ()):
            if not has(u, w):
                return BoundedVerdict("refuted", L, (u, w), "not transitive")
    for u, v in rels:
        room = L - max(len(u), len(v))
        for k in range(1, room + 1):
            for ctx in words_up_to(P.gens, k, k):
                for cut in range(k + 1):
                    w, w2 = ctx[:cut], ctx[cut:]
                    if not has(w + u + w2, w + v + w2):
                        return BoundedVerdict("refuted", L, (w + u + w2, w + v + w2), "not closed under context")
    return BoundedVerdict("proved", L, None, f"pseudo-fibrant up to length {L}")


def _rep_name(u: Word, taken) -> str:
    return _fresh("[" + (".".join(u) if u else "1") + "]", taken)


@dataclass
class Replacement:
    presentation: Presentation
    trace: TietzeTrace
    decomposition: CellularDecomposition
    words_len: int
    close_len: int


def pseudo_fibrant_replacement(P: Presentation, L_words: int, L_close: int) -> Replacement:
    """Add a representative generator ``[u]`` with ``u -> [u]`` for each word ``u`` of
    length at most ``L_words`` over P's alphabet, then close the relations with
    sides at most ``L_close`` under symmetry, transitivity and one-letter
    contexts until nothing changes.  Every addition is a J pushout.
    """
    if not P.is_extensional:
        raise UnsupportedRepresentation("replacement needs explicit relations")
    steps = []
    cur = P
    taken = set(P.gens)
    for u in words_up_to(P.gens, L_words):
        name = _rep_name(u, taken)
        taken.add(name)
        steps.append(Tgen(u, name))
        cur = cur.with_generator(name, (u, (name,)))
    relset = {r for r in cur.relations if r[0] != r[1]}
    order = [r for r in cur.relations if r[0] != r[1]]

    def fits(r):
        return len(r[0]) <= L_close and len(r[1]) <= L_close

    def add(step, rel):
        nonlocal cur
        if rel[0] == rel[1] or rel in relset or not fits(rel):
            return False
        relset.add(rel)
        order.append(rel)
        steps.append(step)
        cur = cur.with_relations([rel])
        return True

    changed = True
    while changed:
        changed = False
        snapshot = [r for r in order if fits(r)]
        for r in snapshot:
            changed |= add(Tsym(r), (r[1], r[0]))
        by_src = {}
        for r in order:
            if fits(r):
                by_src.setdefault(r[0], []).append(r)
        for r1 in [r for r in order if fits(r)]:
            for r2 in list(by_src.get(r1[1], ())):
                changed |= add(Ttrans(r1, r2), (r1[0], r2[1]))
        for r in [r for r in order if fits(r)]:
            if max(len(r[0]), len(r[1])) >= L_close:
                continue
            for x in cur.gens:
                changed |= add(Tctxt(r, (x,), ()), ((x,) + r[0], (x,) + r[1]))
                changed |= add(Tctxt(r, (), (x,)), (r[0] + (x,), r[1] + (x,)))
    trace = TietzeTrace(P, steps)
    dec = CellularDecomposition(P, P, [], trace.end)
    cur2 = P
    for s in steps:
        j, attach = step_as_j_pushout(cur2, s)
        dec.cells.append((j, attach, s.a if isinstance(s, Tgen) else None))
        cur2, _ = j_pushout(j, attach, s.a if isinstance(s, Tgen) else None)
    return Replacement(trace.end, trace, dec, L_words, L_close)


# -------------------------------------------- factorization of squares


@dataclass(frozen=True)
class SurjFactorization:
    n: int
    word: Word
    equivalence: EquivalencePresentation
    f2: Morphism  # G^n -> P
    g2: Morphism  # E^{1,n} -> Q
    h: Morphism  # G^n -> E^{1,n}
    g1: Morphism  # G -> E^{1,n}

    def check(self, w: Morphism, b: str) -> None:
        if compose(self.g2, self.h) != compose(w, self.f2):
            raise ValidationError("right square does not commute")
        if compose(self.g2, self.g1).mapping != {"a": b}:
            raise ValidationError("bottom composite does not pick the generator")


def surj_factor(w: Morphism, b: str, budget: Budget | None = None, max_word: int = 3):
    """Factor the square picking generator ``b`` through ``G^n`` and ``E^{1,n}``."""
    budget = budget or Budget()
    P, Q = w.src, w.tgt
    Q.check_word((b,))
    for v in words_up_to(P.gens, max_word):
        res = equivalent(Q, (b,), word_map(w, v), budget)
        if not isinstance(res, Proved):
            continue
        ep = make_equivalence_presentation(res.derivation, Q)
        E = ep.presentation
        Gn = category.G(len(v))
        f2 = Morphism(Gn, P, dict(zip(Gn.gens, v)))
        h = Morphism(Gn, E, dict(zip(Gn.gens, ep.target_word)))
        g1 = Morphism(category.G(), E, {"a": "a1"})
        out = SurjFactorization(len(v), v, ep, f2, ep.factor, h, g1)
        out.check(w, b)
        return out
    return None


@dataclass(frozen=True)
class InjFactorization:
    source_equivalence: EquivalencePresentation  # E1, over P
    target_equivalence: EquivalencePresentation  # E^{m,n}, over Q
    E: Presentation  # pushout of E^{m,n} <- G^{m,n} -> E1
    f1: Morphism  # G^{m,n} -> E1
    f2: Morphism  # E1 -> P
    g1: Morphism  # E^{m,n} -> E
    g2: Morphism  # E -> Q


def inj_factor(w: Morphism, u: Word, v: Word, budget: Budget | None = None, target_derivation: Derivation | None = None):
    """Factor the square given by ``u, v`` and a target derivation ``w(u) ~ w(v)`` through a source derivation."""
    budget = budget or Budget()
    P, Q = w.src, w.tgt
    u, v = tuple(u), tuple(v)
    if target_derivation is None:
        res = equivalent(Q, word_map(w, u), word_map(w, v), budget)
        if not isinstance(res, Proved):
            return None
        target_derivation = res.derivation
    res = equivalent(P, u, v, budget)
    if not isinstance(res, Proved):
        return None
    E0 = make_equivalence_presentation(target_derivation, Q)
    E1 = make_equivalence_presentation(res.derivation, P)
    S, g1, h1 = category.pushout(E0.inclusion, E1.inclusion)
    g2map = {}
    for x in E0.presentation.gens:
        g2map[g1.mapping[x]] = E0.factor.mapping[x]
    for x in E1.presentation.gens:
        g2map[h1.mapping[x]] = w.mapping[E1.factor.mapping[x]]
    g2 = Morphism(S, Q, g2map)
    return InjFactorization(E1, E0, S, E1.inclusion, E1.factor, g1, g2)
