"""Elementary Tietze steps, traces, zig-zags and their categorical counterparts.

Every step only adds: a generator together with a defining relation, or a
relation.  Removal is expressed by running a trace backwards inside a
:class:`TietzeZigzag`.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .core import (
    Morphism,
    Presentation,
    Relation,
    Word,
    check_generator_name,
    fmt_relation,
    fmt_word,
    validate_morphism,
    word_map,
    words_up_to,
)
from .errors import CertificateError, FreshnessError, PreconditionError, ValidationError
from .rewriting import BWD, FWD, Budget, Derivation, DerivationStep, Proved, equivalent

# ------------------------------------------------------------------ steps


@dataclass(frozen=True)
class Tgen:
    """Add the generator ``a`` with the relation ``u -> a``."""

    u: Word
    a: str

    def __str__(self):
        return f"tgen {self.a} := {fmt_word(self.u)}"


@dataclass(frozen=True)
class Trel:
    """Add ``u -> v`` given a derivation ``u ~ v``."""

    u: Word
    v: Word
    witness: Derivation

    def __str__(self):
        return f"trel {fmt_word(self.u)} -> {fmt_word(self.v)}"


@dataclass(frozen=True)
class Trefl:
    u: Word

    def __str__(self):
        return f"trefl {fmt_word(self.u)}"


@dataclass(frozen=True)
class Tsym:
    """From ``u -> v`` add ``v -> u``."""

    rel: Relation

    def __str__(self):
        return f"tsym {fmt_relation(self.rel)}"


@dataclass(frozen=True)
class Ttrans:
    """From ``u -> v`` and ``v -> w`` add ``u -> w``."""

    r1: Relation
    r2: Relation

    def __str__(self):
        return f"ttrans ({fmt_relation(self.r1)}) ({fmt_relation(self.r2)})"


@dataclass(frozen=True)
class Tctxt:
    """From ``u -> v`` add ``w u w2 -> w v w2``."""

    rel: Relation
    w: Word
    w2: Word

    def __str__(self):
        return f"tctxt ({fmt_relation(self.rel)}) in {fmt_word(self.w)} _ {fmt_word(self.w2)}"


TietzeStep = Tgen | Trel | Trefl | Tsym | Ttrans | Tctxt


def _need(P: Presentation, rel: Relation, what: str):
    if not P.has_relation(tuple(rel[0]), tuple(rel[1])):
        raise ValidationError(f"{what}: {fmt_relation(rel)} is not a relation of the current presentation")


def added_relation(P: Presentation, s) -> Relation:
    """The relation a valid step adds (for Tgen, the defining relation)."""
    if isinstance(s, Tgen):
        return (tuple(s.u), (s.a,))
    if isinstance(s, Trel):
        return (tuple(s.u), tuple(s.v))
    if isinstance(s, Trefl):
        return (tuple(s.u), tuple(s.u))
    if isinstance(s, Tsym):
        return (tuple(s.rel[1]), tuple(s.rel[0]))
    if isinstance(s, Ttrans):
        return (tuple(s.r1[0]), tuple(s.r2[1]))
    if isinstance(s, Tctxt):
        return (tuple(s.w) + tuple(s.rel[0]) + tuple(s.w2), tuple(s.w) + tuple(s.rel[1]) + tuple(s.w2))
    raise TypeError(f"not a Tietze step: {s!r}")


def check_step(P: Presentation, s) -> None:
    if isinstance(s, Tgen):
        check_generator_name(s.a)
        if s.a in P.index:
            raise FreshnessError(f"generator {s.a!r} already present")
        P.check_word(tuple(s.u))
    elif isinstance(s, Trel):
        if s.witness is None:
            raise CertificateError("trel without a witness")
        if tuple(s.witness.start) != tuple(s.u) or tuple(s.witness.end) != tuple(s.v):
            raise CertificateError("witness endpoints differ from the added relation")
        P.check_word(tuple(s.u))
        P.check_word(tuple(s.v))
        s.witness.replay(P)
    elif isinstance(s, Trefl):
        P.check_word(tuple(s.u))
    elif isinstance(s, Tsym):
        _need(P, s.rel, "tsym")
    elif isinstance(s, Ttrans):
        if tuple(s.r1[1]) != tuple(s.r2[0]):
            raise ValidationError("ttrans relations do not share the middle word")
        _need(P, s.r1, "ttrans")
        _need(P, s.r2, "ttrans")
    elif isinstance(s, Tctxt):
        _need(P, s.rel, "tctxt")
        P.check_word(tuple(s.w))
        P.check_word(tuple(s.w2))
    else:
        raise TypeError(f"not a Tietze step: {s!r}")


def apply_step(P: Presentation, s) -> Presentation:
    """Validate ``s`` at ``P`` and return the enlarged presentation."""
    check_step(P, s)
    rel = added_relation(P, s)
    if isinstance(s, Tgen):
        return P.with_generator(s.a, rel)
    if P.has_relation(*rel):
        return P
    return P.with_relations([rel])


class TietzeTrace:
    """A validated sequence of steps from ``start``."""

    __slots__ = ("start", "steps", "presentations")

    def __init__(self, start: Presentation, steps=()):
        self.start = start
        self.steps = tuple(steps)
        pres = [start]
        for i, s in enumerate(self.steps):
            try:
                pres.append(apply_step(pres[-1], s))
            except (ValidationError, CertificateError, FreshnessError) as exc:
                raise type(exc)(f"step {i} ({s}): {exc}") from None
        self.presentations = tuple(pres)

    @property
    def end(self) -> Presentation:
        return self.presentations[-1]

    def kinds(self) -> list:
        return [type(s).__name__ for s in self.steps]

    def __len__(self):
        return len(self.steps)

    def __repr__(self):
        return f"TietzeTrace({self.start} -> {self.end}, {len(self.steps)} steps)"


def replay(trace: TietzeTrace) -> Presentation:
    return TietzeTrace(trace.start, trace.steps).end


class TietzeZigzag:
    """Segments ``(direction, trace)``; a backward trace runs from the later presentation to the earlier."""

    __slots__ = ("start", "end", "segments")

    def __init__(self, start: Presentation, end: Presentation, segments=()):
        self.start, self.end = start, end
        self.segments = tuple(segments)
        cur = start
        for k, (direction, tr) in enumerate(self.segments):
            if direction == "forward":
                if tr.start != cur:
                    raise ValidationError(f"segment {k} does not start where the zig-zag is")
                cur = tr.end
            elif direction == "backward":
                if tr.end != cur:
                    raise ValidationError(f"backward segment {k} does not end where the zig-zag is")
                cur = tr.start
            else:
                raise ValidationError(f"bad direction {direction!r}")
        if cur != end:
            raise ValidationError("zig-zag does not reach its declared end")

    def reversed(self) -> "TietzeZigzag":
        flip = {"forward": "backward", "backward": "forward"}
        return TietzeZigzag(self.end, self.start, [(flip[d], t) for d, t in reversed(self.segments)])

    def shape(self) -> list:
        return [(d, len(t)) for d, t in self.segments]

    def __len__(self):
        return sum(len(t) for _, t in self.segments)

    def __repr__(self):
        return f"TietzeZigzag({self.shape()})"


# ------------------------------------------------------------- expansion


def expand_trel(trace: TietzeTrace) -> TietzeTrace:
    """Replace every Trel by Tsym / Tctxt / Ttrans (or a single Trefl for an empty witness).

    The result may carry extra intermediate relations, so its end contains
    the original end's relations rather than equalling them.
    """
    out = []
    cur = trace.start
    for s in trace.steps:
        if not isinstance(s, Trel):
            out.append(s)
            cur = apply_step(cur, s)
            continue
        check_step(cur, s)
        d = s.witness
        if not d.steps:
            new = [Trefl(tuple(s.u))]
        else:
            new, chain = [], []
            for st in d.steps:
                base = (st.lhs, st.rhs)
                if st.direction == BWD:
                    new.append(Tsym(base))
                    base = (st.rhs, st.lhs)
                if st.left or st.right:
                    new.append(Tctxt(base, st.left, st.right))
                chain.append((st.source, st.target))
            acc = chain[0]
            for r in chain[1:]:
                new.append(Ttrans(acc, r))
                acc = (acc[0], r[1])
        for t in new:
            cur = apply_step(cur, t)
            out.append(t)
    return TietzeTrace(trace.start, out)


# -------------------------------------------------------------- J family

J_KINDS = ("gen", "refl", "sym", "trans", "ctxt")


@dataclass(frozen=True)
class JMorphism:
    """One of the five inclusions whose pushouts are the elementary steps.

    Generators are ``a1..ak``; ``u = a1..am``, ``v`` the next ``n``,
    ``w`` the next ``p`` and ``w2`` the next ``q``.
    """

    kind: str
    m: int
    n: int = 0
    p: int = 0
    q: int = 0
    reflexive: bool = True

    def __post_init__(self):
        if self.kind not in J_KINDS:
            raise ValidationError(f"unknown J family {self.kind!r}")

    def _letters(self, lo, k):
        return tuple(f"a{i}" for i in range(lo + 1, lo + k + 1))

    @property
    def u(self):
        return self._letters(0, self.m)

    @property
    def v(self):
        return self._letters(self.m, self.n)

    @property
    def w(self):
        return self._letters(self.m + self.n, self.p)

    @property
    def w2(self):
        return self._letters(self.m + self.n + self.p, self.q)

    @property
    def new_generator(self):
        return f"a{self.m + 1}" if self.kind == "gen" else None

    def _arity(self):
        return {"gen": self.m, "refl": self.m, "sym": self.m + self.n,
                "trans": self.m + self.n + self.p, "ctxt": self.m + self.n + self.p + self.q}[self.kind]

    @property
    def src(self) -> Presentation:
        gens = self._letters(0, self._arity())
        rels = {"gen": [], "refl": [], "sym": [(self.u, self.v)],
                "trans": [(self.u, self.v), (self.v, self.w)], "ctxt": [(self.u, self.v)]}[self.kind]
        return Presentation(gens, rels, self.reflexive)

    @property
    def added(self) -> Relation:
        u, v, w, w2 = self.u, self.v, self.w, self.w2
        return {"gen": (u, (self.new_generator or "",)), "refl": (u, u), "sym": (v, u),
                "trans": (u, w), "ctxt": (w + u + w2, w + v + w2)}[self.kind]

    @property
    def tgt(self) -> Presentation:
        S = self.src
        if self.kind == "gen":
            return S.with_generator(self.new_generator, self.added)
        return S.with_relations([self.added])

    @property
    def inclusion(self) -> Morphism:
        return Morphism(self.src, self.tgt, {g: g for g in self.src.gens})

    def step_for(self, attach: Morphism, fresh: str | None = None):
        f = attach.mapping
        img = lambda w: tuple(f[x] for x in w)  # noqa: E731
        u, v, w, w2 = img(self.u), img(self.v), img(self.w), img(self.w2)
        if self.kind == "gen":
            return Tgen(u, fresh)
        if self.kind == "refl":
            return Trefl(u)
        if self.kind == "sym":
            return Tsym((u, v))
        if self.kind == "trans":
            return Ttrans((u, v), (v, w))
        return Tctxt((u, v), w, w2)


def _fresh_name(P: Presentation, preferred=("b", "c", "d", "e")) -> str:
    for name in preferred:
        if name not in P.index:
            return name
    for i in itertools.count():
        if f"x{i}" not in P.index:
            return f"x{i}"


def j_pushout(j: JMorphism, attach: Morphism, fresh: str | None = None):
    """Pushout of ``j`` along ``attach`` as ``(presentation, step)``.

    The result keeps the names of ``attach.tgt``; the generator added by the
    first family is called ``fresh``.
    """
    if attach.src != j.src:
        raise ValidationError("attaching map does not start at the J source")
    chk = validate_morphism(attach)
    if not chk:
        raise ValidationError(f"attaching map is not a morphism (fails at {fmt_relation(chk.violation)})")
    P = attach.tgt
    if j.kind == "gen":
        fresh = fresh or _fresh_name(P)
    step = j.step_for(attach, fresh)
    if not P.reflexive:
        # images of the source relations must already be present
        for lhs, rhs in j.src.relations:
            x, y = word_map(attach, lhs), word_map(attach, rhs)
            if not P.has_relation(x, y):
                if isinstance(step, Tsym) and x == y:
                    step = Trefl(x)
                    break
                raise PreconditionError("degenerate attaching map into a non-reflexive presentation")
    return apply_step(P, step), step


def step_as_j_pushout(P: Presentation, s):
    """The J member and attaching map whose pushout is the step ``s`` at ``P``."""
    check_step(P, s)
    refl = P.reflexive

    def attach(j, *words):
        letters = [x for w in words for x in w]
        return Morphism(j.src, P, dict(zip(j.src.gens, letters)))

    if isinstance(s, Tgen):
        j = JMorphism("gen", len(s.u), reflexive=refl)
        return j, attach(j, s.u)
    if isinstance(s, Trefl):
        j = JMorphism("refl", len(s.u), reflexive=refl)
        return j, attach(j, s.u)
    if isinstance(s, Tsym):
        u, v = s.rel
        j = JMorphism("sym", len(u), len(v), reflexive=refl)
        return j, attach(j, u, v)
    if isinstance(s, Ttrans):
        (u, v), (_, w) = s.r1, s.r2
        j = JMorphism("trans", len(u), len(v), len(w), reflexive=refl)
        return j, attach(j, u, v, w)
    if isinstance(s, Tctxt):
        u, v = s.rel
        j = JMorphism("ctxt", len(u), len(v), len(s.w), len(s.w2), reflexive=refl)
        return j, attach(j, u, v, s.w, s.w2)
    raise PreconditionError("Trel is not a single J pushout; expand it first")


# ------------------------------------------------- equivalence presentations


@dataclass(frozen=True)
class EquivalencePresentation:
    """A derivation shape: boundary words ``a1..am`` and ``b1..bn`` linked by ``k`` relations.

    ``chain[i] = (u, v, v2, w, orientation)``: the i-th word ``u v w`` is
    rewritten to ``u v2 w`` using the relation ``v -> v2`` (``fwd``) or
    ``v2 -> v`` (``bwd``).
    """

    m: int
    n: int
    presentation: Presentation
    chain: tuple
    factor: Morphism | None = None

    @property
    def k(self) -> int:
        return len(self.chain)

    @property
    def source_word(self) -> Word:
        return tuple(f"a{i}" for i in range(1, self.m + 1))

    @property
    def target_word(self) -> Word:
        return tuple(f"b{i}" for i in range(1, self.n + 1))

    @property
    def inclusion(self) -> Morphism:
        from .category import G

        Gmn = G(self.m + self.n)
        images = self.source_word + self.target_word
        return Morphism(Gmn, self.presentation, dict(zip(Gmn.gens, images)))

    def check_boundary(self) -> None:
        c = self.chain
        if not c:
            raise ValidationError("an equivalence presentation needs at least one relation")
        if c[0][0] + c[0][1] + c[0][3] != self.source_word:
            raise ValidationError("first chain word is not a1..am")
        if c[-1][0] + c[-1][2] + c[-1][3] != self.target_word:
            raise ValidationError("last chain word is not b1..bn")
        for (u, v, v2, w, _), (u1, v1, _, w1, _) in zip(c, c[1:]):
            if u + v2 + w != u1 + v1 + w1:
                raise ValidationError("chain words do not glue")


def make_equivalence_presentation(d: Derivation, P: Presentation | None = None) -> EquivalencePresentation:
    """Encode ``d`` as an equivalence presentation (plus the factorization into ``P`` if given).

    Every letter occurrence becomes its own token: the start word's letters
    are ``a1..am``, each rewrite introduces fresh ``c`` tokens, and tokens of
    the final word are renamed ``b1..bn``.  When a start letter survives to
    the end, or ``d`` is empty, a final whole-word pair ``... -> b1..bn`` is
    appended (its image is a diagonal pair).
    """
    start = tuple(d.start)
    m = len(start)
    letter_of = {}
    cur = []
    for i, x in enumerate(start, 1):
        tok = f"a{i}"
        letter_of[tok] = x
        cur.append(tok)
    counter = itertools.count(1)
    raw = []  # (u, v, v2, w, orientation) over tokens
    for s in d.steps:
        l, r = len(s.left), len(s.right)
        u, v, w = tuple(cur[:l]), tuple(cur[l:len(cur) - r]), tuple(cur[len(cur) - r:])
        new_letters = s.rhs if s.direction == FWD else s.lhs
        v2 = []
        for x in new_letters:
            tok = f"c{next(counter)}"
            letter_of[tok] = x
            v2.append(tok)
        raw.append((u, v, tuple(v2), w, s.direction))
        cur = list(u) + v2 + list(w)
    final = tuple(cur)
    n = len(final)
    needs_pad = not raw or any(t.startswith("a") for t in final)
    rename = {}
    if needs_pad:
        bs = tuple(f"b{i}" for i in range(1, n + 1))
        for b, t in zip(bs, final):
            letter_of[b] = letter_of[t]
        raw.append(((), final, bs, (), FWD))
    else:
        rename = {t: f"b{i}" for i, t in enumerate(final, 1)}
        for t, b in rename.items():
            letter_of[b] = letter_of[t]
    # renumber the surviving c tokens by first appearance
    seen_c = []
    for u, v, v2, w, _ in raw:
        for t in u + v + v2 + w:
            if t.startswith("c") and t not in rename and t not in seen_c:
                seen_c.append(t)
    rename.update({t: f"c{i}" for i, t in enumerate(seen_c, 1)})
    rn = lambda ws: tuple(rename.get(t, t) for t in ws)  # noqa: E731
    chain = tuple((rn(u), rn(v), rn(v2), rn(w), o) for u, v, v2, w, o in raw)
    gens = [f"a{i}" for i in range(1, m + 1)] + [f"b{i}" for i in range(1, n + 1)] + [f"c{i}" for i in range(1, len(seen_c) + 1)]
    rels = [(v, v2) if o == FWD else (v2, v) for _, v, v2, _, o in chain]
    E = Presentation(gens, rels, P.reflexive if P is not None else False)
    factor = None
    if P is not None:
        letters = {rename.get(t, t): x for t, x in letter_of.items()}
        factor = Morphism(E, P, {g: letters[g] for g in gens})
    ep = EquivalencePresentation(m, n, E, chain, factor)
    ep.check_boundary()
    return ep


def derivation_from_factorization(ep: EquivalencePresentation, g: Morphism | None = None) -> Derivation:
    """Read the derivation ``g(a1..am) ~ g(b1..bn)`` off a morphism out of ``ep``."""
    g = g or ep.factor
    if g is None:
        raise PreconditionError("no factorization given")
    if g.src != ep.presentation:
        raise ValidationError("morphism does not start at the equivalence presentation")
    img = g.mapping
    im = lambda ws: tuple(img[t] for t in ws)  # noqa: E731
    steps = []
    for u, v, v2, w, o in ep.chain:
        if im(v) == im(v2):
            continue
        lhs, rhs = (im(v), im(v2)) if o == FWD else (im(v2), im(v))
        steps.append(DerivationStep(im(u), lhs, rhs, o, im(w)))
    return Derivation(im(ep.source_word), tuple(steps))


# ------------------------------------------------------- theorem-1 cospan


@dataclass(frozen=True)
class CospanResult:
    R: Presentation
    trace_p: TietzeTrace
    trace_q: TietzeTrace
    renaming: dict  # Q generator -> name used in R
    dict_pq: dict  # P generator -> Q word
    dict_qp: dict  # Q generator -> P word


def _map_word(d: dict, w: Word) -> Word:
    return tuple(x for a in w for x in d[a])


def _prove(P, u, v, budget) -> Derivation | None:
    res = equivalent(P, u, v, budget)
    return res.derivation if isinstance(res, Proved) else None


def _dictionary_ok(P, Q, dpq, dqp, budget):
    """Derivations for the four dictionary conditions, or None if one fails."""
    out = {"p_rel": [], "q_rel": [], "pqp": {}, "qpq": {}}
    for a in P.gens:
        d = _prove(P, _map_word(dqp, dpq[a]), (a,), budget)
        if d is None:
            return None
        out["pqp"][a] = d
    for b in Q.gens:
        d = _prove(Q, _map_word(dpq, dqp[b]), (b,), budget)
        if d is None:
            return None
        out["qpq"][b] = d
    for u, v in P.relations:
        d = _prove(Q, _map_word(dpq, u), _map_word(dpq, v), budget)
        if d is None:
            return None
        out["p_rel"].append(((u, v), d))
    for x, y in Q.relations:
        d = _prove(P, _map_word(dqp, x), _map_word(dqp, y), budget)
        if d is None:
            return None
        out["q_rel"].append(((x, y), d))
    return out


def find_dictionary(P, Q, partial=None, budget: Budget | None = None, max_word: int = 2, max_tries: int = 5000):
    """Search generator dictionaries both ways realizing an isomorphism of presented monoids.

    ``partial`` fixes some entries (keys from either side).  Missing entries
    default to the same-named generator, then range over words in shortlex
    order; the first combination whose four conditions are all proved wins.
    """
    budget = budget or Budget()
    partial = dict(partial or {})

    def options(gen, other):
        if gen in partial:
            return [tuple(partial[gen])]
        opts = [(gen,)] if gen in other.index else []
        opts += [w for w in words_up_to(other.gens, max_word) if w != (gen,)]
        return opts

    p_opts = [options(a, Q) for a in P.gens]
    q_opts = [options(b, P) for b in Q.gens]
    tries = 0
    for pchoice in itertools.product(*p_opts):
        for qchoice in itertools.product(*q_opts):
            tries += 1
            if tries > max_tries:
                return None
            dpq = dict(zip(P.gens, pchoice))
            dqp = dict(zip(Q.gens, qchoice))
            proofs = _dictionary_ok(P, Q, dpq, dqp, budget)
            if proofs is not None:
                return dpq, dqp, proofs
    return None


def theorem1_cospan(P: Presentation, Q: Presentation, dictionary=None, budget: Budget | None = None) -> CospanResult:
    """Tgen/Trel traces ``P ~> R <~ Q`` for presentations of isomorphic monoids.

    ``R`` has the generators of both sides (colliding names of ``Q`` get a
    prime), both relation sets, ``b^P -> b`` for every ``b`` of ``Q`` and
    ``a^Q -> a`` for every ``a`` of ``P``.
    """
    budget = budget or Budget()
    found = find_dictionary(P, Q, dictionary, budget)
    if found is None:
        raise PreconditionError("no dictionary found within the budget")
    dpq, dqp, proofs = found
    ren = {}
    for b in Q.gens:
        name = b
        while name in P.index or name in ren.values():
            name += "'"
        ren[b] = name
    Qr = Q.renamed(ren)
    r = lambda w: tuple(ren[x] for x in w)  # noqa: E731
    dpq_r = {a: r(w) for a, w in dpq.items()}  # P gen -> word over renamed Q
    dqp_r = {ren[b]: w for b, w in dqp.items()}  # renamed Q gen -> P word

    def unfold(w, defs, back=True):
        """Derivation rewriting each letter x of ``w`` into ``defs[x]`` via the relation defs[x] -> x."""
        steps, cur = [], tuple(w)
        pos = 0
        for x in w:
            body = defs[x]
            steps.append(DerivationStep(cur[:pos], body, (x,), BWD, cur[pos + 1:]))
            cur = cur[:pos] + body + cur[pos + 1:]
            pos += len(body)
        return Derivation(tuple(w), tuple(steps))

    # P side
    steps_p = [Tgen(dqp_r[ren[b]], ren[b]) for b in Q.gens]
    for a in P.gens:
        d = unfold(dpq_r[a], dqp_r).then(proofs["pqp"][a])
        steps_p.append(Trel(dpq_r[a], (a,), d))
    for (x, y), d in proofs["q_rel"]:
        dx = unfold(r(x), dqp_r)
        dy = unfold(r(y), dqp_r)
        steps_p.append(Trel(r(x), r(y), dx.then(d).then(dy.reversed())))
    trace_p = TietzeTrace(P, steps_p)

    # Q side
    rename_d = lambda d: Derivation(r(d.start), tuple(  # noqa: E731
        DerivationStep(r(s.left), r(s.lhs), r(s.rhs), s.direction, r(s.right)) for s in d.steps))
    steps_q = [Tgen(dpq_r[a], a) for a in P.gens]
    for b in Q.gens:
        d = unfold(dqp_r[ren[b]], dpq_r).then(rename_d(proofs["qpq"][b]))
        steps_q.append(Trel(dqp_r[ren[b]], (ren[b],), d))
    for (u, v), d in proofs["p_rel"]:
        du = unfold(u, dpq_r)
        dv = unfold(v, dpq_r)
        steps_q.append(Trel(u, v, du.then(rename_d(d)).then(dv.reversed())))
    trace_q = TietzeTrace(Qr, steps_q)
    if trace_p.end != trace_q.end:
        raise ValidationError("the two legs do not meet")
    return CospanResult(trace_p.end, trace_p, trace_q, ren, dpq, dqp)


def trace_dictionary(trace: TietzeTrace) -> dict:
    """Generator added by each Tgen step mapped to its defining word."""
    return {s.a: tuple(s.u) for s in trace.steps if isinstance(s, Tgen)}


# ---------------------------------------------------- equivalence search


def _successors(P: Presentation, fresh_names, max_len: int):
    """Add-only steps in a fixed order: Tgen, Tsym, Ttrans, Tctxt."""
    rels = [r for r in P.relations]
    for a in fresh_names:
        if a not in P.index:
            for u in words_up_to(P.gens, max_len):
                yield Tgen(u, a)
            break
    for r in rels:
        yield Tsym(r)
    for r1 in rels:
        for r2 in rels:
            if r1[1] == r2[0]:
                yield Ttrans(r1, r2)
    for r in rels:
        for x in P.gens:
            yield Tctxt(r, (x,), ())
            yield Tctxt(r, (), (x,))


def search_equivalence(P: Presentation, Q: Presentation, budget: Budget | None = None, max_len: int = 2):
    """Meet-in-the-middle search for ``P ~> M <~ Q`` over add-only steps.

    States are presentations compared as sets (so the endpoints come out
    exactly as given).  Tgen draws names from the other side's alphabet;
    contexts have total length at most 1 and relation sides at most
    ``max_len``.  Returns a zig-zag or ``None`` when the budget runs out.
    """
    budget = budget or Budget()
    if P == Q:
        return TietzeZigzag(P, Q, ())
    if not (P.is_extensional and Q.is_extensional):
        raise PreconditionError("search_equivalence needs explicit relations")
    names = (tuple(g for g in Q.gens if g not in P.index), tuple(g for g in P.gens if g not in Q.index))
    parent = ({P: None}, {Q: None})
    frontier = [deque([P]), deque([Q])]
    expansions = 0

    def path(side, S):
        steps = []
        while parent[side][S] is not None:
            prev, s = parent[side][S]
            steps.append(s)
            S = prev
        return steps[::-1]

    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        level, frontier[side] = frontier[side], deque()
        for S in level:
            if expansions >= budget.max_expansions:
                return None
            expansions += 1
            for s in _successors(S, names[side], max_len):
                rel = added_relation(S, s)
                if max(len(rel[0]), len(rel[1])) > max_len or S.has_relation(*rel):
                    continue
                try:
                    T = apply_step(S, s)
                except (ValidationError, FreshnessError):
                    continue
                if T in parent[side]:
                    continue
                parent[side][T] = (S, s)
                if T in parent[1 - side]:
                    fwd = path(0, T)
                    bwd = path(1, T)
                    segs = []
                    if fwd:
                        segs.append(("forward", TietzeTrace(P, fwd)))
                    if bwd:
                        segs.append(("backward", TietzeTrace(Q, bwd)))
                    return TietzeZigzag(P, Q, segs)
                frontier[side].append(T)
    return None
