"""Finite limits and colimits of presentations, and the standard small shapes."""

from __future__ import annotations

import itertools

from .core import Morphism, Presentation, Word, fmt_relation, validate_morphism, words_up_to
from .errors import DomainError, ValidationError

# ------------------------------------------------------------- shapes


def initial() -> Presentation:
    return Presentation((), (), reflexive=True)


def G(n: int | None = None) -> Presentation:
    """``G = <a | >``; ``G(n) = <a1..an | >``."""
    if n is None:
        return Presentation(("a",), (), reflexive=True)
    return Presentation([f"a{i}" for i in range(1, n + 1)], (), reflexive=True)


def R(m: int, n: int) -> Presentation:
    gens = [f"a{i}" for i in range(1, m + n + 1)]
    return Presentation(gens, [(tuple(gens[:m]), tuple(gens[m:]))], reflexive=True)


def g_inclusion() -> Morphism:
    return Morphism(initial(), G(), {})


def r_inclusion(m: int, n: int) -> Morphism:
    S, T = G(m + n), R(m, n)
    return Morphism(S, T, {g: g for g in S.gens})


def terminal_truncated(L: int) -> Presentation:
    """One generator ``a`` and every ``a^m -> a^n`` with ``m != n <= L``."""
    rels = [(("a",) * m, ("a",) * n) for m in range(L + 1) for n in range(L + 1) if m != n]
    return Presentation(("a",), rels, reflexive=True)


def to_terminal(P: Presentation, L: int) -> Morphism:
    return Morphism(P, terminal_truncated(L), {g: "a" for g in P.gens})


# ----------------------------------------------------- word representation


def word_as_morphism(u: Word, P: Presentation) -> Morphism:
    u = P.check_word(tuple(u))
    S = G(len(u))
    return Morphism(S, P, dict(zip(S.gens, u)))


def morphism_as_word(f: Morphism) -> Word:
    n = len(f.src.gens)
    if f.src != G(n):
        raise DomainError("source is not a discrete presentation G^n")
    return tuple(f.mapping[f"a{i}"] for i in range(1, n + 1))


def word_pair_as_morphism(u: Word, v: Word, P: Presentation) -> Morphism:
    return word_as_morphism(tuple(u) + tuple(v), P)


def morphism_as_word_pair(f: Morphism, m: int) -> tuple:
    w = morphism_as_word(f)
    if not 0 <= m <= len(w):
        raise DomainError(f"split point {m} out of range for a word of length {len(w)}")
    return w[:m], w[m:]


# ------------------------------------------------------------- colimits


def _flag(*ps: Presentation) -> bool:
    """Reflexive unless some non-empty input is not (the empty presentation is neutral)."""
    return all(p.reflexive for p in ps if p.gens)


def _check(*fs: Morphism):
    for f in fs:
        res = validate_morphism(f)
        if not res:
            raise ValidationError(f"not a morphism: fails at {fmt_relation(res.violation)}")


def coproduct(P: Presentation, Q: Presentation):
    """Disjoint union; colliding names get ``'0`` / ``'1`` suffixes."""
    clash = set(P.gens) & set(Q.gens)
    taken = (set(P.gens) | set(Q.gens)) - clash
    ren = ({}, {})
    for side, S in enumerate((P, Q)):
        for g in S.gens:
            if g in clash:
                name = f"{g}'{side}"
                while name in taken:
                    name += f"'{side}"
                taken.add(name)
                ren[side][g] = name
            else:
                ren[side][g] = g
    gens = [ren[0][g] for g in P.gens] + [ren[1][g] for g in Q.gens]
    rels = [tuple(tuple(ren[0][x] for x in w) for w in r) for r in P.relations]
    rels += [tuple(tuple(ren[1][x] for x in w) for w in r) for r in Q.relations]
    S = Presentation(gens, rels, _flag(P, Q))
    return S, Morphism(P, S, ren[0]), Morphism(Q, S, ren[1])


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def pushout(f: Morphism, g: Morphism):
    """Pushout of ``Q1 <-f- P -g-> Q2``; returns ``(S, h1, h2)``.

    A class containing generators of ``Q2`` is named after the first of
    them; other classes take the first ``Q1`` name, primed if taken.
    """
    if f.src != g.src:
        raise ValidationError("pushout legs must share their source")
    _check(f, g)
    Q1, Q2 = f.tgt, g.tgt
    nodes = [(1, x) for x in Q1.gens] + [(2, y) for y in Q2.gens]
    uf = _UnionFind(nodes)
    for a in f.src.gens:
        uf.union((1, f.mapping[a]), (2, g.mapping[a]))
    classes = {}
    for node in nodes:
        classes.setdefault(uf.find(node), []).append(node)
    name_of, used = {}, set()
    for members in classes.values():
        q2 = [y for s, y in members if s == 2]
        if q2:
            name_of[id(members)] = q2[0]
            used.add(q2[0])
    for members in classes.values():
        if id(members) in name_of:
            continue
        name = members[0][1]
        while name in used or name in Q2.index:
            name += "'"
        name_of[id(members)] = name
        used.add(name)
    node_name = {n: name_of[id(ms)] for ms in classes.values() for n in ms}
    gens = list(dict.fromkeys(node_name[n] for n in nodes))
    h1 = {x: node_name[(1, x)] for x in Q1.gens}
    h2 = {y: node_name[(2, y)] for y in Q2.gens}
    rels = [(tuple(h1[x] for x in u), tuple(h1[x] for x in v)) for u, v in Q1.relations]
    rels += [(tuple(h2[x] for x in u), tuple(h2[x] for x in v)) for u, v in Q2.relations]
    S = Presentation(gens, rels, _flag(Q1, Q2))
    return S, Morphism(Q1, S, h1), Morphism(Q2, S, h2)


def coequalizer(f: Morphism, g: Morphism):
    """Quotient of ``Q`` identifying ``f(a)`` with ``g(a)``; class names are the first in ``Q`` order."""
    if f.src != g.src or f.tgt != g.tgt:
        raise ValidationError("coequalizer needs parallel morphisms")
    _check(f, g)
    Q = f.tgt
    uf = _UnionFind(Q.gens)
    for a in f.src.gens:
        uf.union(f.mapping[a], g.mapping[a])
    rep = {}
    for x in Q.gens:
        rep.setdefault(uf.find(x), x)
    h = {x: rep[uf.find(x)] for x in Q.gens}
    gens = list(dict.fromkeys(h[x] for x in Q.gens))
    rels = [(tuple(h[x] for x in u), tuple(h[x] for x in v)) for u, v in Q.relations]
    S = Presentation(gens, rels, Q.reflexive)
    return S, Morphism(Q, S, h)


# ---------------------------------------------------------------- limits


def pair_name(a: str, b: str) -> str:
    return f"({a},{b})"


def product(P: Presentation, Q: Presentation, L: int | None = None):
    """Product with zipped relations; returns ``(S, pi1, pi2)``.

    A relation of one factor pairs with a diagonal member of the other only
    when both of its sides have that member's length, so pairing against
    the implicit diagonals is finite and the result is exact.  ``L`` is
    accepted for interface compatibility and unused.
    """
    gens = [pair_name(a, b) for a in P.gens for b in Q.gens]

    def zip_words(u, x):
        return tuple(pair_name(a, b) for a, b in zip(u, x))

    rels = []
    for u, v in P.relations:
        for x, y in Q.relations:
            if len(u) == len(x) and len(v) == len(y):
                rels.append((zip_words(u, x), zip_words(v, y)))
    if Q.reflexive:
        for u, v in P.relations:
            if len(u) == len(v):
                for x in words_up_to(Q.gens, len(u), len(u)):
                    rels.append((zip_words(u, x), zip_words(v, x)))
    if P.reflexive:
        for x, y in Q.relations:
            if len(x) == len(y):
                for u in words_up_to(P.gens, len(x), len(x)):
                    rels.append((zip_words(u, x), zip_words(u, y)))
    S = Presentation(gens, rels, P.reflexive and Q.reflexive)
    p1 = Morphism(S, P, {pair_name(a, b): a for a in P.gens for b in Q.gens})
    p2 = Morphism(S, Q, {pair_name(a, b): b for a in P.gens for b in Q.gens})
    return S, p1, p2


def equalizer(f: Morphism, g: Morphism):
    """Sub-presentation on generators where ``f`` and ``g`` agree; returns ``(S, inclusion)``."""
    if f.src != g.src or f.tgt != g.tgt:
        raise ValidationError("equalizer needs parallel morphisms")
    P = f.src
    keep = [a for a in P.gens if f.mapping[a] == g.mapping[a]]
    ks = set(keep)
    rels = [(u, v) for u, v in P.relations if set(u) <= ks and set(v) <= ks]
    S = Presentation(keep, rels, P.reflexive)
    return S, Morphism(S, P, {a: a for a in keep})


def is_mono(f: Morphism) -> bool:
    return f.is_injective


def is_epi(f: Morphism) -> bool:
    return f.is_surjective


def all_morphisms(P: Presentation, Q: Presentation, length_bound: int | None = None):
    """Every valid morphism ``P -> Q`` in lexicographic order of generator images."""
    for images in itertools.product(Q.gens, repeat=len(P.gens)):
        f = Morphism(P, Q, dict(zip(P.gens, images)))
        if validate_morphism(f, length_bound):
            yield f
