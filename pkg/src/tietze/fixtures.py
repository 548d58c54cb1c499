"""Named example presentations, traces and tasks."""

from __future__ import annotations

from .calculus import TietzeTrace, TietzeZigzag, Tctxt, Tgen, Tsym, Ttrans
from .core import Morphism, Presentation


def N() -> Presentation:
    return Presentation.parse("a")


def NxN() -> Presentation:
    return Presentation.parse("a b", ["a b -> b a"])


def Z2() -> Presentation:
    return Presentation.parse("a", ["a a -> 1"])


def Z() -> Presentation:
    return Presentation.parse("a b", ["a b -> 1", "b a -> 1"])


def n_pair():
    """``<a | >`` and ``<a, b | b -> bb, 1 -> bb>``, both presenting the naturals."""
    return N(), Presentation.parse("a b", ["b -> b b", "1 -> b b"])


def n_pair_zigzag() -> TietzeZigzag:
    """Four steps forward from ``<a | >`` and two backward from the second presentation."""
    P, Q = n_pair()
    fwd = TietzeTrace(P, [
        Tgen((), "b"),
        Tctxt(((), ("b",)), ("b",), ()),
        Ttrans(((), ("b",)), (("b",), ("b", "b"))),
        Tsym((("b",), ("b", "b"))),
    ])
    bwd = TietzeTrace(Q, [
        Tsym((("b",), ("b", "b"))),
        Ttrans(((), ("b", "b")), (("b", "b"), ("b",))),
    ])
    return TietzeZigzag(P, Q, [("forward", fwd), ("backward", bwd)])


def n_inclusion() -> Morphism:
    P, Q = n_pair()
    return Morphism(P.as_reflexive(), Q.as_reflexive(), {"a": "a"})


def chain_example() -> Morphism:
    """``aa -> bb -> cc -> dd`` included into the same plus ``aa -> dd``."""
    P = Presentation.parse("a b c d", ["a a -> b b", "b b -> c c", "c c -> d d"], reflexive=True)
    Q = P.with_relations([(("a", "a"), ("d", "d"))])
    return Morphism(P, Q, {g: g for g in P.gens})


def p_trunc(K: int) -> Presentation:
    """``a, b0..bK`` with ``a -> b_i`` and ``b_i -> b_{i+1}`` for ``i < K``."""
    gens = ["a"] + [f"b{i}" for i in range(K + 1)]
    rels = [(("a",), (f"b{i}",)) for i in range(K)] + [((f"b{i}",), (f"b{i + 1}",)) for i in range(K)]
    return Presentation(gens, rels)


def pinf_trunc(K: int) -> Presentation:
    """Only the chain ``b_i -> b_{i+1}``; ``a`` stays free."""
    gens = ["a"] + [f"b{i}" for i in range(K + 1)]
    return Presentation(gens, [((f"b{i}",), (f"b{i + 1}",)) for i in range(K)])


def corpus(K: int = 3) -> dict:
    P, Q = n_pair()
    return {
        "N": N(),
        "NxN": NxN(),
        "Z2": Z2(),
        "Z": Z(),
        "N-pair-left": P,
        "N-pair-right": Q,
        f"P-trunc({K})": p_trunc(K),
        f"Pinf-trunc({K})": pinf_trunc(K),
    }


def tasks(K: int = 3) -> list:
    """``(fixture, u, v, expected)`` where expected is ``proved`` or ``refuted``."""
    return [
        (f"P-trunc({K})", ("a",), ("b0",), "proved"),
        (f"Pinf-trunc({K})", ("a", "b0"), ("b0", "a"), "refuted"),
    ]
