"""The congruence generated by a presentation.

Positive answers are :class:`Derivation` objects (chains of one-step
rewrites), negative answers are :class:`HomCertificate` objects (a monoid
homomorphism into a finite table that separates the two words).  Searches
are bounded by a :class:`Budget` and report :class:`Unknown` when it runs out.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from . import _kernels
from .core import (
    Presentation,
    Pullback,
    Word,
    fmt_relation,
    fmt_word,
    occurrences,
    shortlex_key,
)
from .errors import CertificateError, PreconditionError, UnsupportedRepresentation
from .monoids import MonoidTable, library

FWD, BWD = "fwd", "bwd"


@dataclass(frozen=True)
class Budget:
    max_expansions: int = 10_000
    max_len: int = 16
    max_size: int = 4
    kb_max_rules: int = 200
    kb_max_iterations: int = 10_000
    words_len: int = 2
    close_len: int = 2

    @classmethod
    def from_env(cls, **overrides) -> "Budget":
        b = cls()
        env = os.environ.get("TIETZE_BUDGET")
        if env:
            b = replace(b, max_expansions=int(env))
        return replace(b, **{k: v for k, v in overrides.items() if v is not None})

    def header(self) -> str:
        return (
            f"# budget expansions={self.max_expansions} max_len={self.max_len} "
            f"max_size={self.max_size} kb_rules={self.kb_max_rules} "
            f"kb_iterations={self.kb_max_iterations} words_len={self.words_len} close_len={self.close_len}"
        )


# ------------------------------------------------------------ derivations


@dataclass(frozen=True)
class DerivationStep:
    """Rewrite ``left·lhs·right`` to ``left·rhs·right`` (``fwd``) or back (``bwd``)."""

    left: Word
    lhs: Word
    rhs: Word
    direction: str
    right: Word

    @property
    def source(self) -> Word:
        return self.left + (self.lhs if self.direction == FWD else self.rhs) + self.right

    @property
    def target(self) -> Word:
        return self.left + (self.rhs if self.direction == FWD else self.lhs) + self.right

    def reversed(self) -> "DerivationStep":
        return replace(self, direction=BWD if self.direction == FWD else FWD)

    def in_context(self, w: Word, w2: Word) -> "DerivationStep":
        return replace(self, left=w + self.left, right=self.right + w2)

    def __str__(self):
        return (
            f"step {fmt_word(self.left)} | {fmt_word(self.lhs)} -> {fmt_word(self.rhs)} "
            f"| {fmt_word(self.right)} {self.direction}"
        )


@dataclass(frozen=True)
class Derivation:
    start: Word
    steps: tuple = ()

    @property
    def end(self) -> Word:
        return self.steps[-1].target if self.steps else self.start

    def __len__(self):
        return len(self.steps)

    def words(self) -> list:
        return [self.start] + [s.target for s in self.steps]

    def reversed(self) -> "Derivation":
        return Derivation(self.end, tuple(s.reversed() for s in reversed(self.steps)))

    def then(self, other: "Derivation") -> "Derivation":
        if other.start != self.end:
            raise CertificateError("derivations do not compose: endpoints differ")
        return Derivation(self.start, self.steps + other.steps)

    def in_context(self, w: Word, w2: Word) -> "Derivation":
        return Derivation(w + self.start + w2, tuple(s.in_context(w, w2) for s in self.steps))

    def replay(self, P: Presentation) -> Word:
        """Check every step against ``P``; return the end word."""
        cur = self.start
        for i, s in enumerate(self.steps):
            if s.source != cur:
                raise CertificateError(f"step {i} does not apply to {fmt_word(cur)}")
            if not P.has_relation(s.lhs, s.rhs):
                raise CertificateError(f"step {i} uses {fmt_relation((s.lhs, s.rhs))}, not a relation")
            cur = s.target
        return cur

    def relations_used(self) -> list:
        return list(dict.fromkeys((s.lhs, s.rhs) for s in self.steps))

    def __str__(self):
        lines = [f"start {fmt_word(self.start)}"] + [str(s) for s in self.steps]
        return "\n".join(lines)


# ------------------------------------------------------------ certificates


@dataclass(frozen=True)
class HomCertificate:
    """Generator assignment into ``target`` separating ``u`` and ``v``.

    For pullback presentations the assignment is induced by ``factor``, an
    assignment of the pullback target's generators.
    """

    target: MonoidTable
    assignment: tuple  # ((gen, element), ...)
    u: Word
    v: Word
    factor: tuple | None = None

    def value(self, w: Word) -> int:
        a = dict(self.assignment)
        return self.target.product(a[x] for x in w)

    def validate(self, P: Presentation) -> None:
        from .checker import check_hom_certificate

        check_hom_certificate(P, self)

    def __str__(self):
        body = ", ".join(f"{g}->{e}" for g, e in self.assignment)
        return f"hom into {self.target.name} (size {self.target.size}): {body}; {fmt_word(self.u)} != {fmt_word(self.v)}"


@dataclass(frozen=True)
class Proved:
    derivation: Derivation
    status = "proved"

    @property
    def certificate(self):
        return self.derivation


@dataclass(frozen=True)
class Refuted:
    certificate: object
    status = "refuted"


@dataclass(frozen=True)
class Unknown:
    expansions: int
    max_length: int
    exhausted: str
    status = "unknown"

    def __str__(self):
        return f"unknown: budget dimension '{self.exhausted}' exhausted after {self.expansions} expansions (longest word {self.max_length})"


Verdict = Proved | Refuted | Unknown


# ------------------------------------------------------------ word problem


def _relation_list(P: Presentation, max_len: int) -> list:
    if P.is_extensional:
        rels = P.relations
    else:
        rels = P.enumerate_relations(max_len)
    return [r for r in rels if r[0] != r[1]]


def neighbours(w: Word, rels: Sequence) -> Iterable:
    """One-step rewrites of ``w``: position-major, then relation order, fwd before bwd."""
    n = len(w)
    for i in range(n + 1):
        for lhs, rhs in rels:
            if w[i:i + len(lhs)] == lhs and i + len(lhs) <= n:
                yield DerivationStep(w[:i], lhs, rhs, FWD, w[i + len(lhs):])
            if w[i:i + len(rhs)] == rhs and i + len(rhs) <= n:
                yield DerivationStep(w[:i], lhs, rhs, BWD, w[i + len(rhs):])


def _bfs(rels, u: Word, v: Word, budget: Budget):
    """Bidirectional search; returns (Derivation | None, expansions, longest, pruned, closed)."""
    if u == v:
        return Derivation(u), 0, len(u), False, False
    parent = ({u: None}, {v: None})  # word -> step reaching it (from that side's root)
    frontier = [deque([u]), deque([v])]
    expansions, longest, pruned = 0, max(len(u), len(v)), False

    def path(side, w):
        steps = []
        while parent[side][w] is not None:
            s = parent[side][w]
            steps.append(s)
            w = s.source
        return steps[::-1]

    while frontier[0] and frontier[1]:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        level, frontier[side] = frontier[side], deque()
        for w in level:
            if expansions >= budget.max_expansions:
                return None, expansions, longest, pruned, False
            expansions += 1
            for step in neighbours(w, rels):
                x = step.target
                if x in parent[side]:
                    continue
                if len(x) > budget.max_len:
                    pruned = True
                    continue
                longest = max(longest, len(x))
                parent[side][x] = step
                if x in parent[1 - side]:
                    a = path(side, x)
                    b = path(1 - side, x)
                    if side == 0:
                        steps = a + [s.reversed() for s in reversed(b)]
                    else:
                        steps = b + [s.reversed() for s in reversed(a)]
                    return Derivation(u, tuple(steps)), expansions, longest, pruned, False
                frontier[side].append(x)
    return None, expansions, longest, pruned, not pruned


def _pullback_parts(P: Presentation):
    """(map, target) when P's relations are exactly a pullback with a surjective map."""
    if isinstance(P.rels, Pullback) and P.rels.target.is_extensional:
        q = P.rels._map
        if set(q.values()) == set(P.rels.target.gens) and P.rels.target.reflexive:
            return q, P.rels.target
    return None


def _lift_derivation(q: dict, d: Derivation, u: Word, v: Word) -> Derivation:
    """Lift a target derivation from q(u) to q(v) into the pullback along q."""
    section = {}
    for a, b in q.items():
        section.setdefault(b, a)
    steps, cur = [], u
    for s in d.steps:
        l, r = len(s.left), len(s.right)
        zl, zmid, zr = cur[:l], cur[l:len(cur) - r], cur[len(cur) - r:]
        if s.direction == FWD:
            new_mid = tuple(section[x] for x in s.rhs)
            step = DerivationStep(zl, zmid, new_mid, FWD, zr)
        else:
            new_mid = tuple(section[x] for x in s.lhs)
            step = DerivationStep(zl, new_mid, zmid, BWD, zr)
        steps.append(step)
        cur = step.target
    if cur != v:
        steps.append(DerivationStep((), cur, v, FWD, ()))
    return Derivation(u, tuple(steps))


def equivalent(P: Presentation, u: Word, v: Word, budget: Budget | None = None) -> Verdict:
    """Decide ``u ~ v`` within ``budget``: Proved, Refuted or Unknown."""
    budget = budget or Budget()
    u, v = tuple(u), tuple(v)
    P.check_word(u)
    P.check_word(v)
    if u == v:
        return Proved(Derivation(u))
    pb = _pullback_parts(P)
    if pb is not None:
        q, Q = pb
        qu, qv = tuple(q[x] for x in u), tuple(q[x] for x in v)
        inner = equivalent(Q, qu, qv, budget)
        if isinstance(inner, Proved):
            return Proved(_lift_derivation(q, inner.derivation, u, v))
        if isinstance(inner, Refuted):
            cert = _pull_certificate(P, q, inner.certificate, u, v)
            return Refuted(cert)
        return inner
    rels = _relation_list(P, budget.max_len)
    d, expansions, longest, pruned, closed = _bfs(rels, u, v, budget)
    if d is not None:
        return Proved(d)
    cert = separate(P, u, v, budget.max_size) if P.is_extensional else None
    if cert is not None:
        return Refuted(cert)
    if closed:
        dim = "max_size"  # the class of u is finite and explored; only a certificate is missing
    elif expansions >= budget.max_expansions:
        dim = "expansions"
    else:
        dim = "max_len"
    return Unknown(expansions, longest, dim)


def _pull_certificate(P, q, cert: HomCertificate, u, v) -> HomCertificate:
    a = dict(cert.assignment)
    return HomCertificate(cert.target, tuple((g, a[q[g]]) for g in P.gens), u, v, factor=cert.assignment)


def separate(
    P: Presentation,
    u: Word,
    v: Word,
    max_size: int = 4,
    tables: Sequence[MonoidTable] = (),
) -> HomCertificate | None:
    """First hom (library order, then lexicographic assignment) separating ``u`` and ``v``."""
    u, v = tuple(u), tuple(v)
    P.check_word(u)
    P.check_word(v)
    pb = _pullback_parts(P)
    if pb is not None:
        q, Q = pb
        inner = separate(Q, tuple(q[x] for x in u), tuple(q[x] for x in v), max_size, tables)
        return None if inner is None else _pull_certificate(P, q, inner, u, v)
    if not P.is_extensional:
        raise UnsupportedRepresentation("separate needs explicit relations")
    if u == v:
        return None
    idx = P.index
    rels = [(tuple(idx[x] for x in a), tuple(idx[x] for x in b)) for a, b in P.relations]
    ui, vi = [idx[x] for x in u], [idx[x] for x in v]
    candidates = [m for m in library() if m.size <= max_size] + list(tables)
    for M in candidates:
        hit = _kernels.first_separating_assignment(M.mul, M.unit, len(P.gens), rels, ui, vi)
        if hit is not None:
            values = _kernels.decode_assignment(hit, M.size, len(P.gens))
            cert = HomCertificate(M, tuple(zip(P.gens, values)), u, v)
            cert.validate(P)
            return cert
    return None


# ------------------------------------------------------------ rewriting


class RewriteSystem:
    """Oriented rules over an alphabet, shortlex-decreasing."""

    def __init__(self, alphabet: Sequence[str], rules: Iterable, convergent: bool = False):
        self.alphabet = tuple(alphabet)
        self.index = {g: i for i, g in enumerate(self.alphabet)}
        self.rules = tuple((tuple(l), tuple(r)) for l, r in rules)
        self.convergent = convergent

    def key(self, w: Word):
        return shortlex_key(w, self.index)

    def presentation(self, reflexive: bool = False) -> Presentation:
        return Presentation(self.alphabet, self.rules, reflexive)

    def _redex(self, w: Word):
        for i in range(len(w)):
            best = None
            for k, (l, r) in enumerate(self.rules):
                if l and w[i:i + len(l)] == l and (best is None or len(l) < len(self.rules[best][0])):
                    best = k
            if best is not None:
                return i, best
        return None

    def reduce(self, w: Word) -> Derivation:
        """Derivation from ``w`` to its irreducible form (fixed strategy)."""
        w = tuple(w)
        start, steps = w, []
        while True:
            hit = self._redex(w)
            if hit is None:
                return Derivation(start, tuple(steps))
            i, k = hit
            l, r = self.rules[k]
            s = DerivationStep(w[:i], l, r, FWD, w[i + len(l):])
            steps.append(s)
            w = s.target

    def is_irreducible(self, w: Word) -> bool:
        return self._redex(tuple(w)) is None

    def critical_pairs(self) -> list:
        """(word, one-step result A, one-step result B) for every overlap and inclusion."""
        out = []
        for i, (l1, r1) in enumerate(self.rules):
            for j, (l2, r2) in enumerate(self.rules):
                # inclusion: l2 occurs inside l1
                if i != j:
                    for p in occurrences(l1, l2):
                        out.append((l1, DerivationStep((), l1, r1, FWD, ()), DerivationStep(l1[:p], l2, r2, FWD, l1[p + len(l2):])))
                # proper overlap: suffix of l1 == prefix of l2
                for k in range(1, min(len(l1), len(l2))):
                    if l1[-k:] == l2[:k]:
                        w = l1 + l2[k:]
                        out.append((w, DerivationStep((), l1, r1, FWD, l2[k:]), DerivationStep(l1[:-k], l2, r2, FWD, ())))
        return out

    def check_confluent(self) -> bool:
        for _, s1, s2 in self.critical_pairs():
            if self.reduce(s1.target).end != self.reduce(s2.target).end:
                return False
        return True

    def __repr__(self):
        return f"RewriteSystem({[fmt_relation(r) for r in self.rules]}, convergent={self.convergent})"


def normal_form(R: RewriteSystem, w: Word) -> Word:
    if not R.convergent:
        raise PreconditionError("normal_form needs a convergent system")
    return R.reduce(w).end


def count_elements(R: RewriteSystem, L: int) -> int:
    """Irreducible words of length at most ``L`` (grown letter by letter; irreducibles are factor-closed)."""
    if not R.convergent:
        raise PreconditionError("count_elements needs a convergent system")
    lhss = [l for l, _ in R.rules]
    level, total = [()], 1
    for _ in range(L):
        nxt = []
        for w in level:
            for a in R.alphabet:
                x = w + (a,)
                if not any(len(l) <= len(x) and x[len(x) - len(l):] == l for l in lhss):
                    nxt.append(x)
        total += len(nxt)
        level = nxt
    return total


def knuth_bendix(P: Presentation, budget: Budget | None = None):
    """Complete ``P`` under shortlex (alphabet order).

    Returns ``(RewriteSystem, TietzeZigzag)`` or ``None`` when the rule or
    iteration budget runs out.  The zig-zag goes forward from ``P`` adding
    every rule ever created (each witnessed by its derivation), then back from
    the completed presentation adding the discarded rules and the original
    relations (witnessed by joining normal forms).
    """
    from .calculus import TietzeTrace, TietzeZigzag, Trel

    budget = budget or Budget()
    if not P.is_extensional:
        raise UnsupportedRepresentation("knuth_bendix needs explicit relations")
    index = P.index

    def key(w):
        return shortlex_key(w, index)

    history = []  # (lhs, rhs, derivation lhs ~ rhs over P + earlier history)
    active = []  # indices into history
    pending = deque(
        (l, r, Derivation(l, (DerivationStep((), l, r, FWD, ()),))) for l, r in P.relations if l != r
    )
    iterations = 0

    def system():
        return RewriteSystem(P.gens, [history[k][:2] for k in active])

    while True:
        while pending:
            iterations += 1
            if iterations > budget.kb_max_iterations:
                return None
            u, v, d = pending.popleft()
            R = system()
            du, dv = R.reduce(u), R.reduce(v)
            x, y = du.end, dv.end
            if x == y:
                continue
            # d' : x ~ y
            dd = du.reversed().then(d).then(dv)
            if key(x) < key(y):
                x, y, dd = y, x, dd.reversed()
            if len(history) >= budget.kb_max_rules:
                return None
            history.append((x, y, dd))
            new = len(history) - 1
            # interreduce the other active rules
            keep = []
            for k in active:
                l, r, dk = history[k]
                if any(True for _ in occurrences(l, x)):
                    pending.append((l, r, dk))
                    continue
                keep.append(k)
            active[:] = keep + [new]
            R = system()
            for pos, k in enumerate(active):
                l, r, dk = history[k]
                red = R.reduce(r)
                if red.steps:
                    history.append((l, red.end, dk.then(red)))
                    active[pos] = len(history) - 1
        R = system()
        joined = True
        for _, s1, s2 in R.critical_pairs():
            a, b = s1.target, s2.target
            if R.reduce(a).end != R.reduce(b).end:
                joined = False
                w = s1.source
                pending.append((a, b, Derivation(w, (s1,)).reversed().then(Derivation(w, (s2,)))))
        if joined:
            break

    R = RewriteSystem(P.gens, [history[k][:2] for k in active], convergent=True)
    C = R.presentation(P.reflexive)

    fwd_steps, cur = [], P
    for l, r, d in history:
        if not cur.has_relation(l, r):
            fwd_steps.append(Trel(l, r, d))
            cur = cur.with_relations([(l, r)])
    bwd_steps, cur2 = [], C
    for l, r in [h[:2] for h in history] + list(P.relations):
        if not cur2.has_relation(l, r):
            d = R.reduce(l).then(R.reduce(r).reversed())
            bwd_steps.append(Trel(l, r, d))
            cur2 = cur2.with_relations([(l, r)])
    segments = []
    if fwd_steps:
        segments.append(("forward", TietzeTrace(P, tuple(fwd_steps))))
    if bwd_steps:
        segments.append(("backward", TietzeTrace(C, tuple(bwd_steps))))
    return R, TietzeZigzag(P, C, tuple(segments))
