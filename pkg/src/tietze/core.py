"""Words, relation sets, presentations and their morphisms.

Words are tuples of generator names; the empty tuple is the unit and is
written ``1`` in text.  A presentation holds a finite alphabet and a
:class:`RelSet`, which may be a finite set of pairs or an intensional
description (the implicit diagonal, or the pullback of another
presentation's relations along a generator map).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union as _U

from .errors import DomainError, UnsupportedRepresentation, ValidationError

Word = tuple
Relation = tuple  # (lhs Word, rhs Word)

UNIT = ()


# ---------------------------------------------------------------- words


# tokens with a fixed meaning in the text formats
RESERVED = frozenset({"1", "->", "|", "_", ":=", "in", "witness"})


def check_generator_name(name: str) -> str:
    if (not isinstance(name, str) or not name or name in RESERVED or name.startswith("#")
            or any(c.isspace() for c in name)):
        raise DomainError(f"invalid generator name {name!r}")
    return name


def word(spec: _U[str, Iterable[str]]) -> Word:
    """Build a word from ``"a b a"``, ``"1"``/``""`` or an iterable of names."""
    if isinstance(spec, str):
        parts = spec.split()
        if parts == ["1"]:
            return UNIT
        if "1" in parts:
            raise DomainError(f"unit '1' inside a non-empty word: {spec!r}")
        return tuple(parts)
    return tuple(spec)


def fmt_word(w: Word) -> str:
    return " ".join(w) if w else "1"


def fmt_relation(rel: Relation) -> str:
    return f"{fmt_word(rel[0])} -> {fmt_word(rel[1])}"


def words_up_to(alphabet: Sequence[str], max_len: int, min_len: int = 0) -> Iterator[Word]:
    """All words of length ``min_len..max_len`` in shortlex order."""
    for n in range(min_len, max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def shortlex_key(w: Word, index: Mapping[str, int]):
    return (len(w), tuple(index[x] for x in w))


def occurrences(w: Word, pattern: Word) -> Iterator[int]:
    """Start positions of ``pattern`` inside ``w`` (every position for the empty pattern)."""
    n, k = len(w), len(pattern)
    for i in range(n - k + 1):
        if w[i:i + k] == pattern:
            yield i


# ----------------------------------------------------------- relation sets


class RelSet:
    """A possibly infinite set of relations with decidable membership."""

    extensional = False

    def contains(self, u: Word, v: Word) -> bool:
        raise NotImplementedError

    def enumerate(self, alphabet: Sequence[str], max_len: int) -> list:
        """Members with both sides of length at most ``max_len``."""
        raise NotImplementedError

    def explicit(self) -> tuple:
        raise UnsupportedRepresentation(f"{type(self).__name__} relations are not extensional")


class Explicit(RelSet):
    extensional = True
    __slots__ = ("relations", "_set")

    def __init__(self, relations: Iterable[Relation] = ()):
        seen = {}
        for u, v in relations:
            seen.setdefault((tuple(u), tuple(v)), None)
        self.relations = tuple(seen)
        self._set = frozenset(self.relations)

    def contains(self, u, v):
        return (u, v) in self._set

    def enumerate(self, alphabet, max_len):
        return [r for r in self.relations if len(r[0]) <= max_len and len(r[1]) <= max_len]

    def explicit(self):
        return self.relations

    def extended(self, new) -> "Explicit":
        """Append relations known to be new and deduplicated."""
        out = Explicit.__new__(Explicit)
        out.relations = self.relations + tuple(new)
        out._set = self._set.union(new)
        return out

    def __eq__(self, other):
        return isinstance(other, Explicit) and self._set == other._set

    def __hash__(self):
        return hash(self._set)

    def __len__(self):
        return len(self.relations)

    def __repr__(self):
        return f"Explicit({[fmt_relation(r) for r in self.relations]})"


class Diagonal(RelSet):
    """Every pair ``u -> u``."""

    def contains(self, u, v):
        return u == v

    def enumerate(self, alphabet, max_len):
        return [(w, w) for w in words_up_to(alphabet, max_len)]

    def __eq__(self, other):
        return isinstance(other, Diagonal)

    def __hash__(self):
        return hash("Diagonal")

    def __repr__(self):
        return "Diagonal()"


class Pullback(RelSet):
    """All ``(u, v)`` whose images under ``mapping`` are related in ``target``.

    Equal images count as related when the target is read as a reflexive
    presentation, which is how every pullback built by this library is used.
    """

    __slots__ = ("mapping", "target", "_map")

    def __init__(self, mapping: Mapping[str, str], target: "Presentation"):
        self._map = dict(mapping)
        self.mapping = tuple(sorted(self._map.items()))
        self.target = target
        for b in self._map.values():
            if b not in target.index:
                raise DomainError(f"pullback map hits {b!r}, not a generator of the target")

    def image(self, w: Word) -> Word:
        try:
            return tuple(self._map[x] for x in w)
        except KeyError as exc:
            raise DomainError(f"letter {exc.args[0]!r} not in the pullback domain") from None

    def contains(self, u, v):
        return self.target.has_relation(self.image(u), self.image(v))

    def enumerate(self, alphabet, max_len):
        by_image = {}
        for w in words_up_to(alphabet, max_len):
            by_image.setdefault(self.image(w), []).append(w)
        images = list(by_image)
        out = []
        for x in images:
            for y in images:
                if self.target.has_relation(x, y):
                    out.extend((u, v) for u in by_image[x] for v in by_image[y])
        return out

    def __eq__(self, other):
        return isinstance(other, Pullback) and self.mapping == other.mapping and self.target == other.target

    def __hash__(self):
        return hash((self.mapping, self.target))

    def __repr__(self):
        return f"Pullback({dict(self.mapping)}, {self.target})"


class Union(RelSet):
    __slots__ = ("parts",)

    def __init__(self, parts: Iterable[RelSet]):
        flat = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, Union) else [p])
        self.parts = tuple(flat)

    @property
    def extensional(self):
        return all(isinstance(p, (Explicit, Diagonal)) for p in self.parts)

    def contains(self, u, v):
        return any(p.contains(u, v) for p in self.parts)

    def enumerate(self, alphabet, max_len):
        seen = {}
        for p in self.parts:
            for r in p.enumerate(alphabet, max_len):
                seen.setdefault(r, None)
        return list(seen)

    def explicit(self):
        if not self.extensional:
            raise UnsupportedRepresentation("union contains intensional parts")
        return tuple(r for p in self.parts if isinstance(p, Explicit) for r in p.relations)

    def __eq__(self, other):
        return isinstance(other, Union) and set(self.parts) == set(other.parts)

    def __hash__(self):
        return hash(frozenset(self.parts))

    def __repr__(self):
        return f"Union({list(self.parts)})"


# ------------------------------------------------------------ presentations


class Presentation:
    """A presentation ``<gens | rels>``.

    ``reflexive`` adds the diagonal implicitly; explicit ``u -> u`` pairs are
    then dropped.  Explicit relations keep their insertion order for display
    but equality is set equality, as for the underlying sets of generators
    and relations.
    """

    __slots__ = ("gens", "rels", "reflexive", "index")

    def __init__(self, gens: Iterable[str], rels: RelSet | Iterable[Relation] = (), reflexive: bool = False):
        gens = tuple(gens)
        for g in gens:
            check_generator_name(g)
        if len(set(gens)) != len(gens):
            raise ValidationError(f"duplicate generator names in {gens}")
        if not isinstance(rels, RelSet):
            rels = Explicit(rels)
        rels, reflexive = _normalize(rels, reflexive)
        index = {g: i for i, g in enumerate(gens)}
        for p in (rels.parts if isinstance(rels, Union) else (rels,)):
            if isinstance(p, Explicit):
                for u, v in p.relations:
                    for x in u + v:
                        if x not in index:
                            raise DomainError(f"relation {fmt_relation((u, v))} uses {x!r}, not a generator")
            elif isinstance(p, Pullback):
                if set(p._map) != set(gens):
                    raise ValidationError("pullback map must be total on the alphabet")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "rels", rels)
        object.__setattr__(self, "reflexive", bool(reflexive))
        object.__setattr__(self, "index", index)

    def __setattr__(self, name, value):
        raise AttributeError("Presentation is immutable")

    @classmethod
    def parse(cls, gens: str, rels: Iterable[str] = (), reflexive: bool = False) -> "Presentation":
        """``Presentation.parse("a b", ["a b -> b a"])``."""
        out = []
        for r in rels:
            lhs, sep, rhs = r.partition("->")
            if not sep:
                raise DomainError(f"relation {r!r} lacks '->'")
            out.append((word(lhs), word(rhs)))
        return cls(gens.split(), out, reflexive)

    # -- queries

    @property
    def is_extensional(self) -> bool:
        return self.rels.extensional

    @property
    def relations(self) -> tuple:
        """The explicit relations; raises for intensional relation sets."""
        return self.rels.explicit()

    def has_relation(self, u: Word, v: Word) -> bool:
        return (self.reflexive and u == v) or self.rels.contains(u, v)

    def enumerate_relations(self, max_len: int, diagonal: bool = False) -> list:
        rels = self.rels.enumerate(self.gens, max_len)
        if not diagonal:
            rels = [r for r in rels if r[0] != r[1] or not self.reflexive]
        elif self.reflexive:
            seen = dict.fromkeys(rels)
            seen.update(dict.fromkeys((w, w) for w in words_up_to(self.gens, max_len)))
            rels = list(seen)
        return rels

    def check_word(self, w: Word) -> Word:
        for x in w:
            if x not in self.index:
                raise DomainError(f"letter {x!r} is not a generator of {self}")
        return w

    def max_side(self) -> int:
        return max((max(len(u), len(v)) for u, v in self.relations), default=0)

    # -- building

    def with_generator(self, name: str, rel: Relation | None = None) -> "Presentation":
        rels = self._add_to(self.rels, [rel] if rel else [])
        return Presentation(self.gens + (name,), rels, self.reflexive)

    def with_relations(self, rels: Iterable[Relation]) -> "Presentation":
        rels = [(tuple(u), tuple(v)) for u, v in rels]
        if isinstance(self.rels, Explicit):
            # fast path: only the new relations need checking
            for u, v in rels:
                self.check_word(u)
                self.check_word(v)
            if self.reflexive:
                rels = [r for r in rels if r[0] != r[1]]
            new = [r for r in dict.fromkeys(rels) if not self.rels.contains(*r)]
            if not new:
                return self
            return Presentation._trusted(self.gens, self.rels.extended(new), self.reflexive, self.index)
        return Presentation(self.gens, self._add_to(self.rels, rels), self.reflexive)

    @classmethod
    def _trusted(cls, gens, rels, reflexive, index):
        P = object.__new__(cls)
        object.__setattr__(P, "gens", gens)
        object.__setattr__(P, "rels", rels)
        object.__setattr__(P, "reflexive", reflexive)
        object.__setattr__(P, "index", index)
        return P

    @staticmethod
    def _add_to(rels: RelSet, extra: list) -> RelSet:
        if not extra:
            return rels
        if isinstance(rels, Explicit):
            return Explicit(rels.relations + tuple(extra))
        if isinstance(rels, Union):
            parts = list(rels.parts)
            for i, p in enumerate(parts):
                if isinstance(p, Explicit):
                    parts[i] = Explicit(p.relations + tuple(extra))
                    return Union(parts)
            return Union(parts + [Explicit(extra)])
        return Union([rels, Explicit(extra)])

    def as_reflexive(self) -> "Presentation":
        return self if self.reflexive else Presentation(self.gens, self.rels, True)

    def renamed(self, mapping: Mapping[str, str]) -> "Presentation":
        """Rename generators (missing names are kept); extensional only."""
        m = {g: mapping.get(g, g) for g in self.gens}
        rels = [(tuple(m[x] for x in u), tuple(m[x] for x in v)) for u, v in self.relations]
        return Presentation([m[g] for g in self.gens], rels, self.reflexive)

    # -- dunder

    def __eq__(self, other):
        return (
            isinstance(other, Presentation)
            and set(self.gens) == set(other.gens)
            and self.reflexive == other.reflexive
            and self.rels == other.rels
        )

    def __hash__(self):
        return hash((frozenset(self.gens), self.rels, self.reflexive))

    def __repr__(self):
        if isinstance(self.rels, Explicit):
            body = ", ".join(fmt_relation(r) for r in self.rels.relations)
        else:
            body = repr(self.rels)
        tag = " (refl)" if self.reflexive else ""
        return f"<{' '.join(self.gens)} | {body}>{tag}"


def _normalize(rels: RelSet, reflexive: bool):
    if isinstance(rels, Diagonal):
        return Explicit(), True
    if isinstance(rels, Union):
        parts = [p for p in rels.parts if not isinstance(p, Diagonal)]
        reflexive = reflexive or len(parts) != len(rels.parts)
        explicit = [r for p in parts if isinstance(p, Explicit) for r in p.relations]
        others = [p for p in parts if not isinstance(p, Explicit)]
        if not others:
            rels = Explicit(explicit)
        else:
            rels = Union(others + ([Explicit(explicit)] if explicit else []))
            if len(rels.parts) == 1:
                rels = rels.parts[0]
    if reflexive:
        if isinstance(rels, Explicit):
            rels = Explicit(r for r in rels.relations if r[0] != r[1])
        elif isinstance(rels, Union):
            rels = Union(Explicit(r for r in p.relations if r[0] != r[1]) if isinstance(p, Explicit) else p
                         for p in rels.parts)
    return rels, reflexive


EMPTY = Presentation(())


# ---------------------------------------------------------------- morphisms


class Morphism:
    """A generator map ``src -> tgt``; see :func:`validate_morphism` for the law."""

    __slots__ = ("src", "tgt", "mapping")

    def __init__(self, src: Presentation, tgt: Presentation, mapping: Mapping[str, str]):
        mapping = dict(mapping)
        if set(mapping) != set(src.gens):
            missing = set(src.gens) - set(mapping)
            extra = set(mapping) - set(src.gens)
            raise ValidationError(f"generator map not total/exact: missing {sorted(missing)}, extra {sorted(extra)}")
        for a, b in mapping.items():
            if b not in tgt.index:
                raise DomainError(f"{a!r} maps to {b!r}, not a generator of the target")
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "tgt", tgt)
        object.__setattr__(self, "mapping", {g: mapping[g] for g in src.gens})

    def __setattr__(self, name, value):
        raise AttributeError("Morphism is immutable")

    def __call__(self, w: Word) -> Word:
        return word_map(self, w)

    def then(self, g: "Morphism") -> "Morphism":
        """Diagrammatic composite ``g . self``."""
        return compose(g, self)

    @property
    def is_injective(self) -> bool:
        return len(set(self.mapping.values())) == len(self.mapping)

    @property
    def is_surjective(self) -> bool:
        return set(self.mapping.values()) == set(self.tgt.gens)

    def __eq__(self, other):
        return (
            isinstance(other, Morphism)
            and self.src == other.src
            and self.tgt == other.tgt
            and self.mapping == other.mapping
        )

    def __hash__(self):
        return hash((self.src, self.tgt, tuple(sorted(self.mapping.items()))))

    def __repr__(self):
        body = ", ".join(f"{a}->{b}" for a, b in self.mapping.items())
        return f"Morphism({self.src} => {self.tgt}: {body})"


def word_map(f: Morphism, u: Word) -> Word:
    try:
        return tuple(f.mapping[x] for x in u)
    except KeyError as exc:
        raise DomainError(f"letter {exc.args[0]!r} is outside the source alphabet") from None


def identity(P: Presentation) -> Morphism:
    return Morphism(P, P, {g: g for g in P.gens})


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g . f`` (first ``f``, then ``g``)."""
    if f.tgt != g.src:
        raise ValidationError("cannot compose: codomain and domain differ")
    return Morphism(f.src, g.tgt, {a: g.mapping[b] for a, b in f.mapping.items()})


@dataclass(frozen=True)
class MorphismCheck:
    ok: bool
    violation: Relation | None = None
    image: Relation | None = None

    def __bool__(self):
        return self.ok


def validate_morphism(f: Morphism, length_bound: int | None = None) -> MorphismCheck:
    """Check ``f*(u) -> f*(v)`` is a target relation or ``f*(u) = f*(v)``.

    Explicit sources are checked completely (the diagonal always maps to
    equal words); intensional sources are checked up to ``length_bound``.
    """
    if f.src.is_extensional:
        rels = f.src.relations
        if length_bound is not None:
            rels = [r for r in rels if len(r[0]) <= length_bound and len(r[1]) <= length_bound]
    else:
        rels = f.src.enumerate_relations(3 if length_bound is None else length_bound)
    for u, v in rels:
        x, y = word_map(f, u), word_map(f, v)
        if x != y and not f.tgt.has_relation(x, y):
            return MorphismCheck(False, (u, v), (x, y))
    return MorphismCheck(True)


def checked(f: Morphism, length_bound: int | None = None) -> Morphism:
    res = validate_morphism(f, length_bound)
    if not res:
        raise ValidationError(
            f"morphism law fails at {fmt_relation(res.violation)} (image {fmt_relation(res.image)})"
        )
    return f


def is_subpresentation(f: Morphism) -> bool:
    return f.is_injective and bool(validate_morphism(f))


# ------------------------------------------------------ standard presentation


def std_presentation_truncated(table, max_len: int) -> Presentation:
    """All equal-product pairs of words of length at most ``max_len``.

    Generators are the element names of the monoid ``table``; the result is
    reflexive so diagonal pairs are left implicit.
    """
    from .monoids import MonoidTable
    from . import _kernels

    if not isinstance(table, MonoidTable):
        table = MonoidTable.from_rows(table)
    names = table.names
    words = list(words_up_to(range(table.size), max_len))
    prods = _kernels.eval_words(table.mul, table.unit, *_kernels.pack_words(words))
    by_value = {}
    for w, p in zip(words, prods):
        by_value.setdefault(int(p), []).append(tuple(names[i] for i in w))
    rels = []
    for cls in by_value.values():
        for u in cls:
            for v in cls:
                if u != v:
                    rels.append((u, v))
    rels.sort(key=lambda r: (len(r[0]), r[0], len(r[1]), r[1]))
    return Presentation(names, rels, reflexive=True)


# --------------------------------------------------------- canonical forms

_PERMUTATION_CAP = 50_000


def canonical_renaming(P: Presentation) -> dict:
    """Generator renaming to ``g0, g1, ...`` making the relation set minimal.

    Generators are first split by an iterated structural colouring; ties
    are then broken by trying every order inside each colour class and
    keeping the lexicographically least sorted relation list.  Above
    ``_PERMUTATION_CAP`` orderings the remaining ties fall back to name
    order, so the form is only renaming-invariant below that cap.
    """
    if not isinstance(P.rels, Explicit):
        if not P.is_extensional:
            raise UnsupportedRepresentation("canonical_form needs explicit relations")
    rels = P.relations
    colour = _refine_colours(P.gens, rels)
    classes = {}
    for g in sorted(P.gens):
        classes.setdefault(colour[g], []).append(g)
    ordered = [classes[c] for c in sorted(classes)]
    used = {x for u, v in rels for x in u + v}

    # interchangeable generators (no occurrences) need no search
    choices = []
    total = 1
    for cls in ordered:
        active = [g for g in cls if g in used]
        idle = [g for g in cls if g not in used]
        choices.append((active, idle))
        total *= math.factorial(len(active))

    def assignment(perms):
        out, k = {}, 0
        for (active, idle), perm in zip(choices, perms):
            for g in list(perm) + idle:
                out[g] = k
                k += 1
        return out

    def encode(index):
        return sorted((tuple(index[x] for x in u), tuple(index[x] for x in v)) for u, v in rels)

    if total > _PERMUTATION_CAP:
        best = assignment([a for a, _ in choices])
    else:
        best, best_code = None, None
        for perms in itertools.product(*(itertools.permutations(a) for a, _ in choices)):
            index = assignment(perms)
            code = encode(index)
            if best_code is None or code < best_code:
                best, best_code = index, code
    return {g: f"g{i}" for g, i in best.items()}


def _refine_colours(gens, rels):
    colour = {g: 0 for g in gens}
    n_classes = 1
    while True:
        sig = {g: [] for g in gens}
        for ri, (u, v) in enumerate(rels):
            shape = (tuple(colour[x] for x in u), tuple(colour[x] for x in v))
            for side, w in ((0, u), (1, v)):
                for pos, x in enumerate(w):
                    sig[x].append((shape, side, pos))
        keyed = {g: (colour[g], tuple(sorted(sig[g]))) for g in gens}
        ranks = {k: i for i, k in enumerate(sorted(set(keyed.values())))}
        new = {g: ranks[keyed[g]] for g in gens}
        if len(ranks) == n_classes:
            return new
        colour, n_classes = new, len(ranks)


def canonical_form(P: Presentation) -> Presentation:
    """Renaming-invariant normal form; idempotent."""
    if not P.is_extensional:
        raise UnsupportedRepresentation("canonical_form needs explicit relations")
    ren = canonical_renaming(P)
    gens = sorted(ren.values(), key=lambda s: int(s[1:]))
    rels = sorted(
        ((tuple(ren[x] for x in u), tuple(ren[x] for x in v)) for u, v in P.relations),
        key=lambda r: (tuple(int(x[1:]) for x in r[0]), tuple(int(x[1:]) for x in r[1])),
    )
    return Presentation(gens, rels, P.reflexive)
