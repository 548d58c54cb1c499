"""Finite monoids given by multiplication tables, and a small built-in library."""

from __future__ import annotations

import functools
import itertools
from typing import Sequence

import numpy as np

from .errors import InvalidMonoidError


class MonoidTable:
    """A finite monoid on ``0..size-1`` with ``mul[i, j] = i * j``."""

    __slots__ = ("name", "mul", "unit", "names")

    def __init__(self, mul, unit: int = 0, names: Sequence[str] | None = None, name: str = "M"):
        mul = np.asarray(mul, dtype=np.int64)
        if mul.ndim != 2 or mul.shape[0] != mul.shape[1] or mul.shape[0] == 0:
            raise InvalidMonoidError(f"multiplication table must be a non-empty square, got shape {mul.shape}")
        n = mul.shape[0]
        if mul.min() < 0 or mul.max() >= n:
            raise InvalidMonoidError("table entries out of range")
        if not 0 <= unit < n:
            raise InvalidMonoidError(f"unit index {unit} out of range")
        r = np.arange(n)
        if not (np.array_equal(mul[unit], r) and np.array_equal(mul[:, unit], r)):
            raise InvalidMonoidError(f"element {unit} is not a two-sided unit")
        # (ab)c == a(bc) for all triples, vectorised
        left = mul[mul[:, :, None], r[None, None, :]]
        right = mul[r[:, None, None], mul[None, :, :]]
        if not np.array_equal(left, right):
            a, b, c = map(int, np.argwhere(left != right)[0])
            raise InvalidMonoidError(f"not associative at ({a},{b},{c})")
        mul.setflags(write=False)
        self.mul = mul
        self.unit = int(unit)
        self.name = name
        self.names = tuple(names) if names is not None else tuple(f"e{i}" for i in range(n))
        if len(self.names) != n:
            raise InvalidMonoidError("one name per element required")

    @classmethod
    def from_rows(cls, rows, unit: int = 0, **kw) -> "MonoidTable":
        return cls(np.array(rows), unit, **kw)

    @property
    def size(self) -> int:
        return self.mul.shape[0]

    def product(self, elems) -> int:
        acc = self.unit
        for e in elems:
            acc = int(self.mul[acc, e])
        return acc

    @property
    def is_commutative(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def __eq__(self, other):
        return isinstance(other, MonoidTable) and self.unit == other.unit and np.array_equal(self.mul, other.mul)

    def __hash__(self):
        return hash((self.unit, self.mul.tobytes()))

    def __repr__(self):
        return f"MonoidTable({self.name}, size={self.size})"


def _canonical_bytes(mul: np.ndarray) -> bytes:
    """Least relabelling (unit fixed at 0) of a table, for isomorphism dedup."""
    n = mul.shape[0]
    best = None
    for perm in itertools.permutations(range(1, n)):
        p = np.array((0,) + perm)
        inv = np.argsort(p)
        code = p[mul[inv][:, inv]].tobytes()
        if best is None or code < best:
            best = code
    return best


def _enumerate(n: int) -> list:
    """All monoids of order ``n`` up to isomorphism, with unit 0."""
    if n == 1:
        return [np.zeros((1, 1), dtype=np.int64)]
    cells = [(i, j) for i in range(1, n) for j in range(1, n)]
    seen, out = set(), []
    for values in itertools.product(range(n), repeat=len(cells)):
        mul = np.empty((n, n), dtype=np.int64)
        mul[0] = np.arange(n)
        mul[:, 0] = np.arange(n)
        for (i, j), v in zip(cells, values):
            mul[i, j] = v
        try:
            MonoidTable(mul)
        except InvalidMonoidError:
            continue
        key = _canonical_bytes(mul)
        if key not in seen:
            seen.add(key)
            out.append(mul)
    return out


def transformation_monoid_2() -> MonoidTable:
    """All maps {0,1} -> {0,1} under composition (apply left factor first).

    Elements: 0 = identity, 1 = swap, 2 = const 0, 3 = const 1.
    """
    maps = [(0, 1), (1, 0), (0, 0), (1, 1)]
    idx = {m: i for i, m in enumerate(maps)}
    mul = [[idx[tuple(g[f[x]] for x in (0, 1))] for g in maps] for f in maps]
    return MonoidTable(mul, 0, names=("id", "swap", "c0", "c1"), name="T2")


@functools.lru_cache(maxsize=None)
def library() -> tuple:
    """Every monoid of order at most 3 up to isomorphism, then T2; ordered by size."""
    out = []
    for n in (1, 2, 3):
        for k, mul in enumerate(_enumerate(n)):
            out.append(MonoidTable(mul, 0, name=f"M{n}.{k}"))
    out.append(transformation_monoid_2())
    return tuple(out)


def cyclic(n: int) -> MonoidTable:
    r = np.arange(n)
    return MonoidTable((r[:, None] + r[None, :]) % n, 0, name=f"Z{n}")
