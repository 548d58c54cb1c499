"""Numeric kernels for finite-monoid evaluation.

Two interchangeable backends: numba-compiled loops and vectorised numpy.
Set ``TIETZE_KERNELS=numpy`` (or ``TIETZE_NO_NUMBA=1``) to force numpy; the
numba path is used when the package imports and the flag is unset.
Words cross this boundary as flat int64 arrays plus offsets.
"""

from __future__ import annotations

import os

import numpy as np


def _want_numba() -> bool:
    if os.environ.get("TIETZE_NO_NUMBA", "") not in ("", "0"):
        return False
    return os.environ.get("TIETZE_KERNELS", "numba").lower() != "numpy"


try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA and _want_numba() else "numpy"


def set_backend(name: str) -> None:
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    BACKEND = name


def pack_words(words) -> tuple:
    """Flatten integer words into ``(flat, offsets)`` with ``len(offsets) == len(words) + 1``."""
    lengths = np.fromiter((len(w) for w in words), dtype=np.int64, count=len(words))
    offsets = np.zeros(len(words) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    flat = np.fromiter((x for w in words for x in w), dtype=np.int64, count=int(offsets[-1]))
    return flat, offsets


# ------------------------------------------------------------- numpy path


def _eval_words_np(mul, unit, flat, offsets):
    n = len(offsets) - 1
    lengths = np.diff(offsets)
    acc = np.full(n, unit, dtype=np.int64)
    for k in range(int(lengths.max(initial=0))):
        live = lengths > k
        acc[live] = mul[acc[live], flat[offsets[:-1][live] + k]]
    return acc


def _assignments(size, n_gens, start, stop):
    """Rows ``start..stop`` of the lexicographic assignment table (first generator slowest)."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(idx), n_gens), dtype=np.int64)
    for g in range(n_gens - 1, -1, -1):
        out[:, g] = idx % size
        idx //= size
    return out


def _eval_under_np(mul, unit, assign, flat, lo, hi):
    acc = np.full(assign.shape[0], unit, dtype=np.int64)
    for k in range(lo, hi):
        acc = mul[acc, assign[:, flat[k]]]
    return acc


def _first_separating_np(mul, unit, n_gens, rel_flat, rel_off, u, v, chunk=1 << 14):
    size = mul.shape[0]
    total = size ** n_gens
    uf = np.asarray(u, dtype=np.int64)
    vf = np.asarray(v, dtype=np.int64)
    n_rel = (len(rel_off) - 1) // 2
    for start in range(0, total, chunk):
        A = _assignments(size, n_gens, start, min(total, start + chunk))
        ok = _eval_under_np(mul, unit, A, uf, 0, len(uf)) != _eval_under_np(mul, unit, A, vf, 0, len(vf))
        for r in range(n_rel):
            if not ok.any():
                break
            lhs = _eval_under_np(mul, unit, A, rel_flat, rel_off[2 * r], rel_off[2 * r + 1])
            rhs = _eval_under_np(mul, unit, A, rel_flat, rel_off[2 * r + 1], rel_off[2 * r + 2])
            ok &= lhs == rhs
        hits = np.flatnonzero(ok)
        if len(hits):
            return start + int(hits[0])
    return -1


# ------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _eval_words_nb(mul, unit, flat, offsets):
        n = len(offsets) - 1
        out = np.empty(n, dtype=np.int64)
        for i in range(n):
            acc = unit
            for k in range(offsets[i], offsets[i + 1]):
                acc = mul[acc, flat[k]]
            out[i] = acc
        return out

    @numba.njit(cache=True)
    def _eval_seg(mul, unit, assign, flat, lo, hi):
        acc = unit
        for k in range(lo, hi):
            acc = mul[acc, assign[flat[k]]]
        return acc

    @numba.njit(cache=True)
    def _first_separating_nb(mul, unit, n_gens, rel_flat, rel_off, u, v):
        size = mul.shape[0]
        total = 1
        for _ in range(n_gens):
            total *= size
        assign = np.zeros(n_gens, dtype=np.int64)
        n_rel = (len(rel_off) - 1) // 2
        for idx in range(total):
            rem = idx
            for g in range(n_gens - 1, -1, -1):
                assign[g] = rem % size
                rem //= size
            if _eval_seg(mul, unit, assign, u, 0, len(u)) == _eval_seg(mul, unit, assign, v, 0, len(v)):
                continue
            good = True
            for r in range(n_rel):
                a = _eval_seg(mul, unit, assign, rel_flat, rel_off[2 * r], rel_off[2 * r + 1])
                b = _eval_seg(mul, unit, assign, rel_flat, rel_off[2 * r + 1], rel_off[2 * r + 2])
                if a != b:
                    good = False
                    break
            if good:
                return idx
        return -1


# ------------------------------------------------------------- dispatch


def eval_words(mul, unit, flat, offsets) -> np.ndarray:
    """Product in the monoid of every packed word (letters are element indices)."""
    mul = np.ascontiguousarray(mul, dtype=np.int64)
    if BACKEND == "numba":
        return _eval_words_nb(mul, np.int64(unit), flat, offsets)
    return _eval_words_np(mul, unit, flat, offsets)


def first_separating_assignment(mul, unit, n_gens, relations, u, v):
    """Index of the first assignment (lexicographic, first generator slowest)
    satisfying every relation and separating ``u`` from ``v``; ``None`` if none.

    Words here are tuples of generator indices.
    """
    mul = np.ascontiguousarray(mul, dtype=np.int64)
    sides = [w for rel in relations for w in rel]
    rel_flat, rel_off = pack_words(sides) if sides else (np.zeros(0, np.int64), np.zeros(1, np.int64))
    u = np.asarray(u, dtype=np.int64).reshape(-1)
    v = np.asarray(v, dtype=np.int64).reshape(-1)
    if n_gens == 0:
        # only the empty word exists, nothing to separate
        return None
    if BACKEND == "numba":
        idx = _first_separating_nb(mul, np.int64(unit), n_gens, rel_flat, rel_off, u, v)
    else:
        idx = _first_separating_np(mul, unit, n_gens, rel_flat, rel_off, u, v)
    return None if idx < 0 else int(idx)


def decode_assignment(idx: int, size: int, n_gens: int) -> list:
    out = [0] * n_gens
    for g in range(n_gens - 1, -1, -1):
        out[g] = idx % size
        idx //= size
    return out
