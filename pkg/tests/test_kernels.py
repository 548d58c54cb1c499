import itertools

import numpy as np

from tietze import _kernels
from tietze.monoids import library, transformation_monoid_2

from oracles import brute_separates


def test_eval_words_matches_python(backend):
    M = transformation_monoid_2()
    words = [w for n in range(4) for w in itertools.product(range(4), repeat=n)]
    got = _kernels.eval_words(M.mul, M.unit, *_kernels.pack_words(words))
    assert got.tolist() == [M.product(w) for w in words]


def test_first_separating_matches_brute_force(backend):
    gens = ["a", "b"]
    rels = [(("a", "b"), ("b", "a"))]
    idx = {"a": 0, "b": 1}
    enc = lambda w: tuple(idx[x] for x in w)  # noqa: E731
    for M in library():
        table = M.mul.tolist()
        for u, v in [(("a",), ("b",)), (("a", "a"), ()), (("a", "b"), ("b", "a"))]:
            want = brute_separates(gens, rels, u, v, table, M.unit)
            got = _kernels.first_separating_assignment(M.mul, M.unit, 2, [(enc(x), enc(y)) for x, y in rels],
                                                       enc(u), enc(v))
            if want is None:
                assert got is None
            else:
                assert _kernels.decode_assignment(got, M.size, 2) == [want["a"], want["b"]]


def test_backends_agree_on_random_tables():
    rng = np.random.default_rng(7)
    M = library()[-1]
    words = [tuple(rng.integers(0, 4, size=rng.integers(0, 9))) for _ in range(200)]
    flat, off = _kernels.pack_words(words)
    old = _kernels.BACKEND
    try:
        _kernels.set_backend("numpy")
        a = _kernels.eval_words(M.mul, M.unit, flat, off)
        _kernels.set_backend("numba")
        b = _kernels.eval_words(M.mul, M.unit, flat, off)
    finally:
        _kernels.set_backend(old)
    assert np.array_equal(a, b)


def test_no_generators_means_nothing_to_separate(backend):
    M = library()[1]
    assert _kernels.first_separating_assignment(M.mul, M.unit, 0, [], (), ()) is None


def test_pack_words_offsets():
    flat, off = _kernels.pack_words([(1, 2), (), (3,)])
    assert flat.tolist() == [1, 2, 3] and off.tolist() == [0, 2, 2, 3]
