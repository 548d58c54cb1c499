import numpy as np
import pytest

from tietze.errors import InvalidMonoidError
from tietze.monoids import MonoidTable, cyclic, library, transformation_monoid_2

from oracles import all_monoids


def _iso_classes(tables):
    import itertools

    seen = set()
    for t in tables:
        n = len(t)
        keys = []
        for perm in itertools.permutations(range(1, n)):
            p = (0,) + perm
            inv = {p[i]: i for i in range(n)}
            keys.append(tuple(tuple(p[t[inv[i]][inv[j]]] for j in range(n)) for i in range(n)))
        seen.add(min(keys))
    return len(seen)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_library_has_every_small_monoid_once(n):
    ours = [M for M in library() if M.size == n and M.name != "T2"]
    assert len(ours) == _iso_classes(all_monoids(n))
    assert _iso_classes([M.mul.tolist() for M in ours]) == len(ours)


def test_library_order_and_t2():
    sizes = [M.size for M in library()]
    assert sizes == sorted(sizes)
    T = transformation_monoid_2()
    assert library()[-1] == T and T.size == 4 and not T.is_commutative


def test_invalid_tables_rejected():
    with pytest.raises(InvalidMonoidError):
        MonoidTable([[0, 1], [1, 1]], unit=1)
    with pytest.raises(InvalidMonoidError):
        MonoidTable([[0, 1, 2], [1, 2, 0], [2, 2, 2]])  # not associative
    with pytest.raises(InvalidMonoidError):
        MonoidTable(np.zeros((2, 3), dtype=int))


def test_cyclic_product():
    Z5 = cyclic(5)
    assert Z5.product([2, 4, 4]) == 0 and Z5.is_commutative
