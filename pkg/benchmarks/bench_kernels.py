"""Time the finite-monoid kernels on the numba and numpy backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--words 200000] [--size 8] [--gens 6]

Both backends must return identical results; the script exits non-zero if
they differ.
"""

import argparse
import statistics
import sys
import time

import numpy as np

from tietze import _kernels


def cyclic_table(n):
    i = np.arange(n)
    return (i[:, None] + i[None, :]) % n


def timed(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, statistics.median(times)


def bench_eval(backend, mul, flat, off, repeat):
    _kernels.set_backend(backend)
    _kernels.eval_words(mul, 0, flat[:off[1]], off[:2])  # compile outside the timing
    return timed(lambda: _kernels.eval_words(mul, 0, flat, off), repeat)


def bench_separate(backend, mul, n_gens, rels, repeat):
    _kernels.set_backend(backend)
    # ab vs ba never separates in an abelian group, so every assignment is scanned
    run = lambda: _kernels.first_separating_assignment(mul, 0, n_gens, rels, (0, 1), (1, 0))  # noqa: E731
    run()
    return timed(run, repeat)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--words", type=int, default=200_000)
    ap.add_argument("--max-len", type=int, default=12)
    ap.add_argument("--size", type=int, default=8)
    ap.add_argument("--gens", type=int, default=6)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args(argv)

    rng = np.random.default_rng(a.seed)
    mul = cyclic_table(a.size)
    lens = rng.integers(0, a.max_len + 1, size=a.words)
    off = np.zeros(a.words + 1, dtype=np.int64)
    off[1:] = np.cumsum(lens)
    flat = rng.integers(0, a.size, size=int(off[-1]), dtype=np.int64)
    rels = [((g, g + 1), (g + 1, g)) for g in range(a.gens - 1)]

    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    old = _kernels.BACKEND
    results = {}
    try:
        for b in backends:
            results[b] = (bench_eval(b, mul, flat, off, a.repeat),
                          bench_separate(b, mul, a.gens, rels, a.repeat))
    finally:
        _kernels.set_backend(old)

    print(f"eval_words: {a.words} words up to length {a.max_len} in a monoid of size {a.size}")
    print(f"first_separating_assignment: {a.size ** a.gens} assignments, {len(rels)} relations")
    print(f"{'backend':8s} {'eval (ms)':>12s} {'separate (ms)':>14s}")
    for b, ((_, te), (_, ts)) in results.items():
        print(f"{b:8s} {te * 1e3:12.2f} {ts * 1e3:14.2f}")
    if "numba" in results:
        (ee, te), (se, ts) = results["numba"]
        (pe, pte), (ps, pts) = results["numpy"]
        print(f"speedup  {pte / te:11.1f}x {pts / ts:13.1f}x")
        if not np.array_equal(ee, pe) or se != ps:
            print("backends disagree", file=sys.stderr)
            return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
