"""Time the Gram-matrix fill with the compiled and pure-Python kernels.

Usage::

    python benchmarks/bench_kernels.py [--repeat 3] [--threads 1]

For each occupancy the script fills the float and the exact (integer
coefficient) Gram matrix with every available backend and prints the best
wall-clock time of ``--repeat`` runs as CSV.
"""
import argparse
import sys
import time

import numpy as np

from quon import kernels
from quon.symsector import enumerate_permutation_words, gram_matrix

CASES = [
    {0: 2, 1: 1, 2: 1},
    {0: 2, 1: 2, 2: 1},
    {0: 2, 1: 2, 2: 2},
    {0: 3, 1: 2, 2: 2},
]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def fill(backend, words, exact):
    m, n = words.shape
    if exact:
        out = np.zeros((m, m, n * (n - 1) // 2 + 1), np.int64)
        backend.fill_gram_coeffs(words, out, 0, m)
    else:
        out = np.zeros((m, m))
        backend.fill_gram_float(words, 0.9, out, 0, m)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--threads", type=int, default=1,
                        help="also time gram_matrix with this many threads")
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the Python kernel only", file=sys.stderr)
    print("occupancy,words,kind," + ",".join(f"{b}_s" for b in backends) + ",speedup")
    for occ in CASES:
        words = np.asarray(enumerate_permutation_words(occ), dtype=np.int32)
        label = " ".join(f"{k}:{v}" for k, v in occ.items())
        for exact in (False, True):
            t = {b: best_of(lambda b=b: fill(kernels.get_backend(b), words, exact), args.repeat)
                 for b in backends}
            speed = t["python"] / t["compiled"] if "compiled" in t else 1.0
            cols = ",".join(f"{t[b]:.4g}" for b in backends)
            print(f"{label},{len(words)},{'exact' if exact else 'float'},{cols},{speed:.1f}", flush=True)
    if args.threads > 1:
        occ = CASES[-1]
        words = enumerate_permutation_words(occ)
        one = best_of(lambda: gram_matrix(words, 0.9, threads=1), args.repeat)
        many = best_of(lambda: gram_matrix(words, 0.9, threads=args.threads), args.repeat)
        print(f"# gram_matrix({len(words)} words): 1 thread {one:.4g} s, "
              f"{args.threads} threads {many:.4g} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
