"""Timing for the batch kernels: compiled path vs the pure-Python fallback.

Builds the folded radius-2 loop complex of the plane lattice and traces every
reduced word up to the configured length through its transition table, first
with the accelerated kernels and then with LOOPFOLD_PURE=1.  Reduction of a
random batch is timed the same way.

Run:  python3 benchmarks/bench_kernels.py [max-length]
"""

import os
import sys
import time

import numpy as np

from loopfold._kernels import (
    HAS_NUMBA,
    PURE_ENV,
    enumerate_reduced_words,
    reduce_batch,
    trace_batch,
)
from loopfold.automata import build_loop_complex, fold, transition_table
from loopfold.core import Presentation, parse_word


def time_call(fn, repeats=5):
    fn()  # warm-up (and JIT compilation on the compiled path)
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def main() -> int:
    max_length = int(sys.argv[1]) if len(sys.argv) > 1 else 11
    lattice = Presentation(2, (parse_word("abAB", 2),))
    dfa, _ = fold(build_loop_complex(lattice, 2))
    delta = transition_table(dfa)

    words = enumerate_reduced_words(4, max_length)
    lengths = np.full(len(words), max_length, dtype=np.int64)
    rng = np.random.default_rng(7)
    noisy = rng.integers(0, 4, size=(len(words), max_length)).astype(np.int16)

    print(f"graph: {dfa.num_vertices} vertices; batch: {len(words)} words "
          f"of length {max_length}; numba available: {HAS_NUMBA}")

    rows = []
    for label, env in (("compiled", None), ("pure", "1")):
        if env is None:
            os.environ.pop(PURE_ENV, None)
        else:
            os.environ[PURE_ENV] = env
        if label == "compiled" and not HAS_NUMBA:
            print("compiled path unavailable; timing the fallback twice")
        trace = time_call(lambda: trace_batch(delta, dfa.origin, words, lengths))
        reduce_ = time_call(lambda: reduce_batch(noisy, lengths))
        rows.append((label, trace, reduce_))
        print(f"{label:>9}: trace_batch {trace * 1e3:8.2f} ms   "
              f"reduce_batch {reduce_ * 1e3:8.2f} ms")
    os.environ.pop(PURE_ENV, None)

    if HAS_NUMBA and rows[1][1] > 0:
        print(f"trace speedup: {rows[1][1] / rows[0][1]:.1f}x   "
              f"reduce speedup: {rows[1][2] / rows[0][2]:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
