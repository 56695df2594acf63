"""Compare the compiled and pure-Python exact rank kernels.

Matrices are twisted coboundaries of mapping tori (the workload of the
vanishing checks).  Both kernels must return the same rank.

    python3 benchmarks/bench_rank.py [--repeat 3]
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction

import numpy as np

from mnlck import _rank_py, linalg
from mnlck.library import named, rotation
from mnlck.mapping_torus import base_character, mapping_torus
from mnlck.twisted import assemble_twisted

CASES = [
    ("circle3", None, 3), ("tetra", None, 3), ("rp2_6", None, 4),
    ("torus9", None, 3), ("torus9", "rot", 4), ("torus9", None, 6),
]


def _dense(rows, ncols):
    a = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, r in enumerate(rows):
        for j, v in r.items():
            a[i, j] = v
    return a


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if linalg._ext is None:
        raise SystemExit("compiled kernel not available; build with `pip install -e . --no-build-isolation`")
    print(f"{'fiber':8s} {'auto':4s} {'L':>2s} {'shape':>11s} {'rank':>5s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s}")
    for name, auto, layers in CASES:
        phi = rotation(name) if auto == "rot" else None
        M = mapping_torus(named(name), phi, layers)
        tc = assemble_twisted(M.complex, base_character(M, Fraction(2)), "rational")
        for D in tc.matrices:
            rows = linalg._integer_rows(D)
            ncols = D.shape[1]
            t_c, r_c = _best(lambda: linalg._ext.integer_rank_dense(_dense(rows, ncols)), args.repeat)
            t_p, r_p = _best(lambda: _rank_py.integer_rank(rows, ncols), args.repeat)
            assert r_c == r_p, (name, D.shape, r_c, r_p)
            shape = f"{D.shape[0]}x{D.shape[1]}"
            print(f"{name:8s} {auto or 'id':4s} {layers:2d} {shape:>11s} {r_c:5d} "
                  f"{1e3 * t_c:10.2f} {1e3 * t_p:10.2f} {t_p / t_c:8.1f}")


if __name__ == "__main__":
    main()
