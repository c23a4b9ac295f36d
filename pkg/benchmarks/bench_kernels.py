"""Time the batched transport check with the numba kernels and the numpy fallback.

    python benchmarks/bench_kernels.py [--draws 40] [--depth 5] [--m 6]
"""
import argparse
import random
import time

from gcmax import _kernels
from gcmax.core import ConvexityParams
from gcmax.generate import make_magma, structured_sample
from gcmax.opcalc import integer_arrays, realize_family, term_family


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--draws", type=int, default=40)
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--m", type=int, default=6)
    args = ap.parse_args()

    fam = term_family(args.depth)
    params = ConvexityParams(1, 2)
    r = random.Random(0)
    draws = []
    for _ in range(args.draws):
        mg = make_magma("random-table", args.m, r)
        draws.append((mg, integer_arrays(fam, params, structured_sample(mg, params, r))))

    # compile once outside the timed loop
    tables = realize_family(fam, draws[0][0], use_numba=True)
    _kernels.violation_counts(tables, *draws[0][1], use_numba=True)

    print(f"{len(fam)} terms, {args.draws} draws, m={args.m}, numba default on: {_kernels.USE_NUMBA}")
    for label, flag in (("numba", True), ("numpy", False)):
        t_real = t_check = 0.0
        for mg, arrs in draws:
            t0 = time.perf_counter()
            tables = realize_family(fam, mg, use_numba=flag)
            t1 = time.perf_counter()
            _kernels.violation_counts(tables, *arrs, use_numba=flag)
            t_check += time.perf_counter() - t1
            t_real += t1 - t0
        print(f"{label:6s} realize {t_real:7.3f}s  check {t_check:7.3f}s  total {t_real + t_check:7.3f}s")


if __name__ == "__main__":
    main()
