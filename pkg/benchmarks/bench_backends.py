#!/usr/bin/env python3
# Times the compiled kernel extension against the pure-Python fallback on
# the workloads that dominate an audit run, and checks they agree while at
# it. Run from the repo root after an editable install:
#
#   python3 benchmarks/bench_backends.py
#   python3 benchmarks/bench_backends.py --repeat 5 --inner 3000

import argparse
import importlib
import sys
import time

from stataudit.core import _backend, _kernels_py


def _load_compiled():
    try:
        return importlib.import_module("stataudit.core._kernels_c")
    except ImportError:
        return None


WORKLOADS = [
    ("t_cdf", lambda k, i: k.t_cdf(1.0 + (i % 7) * 0.37, 30.0 + i % 50)),
    ("chi2_cdf", lambda k, i: k.chi2_cdf(2.0 + (i % 9) * 0.9, 1.0 + i % 6)),
    ("f_cdf", lambda k, i: k.f_cdf(1.5 + (i % 5) * 0.4,
                                   2.0 + i % 4, 40.0 + i % 80)),
    ("nct_cdf", lambda k, i: k.nct_cdf(2.0, 38.0 + i % 40,
                                       0.5 + (i % 10) * 0.3)),
    ("nchi2_cdf", lambda k, i: k.nchi2_cdf(3.84, 1.0 + i % 4,
                                           1.0 + (i % 12) * 0.8)),
    ("ncf_cdf", lambda k, i: k.ncf_cdf(3.1, 2.0 + i % 3, 60.0,
                                       2.0 + (i % 8) * 0.7)),
    ("norm_ppf", lambda k, i: k.norm_ppf(0.001 + (i % 997) / 1000.0)),
    ("betainc", lambda k, i: k.betainc(2.0 + i % 5, 30.0,
                                       0.05 + (i % 17) / 20.0)),
]


def bench_one(kernels, fn, inner, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for i in range(inner):
            fn(kernels, i)
        best = min(best, time.perf_counter() - t0)
    return best / inner


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--inner", type=int, default=2000,
                    help="calls per timing loop (default 2000)")
    ap.add_argument("--repeat", type=int, default=3,
                    help="loops per workload, best-of (default 3)")
    args = ap.parse_args(argv)

    compiled = _load_compiled()
    if compiled is None:
        print("compiled extension not importable; nothing to compare",
              file=sys.stderr)
        return 1
    print(f"active backend at import: {_backend.backend_name()}")
    print(f"{'kernel':<10} {'pure us':>9} {'compiled us':>12} "
          f"{'speedup':>8}   max |diff|")
    worst = 0.0
    for name, fn in WORKLOADS:
        diff = max(abs(fn(_kernels_py, i) - fn(compiled, i))
                   for i in range(200))
        worst = max(worst, diff)
        t_py = bench_one(_kernels_py, fn, args.inner, args.repeat)
        t_c = bench_one(compiled, fn, args.inner, args.repeat)
        print(f"{name:<10} {t_py * 1e6:>9.2f} {t_c * 1e6:>12.2f} "
              f"{t_py / t_c:>7.1f}x   {diff:.3g}")
    print(f"worst backend disagreement: {worst:.3g}")
    return 0 if worst < 1e-12 else 1


if __name__ == "__main__":
    sys.exit(main())
