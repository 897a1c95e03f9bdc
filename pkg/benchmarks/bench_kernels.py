"""Timing comparison of the compiled kernels vs the numpy fallback.

Runs the three hot kernels (phase_map, moore_map, bracket_vals) on tau
arrays of several sizes with parameters taken from a canonical
homographic model, and prints best-of-N wall times for both backends.

The two backends trade places with array size: the compiled loops win
by 3-12x on the small batches that quadrature and bisection actually
issue (tens of points per call, where numpy pays fixed per-call
overhead), while numpy's SIMD transcendentals win by ~1.3x on very
large arrays for the tan/atan-bound kernels.  bracket_vals stays
faster compiled at every size.  The deviation column shows the
agreement band; the backends differ by a few ulp at most on
transcendental-heavy paths (scalar libm vs SIMD code paths).

Usage:
    python3 benchmarks/bench_kernels.py --sizes 32 1024 200000
"""
import argparse
import time

import numpy as np

from vibcav import catalog
from vibcav.moore import MooreEvaluator
from vibcav.observables import Observables
from vibcav._kernels import _pure

try:
    from vibcav._kernels import _fastcore
except ImportError:
    _fastcore = None


def get_args():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+",
                   default=[32, 128, 1024, 200000],
                   help="tau array sizes to sweep")
    p.add_argument("--repeats", type=int, default=5,
                   help="timing repeats, best is reported (default 5)")
    p.add_argument("--seed", type=int, default=12345)
    return p.parse_args()


def best_of(fn, repeats, inner):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            out = fn()
        best = min(best, (time.perf_counter() - t0) / inner)
    return best, out


def main():
    args = get_args()
    if _fastcore is None:
        print("compiled backend not available; build it with "
              "'pip install -e . --no-build-isolation'")
        return

    m = catalog.make_homographic(1, 1.0, 2.0)
    ev = MooreEvaluator(m)
    obs = Observables(m, ev)
    rng = np.random.default_rng(args.seed)
    a, b, c, d, half, c0, c1, q = ev._fpar

    print("model = homographic(1, 1.0, 2.0), "
          f"repeats = {args.repeats}")
    print(f"{'n':>8} {'kernel':<14} {'pure [us]':>11} "
          f"{'compiled [us]':>14} {'ratio':>7} {'max rel dev':>12}")
    for n in args.sizes:
        tau = np.ascontiguousarray(rng.uniform(0.0, 40.0 * m.T, n))
        idx = np.ascontiguousarray(ev.map_index(tau), dtype=np.int64)
        tab = obs._region_table(int(idx.max()))
        inner = max(1, 20000 // max(n // 32, 1))
        jobs = [
            ("phase_map",
             lambda k: k.phase_map(tau, m.T, a, b, c, d, half, c0, c1, q,
                                   m.L, -2.0 * m.L)),
            ("moore_map",
             lambda k: k.moore_map(tau, m.L, m.T, a, b, c, d,
                                   half, c0, c1, q)[0]),
            ("bracket_vals",
             lambda k: k.bracket_vals(tau, m.T, idx, tab)),
        ]
        for name, call in jobs:
            tp, outp = best_of(lambda: call(_pure), args.repeats, inner)
            tc, outc = best_of(lambda: call(_fastcore), args.repeats, inner)
            dev = float(np.max(np.abs(outp - outc) / (np.abs(outp) + m.T)))
            print(f"{n:>8} {name:<14} {tp * 1e6:>11.1f} {tc * 1e6:>14.1f} "
                  f"{tp / tc:>6.2f}x {dev:>12.2e}")


if __name__ == "__main__":
    main()
