"""Numba vs numpy timings for the compiled kernels.

Run:  python3 benchmarks/bench_kernels.py [--sizes 32,64,128] [--repeat 5]

Both implementations are imported side by side from ``qcut._kernels``, so
the ``QCUT_PURE_NUMPY`` flag does not matter here. Each row also checks that
the two paths agree.
"""

import argparse
import time

import numpy as np

from qcut import _kernels as K
from qcut.harness.generators import GeneratorSpec, generate


def best_of(fn, repeat):
    fn()  # warm-up (includes numba compilation)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def rows_for(n, repeat, rng):
    g = generate(GeneratorSpec("series-parallel", n, seed=n)).graph
    t, h, w = g.tails, g.heads, np.asarray(g.weights, dtype=float)
    keep = rng.random(g.m) < 0.8
    du = rng.uniform(0, 100, 20000)
    dv = du + rng.uniform(0, 20, 20000)
    cases = {
        "apsp": (lambda: K._apsp_numpy(n, t, h, w), lambda: K._apsp_numba(n, t, h, w)),
        "closure": (lambda: K._closure_numpy(n, t, h, keep), lambda: K._closure_numba(n, t, h, keep)),
        "crossed": (lambda: K._crossed_numpy(du, dv, 3.0, 10.0), lambda: K._crossed_numba(du, dv, 3.0, 10.0)),
    }
    out = []
    for name, (f_np, f_nb) in cases.items():
        same = np.array_equal(f_np(), f_nb())
        out.append((name, n, best_of(f_np, repeat), best_of(f_nb, repeat), same))
    return out


def enum_row(m_target, repeat):
    g = generate(GeneratorSpec("pathwidth-k", 6, seed=1, k=2)).graph
    sel = np.arange(min(m_target, g.m))
    args = (g.n, g.tails[sel], g.heads[sel], g.capacities[sel].astype(float),
            np.array([0, 1], dtype=np.int64), np.array([5, 4], dtype=np.int64), np.ones(2))
    a = K._enumerate_cuts_numpy(*args)
    b = K._enumerate_cuts_numba(*args)
    same = a[0] == b[0] and abs(a[1] - b[1]) < 1e-12
    return ("enumerate_cuts", len(sel), best_of(lambda: K._enumerate_cuts_numpy(*args), repeat),
            best_of(lambda: K._enumerate_cuts_numba(*args), repeat), same)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="32,64,128")
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed")
    rng = np.random.default_rng(0)
    rows = []
    for n in (int(s) for s in a.sizes.split(",")):
        rows += rows_for(n, a.repeat, rng)
    rows.append(enum_row(12, a.repeat))
    print(f"{'kernel':<16}{'size':>6}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}  agree")
    for name, n, t_np, t_nb, same in rows:
        print(f"{name:<16}{n:>6}{t_np * 1e3:>12.3f}{t_nb * 1e3:>12.3f}{t_np / t_nb:>10.1f}  {same}")


if __name__ == "__main__":
    main()
