"""Time the numba and pure-numpy backends of the hot kernels on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each case is run once to warm up (numba compiles on first call), then
``--repeat`` times; the best wall time is reported along with a parity check
of the two outputs.
"""

import argparse
import json
import time

import numpy as np

from decouplab import _kernels
from decouplab._accel import HAVE_NUMBA
from decouplab.chaos import random_chaos_form
from decouplab.coupling import random_table_kernel
from decouplab.model import FiniteDistribution
from decouplab.rng import uniforms
from decouplab.ustat import statistic_maps, tuple_array


def case_table(n=6, blocks=20000, seed=0):
    rng = np.random.default_rng(seed)
    dist = FiniteDistribution.uniform([-1, 1])
    kernel = random_table_kernel(rng, n)
    table = np.ascontiguousarray(kernel.tabulate(dist))
    _, maps = statistic_maps("T_n", 2)
    labels = rng.integers(0, 2, size=(blocks, 2, n))
    tuples = tuple_array(n, 2)
    return f"table T_n n={n} B={blocks}", lambda b: _kernels.table_stat(table, n, 2, 2, tuples, maps, labels, b)


def case_distance(n=30, blocks=4096, dim=3):
    pts = uniforms(1, 0, 0, blocks, 2 * n * dim).reshape(blocks, 2, n, dim)
    _, maps = statistic_maps("decoupled", 2)
    tuples = tuple_array(n, 2)
    w = np.ones(n * n)
    coef = np.zeros((1, 1))
    return (f"distance decoupled n={n} B={blocks}",
            lambda b: _kernels.point_stat(_kernels.DISTANCE, w, coef, 2, n, tuples, maps, pts, b))


def case_chaos(n=14, seed=0):
    form = random_chaos_form(np.random.default_rng(seed), n)
    return f"chaos 2^{n} patterns", lambda b: _kernels.chaos_values(form.x, form.a, form.b, b)


def case_rng(reps=100000, count=64):
    return f"philox uniforms {reps}x{count}", lambda b: uniforms(7, 0, 0, reps, count, b)


def best_time(fn, backend, repeat):
    fn(backend)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None, help="also write results here")
    args = ap.parse_args()
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can run")
    rows = []
    for name, fn in (case_table(), case_distance(), case_chaos(), case_rng()):
        t_np, out_np = best_time(fn, "numpy", args.repeat)
        if HAVE_NUMBA:
            t_nb, out_nb = best_time(fn, "numba", args.repeat)
            same = bool(np.array_equal(out_np, out_nb))
        else:
            t_nb, same = float("nan"), None
        rows.append({"case": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb,
                     "identical": same})
        print(f"{name:38s} numpy {t_np * 1e3:9.2f} ms   numba {t_nb * 1e3:9.2f} ms   "
              f"x{t_np / t_nb:6.1f}   identical={same}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
