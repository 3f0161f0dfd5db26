"""Time the numba event-count kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--network yolov3] [--repeat 3]

Both paths are run on every layer of the network and their counters are
checked for equality before timings are reported.
"""

import argparse
import time

import numpy as np

from cimenergy import _kernels as K
from cimenergy.workload import shipped_network, to_matmul_dims


def best_of(fn, args_list, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = [fn(*a) for a in args_list]
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--network", default="yolov3")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--array", type=int, default=256)
    args = ap.parse_args()

    if not K.HAVE_NUMBA or K.JIT_DISABLED:
        raise SystemExit("numba path unavailable (not installed or CIMENERGY_DISABLE_JIT set)")

    net = shipped_network(args.network)
    sys_args = []
    for layer in net:
        d = to_matmul_dims(layer)
        sys_args.append((d.l, d.n_dim, d.m, args.array, args.array))
    opt_args = [(l.n, l.k, l.m_out, l.c_in, l.c_out, max(1, (4 << 20) // l.n**2), 3, 2, 2, 1)
                for l in net]

    # compile once outside the timed region
    K.systolic_counts_jit(*sys_args[0])
    K.optical_counts_jit(*opt_args[0])

    print(f"{args.network}: {len(net)} layers, {args.array}x{args.array} array, best of {args.repeat}")
    print(f"{'kernel':<10}{'numpy s':>12}{'numba s':>12}{'speedup':>10}")
    for name, np_fn, jit_fn, a in (
            ("systolic", K.systolic_counts_numpy, K.systolic_counts_jit, sys_args),
            ("optical", K.optical_counts_numpy, K.optical_counts_jit, opt_args)):
        t_np, out_np = best_of(np_fn, a, args.repeat)
        t_jit, out_jit = best_of(jit_fn, a, args.repeat)
        assert all(np.array_equal(x, y) for x, y in zip(out_np, out_jit)), name
        print(f"{name:<10}{t_np:>12.4f}{t_jit:>12.4f}{t_np / t_jit:>9.1f}x")


if __name__ == "__main__":
    main()
