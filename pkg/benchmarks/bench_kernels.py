"""Timing comparison of the jitted kernels against the pure-Python fallback.

Run:  python benchmarks/bench_kernels.py [n_steps]

The same statements execute on both paths (results are bit-identical); the
table reports wall-clock per call after a warm-up that absorbs the JIT
compilation.
"""

import math
import sys
import time

import numpy as np

from siba import experiments, kernels


def time_call(fn, *args, repeat=3):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    n_steps = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    cfg = experiments.resonant_config(50.0, math.pi / 4)
    kinds, eta, dtil, u0 = kernels.mode_arrays(cfg)
    verlet_args = (0.0, 0.9, 1.0, 2e-4, n_steps, 1, kinds, eta, dtil, u0)

    cfg2 = experiments.two_mode_config(50.0, -25.0, -30.0)
    kinds2, eta2, dtil2, u02 = kernels.mode_arrays(cfg2)
    kappa = np.array([500.0, 500.0])
    drive = np.sqrt(u02 * kappa / 2.0)
    rk4_args = (0.5, 0.3, np.array([0.01, 0.02]), np.array([0.0, -0.01]),
                1.0, 1e-4, n_steps, 1, kinds2, eta2, dtil2, u02, kappa, drive)

    if not kernels.USE_NUMBA:
        print("numba disabled (SIBA_NUMBA=0): only the fallback path exists")

    rows = []
    for name, jit_fn, py_fn, args in (
            ("verlet (1 mode)", kernels.verlet, kernels.verlet_py, verlet_args),
            ("rk4 full (2 modes)", kernels.rk4_full, kernels.rk4_full_py,
             rk4_args)):
        jit_fn(*args)  # warm-up: JIT compile before timing
        t_jit, out_jit = time_call(jit_fn, *args)
        t_py, out_py = time_call(py_fn, *args, repeat=1)
        same = all(np.array_equal(a, b) for a, b in zip(out_jit[:2], out_py[:2]))
        rows.append((name, t_jit, t_py, t_py / t_jit, same))

    print(f"{n_steps} steps per call "
          f"({'numba' if kernels.USE_NUMBA else 'fallback'} active)")
    print(f"{'kernel':<20} {'jit [s]':>10} {'python [s]':>11} "
          f"{'speedup':>8}  identical")
    for name, t_jit, t_py, speedup, same in rows:
        print(f"{name:<20} {t_jit:>10.4f} {t_py:>11.3f} {speedup:>8.1f}x  {same}")


if __name__ == "__main__":
    main()
