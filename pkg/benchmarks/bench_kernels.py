"""Compare the compiled integration kernel against the pure-Python fallback.

Times the raw kernel on a synthetic workload and a realistic phase-curve
build, both backends.  Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from levdens import backend, build_phase_curve, default_k_grid, make_poschl_teller


def time_raw(kernel, n_steps, repeats):
    rng = np.random.default_rng(7)
    w = rng.normal(size=2 * n_steps + 1)
    out = np.empty(n_steps + 1, dtype=complex)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        kernel.rk4_complex(w, 1e-3, 1.0 + 0.0j, 0.5j, out)
        best = min(best, time.perf_counter() - t0)
    return best


def time_curve(n_k):
    p = make_poschl_teller(1)
    t0 = time.perf_counter()
    build_phase_curve(p, default_k_grid(1e-2, 20.0, n_k))
    return time.perf_counter() - t0


def main():
    py = backend.get_kernel("py")
    try:
        cy = backend.get_kernel("cy")
    except ImportError:
        print("compiled kernel not built; only the fallback is available")
        cy = None

    n_steps = 20000
    t_py = time_raw(py, n_steps, 5)
    print(f"raw kernel, {n_steps} steps:")
    print(f"  python   {t_py * 1e3:8.2f} ms")
    if cy is not None:
        t_cy = time_raw(cy, n_steps, 20)
        print(f"  compiled {t_cy * 1e3:8.2f} ms   ({t_py / t_cy:.0f}x)")

    print(f"active backend for solves: {'compiled' if backend.COMPILED else 'python'}")
    t = time_curve(200)
    print(f"200-point phase curve: {t:.2f} s")


if __name__ == "__main__":
    main()
