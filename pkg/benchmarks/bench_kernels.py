"""Compare the compiled propagation kernels against the pure-Python fallback.

Run:  python3 benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

import magballoon._kernels as kernels
from magballoon._kernels import _core_py

K = 8.639379797371932e-7


def _time(fn, repeats=3):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_pendulum(n=1_000_000, dt=0.01):
    def compiled():
        kernels.pendulum_steps(math.pi / 2.0, 0.0, K, dt, n, False)

    def fallback():
        _core_py.pendulum_steps(math.pi / 2.0, 0.0, K, dt, n, False)

    return _time(compiled), _time(fallback)


def bench_body(n=100_000, dt=0.1):
    inertia = np.diag([11250.0, 9000.0, 7000.0])
    args = (
        np.array([1.0, 0.0, 0.0, 0.0]),
        np.array([1e-4, -2e-4, 5e-5]),
        inertia,
        np.linalg.inv(inertia),
        math.pi * 225.0 * np.array([0.3, -0.2, 0.9]),
        np.tile(np.array([3e-6, -1e-6, 1.3e-5]), (2 * n + 1, 1)),
        dt,
        n,
    )

    def compiled():
        kernels.body_steps(*args)

    def fallback():
        _core_py.body_steps(*args)

    return _time(compiled), _time(fallback)


def main():
    print(f"active backend: {kernels.BACKEND}")
    if kernels.BACKEND != "cython":
        print("compiled extension unavailable; timing the fallback against "
              "itself")

    t_fast, t_py = bench_pendulum()
    print(f"pendulum_steps 1e6 steps : {kernels.BACKEND} {t_fast * 1e3:8.1f} ms"
          f" | python {t_py * 1e3:8.1f} ms | speedup {t_py / t_fast:6.1f}x")

    t_fast, t_py = bench_body()
    print(f"body_steps     1e5 steps : {kernels.BACKEND} {t_fast * 1e3:8.1f} ms"
          f" | python {t_py * 1e3:8.1f} ms | speedup {t_py / t_fast:6.1f}x")


if __name__ == "__main__":
    main()
