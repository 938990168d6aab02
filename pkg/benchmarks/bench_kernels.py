"""Benchmark the compiled kernels against the pure-Python reference.

Times the pieces that dominate flow integration (chart gradients and the
implicit-midpoint advance) on both backends and checks they agree.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from aadual.kernels import KIND_H, KIND_HHAT, get_backend


def sample_state(n, kind):
    if kind == KIND_HHAT:
        lam = np.array([-0.3 - 0.9 * i for i in range(n)])
    else:
        lam = np.array([1.3 + 0.8 * (n - 1 - i) for i in range(n)])
    theta = np.linspace(0.4, 2.2, n)
    return np.concatenate([lam, theta])


def time_call(fn, repeat):
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main():
    ref = get_backend("python")
    try:
        core = get_backend("compiled")
    except ImportError:
        print("compiled extension not built; only the reference backend is available")
        return
    mu, u, v = 0.5, -1.0, 0.3
    print(f"{'op':28s} {'n':>2s} {'python':>12s} {'compiled':>12s} {'speedup':>8s}")
    for n in (1, 2, 3, 4):
        y = sample_state(n, KIND_H)
        for label, kind in (("grad H", KIND_H), ("grad Hhat", KIND_HHAT)):
            ys = sample_state(n, kind)
            t_ref = time_call(lambda: ref.hamiltonian_grad(kind, 1, ys, n, mu, u, v), 2000)
            t_core = time_call(lambda: core.hamiltonian_grad(kind, 1, ys, n, mu, u, v), 2000)
            agree = np.max(np.abs(ref.hamiltonian_grad(kind, 1, ys, n, mu, u, v)
                                  - core.hamiltonian_grad(kind, 1, ys, n, mu, u, v)))
            assert agree < 1e-12, agree
            print(f"{label:28s} {n:2d} {t_ref * 1e6:10.2f}us {t_core * 1e6:10.2f}us "
                  f"{t_ref / t_core:7.1f}x")
        steps = 1000
        t_ref = time_call(
            lambda: ref.advance(KIND_H, 1, y, 1e-3, steps, n, mu, u, v, 1e-13, 50, 1e-8), 3)
        t_core = time_call(
            lambda: core.advance(KIND_H, 1, y, 1e-3, steps, n, mu, u, v, 1e-13, 50, 1e-8), 3)
        z_ref = ref.advance(KIND_H, 1, y, 1e-3, steps, n, mu, u, v, 1e-13, 50, 1e-8)[0]
        z_core = core.advance(KIND_H, 1, y, 1e-3, steps, n, mu, u, v, 1e-13, 50, 1e-8)[0]
        assert np.max(np.abs(z_ref - z_core)) < 1e-11
        print(f"{'advance H (1000 steps)':28s} {n:2d} {t_ref * 1e3:10.2f}ms "
              f"{t_core * 1e3:10.2f}ms {t_ref / t_core:7.1f}x")
    print("\nbackends agree on all benchmarked quantities")


if __name__ == "__main__":
    main()
