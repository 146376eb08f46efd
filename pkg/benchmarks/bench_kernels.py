"""Compiled kernels against the pure-Python fallback on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Prints one line per kernel with both timings, the speed-up, and the largest
difference between the two outputs.
"""
import argparse
import time

import numpy as np

from playhyst import _fallback
from playhyst.scenarios import convex_concave_models, ch4_models

try:
    from playhyst import _kernels
except ImportError:  # extension not built
    _kernels = None


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_scan(mod, model, n=20000):
    alpha, beta, mu, code, h, eps = model.arrays
    u = 1.0 + 1.0 * (1 - np.cos(np.linspace(0, 12 * np.pi, n)))
    V = np.empty((n, model.K))
    W = np.empty(n)
    v0 = np.asarray(model.gl_all(u[0]), float)

    def run():
        mod.play_scan(u, v0, alpha, beta, mu, code, h, eps, V, W)
        return W.copy()
    return run


def bench_solve(mod, model, steps=5000, tau=0.01):
    alpha, beta, mu, code, h, eps = model.arrays
    K = model.K

    def run():
        v = np.asarray(model.gl_all(1.0), float).copy()
        vout = np.empty(K)
        U, W = 1.0, model.output(v) - model.offset
        us = np.empty(steps)
        for n in range(steps):
            f = 3.5 * np.sin((n + 1) * tau) * np.exp(-0.1 * (n + 1) * tau)
            rhs = U + W + tau * f
            U, W, _, _, _ = mod.play_solve(v, rhs, U, 1.0, 0.0, alpha, beta, mu, code, h, eps,
                                           1e-14, 1e-6, 100, 2, max(tau * abs(f), 1e-8), vout)
            v[:] = vout
            us[n] = U
        return us
    return run


def bench_cells(mod, model, J=2000, threads=0):
    alpha, beta, mu, code, h, eps = model.arrays
    rng = np.random.default_rng(0)
    U0 = rng.uniform(50, 700, J)
    V = np.array([model.gl_all(u) for u in U0])
    rhs = U0 + np.array([model.output(v) for v in V]) - model.offset + rng.normal(0, 5, J)
    width = np.full(J, 5.0)
    Vo, Uo, Wo = np.empty_like(V), np.empty(J), np.empty(J)
    it, st = np.empty(J, np.int32), np.empty(J, np.int32)

    def run():
        mod.play_solve_cells(V, rhs, U0, 1.0, 0.0, alpha, beta, mu, code, h, eps, 1e-14, 1e-6,
                             100, 2, width, Vo, Uo, Wo, it, st, threads)
        return Uo.copy()
    return run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not available; nothing to compare")
        return
    cc = convex_concave_models()["nonlinear"]
    ch4 = ch4_models()["nonlinear_adaptive"]
    cases = [
        (f"play_scan K={cc.K} n=20000", lambda m: bench_scan(m, cc)),
        (f"play_solve K={cc.K} steps=5000", lambda m: bench_solve(m, cc)),
        (f"play_solve_cells K={ch4.K} J=2000", lambda m: bench_cells(m, ch4)),
    ]
    print(f"{'kernel':<36}{'python s':>12}{'compiled s':>12}{'speed-up':>10}{'max diff':>12}")
    for name, make in cases:
        tp, op = _best(make(_fallback), 1)
        tc, oc = _best(make(_kernels), args.repeat)
        diff = float(np.max(np.abs(op - oc)))
        print(f"{name:<36}{tp:>12.4f}{tc:>12.5f}{tp / tc:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
