"""Pure-Python implementations of the play kernels.

Signatures mirror ``_kernels.pyx``.  Arrays are float64 and contiguous;
``code`` holds the truncation kind codes from ``core``.  Outputs exclude the
model offset.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import erf

from .roots import solve_increasing

_SQPI = 2.0 / math.sqrt(math.pi)


def _trunc(x, mu, code, h, eps):
    out = np.where(code == 0, x, 0.0)
    m = code == 1
    if m.any():
        out[m] = np.clip(x[m], 0.0, h[m])
    m = code == 2
    if m.any():
        out[m] = h[m] / eps[m] * np.clip(x[m], 0.0, eps[m])
    m = code == 3
    if m.any():
        out[m] = np.where(x[m] > 0, h[m], 0.0)
    m = code == 4
    if m.any():
        out[m] = 0.5 * h[m] * (erf(2.0 * x[m] / h[m] - 1.0) + 1.0)
    return mu * out


def _trunc_slope(x, code, h, eps):
    out = np.where(code == 0, 1.0, 0.0)
    m = code == 1
    if m.any():
        out[m] = ((x[m] > 0) & (x[m] <= h[m])).astype(float)
    m = code == 2
    if m.any():
        out[m] = np.where((x[m] > 0) & (x[m] <= eps[m]), h[m] / eps[m], 0.0)
    m = code == 4
    if m.any():
        z = 2.0 * x[m] / h[m] - 1.0
        out[m] = _SQPI * np.exp(-z * z)
    return out


def truncate_sum(v, mu, code, h, eps):
    return float(_trunc(v, mu, code, h, eps).sum())


def play_response(vbar, u, alpha, beta, mu, code, h, eps, vout, want_slope):
    lo = u - beta
    hi = u - alpha
    below = vbar < lo
    above = vbar >= hi
    x = np.where(below, lo, np.where(above, hi, vbar))
    vout[:] = x
    w = float(_trunc(x, mu, code, h, eps).sum())
    if not want_slope:
        return w, 0.0
    act = below | above
    if not act.any():
        return w, 0.0
    s = float((mu[act] * _trunc_slope(x[act], code[act], h[act], eps[act])).sum())
    return w, s


def play_scan(inputs, v0, alpha, beta, mu, code, h, eps, Vout, Wout):
    v = v0.copy()
    for i in range(inputs.shape[0]):
        u = inputs[i]
        v = np.minimum(np.maximum(v, u - beta), u - alpha)
        Vout[i] = v
        Wout[i] = _trunc(v, mu, code, h, eps).sum()


def play_solve(vbar, rhs, u0, a1, a0, alpha, beta, mu, code, h, eps,
               abs_tol, rel_tol, max_iter, method, width, vout):
    """One implicit step ``a1*U + a0 + G(vbar; U) = rhs``.

    Returns ``(U, W, resid, iters, status)`` with ``vout`` holding the
    committed memory.
    """
    tol = abs_tol + rel_tol * abs(rhs)

    def f(U):
        w, s = play_response(vbar, U, alpha, beta, mu, code, h, eps, vout, True)
        return a1 * U + a0 + w - rhs, a1 + s

    r0, d0 = f(u0)
    res = solve_increasing(f, u0, r0, d0, tol, width, method, max_iter)
    w, _ = play_response(vbar, res.x, alpha, beta, mu, code, h, eps, vout, False)
    return res.x, w, a1 * res.x + a0 + w - rhs, res.iters, res.status


def play_solve_cells(V, rhs, U0, a1, a0, alpha, beta, mu, code, h, eps,
                     abs_tol, rel_tol, max_iter, method, width, Vout, Uout, Wout,
                     iters, status, nthreads):
    vtmp = np.empty(V.shape[1])
    for j in range(V.shape[0]):
        U, W, _, it, st = play_solve(V[j], rhs[j], U0[j], a1, a0, alpha, beta, mu, code,
                                     h, eps, abs_tol, rel_tol, max_iter, method,
                                     width[j], vtmp)
        Vout[j] = vtmp
        Uout[j] = U
        Wout[j] = W
        iters[j] = it
        status[j] = st
