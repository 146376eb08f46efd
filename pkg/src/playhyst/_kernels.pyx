# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled play kernels.  Same signatures and algorithm as ``_fallback``."""

from libc.math cimport erf, exp, fabs, sqrt, INFINITY, isfinite, nextafter
from cython.parallel cimport prange
cimport cython

import numpy as np

cdef double SQPI = 2.0 / sqrt(3.141592653589793)
cdef int EXPAND_LIMIT = 64
cdef int BRACKET_BUDGET = 200


cdef inline double trunc_val(double x, int code, double h, double eps) noexcept nogil:
    if code == 0:
        return x
    if code == 1:
        return 0.0 if x <= 0.0 else (h if x >= h else x)
    if code == 2:
        return 0.0 if x <= 0.0 else (h if x >= eps else h / eps * x)
    if code == 3:
        return h if x > 0.0 else 0.0
    return 0.5 * h * (erf(2.0 * x / h - 1.0) + 1.0)


cdef inline double trunc_slope(double x, int code, double h, double eps) noexcept nogil:
    cdef double z
    if code == 0:
        return 1.0
    if code == 1:
        return 1.0 if (x > 0.0 and x <= h) else 0.0
    if code == 2:
        return h / eps if (x > 0.0 and x <= eps) else 0.0
    if code == 3:
        return 0.0
    z = 2.0 * x / h - 1.0
    return SQPI * exp(-z * z)


cdef double response(const double[::1] vbar, double u, const double[::1] alpha,
                     const double[::1] beta, const double[::1] mu, const int[::1] code,
                     const double[::1] h, const double[::1] eps, double[::1] vout,
                     bint want_slope, double* slope) noexcept nogil:
    cdef Py_ssize_t k, K = vbar.shape[0]
    cdef double w = 0.0, s = 0.0, lo, hi, x, vb
    for k in range(K):
        lo = u - beta[k]
        hi = u - alpha[k]
        vb = vbar[k]
        if vb < lo:
            x = lo
            if want_slope:
                s += mu[k] * trunc_slope(x, code[k], h[k], eps[k])
        elif vb >= hi:
            x = hi
            if want_slope:
                s += mu[k] * trunc_slope(x, code[k], h[k], eps[k])
        else:
            x = vb
        vout[k] = x
        w += mu[k] * trunc_val(x, code[k], h[k], eps[k])
    slope[0] = s
    return w


def truncate_sum(const double[::1] v, const double[::1] mu, const int[::1] code,
                 const double[::1] h, const double[::1] eps):
    cdef Py_ssize_t k
    cdef double w = 0.0
    for k in range(v.shape[0]):
        w += mu[k] * trunc_val(v[k], code[k], h[k], eps[k])
    return w


def play_response(const double[::1] vbar, double u, const double[::1] alpha,
                  const double[::1] beta, const double[::1] mu, const int[::1] code,
                  const double[::1] h, const double[::1] eps, double[::1] vout,
                  bint want_slope):
    cdef double s = 0.0
    cdef double w = response(vbar, u, alpha, beta, mu, code, h, eps, vout, want_slope, &s)
    return w, s


def play_scan(const double[::1] inputs, const double[::1] v0, const double[::1] alpha,
              const double[::1] beta, const double[::1] mu, const int[::1] code,
              const double[::1] h, const double[::1] eps, double[:, ::1] Vout,
              double[::1] Wout):
    cdef Py_ssize_t i, k, K = v0.shape[0]
    cdef double u, x, w
    cdef double[::1] v = np.array(v0, dtype=np.float64)
    with nogil:
        for i in range(inputs.shape[0]):
            u = inputs[i]
            w = 0.0
            for k in range(K):
                x = v[k]
                if x < u - beta[k]:
                    x = u - beta[k]
                if x > u - alpha[k]:
                    x = u - alpha[k]
                v[k] = x
                Vout[i, k] = x
                w += mu[k] * trunc_val(x, code[k], h[k], eps[k])
            Wout[i] = w


cdef struct Result:
    double x
    double w
    double resid
    int iters
    int status


cdef inline double resid_at(double U, const double[::1] vbar, double rhs, double a1,
                            double a0, const double[::1] alpha, const double[::1] beta,
                            const double[::1] mu, const int[::1] code, const double[::1] h,
                            const double[::1] eps, double[::1] vout, double* d) noexcept nogil:
    cdef double s = 0.0
    cdef double w = response(vbar, U, alpha, beta, mu, code, h, eps, vout, True, &s)
    d[0] = a1 + s
    return a1 * U + a0 + w - rhs


cdef inline double ulp_of(double x) noexcept nogil:
    return fabs(nextafter(x, INFINITY) - x)


cdef Result solve_one(const double[::1] vbar, double rhs, double u0, double a1, double a0,
                      const double[::1] alpha, const double[::1] beta,
                      const double[::1] mu, const int[::1] code, const double[::1] h,
                      const double[::1] eps, double abs_tol, double rel_tol, int max_iter,
                      int method, double width, double[::1] vout) noexcept nogil:
    cdef Result res
    cdef double tol = abs_tol + rel_tol * fabs(rhs)
    cdef double d0, r0, lo, rlo, hi, rhi, best_x, best_r, x, r, d, xn, rn, dn, w
    cdef double prev_width, width_now, s
    cdef int iters = 0, stall, limit, n, i
    cdef bint done = False
    r0 = resid_at(u0, vbar, rhs, a1, a0, alpha, beta, mu, code, h, eps, vout, &d0)
    res.status = 0
    if fabs(r0) <= tol:
        res.x = u0
        res.resid = r0
        res.iters = 0
        res.w = response(vbar, u0, alpha, beta, mu, code, h, eps, vout, False, &s)
        return res
    lo = -INFINITY
    rlo = -INFINITY
    hi = INFINITY
    rhi = INFINITY
    if r0 < 0:
        lo = u0
        rlo = r0
    else:
        hi = u0
        rhi = r0
    best_x = u0
    best_r = r0

    if method != 1:
        x = u0
        r = r0
        d = d0
        stall = 0
        limit = max_iter // 4
        while iters < max_iter:
            if not (d > 0 and isfinite(d)):
                break
            xn = x - r / d
            iters += 1
            rn = resid_at(xn, vbar, rhs, a1, a0, alpha, beta, mu, code, h, eps, vout, &dn)
            if rn < 0 and xn > lo:
                lo = xn
                rlo = rn
            elif rn > 0 and xn < hi:
                hi = xn
                rhi = rn
            if fabs(rn) <= tol:
                res.x = xn
                res.resid = rn
                res.iters = iters
                res.status = 0
                done = True
                break
            if fabs(rn) < fabs(best_r):
                best_x = xn
                best_r = rn
                stall = 0
            else:
                stall += 1
                if method == 2 and stall >= limit:
                    break
            x = xn
            r = rn
            d = dn
        if not done and method == 0:
            res.x = best_x
            res.resid = best_r
            res.iters = iters
            res.status = 2
            done = True

    if not done:
        res.status = 1
        w = width
        n = 0
        while lo == -INFINITY and not done:
            x = u0 - w
            r = resid_at(x, vbar, rhs, a1, a0, alpha, beta, mu, code, h, eps, vout, &d)
            iters += 1
            if r < 0:
                lo = x
                rlo = r
            else:
                if x < hi:
                    hi = x
                    rhi = r
                if fabs(r) <= tol:
                    res.x = x
                    res.resid = r
                    done = True
            w *= 2.0
            n += 1
            if n > EXPAND_LIMIT and not done:
                res.x = best_x
                res.resid = best_r
                res.status = 2
                done = True
        while hi == INFINITY and not done:
            x = u0 + w
            r = resid_at(x, vbar, rhs, a1, a0, alpha, beta, mu, code, h, eps, vout, &d)
            iters += 1
            if r > 0:
                hi = x
                rhi = r
            else:
                if x > lo:
                    lo = x
                    rlo = r
                if fabs(r) <= tol:
                    res.x = x
                    res.resid = r
                    done = True
            w *= 2.0
            n += 1
            if n > EXPAND_LIMIT and not done:
                res.x = best_x
                res.resid = best_r
                res.status = 2
                done = True

    if not done:
        prev_width = INFINITY
        for i in range(BRACKET_BUDGET):
            width_now = hi - lo
            if width_now <= 4.0 * ulp_of(fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)):
                break
            if width_now > 0.5 * prev_width:
                x = 0.5 * (lo + hi)
            else:
                x = lo - rlo * (hi - lo) / (rhi - rlo)
                if not (lo < x and x < hi):
                    x = 0.5 * (lo + hi)
            prev_width = width_now
            r = resid_at(x, vbar, rhs, a1, a0, alpha, beta, mu, code, h, eps, vout, &d)
            iters += 1
            if fabs(r) <= tol:
                res.x = x
                res.resid = r
                done = True
                break
            if r < 0:
                lo = x
                rlo = r
            else:
                hi = x
                rhi = r
        if not done:
            if fabs(rlo) <= fabs(rhi):
                res.x = lo
                res.resid = rlo
            else:
                res.x = hi
                res.resid = rhi
            if fabs(res.resid) > tol:
                res.status = 2

    res.iters = iters
    res.w = response(vbar, res.x, alpha, beta, mu, code, h, eps, vout, False, &s)
    res.resid = a1 * res.x + a0 + res.w - rhs
    return res


def play_solve(const double[::1] vbar, double rhs, double u0, double a1, double a0,
               const double[::1] alpha, const double[::1] beta, const double[::1] mu,
               const int[::1] code, const double[::1] h, const double[::1] eps,
               double abs_tol, double rel_tol, int max_iter, int method, double width,
               double[::1] vout):
    cdef Result r
    with nogil:
        r = solve_one(vbar, rhs, u0, a1, a0, alpha, beta, mu, code, h, eps, abs_tol,
                      rel_tol, max_iter, method, width, vout)
    return r.x, r.w, r.resid, r.iters, r.status


def play_solve_cells(const double[:, ::1] V, const double[::1] rhs, const double[::1] U0,
                     double a1, double a0, const double[::1] alpha, const double[::1] beta,
                     const double[::1] mu, const int[::1] code, const double[::1] h,
                     const double[::1] eps, double abs_tol, double rel_tol, int max_iter,
                     int method, const double[::1] width, double[:, ::1] Vout,
                     double[::1] Uout, double[::1] Wout, int[::1] iters, int[::1] status,
                     int nthreads):
    cdef Py_ssize_t j, J = V.shape[0]
    cdef Result r
    if nthreads <= 0:
        nthreads = 1
    for j in prange(J, nogil=True, num_threads=nthreads, schedule="static"):
        r = solve_one(V[j], rhs[j], U0[j], a1, a0, alpha, beta, mu, code, h, eps,
                      abs_tol, rel_tol, max_iter, method, width[j], Vout[j])
        Uout[j] = r.x
        Wout[j] = r.w
        iters[j] = r.iters
        status[j] = r.status
