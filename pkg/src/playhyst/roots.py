"""Scalar root finding for strictly increasing residuals.

The residual of one implicit step is continuous and strictly increasing, but
only piecewise smooth, so Newton's method can cycle near kinks.  The solver
runs Newton first and, when allowed, drops to a bracketed secant/bisection
hybrid that cannot leave its bracket.  The compiled kernels implement the
same algorithm line for line; keep the two in sync.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

NEWTON, BRACKET, HYBRID = 0, 1, 2
METHODS = {"newton": NEWTON, "bracket": BRACKET, "hybrid": HYBRID}

OK, OK_FALLBACK, FAILED = 0, 1, 2

EXPAND_LIMIT = 64
BRACKET_BUDGET = 200


@dataclass(frozen=True)
class SolverConfig:
    method: str = "hybrid"
    abs_tol: float = 1e-14
    rel_tol: float = 1e-6
    max_iter: int = 100
    on_failure: str = "raise"  # or "record": keep the last iterate and flag the step

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown solver method {self.method!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("solver tolerances must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.on_failure not in ("raise", "record"):
            raise ValueError("on_failure is 'raise' or 'record'")

    @property
    def code(self) -> int:
        return METHODS[self.method]

    def tol(self, rhs: float) -> float:
        return self.abs_tol + self.rel_tol * abs(rhs)


@dataclass
class RootResult:
    x: float
    resid: float
    iters: int
    status: int


def solve_increasing(f, x0, r0, d0, tol, width, method=HYBRID, max_iter=100):
    """Find the root of a strictly increasing ``f`` starting at ``x0``.

    ``f(x)`` returns ``(residual, left-limit slope)``; ``r0, d0`` are its
    values at ``x0``.  ``width`` is the initial half-width used to grow a
    bracket around ``x0``.
    """
    if abs(r0) <= tol:
        return RootResult(x0, r0, 0, OK)
    lo, rlo = -math.inf, -math.inf
    hi, rhi = math.inf, math.inf
    if r0 < 0:
        lo, rlo = x0, r0
    else:
        hi, rhi = x0, r0
    best_x, best_r = x0, r0
    iters = 0

    if method != BRACKET:
        x, r, d = x0, r0, d0
        stall = 0
        limit = max_iter // 4
        while iters < max_iter:
            if not (d > 0 and math.isfinite(d)):
                break
            xn = x - r / d
            iters += 1
            rn, dn = f(xn)
            if rn < 0 and xn > lo:
                lo, rlo = xn, rn
            elif rn > 0 and xn < hi:
                hi, rhi = xn, rn
            if abs(rn) <= tol:
                return RootResult(xn, rn, iters, OK)
            if abs(rn) < abs(best_r):
                best_x, best_r = xn, rn
                stall = 0
            else:
                stall += 1
                if method == HYBRID and stall >= limit:
                    break
            x, r, d = xn, rn, dn
        if method == NEWTON:
            return RootResult(best_x, best_r, iters, FAILED)

    # grow the bracket outward from x0
    w = width
    n = 0
    while lo == -math.inf:
        x = x0 - w
        r, _ = f(x)
        iters += 1
        if r < 0:
            lo, rlo = x, r
        else:
            if x < hi:
                hi, rhi = x, r
            if abs(r) <= tol:
                return RootResult(x, r, iters, OK_FALLBACK)
        w *= 2.0
        n += 1
        if n > EXPAND_LIMIT:
            return RootResult(best_x, best_r, iters, FAILED)
    while hi == math.inf:
        x = x0 + w
        r, _ = f(x)
        iters += 1
        if r > 0:
            hi, rhi = x, r
        else:
            if x > lo:
                lo, rlo = x, r
            if abs(r) <= tol:
                return RootResult(x, r, iters, OK_FALLBACK)
        w *= 2.0
        n += 1
        if n > EXPAND_LIMIT:
            return RootResult(best_x, best_r, iters, FAILED)

    # secant (false position) with forced bisection when the bracket shrinks slowly
    prev_width = math.inf
    for _ in range(BRACKET_BUDGET):
        width_now = hi - lo
        if width_now <= 4.0 * math.ulp(max(abs(lo), abs(hi))):
            break
        if width_now > 0.5 * prev_width:
            x = 0.5 * (lo + hi)
        else:
            x = lo - rlo * (hi - lo) / (rhi - rlo)
            if not (lo < x < hi):
                x = 0.5 * (lo + hi)
        prev_width = width_now
        r, _ = f(x)
        iters += 1
        if abs(r) <= tol:
            return RootResult(x, r, iters, OK_FALLBACK)
        if r < 0:
            lo, rlo = x, r
        else:
            hi, rhi = x, r
    x, r = (lo, rlo) if abs(rlo) <= abs(rhi) else (hi, rhi)
    return RootResult(x, r, iters, OK_FALLBACK if abs(r) <= tol else FAILED)
