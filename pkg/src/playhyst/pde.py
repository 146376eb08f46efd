"""Upwind explicit transport with a cell-local implicit hysteresis solve.

Each step assembles the flux difference from the previous time level and then
solves, independently in every cell, the same scalar problem as one ODE step.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from . import kernels
from .curves import IdentityCurve, MonotoneCurve
from .errors import NoConvergence, SlopeUnavailable
from .model import Model, evaluate_cells, init_state
from .ode import fit_order
from .roots import BRACKET_BUDGET, EXPAND_LIMIT, FAILED, OK, SolverConfig


def hyst_threads() -> int:
    """Cell-level thread cap from ``HYST_THREADS`` (0 means let OpenMP decide)."""
    raw = os.environ.get("HYST_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"HYST_THREADS must be an integer, got {raw!r}") from None
    return max(n, 0)


@dataclass
class PdeProblem:
    """Grid ``x_j = x_min + j*h`` for j = 1..J; the inflow ghost sits at ``x_min``.

    ``inflow=None`` copies the first cell into the ghost, so nothing enters.
    """

    model: Model
    u_init: Callable[[np.ndarray], np.ndarray]
    x_min: float
    x_max: float
    h: float
    T: float
    lam: float = 0.9
    a: MonotoneCurve = field(default_factory=IdentityCurve)
    flux: MonotoneCurve = field(default_factory=IdentityCurve)
    inflow: Optional[Callable[[float], float]] = None
    init_mode: str = "left"
    u_range: Optional[Sequence[float]] = None

    def __post_init__(self):
        if not (self.h > 0 and self.lam > 0 and self.T >= 0):
            raise ValueError("h, lambda must be positive and T nonnegative")
        if self.x_max <= self.x_min:
            raise ValueError("empty spatial domain")
        if not self.model.is_lipschitz:
            raise SlopeUnavailable("relay hysterons cannot be used in a time-stepping scheme")
        speed, ok = cfl_check(self, self.u_range)
        if not ok:
            raise ValueError(f"CFL violated: lambda*max flux slope = {self.lam * speed:.6g} > 1")

    @property
    def J(self) -> int:
        return int(round((self.x_max - self.x_min) / self.h))

    @property
    def tau(self) -> float:
        return self.lam * self.h

    @property
    def N(self) -> int:
        # the last step is shortened when T is not a multiple of tau
        return int(np.ceil(self.T / self.tau - 1e-9))

    def step_times(self) -> np.ndarray:
        t = np.arange(self.N + 1) * self.tau
        t[-1] = self.T
        return t

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(1, self.J + 1)

    def initial_u(self) -> np.ndarray:
        return np.asarray(self.u_init(self.x), dtype=float) * np.ones(self.J)


def cfl_check(problem: PdeProblem, u_range=None):
    """Sampled ``max flux'`` over the data range and whether ``lambda*max <= 1``."""
    if u_range is None:
        u0 = problem.initial_u()
        lo, hi = float(u0.min()), float(u0.max())
        if problem.inflow is not None:
            tb = np.linspace(0.0, problem.T, 201)
            phi = np.array([problem.inflow(t) for t in tb])
            lo, hi = min(lo, phi.min()), max(hi, phi.max())
    else:
        lo, hi = u_range
    us = np.linspace(lo, hi, 401)
    speed = float(np.max(problem.flux.slope(us)))
    return speed, problem.lam * speed <= 1.0 + 1e-12


@dataclass
class GridState:
    U: np.ndarray
    W: np.ndarray
    V: np.ndarray  # (J, K)
    n: int = 0

    def copy(self) -> "GridState":
        return GridState(self.U.copy(), self.W.copy(), self.V.copy(), self.n)


def initial_state(problem: PdeProblem) -> GridState:
    U = problem.initial_u()
    model = problem.model
    V = np.empty((len(U), model.K))
    for j, u in enumerate(U):
        V[j] = init_state(model, u, problem.init_mode).v
    if model.is_play:
        # same summation as the step kernels, so a steady state stays bit-identical
        W = np.array([model.output(v) for v in V])
    else:
        W, _, _ = evaluate_cells(model, V, U)
    return GridState(U, W, V, 0)


def _cells_solve_curves(model, a, V, rhs, U0, width, config):
    """Vectorized safeguarded Newton on per-cell brackets."""
    J = len(U0)

    def rho(U, slope=True):
        W, Vn, S = evaluate_cells(model, V, U, slope)
        return a(U) + W - rhs, a.slope(U) + S, W, Vn

    tol = config.abs_tol + config.rel_tol * np.abs(rhs)
    r0, d0, _, _ = rho(U0)
    lo = np.where(r0 < 0, U0, -np.inf)
    hi = np.where(r0 < 0, np.inf, U0)
    # grow the missing bracket end
    step = width.copy()
    need = np.abs(r0) > tol
    for _ in range(EXPAND_LIMIT):
        up = need & np.isinf(hi)
        dn = need & np.isinf(lo)
        if not (up.any() or dn.any()):
            break
        trial = np.where(up, U0 + step, np.where(dn, U0 - step, U0))
        rt, _, _, _ = rho(trial, False)
        hi = np.where(up & (rt >= 0), trial, hi)
        lo = np.where(up & (rt < 0), trial, lo)
        lo = np.where(dn & (rt <= 0), trial, lo)
        hi = np.where(dn & (rt > 0), trial, hi)
        step *= 2.0
    unbracketed = need & (np.isinf(lo) | np.isinf(hi))
    lo = np.where(unbracketed, U0, lo)
    hi = np.where(unbracketed, U0, hi)

    x, r, d = U0.copy(), r0, d0
    iters = np.zeros(J, dtype=np.int32)
    done = ~need
    prev = np.abs(r0)
    for _ in range(config.max_iter + BRACKET_BUDGET):
        act = ~done & ~unbracketed
        if not act.any():
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = x - r / d
        ok = (d > 0) & np.isfinite(xn) & (xn > lo) & (xn < hi) & (np.abs(r) <= 0.5 * prev)
        ok |= (iters == 0) & (d > 0) & np.isfinite(xn) & (xn > lo) & (xn < hi)
        xn = np.where(ok, xn, 0.5 * (lo + hi))
        xn = np.where(act, xn, x)
        prev = np.where(act, np.abs(r), prev)
        rn, dn_, _, _ = rho(xn)
        lo = np.where(act & (rn < 0), xn, lo)
        hi = np.where(act & (rn > 0), xn, hi)
        x = np.where(act, xn, x)
        r = np.where(act, rn, r)
        d = np.where(act, dn_, d)
        iters += act
        done |= act & ((np.abs(r) <= tol) | (hi - lo <= 4e-16 * np.maximum(1.0, np.abs(x))))
    W, Vn, _ = evaluate_cells(model, V, x)
    status = np.where(done, OK, FAILED).astype(np.int8)
    return x, W, Vn, iters, status, r


def pde_step(problem: PdeProblem, state: GridState, config: SolverConfig = SolverConfig(),
             t_new: Optional[float] = None, tau: Optional[float] = None) -> GridState:
    """Advance one step; ``t_new`` is the time the inflow is sampled at."""
    model, a, flux = problem.model, problem.a, problem.flux
    lam = problem.lam if tau is None else tau / problem.h
    U, W, V = state.U, state.W, state.V
    if t_new is None:
        t_new = (state.n + 1) * problem.tau
    ghost = U[0] if problem.inflow is None else float(problem.inflow(t_new))
    left = np.empty_like(U)
    left[0] = ghost
    left[1:] = U[:-1]
    rhs = a(U) + W - lam * (flux(U) - flux(left))
    width = np.maximum(np.abs(rhs - a(U) - W), 1e-8 * np.maximum(1.0, np.abs(U)))
    aff = a.affine_coefficients()
    J = len(U)
    if model.is_play and aff is not None:
        alpha, beta, mu, code, hh, eps = model.arrays
        Vn = np.empty_like(V)
        Un = np.empty(J)
        Wn = np.empty(J)
        iters = np.empty(J, dtype=np.int32)
        status = np.empty(J, dtype=np.int32)
        kernels.play_solve_cells(np.ascontiguousarray(V), rhs - model.offset, U, aff[0], aff[1],
                                 alpha, beta, mu, code, hh, eps, config.abs_tol,
                                 config.rel_tol, config.max_iter, config.code, width,
                                 Vn, Un, Wn, iters, status, hyst_threads())
        Wn += model.offset
    else:
        Un, Wn, Vn, iters, status, _ = _cells_solve_curves(model, a, V, rhs, U, width, config)
    bad = np.nonzero(status == FAILED)[0]
    if bad.size and config.on_failure == "raise":
        j = int(bad[0])
        raise NoConvergence(f"step {state.n + 1}, cell {j}: no convergence", step=state.n + 1,
                            cell=j)
    return GridState(Un, Wn, Vn, state.n + 1)


@dataclass
class PdeRun:
    x: np.ndarray
    times: List[float]
    snapshots: Dict[float, GridState]
    trace_u: Optional[np.ndarray]
    trace_w: Optional[np.ndarray]
    final: GridState
    mass: np.ndarray
    boundary_flux: np.ndarray


def integrate(problem: PdeProblem, snapshots: Sequence[float] = (), trace: bool = False,
              config: SolverConfig = SolverConfig(), trace_stride: int = 1) -> PdeRun:
    """Run to T.  Snapshot times are matched to the nearest step."""
    N = problem.N
    times = problem.step_times()
    want = {}
    for t in snapshots:
        if not -1e-12 <= t <= problem.T + 1e-12:
            raise ValueError(f"snapshot time {t} outside [0, {problem.T}]")
        n = int(np.argmin(np.abs(times - t)))
        want.setdefault(n, []).append(float(t))
    state = initial_state(problem)
    snaps: Dict[float, GridState] = {}
    tu: List[np.ndarray] = []
    tw: List[np.ndarray] = []
    mass = np.empty(N + 1)
    bflux = np.zeros(N + 1)
    h = problem.h
    mass[0] = h * np.sum(problem.a(state.U) + state.W)

    def record(st):
        for t in want.get(st.n, ()):
            snaps[t] = st.copy()
        if trace and st.n % trace_stride == 0:
            tu.append(st.U.copy())
            tw.append(st.W.copy())

    record(state)
    for n in range(1, N + 1):
        t_new = times[n]
        tau = times[n] - times[n - 1]
        ghost = state.U[0] if problem.inflow is None else float(problem.inflow(t_new))
        bflux[n] = tau * (float(problem.flux(ghost)) - float(problem.flux(state.U[-1])))
        state = pde_step(problem, state, config, t_new, tau)
        mass[n] = h * np.sum(problem.a(state.U) + state.W)
        record(state)
    return PdeRun(problem.x, sorted(snaps), snaps,
                  np.concatenate(tu) if trace else None,
                  np.concatenate(tw) if trace else None, state, mass, bflux)


def conservation_defect(run: PdeRun) -> float:
    """Worst step mismatch between the mass change and the boundary flux."""
    if len(run.mass) < 2:
        return 0.0
    return float(np.max(np.abs(np.diff(run.mass) - run.boundary_flux[1:])))


def total_variation(run_states: Sequence[GridState], h: float, tau: float) -> float:
    """Discrete space-time variation of ``(U, W)`` over a list of consecutive states."""
    tv = 0.0
    for s in run_states:
        tv += tau * (np.sum(np.abs(np.diff(s.U))) + np.sum(np.abs(np.diff(s.W))))
    for s0, s1 in zip(run_states, run_states[1:]):
        tv += h * (np.sum(np.abs(s1.U - s0.U)) + np.sum(np.abs(s1.W - s0.W)))
    return float(tv)


# ---------------------------------------------------------------- convergence

@dataclass
class PdeConvergence:
    hs: List[float]
    E_u: List[float]
    E_w: List[float]
    p_u: float
    fine_h: float

    def rows(self):
        return list(zip(self.hs, self.E_u, self.E_w))


def _restrict(fine: np.ndarray, ratio: int) -> np.ndarray:
    # fine node x_min + i*h_f with i = ratio*j lands on coarse node j
    return fine[ratio - 1::ratio]


def pde_convergence(make_problem: Callable[[float], PdeProblem], hs: Sequence[float],
                    config: SolverConfig = SolverConfig()) -> PdeConvergence:
    """``E_h = h * sum |U - U_fine|`` at the final time; the finest grid is the proxy."""
    hs = sorted(float(x) for x in hs)[::-1]
    runs = [integrate(make_problem(h), config=config) for h in hs]
    fine = runs[-1].final
    Eu, Ew = [], []
    for h, run in zip(hs[:-1], runs[:-1]):
        ratio = int(round(h / hs[-1]))
        if abs(ratio * hs[-1] - h) > 1e-9 * h:
            raise ValueError("grid sizes must be integer multiples of the finest one")
        Uf = _restrict(fine.U, ratio)
        Wf = _restrict(fine.W, ratio)
        Eu.append(float(h * np.sum(np.abs(run.final.U - Uf))))
        Ew.append(float(h * np.sum(np.abs(run.final.W - Wf))))
    return PdeConvergence(hs[:-1], Eu, Ew, fit_order(hs[:-1], Eu), hs[-1])
