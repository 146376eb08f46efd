"""Implicit time stepping for ``d/dt (a(u) + w) = f`` with ``w`` a hysteresis output."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from . import kernels
from .curves import IdentityCurve, MonotoneCurve
from .errors import NoConvergence, SlopeUnavailable
from .model import Model, ModelState, init_state, response
from .roots import FAILED, OK_FALLBACK, SolverConfig, solve_increasing
from .scenarios import exampleode_source, fcont, fdisc, fdisc_average


# ---------------------------------------------------------------- sources

@dataclass(frozen=True)
class Source:
    """Right-hand side ``f``.  Smooth sources are sampled at the step end,
    others are averaged over the step."""

    name: str
    fn: Optional[Callable[[float], float]] = None
    smooth: bool = True
    average: Optional[Callable[[float, float], float]] = None
    series: Optional[tuple] = None

    def value(self, n: int, t0: float, t1: float) -> float:
        if self.series is not None:
            return float(self.series[n - 1])
        if self.smooth:
            return float(self.fn(t1))
        if self.average is not None:
            return float(self.average(t0, t1))
        val, _ = quad(self.fn, t0, t1, limit=200)
        return val / (t1 - t0)


def _step_average(t0, t1):
    # f = 1 up to t = 9 and -1 after
    if t1 <= 9.0:
        return 1.0
    if t0 >= 9.0:
        return -1.0
    return ((9.0 - t0) - (t1 - 9.0)) / (t1 - t0)


SOURCES = {
    "fcont": Source("fcont", fcont, True),
    "fdisc": Source("fdisc", fdisc, False, fdisc_average),
    "pm1": Source("pm1", exampleode_source, False, _step_average),
    "zero": Source("zero", lambda t: 0.0, True),
}


def make_source(spec) -> Source:
    if isinstance(spec, Source):
        return spec
    if isinstance(spec, str):
        try:
            return SOURCES[spec]
        except KeyError:
            raise ValueError(f"unknown source {spec!r}") from None
    if callable(spec):
        return Source("custom", spec, False)
    return Source("series", series=tuple(float(x) for x in spec), smooth=True)


# ---------------------------------------------------------------- problem and run

@dataclass
class OdeProblem:
    model: Model
    source: Source
    u_init: float
    T: float
    tau: float
    a: MonotoneCurve = field(default_factory=IdentityCurve)
    init_mode: str = "left"
    v_init: Optional[Sequence[float]] = None

    def __post_init__(self):
        self.source = make_source(self.source)
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not self.model.is_lipschitz:
            raise SlopeUnavailable("relay hysterons cannot be used in a time-stepping scheme")
        N = round(self.T / self.tau)
        if abs(N * self.tau - self.T) > 1e-9 * max(1.0, abs(self.T)):
            raise ValueError(f"T={self.T} is not an integer multiple of tau={self.tau}")
        if self.source.series is not None and len(self.source.series) < N:
            raise ValueError("source series shorter than the number of steps")

    @property
    def N(self) -> int:
        return round(self.T / self.tau)

    def initial_state(self) -> ModelState:
        return init_state(self.model, self.u_init, self.init_mode, self.v_init)


@dataclass
class OdeRun:
    t: np.ndarray
    U: np.ndarray
    W: np.ndarray
    V: np.ndarray
    F: np.ndarray
    iters: np.ndarray
    resid: np.ndarray
    status: np.ndarray

    @property
    def failures(self) -> int:
        return int(np.count_nonzero(self.status == FAILED))

    @property
    def fallbacks(self) -> int:
        return int(np.count_nonzero(self.status == OK_FALLBACK))

    @property
    def mean_iters(self) -> float:
        return float(np.mean(self.iters[1:])) if len(self.iters) > 1 else 0.0


@dataclass
class StepResult:
    U: float
    W: float
    state: ModelState
    iters: int
    resid: float
    status: int


def residual(problem: OdeProblem, state: ModelState, rhs: float, U: float) -> float:
    w, _, _ = response(problem.model, state.v, U)
    return problem.a(U) + w - rhs


def solve_step(problem: OdeProblem, config: SolverConfig, state: ModelState, rhs: float,
               width: Optional[float] = None, step_index=None) -> StepResult:
    """Solve ``a(U) + G(vbar; U) = rhs`` for U, starting from ``state.last_u``."""
    model, a = problem.model, problem.a
    u0 = state.last_u
    if width is None:
        width = 1e-8 * max(1.0, abs(u0))
    aff = a.affine_coefficients()
    if model.is_play and aff is not None:
        alpha, beta, mu, code, hh, eps = model.arrays
        vout = np.empty(model.K)
        U, W, r, it, st = kernels.play_solve(
            np.ascontiguousarray(state.v, float), rhs - model.offset, u0, aff[0], aff[1],
            alpha, beta, mu, code, hh, eps, config.abs_tol, config.rel_tol, config.max_iter,
            config.code, width, vout)
        W += model.offset
    else:
        vbar = state.v

        def f(x):
            w, _, s = response(model, vbar, x, True)
            return a(x) + w - rhs, a.slope(x) + s

        r0, d0 = f(u0)
        res = solve_increasing(f, u0, r0, d0, config.tol(rhs), width, config.code,
                               config.max_iter)
        U, r, it, st = res.x, res.resid, res.iters, res.status
        W, vout, _ = response(model, vbar, U)
    if st == FAILED and config.on_failure == "raise":
        raise NoConvergence(f"step {step_index}: residual {r:.3e} after {it} iterations "
                            f"({config.method})", step=step_index)
    return StepResult(U, W, ModelState(vout, U), it, r, st)


def integrate(problem: OdeProblem, config: SolverConfig = SolverConfig()) -> OdeRun:
    N = problem.N
    tau = problem.T / N
    K = problem.model.K
    t = np.arange(N + 1) * tau
    U = np.empty(N + 1)
    W = np.empty(N + 1)
    V = np.empty((N + 1, K))
    F = np.zeros(N + 1)
    iters = np.zeros(N + 1, dtype=np.int32)
    resid = np.zeros(N + 1)
    status = np.zeros(N + 1, dtype=np.int8)
    st = problem.initial_state()
    U[0] = st.last_u
    W[0] = problem.model.output(st.v)
    V[0] = st.v
    a = problem.a
    for n in range(1, N + 1):
        Fn = problem.source.value(n, t[n - 1], t[n])
        F[n] = Fn
        # committed W^{n-1}, not a re-evaluation, keeps the balance telescoping exact
        rhs = a(U[n - 1]) + W[n - 1] + tau * Fn
        width = max(tau * abs(Fn), 1e-8 * max(1.0, abs(U[n - 1])))
        res = solve_step(problem, config, st, rhs, width, n)
        st = res.state
        U[n], W[n], V[n] = res.U, res.W, st.v
        iters[n], resid[n], status[n] = res.iters, res.resid, res.status
    return OdeRun(t, U, W, V, F, iters, resid, status)


def balance_check(run: OdeRun, problem: OdeProblem) -> float:
    """Worst step defect of ``|da| + sum mu_k |db_k| = tau |F|``."""
    model = problem.model
    tau = problem.T / problem.N
    aU = np.array([problem.a(float(x)) for x in run.U])
    B = np.array([model.truncated(v) for v in run.V])
    lhs = np.abs(np.diff(aU)) + np.sum(np.abs(np.diff(B, axis=0)), axis=1)
    if len(lhs) == 0:
        return 0.0
    return float(np.max(np.abs(lhs - tau * np.abs(run.F[1:]))))


# ---------------------------------------------------------------- convergence

@dataclass
class ConvergenceTable:
    taus: List[float]
    E_u: List[float]
    E_w: List[float]
    p_u: float
    p_w: float
    fine_tau: float

    def rows(self):
        return list(zip(self.taus, self.E_u, self.E_w))


def fit_order(hs, errs) -> float:
    """Least-squares slope of log(err) against log(h)."""
    x = np.log(np.asarray(hs, float))
    y = np.log(np.maximum(np.asarray(errs, float), 1e-300))
    if len(x) < 2:
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


def _compare(coarse: OdeRun, fine: OdeRun):
    ratio = (len(fine.t) - 1) // (len(coarse.t) - 1)
    if ratio * (len(coarse.t) - 1) != len(fine.t) - 1:
        raise ValueError("fine step count must be a multiple of the coarse one")
    Uf = fine.U[::ratio]
    Wf = fine.W[::ratio]
    return float(np.max(np.abs(coarse.U - Uf))), float(np.max(np.abs(coarse.W - Wf)))


# Step residuals add up over N steps, so the default rel_tol would swamp the
# discretization error at small tau.
STUDY_CONFIG = SolverConfig(rel_tol=1e-12)


def convergence_study(make_problem: Callable[[float], OdeProblem], taus: Sequence[float],
                      config: SolverConfig = STUDY_CONFIG, workers: int = 1) -> ConvergenceTable:
    """Errors against the run with the smallest step, which serves as the reference."""
    taus = sorted(float(x) for x in taus)[::-1]
    fine_tau = taus[-1]
    coarse = taus[:-1]

    def run(tau):
        return integrate(make_problem(tau), config)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            runs = list(ex.map(run, taus))
    else:
        runs = [run(x) for x in taus]
    fine = runs[-1]
    E = [_compare(r, fine) for r in runs[:-1]]
    Eu = [e[0] for e in E]
    Ew = [e[1] for e in E]
    return ConvergenceTable(coarse, Eu, Ew, fit_order(coarse, Eu), fit_order(coarse, Ew),
                            fine_tau)
