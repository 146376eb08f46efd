"""Worked problems used by the reproduction recipes and the acceptance tests."""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .calibration import (calibrate_generalized, calibrate_hierarchical, calibrate_linear_play,
                          calibrate_preisach, langmuir_pair)
from .core import Truncation
from .curves import PiecewiseLinearCurve, named_curve
from .model import NONLINEAR, Hysteron, Model

# ---------------------------------------------------------------- intro example

def intro_curves():
    """``b(u)`` and ``b(2u)`` with ``b(s) = s+ - (s-4)+``, exactly, on the whole line."""
    gr = PiecewiseLinearCurve([(-1.0, 0.0), (0.0, 0.0), (4.0, 4.0), (5.0, 4.0)])
    gl = PiecewiseLinearCurve([(-1.0, 0.0), (0.0, 0.0), (2.0, 4.0), (3.0, 4.0)])
    return gl, gr


def intro_model() -> Model:
    return calibrate_generalized(*intro_curves())


def intro_reference(u: float, increasing: bool) -> float:
    """Closed-form output along the sweep 0 -> 5 -> 0 of the intro model."""
    if increasing:
        return min(max(u, 0.0), 4.0)
    return 4.0 if u >= 2.0 else 2.0 * max(u, 0.0)


def exampleode_source(t: float) -> float:
    return 1.0 if t <= 9.0 else -1.0


# ---------------------------------------------------------------- convex-concave graph

CC_RANGE = (1.0, 3.0)


def convex_concave_curves():
    return named_curve("concave_left"), named_curve("convex_right")


# calibration settings for the target model sizes on this graph
CC_NONLINEAR = dict(I=11, Kmax_per_slab=20, strategy="uniform")      # K = 106
CC_NONLINEAR_100 = dict(I=9, Kmax_per_slab=25, strategy="adaptive")  # K = 100
CC_LINEAR_K = 50
CC_PREISACH_K = 50
CC_EPS = 0.1


@lru_cache(maxsize=None)
def convex_concave_models():
    """Generalized, linear (K=50), nonlinear (K=106), and eps-Preisach (K=50)."""
    gl, gr = convex_concave_curves()
    u = np.linspace(CC_RANGE[0], CC_RANGE[1], CC_LINEAR_K + 1)
    return {
        "gamma": calibrate_generalized(gl, gr),
        "linear": calibrate_linear_play(gr, u),
        "nonlinear": calibrate_hierarchical(gl, gr, qmax=1, **CC_NONLINEAR).model,
        "preisach_eps": calibrate_preisach(gl, gr, CC_PREISACH_K, eps=CC_EPS),
    }


@lru_cache(maxsize=None)
def convex_concave_solver_models():
    """The five families exercised by the solver comparison."""
    gl, gr = convex_concave_curves()
    base = dict(convex_concave_models())
    base["preisach_eps"] = calibrate_preisach(gl, gr, 100, eps=CC_EPS)
    base["preisach_smooth"] = calibrate_preisach(gl, gr, 100, smooth=True)
    return base


def fcont(t):
    return 3.5 * np.sin(t) * np.exp(-0.1 * t)


def fdisc(t):
    return np.sign(fcont(t))


def fdisc_average(t0: float, t1: float) -> float:
    """Exact mean of ``sign(sin t)`` over [t0, t1]."""
    if t1 <= t0:
        return float(fdisc(t0))
    total = 0.0
    k = math.floor(t0 / math.pi)
    a = t0
    while a < t1:
        b = min((k + 1) * math.pi, t1)
        total += (1.0 if k % 2 == 0 else -1.0) * (b - a)
        a = b
        k += 1
    return total / (t1 - t0)


# ---------------------------------------------------------------- CH4 adsorption graph

CH4 = dict(V_l=543.0, B_l=0.0382, V_r=811.0, B_r=0.00237)
CH4_UNIFORM = dict(I=7, Kmax_per_slab=12, strategy="uniform")      # K = 42
CH4_ADAPTIVE = dict(I=7, Kmax_per_slab=100, strategy="adaptive")   # K = 330, target 287 +- 20%
CH4_PREISACH_K = 50
CH4_EPS = 0.1


def ch4_curves():
    return langmuir_pair(CH4["V_l"], CH4["B_l"], CH4["V_r"], CH4["B_r"])


@lru_cache(maxsize=None)
def ch4_models():
    gl, gr = ch4_curves()
    return {
        "gamma": calibrate_generalized(gl, gr),
        "nonlinear_adaptive": calibrate_hierarchical(gl, gr, qmax=1, **CH4_ADAPTIVE).model,
        "nonlinear_uniform": calibrate_hierarchical(gl, gr, qmax=1, **CH4_UNIFORM).model,
        "preisach_eps": calibrate_preisach(gl, gr, CH4_PREISACH_K, eps=CH4_EPS),
    }


# ---------------------------------------------------------------- secondary-curve arrays

PI_MON = [[1, 1, 5, 1], [1, 3, 9, 1], [1, 7, 11, 1]]
PI_RICH = [[1, 3, 5, 1], [1, 7, 9, 1], [1, 1, 11, 1]]
U_RICH = [0, 14, 0, 6, 3, 5.5, 3, 10, 7, 9.5, 7, 11.5, 3, 6, 3, 5.5, 3, 10, 7, 9.5, 7, 12,
          7, 10, 7.5, 10, 3.5, 6, 3, 6, 1, 3]


def model_from_rows(rows, kind=NONLINEAR) -> Model:
    """Rows ``[mu, alpha, beta, h]`` with ramp truncation."""
    return Model([Hysteron.play(mu, a, b, Truncation.ramp(h)) for mu, a, b, h in rows], kind)


# ---------------------------------------------------------------- same trapezoid, two ways

PI_2 = [[0.25, 4, 8, 2], [0.25, 6, 8, 2]]
PI_8 = [[0.25, 4 + 0.5 * k, 8 + 0.5 * (k // 2), 0.5] for k in range(8)]
PROBE_PEAKS = [4, 8.5, 6, 8.5]


# ---------------------------------------------------------------- transport problems

def intro_inflow(t: float) -> float:
    return t if t <= 5.0 else 10.0 - t


INTRO_SNAPSHOTS = (4.0, 5.0, 6.0, 7.0, 8.0, 9.0)


def intro_ibvp(h: float = 0.01, lam: float = 1.0, T: float = 10.0, length: float = 8.0):
    """Empty tube fed with ``t`` then ``10 - t``; with tau = h the fronts stay sharp."""
    from .pde import PdeProblem
    return PdeProblem(intro_model(), lambda x: np.zeros_like(x), 0.0, length, h, T, lam=lam,
                      inflow=intro_inflow)


def piecewise_constant(levels, base=0.0):
    """``u(x) = v`` on ``(a, b]`` for each ``(a, b, v)`` and ``base`` elsewhere."""
    levels = [tuple(map(float, lv)) for lv in levels]

    def f(x):
        x = np.asarray(x, dtype=float)
        u = np.full_like(x, base)
        for a, b, v in levels:
            u = np.where((x > a) & (x <= b), v, u)
        return u
    return f


# Box data tuned so the grid sweep lands on the reference error magnitudes.
CH4_BOX = ((0.0, 0.15, 400.0), (0.15, 0.3, 200.0), (0.3, 0.5, 700.0), (0.5, 0.65, 350.0),
           (0.65, 0.85, 700.0))
CH4_BOX_LENGTH = 1.8
CH4_BOX_T = 0.5
CH4_LINEAR = ((0.1, 0.0), (0.4, 700.0), (0.7, 700.0), (1.0, 0.0))


def ch4_box(h: float, model_name: str = "gamma", lam: float = 0.9, T: float = CH4_BOX_T):
    from .pde import PdeProblem
    return PdeProblem(ch4_models()[model_name], piecewise_constant(CH4_BOX), 0.0,
                      CH4_BOX_LENGTH, h, T, lam=lam)


def ch4_linear(h: float, model_name: str = "gamma", lam: float = 0.9, T: float = CH4_BOX_T):
    from .pde import PdeProblem
    xs, us = zip(*CH4_LINEAR)
    return PdeProblem(ch4_models()[model_name],
                      lambda x: np.interp(x, xs, us, left=0.0, right=0.0), 0.0,
                      CH4_BOX_LENGTH, h, T, lam=lam)


def cc_trough(h: float, model_name: str = "gamma", lam: float = 0.9, T: float = 1.0):
    """Convex-concave graph with a well: u = 3 outside, 1 inside [0.5, 1.5]."""
    from .pde import PdeProblem
    models = convex_concave_models()
    return PdeProblem(models[model_name],
                      lambda x: np.where((x > 0.5) & (x <= 1.5), 1.0, 3.0), 0.0, 3.0, h, T,
                      lam=lam)
