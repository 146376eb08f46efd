"""Reproduction recipes: each target writes plot-data CSVs into a directory."""
from __future__ import annotations

import os
import time
from typing import Callable, Dict, List

import numpy as np

from . import scenarios as sc
from .calibration import calibrate_hierarchical, calibrate_preisach, make_graph
from .core import Truncation
from .errors import UnknownTarget
from .model import (LINEAR, NONLINEAR, PREISACH0, PREISACH_EPS, PREISACH_SMOOTH, Hysteron,
                    Model, init_state, preisach_signature, scan_inputs, sweep_trace)
from .modelio import fmt, save_model, write_csv
from .ode import OdeProblem, STUDY_CONFIG, convergence_study, integrate as ode_integrate
from .pde import conservation_defect, integrate as pde_integrate, pde_convergence
from .roots import SolverConfig

TARGETS: Dict[str, Callable] = {}


def target(name):
    def deco(fn):
        TARGETS[name] = fn
        return fn
    return deco


def _trace_rows(tr):
    return zip(tr.u, tr.w)


def _path(out, name):
    return os.path.join(out, name)


# ---------------------------------------------------------------- hysteron gallery

@target("fig2")
def fig2(out: str) -> List[str]:
    unit = {
        "i_nonlinear": (Model([Hysteron.play(1, 1, 3, Truncation.ramp(1))], NONLINEAR),
                        [0, 5, 0]),
        "ii_linear": (Model([Hysteron.play(1, 1, 3)], LINEAR), [0, 5, 0, 4, 1, 3]),
        "iii_preisach": (Model([Hysteron.play(1, 1, 3, Truncation.heaviside(1))], PREISACH0),
                         [0, 5, 0]),
        "iv_preisach_eps": (Model([Hysteron.play(100, 1, 3, Truncation.ramp(0.01))],
                                  PREISACH_EPS), [0, 5, 0]),
        "v_preisach_smooth": (Model([Hysteron.play(1, 1, 3, Truncation.smooth(1))],
                                    PREISACH_SMOOTH), [0, 5, 0, 3.5, 1.25]),
    }
    files = []
    for name, (m, peaks) in unit.items():
        f = _path(out, f"fig2_{name}.csv")
        write_csv(f, ["u", "w"], _trace_rows(sweep_trace(m, peaks, 200)))
        files.append(f)
    return files


@target("fig5")
def fig5(out: str) -> List[str]:
    cases = {
        "a": [[1, 1, 3, 1], [1, 3, 5, 1]],
        "b": [[1, 1, 3, 1], [1, 2, 4, 1]],
        "c": [[1, 1, 3, 1], [2, 2, 4, 0.5]],
        "d": [[1, 1, 3, 1], [2, 2, 3, 0.5]],
        "e": [[1, 1, 3, 1], [1, 2, 3, 1]],
        "f": [[1, 1, 2, 1], [1, 2, 2, 1]],
    }
    files = []
    for name, rows in cases.items():
        f = _path(out, f"fig5_{name}.csv")
        write_csv(f, ["u", "w"], _trace_rows(sweep_trace(sc.model_from_rows(rows), [0, 6, 0], 300)))
        files.append(f)
    return files


# ---------------------------------------------------------------- calibrated graphs

def _sweep_models(out, prefix, models, gl, gr, n=400):
    g = make_graph(gl, gr)
    peaks = [g.u_min, g.u_max, g.u_min]
    files = []
    us = np.linspace(g.u_min, g.u_max, n + 1)
    f = _path(out, f"{prefix}_curves.csv")
    write_csv(f, ["u", "w_left", "w_right"], zip(us, gl(us), gr(us)))
    files.append(f)
    for name, m in models.items():
        f = _path(out, f"{prefix}_{name}.csv")
        write_csv(f, ["u", "w"], _trace_rows(sweep_trace(m, peaks, n)))
        files.append(f)
    return files


@target("fig6")
def fig6(out: str) -> List[str]:
    gl, gr = sc.ch4_curves()
    files = []
    for name, opts in (("uniform", sc.CH4_UNIFORM), ("adaptive", sc.CH4_ADAPTIVE)):
        res = calibrate_hierarchical(gl, gr, qmax=1, **opts)
        m = res.model
        f = _path(out, f"fig6_{name}_slabs.csv")
        write_csv(f, ["slab", "alpha", "beta", "A", "B", "w_min", "w_max", "K"],
                  [(i + 1, float(t.alpha), float(t.beta), float(t.A), float(t.B),
                    float(t.w_min), float(t.w_max), k)
                   for i, (t, k) in enumerate(zip(res.slabs, res.slab_K))])
        files.append(f)
        files += _sweep_models(out, f"fig6_{name}", {f"K{m.K}": m}, gl, gr)
        mf = _path(out, f"fig6_{name}.model")
        save_model(m, mf)
        files.append(mf)
    return files


@target("fig7")
def fig7(out: str) -> List[str]:
    gl, gr = sc.convex_concave_curves()
    return _sweep_models(out, "fig7", sc.convex_concave_models(), gl, gr)


@target("fig8")
def fig8(out: str) -> List[str]:
    gl, gr = sc.ch4_curves()
    return _sweep_models(out, "fig8", sc.ch4_models(), gl, gr)


# ---------------------------------------------------------------- ODE

def _cc_problem(model, source, tau):
    return OdeProblem(model, source, 1.0, 10.0, tau)


@target("fig9")
def fig9(out: str) -> List[str]:
    m = sc.convex_concave_models()["nonlinear"]
    files = []
    for src in ("fcont", "fdisc"):
        run = ode_integrate(_cc_problem(m, src, 1e-4))
        f = _path(out, f"fig9_{src}.csv")
        write_csv(f, ["t", "f", "u", "w"], zip(run.t, run.F, run.U, run.W))
        files.append(f)
    return files


TABLE3_FAMILIES = ("gamma", "linear", "nonlinear", "preisach_eps", "preisach_smooth")


def table3_stats(tau=0.01):
    models = sc.convex_concave_solver_models()
    rows = []
    for fam in TABLE3_FAMILIES:
        m = models[fam]
        for src in ("fcont", "fdisc"):
            for method in ("newton", "hybrid"):
                cfg = SolverConfig(method=method, on_failure="record")
                t0 = time.perf_counter()
                run = ode_integrate(_cc_problem(m, src, tau), cfg)
                dt = time.perf_counter() - t0
                rows.append(dict(family=fam, K=m.K, source=src, method=method,
                                 mean_iters=run.mean_iters, failures=run.failures,
                                 fallbacks=run.fallbacks, seconds=dt))
    return rows


@target("table3")
def table3(out: str) -> List[str]:
    rows = table3_stats()
    f = _path(out, "table3.csv")
    keys = ["family", "K", "source", "method", "mean_iters", "failures", "fallbacks", "seconds"]
    write_csv(f, keys, ([r[k] for k in keys] for r in rows))
    return [f]


TABLE4_TAUS = (0.1, 0.01, 0.001, 1e-4)


@target("table4")
def table4(out: str) -> List[str]:
    models = sc.convex_concave_models()
    rows = []
    for fam in ("gamma", "nonlinear"):
        m = models[fam]
        for src in ("fcont", "fdisc"):
            tab = convergence_study(lambda tau: _cc_problem(m, src, tau), TABLE4_TAUS,
                                    STUDY_CONFIG)
            for tau, eu, ew in tab.rows():
                rows.append((fam, m.K, src, tau, eu, ew, tab.p_u, tab.p_w))
    f = _path(out, "table4.csv")
    write_csv(f, ["family", "K", "source", "tau", "E_u", "E_w", "p_u", "p_w"], rows)
    return [f]


# ---------------------------------------------------------------- PDE

TABLE5_HS = (0.01, 0.005, 0.001, 0.0005)


@target("table5")
def table5(out: str) -> List[str]:
    conv = pde_convergence(lambda h: sc.ch4_box(h), TABLE5_HS)
    f = _path(out, "table5.csv")
    write_csv(f, ["family", "h", "E_u", "E_w", "p_u"],
              (("gamma", h, eu, ew, conv.p_u) for h, eu, ew in conv.rows()))
    files = [f]
    run = pde_integrate(sc.ch4_box(0.005, lam=1.0), snapshots=(0.0, sc.CH4_BOX_T), trace=True)
    for t, st in run.snapshots.items():
        g = _path(out, f"table5_box_t{fmt(t)}.csv")
        write_csv(g, ["x", "u", "w"], zip(run.x, st.U, st.W))
        files.append(g)
    g = _path(out, "table5_box_trace.csv")
    write_csv(g, ["u", "w"], zip(run.trace_u[::7], run.trace_w[::7]))
    files.append(g)
    return files


# ---------------------------------------------------------------- secondary curves

@target("fig10")
def fig10(out: str) -> List[str]:
    files = []
    for name, rows in (("mon", sc.PI_MON), ("rich", sc.PI_RICH)):
        m = sc.model_from_rows(rows)
        st = init_state(m, sc.U_RICH[0])
        inputs = []
        for a, b in zip(sc.U_RICH, sc.U_RICH[1:]):
            inputs.extend(np.linspace(a, b, 101)[1:])
        tr = scan_inputs(m, st, inputs)
        f = _path(out, f"fig10_{name}.csv")
        write_csv(f, ["u", "w"], _trace_rows(tr))
        files.append(f)
    return files


@target("fig11")
def fig11(out: str) -> List[str]:
    gl, gr = sc.convex_concave_curves()
    models = {
        "mon": sc.model_from_rows(sc.PI_MON),
        "rich": sc.model_from_rows(sc.PI_RICH),
        "ch4_nonlinear": sc.ch4_models()["nonlinear_adaptive"],
        "convex_nonlinear": calibrate_hierarchical(gl, gr, qmax=1, **sc.CC_NONLINEAR_100).model,
        "convex_preisach_eps": calibrate_preisach(gl, gr, 100, eps=sc.CC_EPS),
    }
    files = []
    for name, m in models.items():
        f = _path(out, f"fig11_{name}.csv")
        write_csv(f, ["alpha", "beta", "mu"], preisach_signature(m))
        files.append(f)
    return files


# ---------------------------------------------------------------- intro

@target("intro")
def intro(out: str) -> List[str]:
    m = sc.intro_model()
    tr = sweep_trace(m, [0, 5, 0], 500)
    n = 500
    ref = [sc.intro_reference(u, i <= n) for i, u in enumerate(tr.u)]
    f = _path(out, "intro_path.csv")
    write_csv(f, ["u", "w", "w_exact"], zip(tr.u, tr.w, ref))
    files = [f]
    run = pde_integrate(sc.intro_ibvp(0.01), snapshots=sc.INTRO_SNAPSHOTS)
    for t in sc.INTRO_SNAPSHOTS:
        st = run.snapshots[t]
        g = _path(out, f"intro_t{int(t)}.csv")
        write_csv(g, ["x", "u", "w"], zip(run.x, st.U, st.W))
        files.append(g)
    return files


def reproduce(name: str, out: str = "artifacts") -> List[str]:
    try:
        fn = TARGETS[name]
    except KeyError:
        raise UnknownTarget(f"unknown target {name!r}; choose from {', '.join(sorted(TARGETS))}")
    os.makedirs(out, exist_ok=True)
    return fn(out)


__all__ = ["TARGETS", "reproduce", "table3_stats", "conservation_defect"]
