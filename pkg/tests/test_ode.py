import numpy as np
import pytest

from playhyst import scenarios as sc
from playhyst.core import Truncation
from playhyst.curves import PiecewiseLinearCurve
from playhyst.errors import NoConvergence, SlopeUnavailable
from playhyst.model import LINEAR, PREISACH0, Hysteron, Model, init_state
from playhyst.ode import (OdeProblem, SolverConfig, Source, balance_check, convergence_study,
                          fit_order, integrate, make_source, residual, solve_step)


def intro_problem(tau=1e-3, T=18.0, source="pm1"):
    return OdeProblem(sc.intro_model(), source, 0.0, T, tau)


def trivial_model():
    return Model([Hysteron.play(0.0, 0, 0)], LINEAR)


def test_residual_of_trivial_model():
    p = OdeProblem(trivial_model(), "zero", 0.0, 1.0, 0.1)
    st = p.initial_state()
    assert residual(p, st, 3.0, 1.0) == -2.0
    res = solve_step(p, SolverConfig(method="newton"), st, 3.0)
    assert res.U == 3.0 and res.iters == 1


@pytest.mark.parametrize("method", ["newton", "bracket", "hybrid"])
def test_intro_stationary_roots(method):
    p = intro_problem()
    st = init_state(p.model, 0.0)
    cfg = SolverConfig(method=method, rel_tol=1e-13)
    r = solve_step(p, cfg, st, 2.0, 1.0)
    assert r.U == pytest.approx(1.0, abs=1e-12) and r.W == pytest.approx(1.0, abs=1e-12)
    r = solve_step(p, cfg, st, 8.5, 1.0)
    assert r.U == pytest.approx(4.5, abs=1e-12) and r.W == pytest.approx(4.0, abs=1e-12)


def test_exampleode_values():
    p = intro_problem()
    run = integrate(p)
    i9, i18 = 9000, 18000
    assert run.t[i9] == pytest.approx(9.0)
    assert abs(run.U[i9] - 5) <= 2e-3 and abs(run.W[i9] - 4) <= 2e-3
    assert abs(run.U[i18]) <= 2e-3
    assert balance_check(run, p) <= 1e-10


def test_zero_source_is_equilibrium():
    m = sc.convex_concave_models()["nonlinear"]
    p = OdeProblem(m, "zero", 2.0, 1.0, 0.1)
    run = integrate(p)
    assert np.all(run.U == 2.0) and np.all(run.W == run.W[0])
    assert balance_check(run, p) == 0.0


def test_monotone_loading():
    m = sc.convex_concave_models()["nonlinear"]
    run = integrate(OdeProblem(m, lambda t: 1.0 + np.sin(t) ** 2, 1.0, 1.0, 0.01))
    assert np.all(np.diff(run.U) >= -1e-12) and np.all(np.diff(run.W) >= -1e-12)


def test_methods_agree_on_every_step():
    m = sc.convex_concave_models()["nonlinear"]
    runs = [integrate(OdeProblem(m, "fcont", 1.0, 3.0, 0.01),
                      SolverConfig(method=meth, rel_tol=1e-12))
            for meth in ("newton", "bracket", "hybrid")]
    for r in runs[1:]:
        assert np.max(np.abs(r.U - runs[0].U)) <= 1e-9


def test_relay_models_rejected():
    relay = Model([Hysteron.play(1, 1, 3, Truncation.heaviside(1))], PREISACH0)
    with pytest.raises(SlopeUnavailable):
        OdeProblem(relay, "zero", 0.0, 1.0, 0.1)


def test_problem_validation():
    with pytest.raises(ValueError):
        OdeProblem(trivial_model(), "zero", 0.0, 1.0, 0.3)
    with pytest.raises(ValueError):
        OdeProblem(trivial_model(), "nope", 0.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        OdeProblem(trivial_model(), [1.0, 2.0], 0.0, 1.0, 0.1)


def test_sources():
    s = make_source("fdisc")
    assert not s.smooth
    # cell averages integrate the indicator exactly
    assert s.value(1, 0.0, 2 * np.pi) == pytest.approx(0.0, abs=1e-14)
    assert make_source("fcont").value(1, 0.0, 0.5) == pytest.approx(sc.fcont(0.5))
    assert make_source([1.0, 2.0]).value(2, 0.1, 0.2) == 2.0
    custom = make_source(lambda t: t)
    assert custom.value(1, 0.0, 2.0) == pytest.approx(1.0)
    assert make_source("pm1").value(1, 8.5, 9.5) == 0.0


def test_newton_failure_raises_or_records():
    m = sc.convex_concave_solver_models()["preisach_eps"]
    p = OdeProblem(m, "fdisc", 1.0, 10.0, 0.01)
    with pytest.raises(NoConvergence):
        integrate(p, SolverConfig(method="newton"))
    run = integrate(p, SolverConfig(method="newton", on_failure="record"))
    assert run.failures > 0
    run = integrate(p, SolverConfig(method="hybrid"))
    assert run.failures == 0


def test_curve_pair_model_with_nonlinear_a():
    a = PiecewiseLinearCurve([(0, 0), (1, 1), (2, 3)])
    p = OdeProblem(sc.intro_model(), "pm1", 0.0, 2.0, 0.01, a=a)
    run = integrate(p, SolverConfig(rel_tol=1e-13))
    assert run.failures == 0
    assert balance_check(run, p) <= 1e-10


def test_fit_order_and_linear_problem_first_order():
    assert fit_order([0.1, 0.01], [1e-1, 1e-2]) == pytest.approx(1.0)
    tab = convergence_study(lambda tau: OdeProblem(trivial_model(), "fcont", 0.0, 2.0, tau),
                            [0.1, 0.01, 0.001, 1e-4])
    assert 0.9 <= tab.p_u <= 1.1
    assert len(tab.rows()) == 3 and tab.fine_tau == 1e-4
