import math

import pytest

from playhyst.roots import (BRACKET, FAILED, HYBRID, NEWTON, OK, OK_FALLBACK, SolverConfig,
                            solve_increasing)


def cubic(x):
    return x ** 3 + x - 10.0, 3 * x * x + 1


def kinked(x):
    # relay-like steep ramp: Newton bounces, bracketing does not care
    r = x + 1000.0 * min(max(x - 1.0, 0.0), 0.001) - 1.5
    d = 1.0 + (1000.0 if 1.0 < x <= 1.001 else 0.0)
    return r, d


@pytest.mark.parametrize("method", [NEWTON, BRACKET, HYBRID])
def test_all_methods_find_smooth_root(method):
    r0, d0 = cubic(0.0)
    res = solve_increasing(cubic, 0.0, r0, d0, 1e-12, 1.0, method)
    assert res.status in (OK, OK_FALLBACK)
    assert abs(res.x - 2.0) < 1e-10


def test_zero_residual_start_takes_no_iterations():
    res = solve_increasing(lambda x: (x, 1.0), 0.0, 0.0, 1.0, 1e-14, 1.0)
    assert res.iters == 0 and res.x == 0.0


def test_linear_newton_one_iteration():
    f = lambda x: (x - 3.0, 1.0)
    res = solve_increasing(f, 0.0, -3.0, 1.0, 1e-14, 1.0, NEWTON)
    assert res.iters == 1 and res.x == 3.0


def test_bracket_stays_safe_on_kink():
    r0, d0 = kinked(0.0)
    res = solve_increasing(kinked, 0.0, r0, d0, 1e-12, 0.01, BRACKET)
    assert res.status != FAILED
    assert abs(kinked(res.x)[0]) <= 1e-12


def test_hybrid_never_fails_when_bracket_exists():
    f = lambda x: (math.atan(x - 50.0) + 1e-3 * (x - 50.0), 1 / (1 + (x - 50.0) ** 2) + 1e-3)
    r0, d0 = f(0.0)
    assert solve_increasing(f, 0.0, r0, d0, 1e-10, 1.0, NEWTON).status == FAILED
    res = solve_increasing(f, 0.0, r0, d0, 1e-10, 1.0, HYBRID)
    assert res.status == OK_FALLBACK and abs(res.x - 50.0) < 1e-6


def test_config_validation_and_tolerance():
    cfg = SolverConfig(abs_tol=1e-10, rel_tol=1e-6)
    assert cfg.tol(-2.0) == pytest.approx(1e-10 + 2e-6)
    assert SolverConfig(method="bracket").code == BRACKET
    for bad in (dict(method="x"), dict(abs_tol=0), dict(max_iter=0), dict(on_failure="skip")):
        with pytest.raises(ValueError):
            SolverConfig(**bad)
