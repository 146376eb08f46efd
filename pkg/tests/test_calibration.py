import math
from fractions import Fraction

import numpy as np
import pytest

from playhyst import scenarios as sc
from playhyst.calibration import (GeneralizedTrapezoid, ScanningData, boundary_error,
                                  calibrate_generalized, calibrate_hierarchical,
                                  calibrate_linear_play, calibrate_preisach,
                                  calibrate_trapezoid, exact, make_graph, partition_range,
                                  rational_approx, trapezoid_rows)
from playhyst.core import Truncation
from playhyst.curves import LangmuirCurve, PiecewiseLinearCurve
from playhyst.errors import (BudgetExceeded, ConstraintOrderViolation, DegenerateSlope,
                             NegativeWeight)
from playhyst.model import PREISACH0, PREISACH_EPS, PREISACH_SMOOTH, preisach_signature

TRAP = GeneralizedTrapezoid.from_vertices([(3, 0), (9, 0), (11, 5), (4, 5)])


def test_exact_decimal_inputs():
    assert exact(11.2) == Fraction(56, 5)
    assert exact(0.1) == Fraction(1, 10)


def test_rational_approx_examples():
    assert tuple(rational_approx(0.5, 100)) == (1, 2)
    # unrounded B: 11/23 is not the closest fraction under the budget
    assert tuple(rational_approx(11 / 23.14159265, 300)) == (10, 21)
    rounded = GeneralizedTrapezoid.from_vertices([(3, 0), (9, 0), (11.3, 5), (4.1, 5)])
    ra = rational_approx(rounded.ratio, 300)
    assert tuple(ra) == (11, 23) and ra.K == 253
    assert tuple(rational_approx(TRAP.ratio, 100)) == (1, 2)


def test_rational_approx_is_optimal_and_reduced():
    r = Fraction(7, 10) + Fraction(1, 997)
    ra = rational_approx(r, 60)
    assert math.gcd(ra.m, ra.n) == 1 and ra.K <= 60
    best = min(abs(Fraction(m, n) - r) for m in range(1, 61) for n in range(1, 61 // m + 1))
    assert abs(ra.value - r) == best


def test_trapezoid_golden_rows():
    model, adj = calibrate_trapezoid(TRAP, 100)
    rows = [(h.mu, h.constraint.alpha, h.constraint.beta, h.trunc.h) for h in model.hysterons]
    assert rows == [(2.5, 3.0, 9.0, 1.0), (2.5, 3.0, 10.0, 1.0)]
    assert adj == TRAP


def test_trapezoid_adjusted_case():
    t = GeneralizedTrapezoid.from_vertices([(3, 0), (9, 0), (11.2, 5), (4.1, 5)])
    rows = trapezoid_rows(t.alpha, t.beta, t.A, t.B, t.w_min, t.w_max, 100)
    assert rows.K == 2
    assert rows.mu_k == Fraction(25, 11)
    assert rows.h_star == Fraction(11, 10)
    model, adj = calibrate_trapezoid(t, 100)
    for h in model.hysterons:
        assert abs(h.mu - 25 / 11) <= 1e-12 and abs(h.trunc.h - 1.1) <= 1e-12
    assert [h.constraint.beta for h in model.hysterons] == [9.0, pytest.approx(10.1)]
    assert adj.A == pytest.approx(4.1) and adj.B == pytest.approx(11.2)


def test_rounded_b_rows():
    rows = trapezoid_rows(3, 9, 4.1, 11.3, 0, 5, 300)
    assert rows.K == 253
    assert rows.h_star == Fraction(1, 10) and rows.mu_star == 50
    assert rows.alphas[22] == 3 and rows.alphas[23] == Fraction(31, 10)
    assert rows.alphas[252] == 4 and rows.betas[252] == Fraction(112, 10)


def test_square_sides_give_one_hysteron():
    t = GeneralizedTrapezoid(1, 3, 2, 4, 0, 2)
    model, _ = calibrate_trapezoid(t)
    assert model.K == 1
    hy = model.hysterons[0]
    assert hy.mu == 2.0 and hy.trunc.h == 1.0


def test_trapezoid_pin_right_keeps_right_slope():
    t = GeneralizedTrapezoid.from_vertices([(3, 0), (9, 0), (11.3, 5), (4.1, 5)])
    _, adj = calibrate_trapezoid(t, 10, pin="right")
    assert adj.B == pytest.approx(11.3)


def test_exact_trapezoid_boundary_error_is_zero():
    model, _ = calibrate_trapezoid(TRAP)
    gl = PiecewiseLinearCurve([(3, 0), (4, 5)])
    gr = PiecewiseLinearCurve([(9, 0), (11, 5)])
    assert boundary_error(model, gl, gr, graph=make_graph(gl, gr, (0, 5))) <= 1e-10


def test_trapezoid_errors():
    with pytest.raises(DegenerateSlope):
        trapezoid_rows(3, 9, 3, 11, 0, 5)
    with pytest.raises(ConstraintOrderViolation):
        GeneralizedTrapezoid(5, 4, 6, 7, 0, 1)


def test_preisach_midpoints():
    gl = PiecewiseLinearCurve([(0, 0), (2, 4)])
    gr = PiecewiseLinearCurve([(0, 0), (4, 4)])
    m = calibrate_preisach(gl, gr, 2, w_range=(0, 4))
    assert m.kind == PREISACH0
    assert preisach_signature(m) == [(0.5, 1.0, 1.0), (1.5, 3.0, 1.0)]
    assert [h.trunc.h for h in m.hysterons] == [2.0, 2.0]


def test_preisach_eps_and_smooth_normalization():
    gl = PiecewiseLinearCurve([(0, 0), (2, 4)])
    gr = PiecewiseLinearCurve([(0, 0), (4, 4)])
    m = calibrate_preisach(gl, gr, 2, eps=0.1, w_range=(0, 4))
    assert m.kind == PREISACH_EPS
    for h in m.hysterons:
        assert h.mu * h.trunc.h == pytest.approx(2.0)
    s = calibrate_preisach(gl, gr, 2, smooth=True, w_range=(0, 4))
    assert s.kind == PREISACH_SMOOTH and s.hysterons[0].trunc == Truncation.smooth(2.0)


def test_preisach_collapsed_band():
    c = PiecewiseLinearCurve([(0, 0), (2, 4)])
    m = calibrate_preisach(c, c, 1, w_range=(0, 4))
    (a, b, _), = preisach_signature(m)
    assert a == b == 1.0


def test_preisach_boundary_error_below_step():
    gl, gr = sc.ch4_curves()
    m = sc.ch4_models()["preisach_eps"]
    g = make_graph(gl, gr)
    assert boundary_error(m, gl, gr) <= (g.w_max - g.w_min) / 50 + 1e-9


def test_linear_play_weights():
    gr = PiecewiseLinearCurve([(0, 0), (10, 20)])
    m = calibrate_linear_play(gr, np.linspace(0, 10, 6))
    assert m.hysterons[0].mu == pytest.approx(2.0)
    assert all(h.mu == 0 for h in m.hysterons[1:])
    with pytest.raises(NegativeWeight):
        calibrate_linear_play(LangmuirCurve(1, 1), np.linspace(0, 3, 5))


def test_linear_play_convex_curve():
    _, gr = sc.convex_concave_curves()
    m = calibrate_linear_play(gr, np.linspace(1, 3, 51))
    assert all(h.mu >= 0 for h in m.hysterons)
    assert all(h.constraint.alpha == 1.0 for h in m.hysterons)


def test_partition_single_slab_is_whole_graph():
    gl, gr = sc.ch4_curves()
    (t,) = partition_range(gl, gr, 1)
    g = make_graph(gl, gr)
    assert (t.w_min, t.w_max) == (g.w_min, g.w_max)


def test_partition_continuity():
    gl, gr = sc.ch4_curves()
    slabs = partition_range(gl, gr, 7)
    assert len(slabs) == 7
    for s, t in zip(slabs, slabs[1:]):
        assert (s.A, s.B, s.w_max) == (t.alpha, t.beta, t.w_min)


def test_hierarchical_exact_stack():
    # two stacked trapezoids with ratio 1/2 each: recovered on the first pass
    gl = PiecewiseLinearCurve([(3, 0), (4, 5), (6, 10)])
    gr = PiecewiseLinearCurve([(9, 0), (11, 5), (15, 10)])
    res = calibrate_hierarchical(gl, gr, 2, 10, levels=[0, 5, 10])
    assert res.iterations == 1 and res.slab_K == [2, 2]
    assert res.boundary_error <= 1e-10
    for s, t in zip(res.slabs, res.slabs[1:]):
        assert (s.A, s.B) == (t.alpha, t.beta)


def test_hierarchical_ch4_sizes_and_quality():
    gl, gr = sc.ch4_curves()
    uni = calibrate_hierarchical(gl, gr, qmax=1, **sc.CH4_UNIFORM)
    ada = calibrate_hierarchical(gl, gr, qmax=1, **sc.CH4_ADAPTIVE)
    assert uni.K == 42
    assert abs(ada.K - 287) <= 0.2 * 287
    assert ada.boundary_error < uni.boundary_error


def test_hierarchical_convex_concave_size():
    assert sc.convex_concave_models()["nonlinear"].K == 106


def test_hierarchical_budget():
    gl, gr = sc.ch4_curves()
    res = calibrate_hierarchical(gl, gr, 7, 100, qmax=6, budget=60)
    assert res.converged and res.K <= 60 and res.iterations > 1
    with pytest.raises(BudgetExceeded):
        calibrate_hierarchical(gl, gr, 7, 100, qmax=2, budget=5, strict=True)


def test_generalized_is_gamma():
    gl, gr = sc.intro_curves()
    m = calibrate_generalized(gl, gr)
    assert m.K == 1 and m.kind == "gamma"


def test_scanning_data_harmonize():
    left = [(0, 0), (1, 2), (2, 4)]
    right = [(0, 0), (3, 3), (4, 4)]
    sd = ScanningData.harmonize(left, right)
    assert sd.w == (0.0, 2.0, 3.0, 4.0)
    gl, gr = sd.curves()
    assert gl(1.5) == 3.0 and gr(3.0) == 3.0
