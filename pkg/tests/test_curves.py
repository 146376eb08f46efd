import math

import numpy as np
import pytest

from playhyst.curves import (AffineShift, IdentityCurve, LangmuirCurve, PiecewiseLinearCurve,
                             curve_from_dict, inverse_max, inverse_min, langmuir_crossing,
                             load_curve_csv, named_curve, registered_curves)
from playhyst.errors import ConfigError, OutOfRange

B_CURVE = PiecewiseLinearCurve([(0, 0), (4, 4), (5, 4)])


def test_langmuir_limits():
    c = LangmuirCurve(811, 0.00237)
    assert c(0.0) == 0.0
    assert c(1e12) == pytest.approx(811, rel=1e-6)
    assert c(1e12) < 811


def test_identity_and_shift():
    assert IdentityCurve()(3.7) == 3.7
    assert IdentityCurve().inverse_min(2.5) == 2.5
    assert AffineShift(1.5)(4.0) == 2.5
    assert AffineShift(1.5).inverse_max(2.5) == 4.0


def test_pwl_eval_at_flat_part():
    assert B_CURVE(4.5) == 4.0
    for x, y in B_CURVE.points:
        assert B_CURVE(x) == y


def test_pwl_extension_rules():
    # end slope 0 extends as a constant, nonzero end slope extends linearly
    assert B_CURVE(9.0) == 4.0
    assert B_CURVE(-2.0) == -2.0
    c = PiecewiseLinearCurve([(0, 0), (1, 2)])
    assert c(3.0) == 6.0


def test_pwl_vector_matches_scalar():
    xs = np.linspace(-2, 7, 91)
    assert np.array_equal(B_CURVE(xs), np.array([B_CURVE(float(x)) for x in xs]))


def test_pwl_flat_inverse():
    assert B_CURVE.inverse_min(4) == 4
    assert B_CURVE.inverse_max(4) == 5
    assert B_CURVE.inverse_min(2) == B_CURVE.inverse_max(2) == 2


def test_pwl_inverse_out_of_range():
    with pytest.raises(OutOfRange):
        B_CURVE.inverse_min(4.5)


def test_langmuir_inverse_half_capacity():
    c = LangmuirCurve(543, 0.0382)
    assert c.inverse_min(271.5) == pytest.approx(1 / 0.0382, rel=1e-13)
    with pytest.raises(OutOfRange):
        c.inverse_min(543)


def test_pwl_validation():
    with pytest.raises(ValueError):
        PiecewiseLinearCurve([(0, 0)])
    with pytest.raises(ValueError):
        PiecewiseLinearCurve([(0, 0), (0, 1)])
    with pytest.raises(ValueError):
        PiecewiseLinearCurve([(0, 1), (1, 0)])


def test_segment_slopes():
    assert list(B_CURVE.segment_slopes()) == [1.0, 0.0]


def test_slopes_are_left_limits():
    assert B_CURVE.slope(4.0) == 1.0
    assert B_CURVE.slope(4.0 + 1e-9) == 0.0


def test_named_curves_registered():
    assert {"convex_right", "concave_left", "langmuir_capped"} <= set(registered_curves())
    with pytest.raises(ConfigError):
        named_curve("nope")


def test_convex_concave_pair_is_point_symmetric():
    gl, gr = named_curve("concave_left"), named_curve("convex_right")
    us = np.linspace(1, 3, 41)
    top = gr(3.0)
    assert np.allclose(gl(us), top - gr(4.0 - us), atol=1e-14)
    assert np.all(gl(us) >= gr(us) - 1e-14)


def test_capped_langmuir_stays_below_left():
    gl = LangmuirCurve(543, 0.0382)
    gr = named_curve("langmuir_capped", V=811, B=0.00237, V_cap=543, B_cap=0.0382)
    uc = langmuir_crossing(gl, LangmuirCurve(811, 0.00237))
    assert 700 < uc < 800
    us = np.linspace(0, 2000, 401)
    assert np.all(gr(us) <= gl(us) + 1e-9)
    assert gr.inverse_max(float(gr(300.0))) == pytest.approx(300.0, rel=1e-10)


@pytest.mark.parametrize("curve", [
    B_CURVE, LangmuirCurve(543, 0.0382), IdentityCurve(), AffineShift(2.0),
    named_curve("convex_right"),
    named_curve("langmuir_capped", V=811, B=0.00237, V_cap=543, B_cap=0.0382),
])
def test_dict_round_trip(curve):
    again = curve_from_dict(curve.to_dict())
    assert again == curve
    us = np.linspace(0.5, 4.5, 9)
    assert np.array_equal(again(us), curve(us))


def test_module_level_inverses():
    assert inverse_min(B_CURVE, 4) == 4
    assert inverse_max(B_CURVE, 4) == 5


def test_csv_loader(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("u,w\n4,4\n0,0\n5,4\n4,4\n")
    c = load_curve_csv(p)
    assert c.points == B_CURVE.points
    bad = tmp_path / "bad.csv"
    bad.write_text("u,w\n0,0\n1,1\n1,2\n")
    with pytest.raises(ValueError):
        load_curve_csv(bad)


def test_langmuir_negative_extension_is_tangent():
    c = LangmuirCurve(543, 0.0382)
    assert c(-1.0) == pytest.approx(-543 * 0.0382)
    assert math.isclose(c.slope(-3.0), c.slope(0.0))
