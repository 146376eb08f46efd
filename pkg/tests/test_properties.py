"""Randomized invariants of the resolvents, the hysteresis map, the implicit
step and the transport step."""
import numpy as np
from hypothesis import given, settings, strategies as st

from playhyst.core import Truncation, generalized_resolvent, linear_play_resolvent
from playhyst.curves import PiecewiseLinearCurve
from playhyst.model import (LINEAR, NONLINEAR, PREISACH_SMOOTH, Hysteron, Model, PeakSequence,
                            init_state, scan, step, sweep_trace)
from playhyst.ode import OdeProblem, solve_step
from playhyst.pde import PdeProblem, conservation_defect, integrate
from playhyst.roots import SolverConfig

reals = st.floats(-10, 10, allow_nan=False)
pos = st.floats(0.01, 5, allow_nan=False)


@st.composite
def pwl_curve(draw, n=4):
    xs = sorted(draw(st.lists(st.integers(-24, 24), min_size=2, max_size=n, unique=True)))
    xs = [x / 4 for x in xs]
    slopes = draw(st.lists(st.floats(0, 3), min_size=len(xs) - 1, max_size=len(xs) - 1))
    ys = [draw(st.floats(-3, 3))]
    for (a, b), s in zip(zip(xs, xs[1:]), slopes):
        ys.append(ys[-1] + s * (b - a))
    return PiecewiseLinearCurve(list(zip(xs, ys)))


@st.composite
def curve_pair(draw):
    gr = draw(pwl_curve())
    shift = draw(st.floats(0, 3))
    pts = [(x - shift, y) for x, y in gr.points]
    return PiecewiseLinearCurve(pts), gr  # left curve = right curve moved left


@st.composite
def play_model(draw, max_k=6):
    kind = draw(st.sampled_from([NONLINEAR, LINEAR, PREISACH_SMOOTH]))
    K = draw(st.integers(1, max_k))
    rows = []
    for _ in range(K):
        mu = draw(st.floats(0, 2))
        a = draw(st.floats(-3, 3))
        b = a + draw(st.floats(0, 3))
        if kind == LINEAR:
            t = Truncation.identity()
        elif kind == PREISACH_SMOOTH:
            t = Truncation.smooth(draw(pos))
        elif draw(st.booleans()):
            t = Truncation.ramp(draw(pos))
        else:
            t = Truncation.scaled_ramp(draw(pos), draw(st.floats(0.1, 2)))
        rows.append(Hysteron.play(mu, a, b, t))
    return Model(rows, kind)


@st.composite
def peaks(draw, lo=-6, hi=6):
    p = draw(st.lists(st.floats(lo, hi, allow_nan=False), min_size=2, max_size=6))
    out = [p[0]]
    for x in p[1:]:
        if abs(x - out[-1]) > 1e-3:
            out.append(x)
    if len(out) < 2:
        out.append(out[0] + 1.0)
    return out


# ---------------------------------------------------------------- resolvents

@given(reals, reals, reals, reals, reals)
def test_play_resolvent_nonexpansive(a, w, v1, v2, u):
    al, be = min(a, a + w), max(a, a + w)
    r1 = linear_play_resolvent(al, be, v1, u)
    r2 = linear_play_resolvent(al, be, v2, u)
    assert abs(r1 - r2) <= abs(v1 - v2) + 1e-12
    r3 = linear_play_resolvent(al, be, v1, u + w)
    assert abs(r3 - r1) <= abs(w) + 1e-12


@given(curve_pair(), reals, reals, reals)
def test_generalized_resolvent_nonexpansive_in_memory(pair, v1, v2, u):
    gl, gr = pair
    r1 = generalized_resolvent(gl, gr, v1, u)
    r2 = generalized_resolvent(gl, gr, v2, u)
    assert abs(r1 - r2) <= abs(v1 - v2) + 1e-12


@given(curve_pair(), reals, reals, reals, reals)
def test_resolvent_monotone(pair, v1, v2, u1, u2):
    # larger memory and larger input never give a smaller state
    gl, gr = pair
    va, vb = sorted((v1, v2))
    ua, ub = sorted((u1, u2))
    assert generalized_resolvent(gl, gr, va, ua) <= generalized_resolvent(gl, gr, vb, ub) + 1e-12


@given(curve_pair(), reals, reals)
def test_resolvent_lands_in_band(pair, v, u):
    gl, gr = pair
    x = generalized_resolvent(gl, gr, v, u)
    assert gr(u) - 1e-12 <= x <= gl(u) + 1e-12


# ---------------------------------------------------------------- hysteresis map

@given(play_model(), peaks())
def test_admissibility_and_bounds(model, pk):
    tr = sweep_trace(model, pk, 20)
    alpha, beta = model.arrays[0], model.arrays[1]
    lo = tr.u[:, None] - beta[None, :]
    hi = tr.u[:, None] - alpha[None, :]
    assert np.all(tr.v >= lo - 1e-12) and np.all(tr.v <= hi + 1e-12)
    bound = model.output_bound()
    if np.isfinite(bound):
        assert np.all(tr.w >= -1e-12) and np.all(tr.w <= bound + 1e-12)


@given(play_model(), peaks())
def test_piecewise_monotone(model, pk):
    S = 25
    tr = sweep_trace(model, pk, S)
    for i in range(len(pk) - 1):
        seg = tr.w[i * S:(i + 1) * S + 1]
        d = np.diff(seg) * np.sign(pk[i + 1] - pk[i])
        assert np.all(d >= -1e-12)


@given(play_model(), peaks())
def test_rate_independence(model, pk):
    coarse = sweep_trace(model, pk, 10)
    fine = sweep_trace(model, pk, 1000)
    # one step per monotone stretch is exact, so coarse samples sit on the fine trace
    assert np.allclose(coarse.w, fine.w[::100], rtol=0, atol=1e-12)
    pitch = max(abs(b - a) for a, b in zip(pk, pk[1:])) / 10
    lip = sum(h.mu * h.trunc.lipschitz for h in model.hysterons)
    P, Q = coarse.points(), fine.points()
    d = np.sqrt(((Q[:, None, :] - P[None, :, :]) ** 2).sum(-1)).min(axis=1)
    assert d.max() <= pitch * max(1.0, np.hypot(1.0, lip) / 2) + 1e-12


@given(play_model(), peaks(), st.integers(2, 30))
def test_one_step_equals_many(model, pk, n):
    st0 = init_state(model, pk[0])
    w1, s1 = step(model, st0, pk[1])
    tr = scan(model, st0, PeakSequence(pk[:2], n))
    assert np.allclose(tr.v[-1], s1.v, atol=1e-12)
    assert abs(tr.w[-1] - w1) <= 1e-12


@given(st.floats(-3, 3), st.floats(2, 4), st.floats(0.2, 1))
def test_stacking_identity(alpha, width, h):
    beta = alpha + width
    two = Model([Hysteron.play(1, alpha, beta, Truncation.ramp(h)),
                 Hysteron.play(1, alpha + h, beta + h, Truncation.ramp(h))], NONLINEAR)
    one = Model([Hysteron.play(1, alpha, beta, Truncation.ramp(2 * h))], NONLINEAR)
    lo, hi = alpha - 1, beta + 3 * h
    a = sweep_trace(two, [lo, hi, lo], 400)
    b = sweep_trace(one, [lo, hi, lo], 400)
    assert np.max(np.abs(a.w - b.w)) <= 1e-12
    # from left-curve memory v_2 = v_1 - h forever, so only other memory separates them
    u0 = alpha + 1.5 * h
    s2 = init_state(two, u0, "explicit", [0.25 * h, 0.5 * h])
    s1 = init_state(one, u0, "explicit", [0.75 * h])
    assert abs(two.output(s2.v) - one.output(s1.v)) <= 1e-12
    w2, _ = step(two, s2, alpha + h)
    w1, _ = step(one, s1, alpha + h)
    assert abs(w2 - w1) >= 0.5 * h - 1e-12


# ---------------------------------------------------------------- stationary problem

CFG = SolverConfig(rel_tol=1e-12, abs_tol=1e-13)


@st.composite
def stationary_data(draw):
    model = draw(play_model(max_k=4))
    a = draw(st.sampled_from(["identity", "pwl"]))
    if a == "pwl":
        acurve = PiecewiseLinearCurve([(-20, -20), (0, 0), (1, 3), (20, 22)])
    else:
        acurve = None
    K = model.K
    g = draw(st.lists(reals, min_size=K, max_size=K))
    gb = draw(st.lists(reals, min_size=K, max_size=K))
    f, fb = draw(reals), draw(reals)
    u0 = draw(reals)
    return model, acurve, np.array(g), np.array(gb), f, fb, u0


def _solve(model, acurve, g, f, u0):
    kw = {} if acurve is None else {"a": acurve}
    p = OdeProblem(model, "zero", u0, 1.0, 1.0, **kw)
    state = init_state(model, u0)
    state.v[:] = g
    bg = model.truncated(g)
    rhs = f + bg.sum() + model.offset
    r = solve_step(p, CFG, state, rhs, 1.0)
    return p.a(r.U), bg, model.truncated(r.state.v), CFG.tol(rhs)


@settings(max_examples=1000)
@given(stationary_data())
def test_l1_contraction(data):
    model, acurve, g, gb, f, fb, u0 = data
    au, bg, bv, t1 = _solve(model, acurve, g, f, u0)
    aub, bgb, bvb, t2 = _solve(model, acurve, gb, fb, u0)
    lhs = abs(au - aub) + np.abs(bv - bvb).sum()
    rhs = abs(f - fb) + np.abs(bg - bgb).sum()
    assert lhs <= rhs + 8 * max(t1, t2)
    pos_l = max(au - aub, 0) + np.maximum(bv - bvb, 0).sum()
    pos_r = max(f - fb, 0) + np.maximum(bg - bgb, 0).sum()
    assert pos_l <= pos_r + 8 * max(t1, t2)


# ---------------------------------------------------------------- transport step

@settings(max_examples=60)
@given(play_model(max_k=4), st.lists(st.floats(-3, 3), min_size=4, max_size=4),
       st.floats(0.3, 1.0), st.one_of(st.none(), st.floats(-3, 3)))
def test_pde_conservation(model, levels, lam, inflow):
    xs = np.linspace(0, 1, len(levels))
    init = lambda x: np.interp(x, xs, levels)
    phi = None if inflow is None else (lambda t, c=inflow: c)
    p = PdeProblem(model, init, 0.0, 1.0, 0.05, 0.5, lam=lam, inflow=phi)
    run = integrate(p, config=CFG)
    scale = max(1.0, np.max(np.abs(run.final.U)) + np.max(np.abs(run.final.W)) + 10.0)
    assert conservation_defect(run) <= p.h * p.J * 4 * CFG.tol(scale)
