"""Calibration: parameter arrays from the primary scanning curves of a graph.

Vertex arithmetic for the trapezoidal algorithm runs in exact rationals.
Floats entering it are read through their shortest decimal repr, so a
vertex typed as 11.2 is the rational 56/5.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np

from .core import Truncation
from .curves import (ClosedFormCurve, LangmuirCurve, MonotoneCurve, PiecewiseLinearCurve,
                     langmuir_crossing, named_curve)
from .errors import (BudgetExceeded, ConstraintOrderViolation, DegenerateSlope,
                     NegativeWeight, OutOfRange)
from .model import (GAMMA, LINEAR, NONLINEAR, PREISACH0, PREISACH_EPS, PREISACH_SMOOTH,
                    CurvePair, Hysteron, Model, PlayPair, sweep_trace)


def exact(x) -> Fraction:
    """Rational value of a number; floats go through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


# ---------------------------------------------------------------- graphs

@dataclass(frozen=True)
class HysteresisGraph:
    """Region bounded by a left (descending) and a right (ascending) curve
    between the levels ``w_min`` and ``w_max``."""

    gl: MonotoneCurve
    gr: MonotoneCurve
    w_min: float
    w_max: float

    def __post_init__(self):
        if not self.w_min < self.w_max:
            raise ValueError("graph needs w_min < w_max")

    def left_u(self, w: float) -> float:
        return self.gl.inverse_min(w)

    def right_u(self, w: float) -> float:
        return self.gr.inverse_max(w)

    @property
    def vertices(self):
        return ((self.left_u(self.w_min), self.w_min), (self.right_u(self.w_min), self.w_min),
                (self.right_u(self.w_max), self.w_max), (self.left_u(self.w_max), self.w_max))

    @property
    def u_min(self) -> float:
        return self.left_u(self.w_min)

    @property
    def u_max(self) -> float:
        return self.right_u(self.w_max)


def default_range(gl: MonotoneCurve, gr: MonotoneCurve) -> Tuple[float, float]:
    """Level range spanned by both curves, when the curve types make it clear."""
    if isinstance(gl, PiecewiseLinearCurve) and isinstance(gr, PiecewiseLinearCurve):
        return max(gl.y[0], gr.y[0]), min(gl.y[-1], gr.y[-1])
    if isinstance(gl, ClosedFormCurve) and gl.flat_below is not None and gl.flat_above is not None:
        return float(gl(gl.flat_below)), float(gl(gl.flat_above))
    if isinstance(gl, LangmuirCurve):
        own = gr if isinstance(gr, LangmuirCurve) else None
        if own is None and isinstance(gr, ClosedFormCurve) and gr.name == "langmuir_capped":
            own = LangmuirCurve(gr.params["V"], gr.params["B"])
        if own is not None:
            uc = langmuir_crossing(gl, own)
            if math.isfinite(uc):
                return 0.0, float(gl(uc))
    raise ValueError("cannot infer the level range of these curves; pass w_range")


def make_graph(gl, gr, w_range=None) -> HysteresisGraph:
    lo, hi = w_range if w_range is not None else default_range(gl, gr)
    return HysteresisGraph(gl, gr, float(lo), float(hi))


def langmuir_pair(V_l: float, B_l: float, V_r: float, B_r: float):
    """Left/right curves for a Langmuir desorption/adsorption pair.

    Past the crossing the adsorption isotherm would rise above the desorption
    one; the right curve is capped there so the constraint band stays ordered.
    """
    gl = LangmuirCurve(V_l, B_l)
    gr = named_curve("langmuir_capped", V=V_r, B=B_r, V_cap=V_l, B_cap=B_l)
    return gl, gr


# ---------------------------------------------------------------- scanning data

@dataclass(frozen=True)
class ScanningData:
    """Paired samples of the two primary curves on common levels."""

    w: Tuple[float, ...]
    ul: Tuple[float, ...]
    ur: Tuple[float, ...]

    def __post_init__(self):
        if not (len(self.w) == len(self.ul) == len(self.ur) >= 2):
            raise ValueError("scanning data needs matching sequences of length >= 2")
        if any(b <= a for a, b in zip(self.w, self.w[1:])):
            raise ValueError("levels must be strictly increasing")
        if any(b <= a for a, b in zip(self.ur, self.ur[1:])):
            raise ValueError("right abscissae must be strictly increasing")

    @classmethod
    def from_curves(cls, gl, gr, levels):
        return cls(tuple(float(x) for x in levels),
                   tuple(gl.inverse_min(x) for x in levels),
                   tuple(gr.inverse_max(x) for x in levels))

    @classmethod
    def harmonize(cls, left: Sequence[Tuple[float, float]], right: Sequence[Tuple[float, float]]):
        """Merge samples taken on different levels: keep the common level range
        and interpolate both sides onto the union of levels inside it."""
        left = sorted(left)
        right = sorted(right)
        wl = np.array([p[1] for p in left])
        wr = np.array([p[1] for p in right])
        lo, hi = max(wl[0], wr[0]), min(wl[-1], wr[-1])
        if not lo < hi:
            raise OutOfRange("left and right samples share no level range")
        levels = np.union1d(wl[(wl >= lo) & (wl <= hi)], wr[(wr >= lo) & (wr <= hi)])
        gl = PiecewiseLinearCurve(left)
        gr = PiecewiseLinearCurve(right)
        return cls.from_curves(gl, gr, levels)

    def curves(self):
        return (PiecewiseLinearCurve(list(zip(self.ul, self.w))),
                PiecewiseLinearCurve(list(zip(self.ur, self.w))))


# ---------------------------------------------------------------- rational approximation

@dataclass(frozen=True)
class RationalApprox:
    m: int
    n: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.m, self.n)

    @property
    def K(self) -> int:
        return self.m * self.n

    def __iter__(self):
        return iter((self.m, self.n))


def rational_approx(r, Kmax: int, upper=None) -> RationalApprox:
    """Closest ``m/n`` to ``r`` with ``m*n <= Kmax``.

    Ties go to the smaller product, then the smaller numerator; this also
    makes the winner irreducible.  ``upper`` optionally caps ``m/n``.
    The search is exhaustive over m, which is exact and cheap for the
    budgets used in practice.
    """
    if Kmax < 1:
        raise ValueError("Kmax must be at least 1")
    r = exact(r)
    if r <= 0:
        raise ValueError("ratio must be positive")
    up = exact(upper) if upper is not None else None
    best = None
    for m in range(1, Kmax + 1):
        nmax = Kmax // m
        nmin = 1
        if up is not None:
            nmin = max(1, math.ceil(Fraction(m) / up))
        if nmin > nmax:
            continue
        q = Fraction(m) / r
        for n in {min(max(math.floor(q), nmin), nmax), min(max(math.ceil(q), nmin), nmax)}:
            key = (abs(Fraction(m, n) - r), m * n, m)
            if best is None or key < best[0]:
                best = (key, m, n)
    if best is None:
        raise DegenerateSlope(f"no fraction m/n <= {upper} with m*n <= {Kmax}")
    return RationalApprox(best[1], best[2])


# ---------------------------------------------------------------- trapezoids

@dataclass(frozen=True)
class GeneralizedTrapezoid:
    """Vertices ``(alpha,w_min), (beta,w_min), (B,w_max), (A,w_max)``."""

    alpha: float
    beta: float
    A: float
    B: float
    w_min: float
    w_max: float

    def __post_init__(self):
        if not self.w_min < self.w_max:
            raise ValueError("trapezoid needs w_min < w_max")
        if self.alpha > self.beta or self.A > self.B:
            raise ConstraintOrderViolation(
                f"trapezoid sides cross: alpha={self.alpha}, beta={self.beta}, "
                f"A={self.A}, B={self.B}")
        if not (self.A > self.alpha and self.B > self.beta):
            raise DegenerateSlope("trapezoid sides must rise with positive finite slope")

    @classmethod
    def from_vertices(cls, vert):
        (a, w0), (b, w0b), (B, w1), (A, w1b) = vert
        if w0 != w0b or w1 != w1b:
            raise ValueError("bottom and top sides must be horizontal")
        return cls(a, b, A, B, w0, w1)

    @property
    def vertices(self):
        return ((self.alpha, self.w_min), (self.beta, self.w_min),
                (self.B, self.w_max), (self.A, self.w_max))

    @property
    def ratio(self) -> Fraction:
        return (exact(self.A) - exact(self.alpha)) / (exact(self.B) - exact(self.beta))


@dataclass(frozen=True)
class TrapezoidRows:
    """Exact output of the trapezoid algorithm before conversion to floats."""

    m: int
    n: int
    mu_star: Fraction
    h_star: Fraction
    alphas: Tuple[Fraction, ...]
    betas: Tuple[Fraction, ...]
    A_star: Fraction
    B_star: Fraction
    w_min: Fraction
    w_max: Fraction

    @property
    def K(self) -> int:
        return self.m * self.n

    @property
    def mu_k(self) -> Fraction:
        return self.mu_star / self.K

    def hysterons(self) -> List[Hysteron]:
        mu = float(self.mu_k)
        t = Truncation.ramp(float(self.h_star))
        return [Hysteron(mu, PlayPair(float(a), float(b)), t)
                for a, b in zip(self.alphas, self.betas)]

    def trapezoid(self) -> GeneralizedTrapezoid:
        return GeneralizedTrapezoid(float(self.alphas[0]), float(self.betas[0]),
                                    float(self.A_star), float(self.B_star),
                                    float(self.w_min), float(self.w_max))


def trapezoid_rows(alpha, beta, A, B, w_min, w_max, Kmax: int = 100, pin: str = "left",
                   keep_order: bool = True) -> TrapezoidRows:
    """Rows of the trapezoid fit in exact arithmetic: slope ratio, fraction, rescaled sides.

    With ``keep_order`` the fraction is restricted so the adjusted top
    vertices satisfy ``A* <= B*``, which keeps every ``alpha_k <= beta_k``.
    """
    al, be, A, B, w0, w1 = (exact(x) for x in (alpha, beta, A, B, w_min, w_max))
    h = w1 - w0
    if h <= 0:
        raise ValueError("trapezoid needs w_min < w_max")
    if A <= al or B <= be:
        raise DegenerateSlope(f"vertical or reversed side: A-alpha={A - al}, B-beta={B - be}")
    if al > be:
        raise ConstraintOrderViolation(f"alpha={al} exceeds beta={be}")
    r = (A - al) / (B - be)
    if pin == "left":
        upper = (A - al) / (A - be) if (keep_order and A > be) else None
    elif pin == "right":
        # B* = B fixed; A* = alpha + (B - beta) * m/n must not exceed B
        upper = (B - al) / (B - be) if keep_order else None
    else:
        raise ValueError("pin is 'left' or 'right'")
    ra = rational_approx(r, Kmax, upper)
    m, n = ra.m, ra.n
    rs = Fraction(m, n)
    s_l, s_r = h / (A - al), h / (B - be)
    if pin == "left":
        sl_star, sr_star = s_l, s_l * rs
    else:
        sr_star, sl_star = s_r, s_r / rs
    mu_star = sl_star * m
    h_star = h / mu_star
    A_star = al + h / sl_star
    B_star = be + h / sr_star
    K = m * n
    alphas = tuple(al + ((k - 1) // n) * h_star for k in range(1, K + 1))
    betas = tuple(be + ((k - 1) // m) * h_star for k in range(1, K + 1))
    return TrapezoidRows(m, n, mu_star, h_star, alphas, betas, A_star, B_star, w0, w1)


def calibrate_trapezoid(t: GeneralizedTrapezoid, Kmax: int = 100, pin: str = "left"):
    """K-nonlinear play rows for a trapezoid with linear sides.

    Returns ``(model, adjusted_trapezoid)``; the model carries ``w_min`` as
    its output offset.
    """
    rows = trapezoid_rows(t.alpha, t.beta, t.A, t.B, t.w_min, t.w_max, Kmax, pin)
    return Model(rows.hysterons(), NONLINEAR, offset=float(rows.w_min)), rows.trapezoid()


# ---------------------------------------------------------------- simple families

def calibrate_generalized(gl: MonotoneCurve, gr: MonotoneCurve) -> Model:
    return Model([Hysteron(1.0, CurvePair(gl, gr), Truncation.identity())], GAMMA)


def calibrate_preisach(gl, gr, K: int, eps: float = 0.0, smooth: bool = False,
                       w_range=None) -> Model:
    """Relay-type rows on K uniform levels, regularized by a ramp (eps > 0)
    or an erf profile (smooth)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    g = make_graph(gl, gr, w_range)
    h = (g.w_max - g.w_min) / K
    levels = [g.w_min + k * h for k in range(K)] + [g.w_max]
    ul = [g.left_u(w) for w in levels]
    ur = [g.right_u(w) for w in levels]
    rows = []
    for k in range(K):
        a = 0.5 * (ul[k] + ul[k + 1])
        b = 0.5 * (ur[k] + ur[k + 1])
        if smooth:
            rows.append(Hysteron(1.0, PlayPair(a, b), Truncation.smooth(h)))
        elif eps > 0:
            rows.append(Hysteron(1.0 / eps, PlayPair(a, b), Truncation.ramp(eps * h)))
        else:
            rows.append(Hysteron(1.0, PlayPair(a, b), Truncation.heaviside(h)))
    kind = PREISACH_SMOOTH if smooth else (PREISACH_EPS if eps > 0 else PREISACH0)
    return Model(rows, kind, offset=g.w_min)


def calibrate_linear_play(gr: MonotoneCurve, samples: Sequence[float]) -> Model:
    """Linear play weights from second differences of the right curve."""
    u = np.asarray(samples, dtype=float)
    if u.ndim != 1 or len(u) < 2 or np.any(np.diff(u) <= 0):
        raise ValueError("samples must be strictly increasing with at least 2 entries")
    w = np.array([gr(float(x)) for x in u])
    s = np.diff(w) / np.diff(u)
    mu = np.empty_like(s)
    mu[0] = s[0]
    mu[1:] = np.diff(s)
    scale = max(1.0, float(np.max(np.abs(s))))
    small = np.abs(mu) <= 1e-12 * scale
    mu[small] = 0.0
    if np.any(mu < 0):
        k = int(np.nonzero(mu < 0)[0][0])
        raise NegativeWeight(f"weight mu_{k + 1}={mu[k]:.6g} < 0: right curve not convex "
                             f"near u={u[k]:.6g}")
    rows = [Hysteron(float(m), PlayPair(float(u[0]), float(u[k])), Truncation.identity())
            for k, m in enumerate(mu)]
    return Model(rows, LINEAR, offset=float(w[0]))


# ---------------------------------------------------------------- partitions

def _secant_deviation(curve, u0, w0, u1, w1, n=65) -> float:
    if u1 <= u0:
        return 0.0
    us = np.linspace(u0, u1, n)
    cw = np.array([curve(float(x)) for x in us])
    sw = w0 + (w1 - w0) * (us - u0) / (u1 - u0)
    return float(np.max(np.abs(cw - sw)))


def slab_deviation(g: HysteresisGraph, w0: float, w1: float) -> float:
    """Sup vertical gap between each side of a slab and its secant."""
    return max(_secant_deviation(g.gl, g.left_u(w0), w0, g.left_u(w1), w1),
               _secant_deviation(g.gr, g.right_u(w0), w0, g.right_u(w1), w1))


def partition_levels(g: HysteresisGraph, I: int, strategy: str = "uniform",
                     tol: float = 0.0) -> List[float]:
    if I < 1:
        raise ValueError("I must be at least 1")
    if strategy == "uniform":
        h = (g.w_max - g.w_min) / I
        return [g.w_min + i * h for i in range(I)] + [g.w_max]
    if strategy != "adaptive":
        raise ValueError(f"unknown partition strategy {strategy!r}")
    levels = [g.w_min, g.w_max]
    devs = [slab_deviation(g, g.w_min, g.w_max)]
    while len(levels) - 1 < I:
        i = int(np.argmax(devs))
        if devs[i] <= tol:
            break
        mid = 0.5 * (levels[i] + levels[i + 1])
        levels.insert(i + 1, mid)
        devs[i:i + 1] = [slab_deviation(g, levels[i], mid),
                         slab_deviation(g, mid, levels[i + 2])]
    return levels


def partition_range(gl, gr, I: int, strategy: str = "uniform", tol: float = 0.0,
                    w_range=None) -> List[GeneralizedTrapezoid]:
    """Slabs between consecutive levels, vertices taken from the curves.

    The adaptive strategy bisects the slab whose sides deviate most from
    their secants until every slab is within ``tol`` or there are I slabs.
    """
    g = make_graph(gl, gr, w_range)
    lv = partition_levels(g, I, strategy, tol)
    ul = [g.left_u(w) for w in lv]
    ur = [g.right_u(w) for w in lv]
    return [GeneralizedTrapezoid(ul[i], ur[i], ul[i + 1], ur[i + 1], lv[i], lv[i + 1])
            for i in range(len(lv) - 1)]


# ---------------------------------------------------------------- hierarchical

@dataclass
class HierarchicalResult:
    model: Model
    slabs: List[GeneralizedTrapezoid]
    slab_K: List[int]
    iterations: int
    kmax: int
    boundary_error: float
    converged: bool
    history: List[Tuple[int, int, float]] = field(default_factory=list)

    @property
    def K(self) -> int:
        return self.model.K


def _fit_slabs(g: HysteresisGraph, levels: Sequence[float], kmax: int, pin: str):
    rows_all: List[TrapezoidRows] = []
    al = exact(g.left_u(levels[0]))
    be = exact(g.right_u(levels[0]))
    for i in range(len(levels) - 1):
        w0, w1 = exact(levels[i]), exact(levels[i + 1])
        A = exact(g.left_u(levels[i + 1]))
        B = exact(g.right_u(levels[i + 1]))
        if A <= al:
            raise DegenerateSlope(f"slab {i + 1}: left side does not rise")
        # a pinned bottom-right vertex may already sit past the curve target
        B = max(B, be + (A - al) / kmax)
        rows = trapezoid_rows(al, be, A, B, w0, w1, kmax, pin)
        rows_all.append(rows)
        al, be = rows.A_star, rows.B_star
    return rows_all


def calibrate_hierarchical(gl, gr, I: int, Kmax_per_slab: int = 100, qmax: int = 8,
                           strategy: str = "uniform", tol: float = 0.0, budget=None,
                           boundary_tol=None, pin: str = "left", w_range=None,
                           levels=None, strict: bool = False,
                           n_samples: int = 400) -> HierarchicalResult:
    """Cover the graph by stacked trapezoids fitted bottom to top.

    Each slab's bottom vertices are pinned to the adjusted top vertices of
    the slab below, so the sides are continuous by construction.  Iteration
    q uses the per-slab fraction budget ``Kmax_per_slab / 2**(q-1)`` and
    stops at the first q whose total K is within ``budget`` and whose
    boundary error is within ``boundary_tol`` (either may be None).
    """
    g = make_graph(gl, gr, w_range)
    lv = list(levels) if levels is not None else partition_levels(g, I, strategy, tol)
    history = []
    best = None
    kmax = int(Kmax_per_slab)
    result = None
    for q in range(1, qmax + 1):
        rows = _fit_slabs(g, lv, kmax, pin)
        hys = [hy for r in rows for hy in r.hysterons()]
        model = Model(hys, NONLINEAR, offset=float(lv[0]))
        err = boundary_error(model, gl, gr, n_samples, g)
        Ksum = model.K
        history.append((q, Ksum, err))
        ok = (budget is None or Ksum <= budget) and (boundary_tol is None or err <= boundary_tol)
        result = HierarchicalResult(model, [r.trapezoid() for r in rows], [r.K for r in rows],
                                    q, kmax, err, ok, history)
        if ok:
            return result
        within = budget is None or Ksum <= budget
        score = (not within, err if within else Ksum)
        if best is None or score < best[0]:
            best = (score, result)
        if kmax == 1:
            break
        kmax = max(1, kmax // 2)
    out = best[1]
    out.history = history
    if strict:
        raise BudgetExceeded(f"no iteration met the targets after {len(history)} tries", out)
    return out


# ---------------------------------------------------------------- quality

def boundary_error(model: Model, gl, gr, n_samples: int = 400, graph=None) -> float:
    """Sup vertical distance between the swept boundary and the two curves.

    The sweep runs from the bottom-left vertex to the top-right one and back.
    """
    g = graph if graph is not None else make_graph(gl, gr)
    a, b = g.u_min, g.u_max
    tr = sweep_trace(model, [a, b, a], n_samples)
    n = n_samples
    up_u, up_w = tr.u[:n + 1], tr.w[:n + 1]
    dn_u, dn_w = tr.u[n:], tr.w[n:]
    # the boundary runs along the flat bottom and top outside the side curves
    ref_up = np.clip([gr(float(x)) for x in up_u], g.w_min, g.w_max)
    ref_dn = np.clip([gl(float(x)) for x in dn_u], g.w_min, g.w_max)
    e_up = np.max(np.abs(up_w - ref_up))
    e_dn = np.max(np.abs(dn_w - ref_dn))
    return float(max(e_up, e_dn))
