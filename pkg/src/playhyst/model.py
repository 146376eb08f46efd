"""K-generalized play operator: parameter arrays, memory state, stepping, scans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .core import Truncation, check_order, truncation_eval, truncation_slope
from .curves import AffineShift, MonotoneCurve, PiecewiseLinearCurve
from .errors import (ConstraintOrderViolation, InadmissibleInit, NotApplicable,
                     SlopeUnavailable)

GAMMA = "gamma"
NONLINEAR = "nonlinear"
LINEAR = "linear"
PREISACH0 = "preisach0"
PREISACH_EPS = "preisach_eps"
PREISACH_SMOOTH = "preisach_smooth"
MODEL_KINDS = (GAMMA, NONLINEAR, LINEAR, PREISACH0, PREISACH_EPS, PREISACH_SMOOTH)

_ALLOWED_TRUNC = {
    GAMMA: {"identity"},
    NONLINEAR: {"ramp", "scaled_ramp"},
    LINEAR: {"identity"},
    PREISACH0: {"heaviside"},
    PREISACH_EPS: {"ramp", "scaled_ramp"},
    PREISACH_SMOOTH: {"smooth"},
}

ADMISSIBLE_RTOL = 1e-12


@dataclass(frozen=True)
class PlayPair:
    """Affine constraint band ``u - beta <= v <= u - alpha``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha <= self.beta:
            raise ConstraintOrderViolation(
                f"play pair needs alpha <= beta, got ({self.alpha}, {self.beta})")

    @property
    def gl(self) -> MonotoneCurve:
        return AffineShift(self.alpha)

    @property
    def gr(self) -> MonotoneCurve:
        return AffineShift(self.beta)


@dataclass(frozen=True)
class CurvePair:
    gl: MonotoneCurve
    gr: MonotoneCurve

    def __post_init__(self):
        # two piecewise-linear curves are ordered iff they are ordered at the
        # merged breakpoints plus one point past each end
        if isinstance(self.gl, PiecewiseLinearCurve) and isinstance(self.gr, PiecewiseLinearCurve):
            xs = np.union1d(self.gl.x, self.gr.x)
            span = xs[-1] - xs[0]
            for u in np.concatenate([[xs[0] - span], xs, [xs[-1] + span]]):
                check_order(self.gr(float(u)), self.gl(float(u)), f" at u={u:g}")


@dataclass(frozen=True)
class Hysteron:
    mu: float
    constraint: Union[PlayPair, CurvePair]
    trunc: Truncation = field(default_factory=Truncation.identity)

    def __post_init__(self):
        if not self.mu >= 0:
            raise ValueError(f"hysteron weight must be nonnegative, got {self.mu}")

    @classmethod
    def play(cls, mu, alpha, beta, trunc=None):
        return cls(float(mu), PlayPair(float(alpha), float(beta)),
                   trunc if trunc is not None else Truncation.identity())

    def gl(self, u):
        c = self.constraint
        return u - c.alpha if isinstance(c, PlayPair) else c.gl(u)

    def gr(self, u):
        c = self.constraint
        return u - c.beta if isinstance(c, PlayPair) else c.gr(u)


class Model:
    """An ordered K-tuple of hysterons plus a family tag and an output offset.

    The offset is the output level where every hysteron sits at zero; the
    calibration routines set it to the bottom of the fitted graph.
    """

    def __init__(self, hysterons: Sequence[Hysteron], kind: str, offset: float = 0.0):
        if kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {kind!r}")
        hs = tuple(hysterons)
        if not hs:
            raise ValueError("a model needs at least one hysteron")
        allowed = _ALLOWED_TRUNC[kind]
        for i, hy in enumerate(hs):
            if hy.trunc.kind not in allowed:
                raise ValueError(f"row {i + 1}: {hy.trunc.kind} truncation not allowed "
                                 f"in a {kind} model")
        if kind == GAMMA:
            if len(hs) != 1 or not isinstance(hs[0].constraint, CurvePair) or hs[0].mu != 1:
                raise ValueError("a gamma model is one curve pair with mu=1 and identity output")
        self.hysterons = hs
        self.kind = kind
        self.offset = float(offset)

    def __len__(self):
        return len(self.hysterons)

    @property
    def K(self) -> int:
        return len(self.hysterons)

    def __eq__(self, other):
        return (isinstance(other, Model) and self.kind == other.kind
                and self.hysterons == other.hysterons and self.offset == other.offset)

    def __repr__(self):
        return f"Model(kind={self.kind!r}, K={self.K})"

    @cached_property
    def is_play(self) -> bool:
        return all(isinstance(h.constraint, PlayPair) for h in self.hysterons)

    @property
    def is_lipschitz(self) -> bool:
        return all(h.trunc.kind != "heaviside" for h in self.hysterons)

    @cached_property
    def arrays(self):
        """Column arrays ``(alpha, beta, mu, code, h, eps)`` of a play model."""
        if not self.is_play:
            raise NotApplicable("column arrays exist only for play models")
        hs = self.hysterons
        alpha = np.array([h.constraint.alpha for h in hs], dtype=float)
        beta = np.array([h.constraint.beta for h in hs], dtype=float)
        mu = np.array([h.mu for h in hs], dtype=float)
        code = np.array([h.trunc.code for h in hs], dtype=np.int32)
        hh = np.array([h.trunc.h if h.trunc.bounded else 0.0 for h in hs], dtype=float)
        eps = np.array([h.trunc.eps for h in hs], dtype=float)
        return alpha, beta, mu, code, hh, eps

    def output_bound(self) -> float:
        """``sum mu_k h_k`` for bounded truncations, inf otherwise."""
        if any(not h.trunc.bounded for h in self.hysterons):
            return math.inf
        return self.offset + sum(h.mu * h.trunc.h for h in self.hysterons)

    def gl_all(self, u: float) -> np.ndarray:
        if self.is_play:
            return u - self.arrays[0]
        return np.array([h.gl(u) for h in self.hysterons], dtype=float)

    def gr_all(self, u: float) -> np.ndarray:
        if self.is_play:
            return u - self.arrays[1]
        return np.array([h.gr(u) for h in self.hysterons], dtype=float)

    def output(self, v) -> float:
        """``offset + sum mu_k b_k(v_k)`` for a committed state vector."""
        if self.is_play:
            alpha, beta, mu, code, hh, eps = self.arrays
            return self.offset + float(kernels.truncate_sum(np.ascontiguousarray(v, float),
                                                            mu, code, hh, eps))
        return self.offset + sum(h.mu * truncation_eval(h.trunc, float(x))
                                 for h, x in zip(self.hysterons, v))

    def truncated(self, v) -> np.ndarray:
        """Per-hysteron outputs ``mu_k b_k(v_k)``."""
        return np.array([h.mu * truncation_eval(h.trunc, float(x))
                         for h, x in zip(self.hysterons, v)])


@dataclass
class ModelState:
    v: np.ndarray
    last_u: float

    def copy(self) -> "ModelState":
        return ModelState(self.v.copy(), self.last_u)


def init_state(model: Model, u0: float, mode="left", values=None) -> ModelState:
    """Initial memory: ``mode='left'`` puts every v_k on its left curve at u0,
    ``mode='right'`` on its right curve, ``mode='explicit'`` takes ``values``
    after an admissibility check."""
    u0 = float(u0)
    if mode == "left":
        return ModelState(np.asarray(model.gl_all(u0), dtype=float).copy(), u0)
    if mode == "right":
        return ModelState(np.asarray(model.gr_all(u0), dtype=float).copy(), u0)
    if mode != "explicit":
        raise ValueError(f"unknown init mode {mode!r}")
    v = np.array(values, dtype=float)
    if v.shape != (model.K,):
        raise InadmissibleInit(f"expected {model.K} initial values, got {v.shape}")
    lo, hi = model.gr_all(u0), model.gl_all(u0)
    tol = ADMISSIBLE_RTOL * np.maximum(1.0, np.abs(v))
    bad = np.nonzero((v < lo - tol) | (v > hi + tol))[0]
    if bad.size:
        k = int(bad[0])
        raise InadmissibleInit(
            f"v_{k + 1}={v[k]} outside [{lo[k]}, {hi[k]}] at u={u0}")
    return ModelState(v, u0)


def _curve_response(model: Model, vbar, u: float, want_slope: bool):
    w = model.offset
    slope = 0.0
    vnew = np.empty(model.K)
    for k, hy in enumerate(model.hysterons):
        c = hy.constraint
        vb = float(vbar[k])
        if isinstance(c, PlayPair):
            lo, hi = u - c.beta, u - c.alpha
            slo = shi = 1.0
        else:
            lo, hi = c.gr(u), c.gl(u)
            check_order(lo, hi, f" at u={u!r}")
            if lo > hi:
                lo = hi
            if want_slope:
                slo, shi = c.gr.slope(u), c.gl.slope(u)
        if vb < lo:
            x, br = lo, 1
        elif vb >= hi:
            x, br = hi, 2
        else:
            x, br = vb, 0
        vnew[k] = x
        w += hy.mu * truncation_eval(hy.trunc, x)
        if want_slope and br:
            slope += hy.mu * truncation_slope(hy.trunc, x) * (slo if br == 1 else shi)
    return w, vnew, slope


def response(model: Model, vbar, u: float, want_slope: bool = False):
    """``(w, v_new, dw/du)`` of the one-step map from memory ``vbar`` to input ``u``."""
    if want_slope and not model.is_lipschitz:
        raise SlopeUnavailable("relay hysterons have no derivative")
    if model.is_play:
        alpha, beta, mu, code, hh, eps = model.arrays
        vnew = np.empty(model.K)
        w, s = kernels.play_response(np.ascontiguousarray(vbar, float), float(u),
                                     alpha, beta, mu, code, hh, eps, vnew, want_slope)
        return model.offset + w, vnew, s
    return _curve_response(model, vbar, float(u), want_slope)


def evaluate(model: Model, state: ModelState, u_new: float) -> Tuple[float, np.ndarray]:
    w, vnew, _ = response(model, state.v, u_new)
    return w, vnew


def evaluate_slope(model: Model, state: ModelState, u_new: float) -> float:
    return response(model, state.v, u_new, want_slope=True)[2]


def step(model: Model, state: ModelState, u_new: float) -> Tuple[float, ModelState]:
    w, vnew = evaluate(model, state, u_new)
    return w, ModelState(vnew, float(u_new))


@dataclass(frozen=True)
class PeakSequence:
    peaks: Tuple[float, ...]
    samples_per_segment: int = 100

    def __init__(self, peaks, samples_per_segment=100):
        pk = tuple(float(p) for p in peaks)
        if len(pk) < 1:
            raise ValueError("a peak sequence needs at least one value")
        for a, b in zip(pk, pk[1:]):
            if a == b:
                raise ValueError(f"consecutive equal peaks {a!r}")
        if int(samples_per_segment) < 1:
            raise ValueError("samples_per_segment must be positive")
        object.__setattr__(self, "peaks", pk)
        object.__setattr__(self, "samples_per_segment", int(samples_per_segment))

    def inputs(self) -> np.ndarray:
        """The sampled input, first peak included."""
        S = self.samples_per_segment
        out = [np.array([self.peaks[0]])]
        frac = np.arange(1, S + 1) / S
        for a, b in zip(self.peaks, self.peaks[1:]):
            seg = a + (b - a) * frac
            seg[-1] = b
            out.append(seg)
        return np.concatenate(out)


@dataclass
class Trace:
    u: np.ndarray
    w: np.ndarray
    v: np.ndarray  # shape (n, K)

    def __len__(self):
        return len(self.u)

    @property
    def idx(self) -> np.ndarray:
        return np.arange(len(self.u))

    def points(self) -> np.ndarray:
        return np.column_stack([self.u, self.w])


def scan_inputs(model: Model, state: ModelState, inputs: Sequence[float]) -> Trace:
    """Fold ``step`` over an explicit input series; the first row is the start state."""
    inputs = np.asarray(inputs, dtype=float)
    n = len(inputs)
    V = np.empty((n + 1, model.K))
    W = np.empty(n + 1)
    U = np.empty(n + 1)
    U[0] = state.last_u
    V[0] = state.v
    W[0] = model.output(state.v)
    if model.is_play:
        alpha, beta, mu, code, hh, eps = model.arrays
        kernels.play_scan(inputs, np.ascontiguousarray(state.v, float), alpha, beta, mu,
                          code, hh, eps, V[1:], W[1:])
        W[1:] += model.offset
        U[1:] = inputs
    else:
        st = state
        for i, u in enumerate(inputs):
            w, st = step(model, st, float(u))
            U[i + 1], W[i + 1], V[i + 1] = u, w, st.v
    return Trace(U, W, V)


def scan(model: Model, state: ModelState, seq: PeakSequence) -> Trace:
    """Trace of the model along a peak sequence that starts at ``state.last_u``.

    When the first peak differs from the state input, the state is first
    stepped to it (this is the usual convention for continuing a history).
    """
    inputs = seq.inputs()
    if inputs[0] == state.last_u:
        inputs = inputs[1:]
    return scan_inputs(model, state, inputs)


def sweep_trace(model: Model, peaks: Sequence[float], samples_per_segment: int = 200,
                mode="left") -> Trace:
    """Convenience: initialize on the left curve at the first peak and scan."""
    st = init_state(model, peaks[0], mode)
    return scan(model, st, PeakSequence(peaks, samples_per_segment))


def preisach_signature(model: Model) -> List[Tuple[float, float, float]]:
    if not model.is_play:
        raise NotApplicable("curve-pair hysterons have no Preisach-plane point")
    alpha, beta, mu, *_ = model.arrays
    return [(float(a), float(b), float(m)) for a, b, m in zip(alpha, beta, mu)]


def evaluate_cells(model: Model, V: np.ndarray, U: np.ndarray, want_slope: bool = False):
    """Vectorized one-step map over a batch of independent cells.

    ``V`` has shape (J, K) and ``U`` shape (J,).  Returns ``(W, Vnew, slope)``.
    """
    J = U.shape[0]
    W = np.full(J, model.offset)
    S = np.zeros(J)
    Vnew = np.empty_like(V)
    for k, hy in enumerate(model.hysterons):
        c = hy.constraint
        if isinstance(c, PlayPair):
            lo, hi = U - c.beta, U - c.alpha
            slo = shi = 1.0
        else:
            lo, hi = c.gr(U), c.gl(U)
            lo = np.minimum(lo, hi)
            if want_slope:
                slo, shi = c.gr.slope(U), c.gl.slope(U)
        vb = V[:, k]
        below = vb < lo
        above = vb >= hi
        x = np.where(below, lo, np.where(above, hi, vb))
        Vnew[:, k] = x
        W += hy.mu * truncation_eval(hy.trunc, x)
        if want_slope:
            br = np.where(below, slo, np.where(above, shi, 0.0))
            S += hy.mu * truncation_slope(hy.trunc, x) * br
    return W, Vnew, S
