"""Continuous nondecreasing scalar curves.

Every curve is an immutable callable accepting a float or a numpy array.
``slope`` returns the left-limit derivative, which is what the Newton
solvers consume.  ``inverse_min``/``inverse_max`` return the endpoints of
the preimage set of a level, so flat pieces are handled explicitly.
"""
from __future__ import annotations

import bisect
import csv
import math
from typing import Callable, Dict

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, OutOfRange


class MonotoneCurve:
    """Interface for continuous nondecreasing functions on the real line."""

    def __call__(self, u):
        raise NotImplementedError

    def slope(self, u):
        raise NotImplementedError

    def inverse_min(self, w: float) -> float:
        raise NotImplementedError

    def inverse_max(self, w: float) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def is_identity(self) -> bool:
        return False

    def affine_coefficients(self):
        """Return ``(c1, c0)`` when the curve is ``c1*u + c0``, else None."""
        return None


class IdentityCurve(MonotoneCurve):
    def __call__(self, u):
        return u

    def slope(self, u):
        return np.ones_like(u, dtype=float) if isinstance(u, np.ndarray) else 1.0

    def inverse_min(self, w):
        return float(w)

    inverse_max = inverse_min

    def to_dict(self):
        return {"type": "identity"}

    def is_identity(self):
        return True

    def affine_coefficients(self):
        return (1.0, 0.0)

    def __eq__(self, other):
        return isinstance(other, IdentityCurve)

    def __hash__(self):
        return hash("identity")

    def __repr__(self):
        return "IdentityCurve()"


class AffineShift(MonotoneCurve):
    """``u -> u - c``; the linear-play constraint curves are of this form."""

    def __init__(self, c: float):
        self.c = float(c)

    def __call__(self, u):
        return u - self.c

    def slope(self, u):
        return np.ones_like(u, dtype=float) if isinstance(u, np.ndarray) else 1.0

    def inverse_min(self, w):
        return float(w) + self.c

    inverse_max = inverse_min

    def to_dict(self):
        return {"type": "shift", "c": self.c}

    def affine_coefficients(self):
        return (1.0, -self.c)

    def __eq__(self, other):
        return isinstance(other, AffineShift) and other.c == self.c

    def __hash__(self):
        return hash(("shift", self.c))

    def __repr__(self):
        return f"AffineShift({self.c!r})"


class PiecewiseLinearCurve(MonotoneCurve):
    """Linear interpolant of breakpoints, continued linearly past both ends.

    An end segment of slope zero continues as a constant; such flat
    continuations are not part of the preimage reported by the inverses.
    """

    def __init__(self, points):
        pts = [(float(x), float(y)) for x, y in points]
        if len(pts) < 2:
            raise ValueError("a piecewise linear curve needs at least 2 breakpoints")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        for i in range(1, len(pts)):
            if not xs[i] > xs[i - 1]:
                raise ValueError("breakpoint abscissae must be strictly increasing")
            if ys[i] < ys[i - 1]:
                raise ValueError("breakpoint values must be nondecreasing")
        self._xs = xs
        self._ys = ys
        self.x = np.array(xs)
        self.y = np.array(ys)
        self._s0 = (ys[1] - ys[0]) / (xs[1] - xs[0])
        self._sn = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        self._slopes = np.diff(self.y) / np.diff(self.x)

    @property
    def points(self):
        return list(zip(self._xs, self._ys))

    def segment_slopes(self) -> np.ndarray:
        """Slopes of the interior segments, in order."""
        return self._slopes.copy()

    def _eval_scalar(self, u: float) -> float:
        xs, ys = self._xs, self._ys
        if u <= xs[0]:
            return ys[0] + self._s0 * (u - xs[0]) if self._s0 else ys[0]
        if u >= xs[-1]:
            return ys[-1] + self._sn * (u - xs[-1]) if self._sn else ys[-1]
        i = bisect.bisect_right(xs, u)
        if xs[i - 1] == u:
            return ys[i - 1]
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        return y0 + (y1 - y0) * ((u - x0) / (x1 - x0))

    def __call__(self, u):
        if not isinstance(u, np.ndarray):
            return self._eval_scalar(float(u))
        out = np.interp(u, self.x, self.y)
        lo = u < self._xs[0]
        hi = u > self._xs[-1]
        if lo.any():
            out[lo] = self._ys[0] + self._s0 * (u[lo] - self._xs[0])
        if hi.any():
            out[hi] = self._ys[-1] + self._sn * (u[hi] - self._xs[-1])
        return out

    def slope(self, u):
        if not isinstance(u, np.ndarray):
            u = float(u)
            if u <= self._xs[0]:
                return self._s0
            if u > self._xs[-1]:
                return self._sn
            i = bisect.bisect_left(self._xs, u)
            return float(self._slopes[i - 1])
        idx = np.searchsorted(self.x, u, side="left") - 1
        idx = np.clip(idx, 0, len(self._slopes) - 1)
        out = self._slopes[idx]
        out = np.where(u <= self._xs[0], self._s0, out)
        return np.where(u > self._xs[-1], self._sn, out)

    def inverse_min(self, w: float) -> float:
        w = float(w)
        xs, ys = self._xs, self._ys
        if w < ys[0]:
            if self._s0 > 0:
                return xs[0] + (w - ys[0]) / self._s0
            raise OutOfRange(f"level {w} below curve range")
        if w > ys[-1]:
            if self._sn > 0:
                return xs[-1] + (w - ys[-1]) / self._sn
            raise OutOfRange(f"level {w} above curve range")
        i = bisect.bisect_left(ys, w)
        if ys[i] == w:
            return xs[i]
        x0, x1, y0, y1 = xs[i - 1], xs[i], ys[i - 1], ys[i]
        return x0 + (x1 - x0) * ((w - y0) / (y1 - y0))

    def inverse_max(self, w: float) -> float:
        w = float(w)
        xs, ys = self._xs, self._ys
        if w < ys[0] or w > ys[-1]:
            return self.inverse_min(w)
        j = bisect.bisect_right(ys, w) - 1
        if ys[j] == w:
            return xs[j]
        x0, x1, y0, y1 = xs[j], xs[j + 1], ys[j], ys[j + 1]
        return x0 + (x1 - x0) * ((w - y0) / (y1 - y0))

    def to_dict(self):
        return {"type": "pwl", "points": [[x, y] for x, y in self.points]}

    def __eq__(self, other):
        return isinstance(other, PiecewiseLinearCurve) and self.points == other.points

    def __hash__(self):
        return hash(("pwl", tuple(self.points)))

    def __repr__(self):
        return f"PiecewiseLinearCurve({self.points!r})"


class LangmuirCurve(MonotoneCurve):
    """Langmuir isotherm ``V*B*u/(1+B*u)``, tangent-line continuation for u < 0."""

    def __init__(self, V: float, B: float):
        if not (V > 0 and B > 0):
            raise ValueError("Langmuir capacity and affinity must be positive")
        self.V = float(V)
        self.B = float(B)

    def __call__(self, u):
        V, B = self.V, self.B
        if not isinstance(u, np.ndarray):
            return V * B * u / (1.0 + B * u) if u >= 0 else V * B * u
        up = np.maximum(u, 0.0)
        return np.where(u >= 0, V * B * up / (1.0 + B * up), V * B * u)

    def slope(self, u):
        V, B = self.V, self.B
        if not isinstance(u, np.ndarray):
            if u <= 0:
                return V * B
            d = 1.0 + B * u
            return V * B / (d * d)
        up = np.maximum(u, 0.0)
        return V * B / (1.0 + B * up) ** 2

    def inverse_min(self, w: float) -> float:
        w = float(w)
        if w < 0:
            return w / (self.V * self.B)
        if w >= self.V:
            raise OutOfRange(f"level {w} not below Langmuir capacity {self.V}")
        return w / (self.B * (self.V - w))

    inverse_max = inverse_min

    def to_dict(self):
        return {"type": "langmuir", "V": self.V, "B": self.B}

    def __eq__(self, other):
        return isinstance(other, LangmuirCurve) and (self.V, self.B) == (other.V, other.B)

    def __hash__(self):
        return hash(("langmuir", self.V, self.B))

    def __repr__(self):
        return f"LangmuirCurve(V={self.V!r}, B={self.B!r})"


# Closed-form curves are rebuilt from (name, params) so model files stay textual.
_REGISTRY: Dict[str, Callable[..., "ClosedFormCurve"]] = {}


def register_curve(name: str):
    def deco(factory):
        _REGISTRY[name] = factory
        return factory
    return deco


def named_curve(name: str, **params) -> "ClosedFormCurve":
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown closed-form curve {name!r}") from None
    return factory(**params)


def registered_curves():
    return sorted(_REGISTRY)


class ClosedFormCurve(MonotoneCurve):
    """A curve given by vectorized callables, rebuilt from the registry by name.

    Without an explicit inverse, levels are inverted numerically with brentq.
    """

    def __init__(self, name, params, fn, slope_fn, inverse_fn=None, flat_below=None,
                 flat_above=None):
        self.name = name
        self.params = dict(params)
        self._fn = fn
        self._slope = slope_fn
        self._inverse = inverse_fn
        # domain ends beyond which the curve is constant; bounds the inverse
        self.flat_below = flat_below
        self.flat_above = flat_above

    def __call__(self, u):
        return self._fn(u)

    def slope(self, u):
        return self._slope(u)

    def _numeric_inverse(self, w, pick_max):
        lo = self.flat_below if self.flat_below is not None else -1.0
        hi = self.flat_above if self.flat_above is not None else 1.0
        if self.flat_below is None:
            while self(lo) > w:
                lo = 2 * lo - 1.0 if lo < 0 else -1.0
                if lo < -1e300:
                    raise OutOfRange(f"level {w} below curve range")
        elif self(lo) > w:
            raise OutOfRange(f"level {w} below curve range")
        if self.flat_above is None:
            while self(hi) < w:
                hi = 2 * hi + 1.0
                if hi > 1e300:
                    raise OutOfRange(f"level {w} above curve range")
        elif self(hi) < w:
            raise OutOfRange(f"level {w} above curve range")
        if self(lo) == w and not pick_max:
            return float(lo)
        if self(hi) == w and pick_max:
            return float(hi)
        f = (lambda x: self(x) - w) if not pick_max else (lambda x: self(x) - w)
        x = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
        return float(x)

    def inverse_min(self, w):
        if self._inverse is not None:
            return float(self._inverse(float(w), False))
        return self._numeric_inverse(float(w), False)

    def inverse_max(self, w):
        if self._inverse is not None:
            return float(self._inverse(float(w), True))
        return self._numeric_inverse(float(w), True)

    def to_dict(self):
        return {"type": "named", "name": self.name, "params": dict(self.params)}

    def __eq__(self, other):
        return (isinstance(other, ClosedFormCurve) and other.name == self.name
                and other.params == self.params)

    def __hash__(self):
        return hash(("named", self.name, tuple(sorted(self.params.items()))))

    def __repr__(self):
        return f"named_curve({self.name!r}, **{self.params!r})"


def _quad_right(u0, u1, c2, c1):
    """c2*(u-u0)^2 + c1*(u-u0) on [u0,u1], constant outside."""
    def fn(u):
        s = np.clip(u, u0, u1) - u0
        return c2 * s * s + c1 * s

    def slope(u):
        if isinstance(u, np.ndarray):
            return np.where((u > u0) & (u <= u1), 2 * c2 * (u - u0) + c1, 0.0)
        return 2 * c2 * (u - u0) + c1 if u0 < u <= u1 else 0.0
    return fn, slope


@register_curve("convex_right")
def convex_right(u_min=1.0, u_max=3.0, c2=1.0, c1=1.0 / 3.0):
    """Convex right curve ``c2*(u-u_min)^2 + c1*(u-u_min)`` clamped to [u_min, u_max]."""
    fn, slope = _quad_right(u_min, u_max, c2, c1)

    def inverse(w, pick_max):
        top = fn(u_max)
        if w < 0 or w > top:
            raise OutOfRange(f"level {w} outside [0, {top}]")
        if w == 0:
            return u_min
        if w == top:
            return u_max
        if c2 == 0:
            return u_min + w / c1
        return u_min + (-c1 + math.sqrt(c1 * c1 + 4 * c2 * w)) / (2 * c2)

    return ClosedFormCurve("convex_right", dict(u_min=u_min, u_max=u_max, c2=c2, c1=c1),
                           fn, slope, inverse, flat_below=u_min, flat_above=u_max)


@register_curve("concave_left")
def concave_left(u_min=1.0, u_max=3.0, c2=1.0, c1=1.0 / 3.0):
    """Point reflection of ``convex_right`` through the center of [u_min, u_max]."""
    right = convex_right(u_min, u_max, c2, c1)
    top = right(u_max)

    def fn(u):
        return top - right(u_min + u_max - u)

    # left limit of the reflected branch on (u_min, u_max]
    def vslope(u):
        if isinstance(u, np.ndarray):
            return np.where((u > u_min) & (u <= u_max), 2 * c2 * (u_max - u) + c1, 0.0)
        return 2 * c2 * (u_max - u) + c1 if u_min < u <= u_max else 0.0

    def inverse(w, pick_max):
        if w < 0 or w > top:
            raise OutOfRange(f"level {w} outside [0, {top}]")
        if w == 0:
            return u_min
        if w == top:
            return u_max
        return u_min + u_max - right.inverse_min(top - w)

    return ClosedFormCurve("concave_left", dict(u_min=u_min, u_max=u_max, c2=c2, c1=c1),
                           fn, vslope, inverse, flat_below=u_min, flat_above=u_max)


@register_curve("langmuir_capped")
def langmuir_capped(V=811.0, B=0.00237, V_cap=543.0, B_cap=0.0382):
    """``min`` of two Langmuir isotherms: keeps a right curve below its left partner."""
    own = LangmuirCurve(V, B)
    cap = LangmuirCurve(V_cap, B_cap)

    def fn(u):
        return np.minimum(own(u), cap(u)) if isinstance(u, np.ndarray) else min(own(u), cap(u))

    def slope(u):
        if isinstance(u, np.ndarray):
            return np.where(own(u) <= cap(u), own.slope(u), cap.slope(u))
        return own.slope(u) if own(u) <= cap(u) else cap.slope(u)

    def inverse(w, pick_max):
        return max(own.inverse_min(w), cap.inverse_min(w)) if w < min(own.V, cap.V) \
            else _raise_out(w)

    return ClosedFormCurve("langmuir_capped", dict(V=V, B=B, V_cap=V_cap, B_cap=B_cap),
                           fn, slope, inverse)


def _raise_out(w):
    raise OutOfRange(f"level {w} not below Langmuir capacity")


def langmuir_crossing(left: LangmuirCurve, right: LangmuirCurve) -> float:
    """Positive abscissa where two Langmuir isotherms intersect (inf if none)."""
    # V1 B1 / (1 + B1 u) = V2 B2 / (1 + B2 u)
    p, q = left.V * left.B, right.V * right.B
    denom = q * left.B - p * right.B
    if denom == 0:
        return math.inf
    u = (p - q) / denom
    return u if u > 0 else math.inf


def curve_from_dict(d: dict) -> MonotoneCurve:
    kind = d.get("type")
    if kind == "identity":
        return IdentityCurve()
    if kind == "shift":
        return AffineShift(d["c"])
    if kind == "pwl":
        return PiecewiseLinearCurve([tuple(p) for p in d["points"]])
    if kind == "langmuir":
        return LangmuirCurve(d["V"], d["B"])
    if kind == "named":
        return named_curve(d["name"], **d.get("params", {}))
    raise ConfigError(f"unknown curve type {kind!r}")


def load_curve_csv(path) -> PiecewiseLinearCurve:
    """Read a sampled curve from a CSV with header ``u,w``.

    Rows are sorted by ``u``; repeated ``u`` with equal ``w`` collapse, with
    differing ``w`` they are rejected.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [c.strip().lower() for c in next(reader)]
        if header[:2] != ["u", "w"]:
            raise ConfigError(f"{path}: expected header 'u,w', got {','.join(header)}")
        rows = [(float(r[0]), float(r[1])) for r in reader if r and r[0].strip()]
    rows.sort()
    pts = []
    for u, w in rows:
        if pts and pts[-1][0] == u:
            if pts[-1][1] != w:
                raise ConfigError(f"{path}: conflicting values at u={u}")
            continue
        pts.append((u, w))
    return PiecewiseLinearCurve(pts)


def inverse_min(curve: MonotoneCurve, w: float) -> float:
    return curve.inverse_min(w)


def inverse_max(curve: MonotoneCurve, w: float) -> float:
    return curve.inverse_max(w)
