"""Scalar building blocks: interval resolvents and truncation functions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import ConstraintOrderViolation, SlopeUnavailable

ORDER_RTOL = 1e-12

# integer codes shared with the compiled kernels
IDENTITY, RAMP, SCALED_RAMP, HEAVISIDE, SMOOTH = 0, 1, 2, 3, 4
_KIND_NAMES = {IDENTITY: "identity", RAMP: "ramp", SCALED_RAMP: "scaled_ramp",
               HEAVISIDE: "heaviside", SMOOTH: "smooth"}
_KIND_CODES = {v: k for k, v in _KIND_NAMES.items()}


@dataclass(frozen=True)
class ConstraintInterval:
    a: float
    b: float

    def __post_init__(self):
        if self.a > self.b:
            raise ConstraintOrderViolation(f"empty interval [{self.a}, {self.b}]")


def clamp_resolvent(ci: ConstraintInterval, s: float) -> float:
    return min(max(ci.a, s), ci.b)


def check_order(lo: float, hi: float, where: str = "") -> None:
    if lo > hi + ORDER_RTOL * max(1.0, abs(lo), abs(hi)):
        raise ConstraintOrderViolation(
            f"right curve {lo!r} exceeds left curve {hi!r}{where}")


def generalized_resolvent(gl, gr, vbar: float, u: float) -> float:
    lo, hi = gr(u), gl(u)
    check_order(lo, hi, f" at u={u!r}")
    if lo > hi:
        # within tolerance: collapse onto the left curve
        lo = hi
    return min(max(lo, vbar), hi)


def linear_play_resolvent(alpha: float, beta: float, vbar: float, u: float) -> float:
    return min(max(u - beta, vbar), u - alpha)


@dataclass(frozen=True)
class Truncation:
    """Monotone output map b(.) of a hysteron.

    ``h`` is the range height; ``eps`` is the ramp width of the scaled ramp.
    """

    kind: str = "identity"
    h: float = math.inf
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in _KIND_CODES:
            raise ValueError(f"unknown truncation kind {self.kind!r}")
        if self.kind != "identity" and not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError("bounded truncations need a finite height h > 0")
        if self.kind == "scaled_ramp" and not self.eps > 0:
            raise ValueError("scaled ramp needs eps > 0")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def ramp(cls, h):
        return cls("ramp", float(h))

    @classmethod
    def scaled_ramp(cls, h, eps):
        return cls("scaled_ramp", float(h), float(eps))

    @classmethod
    def heaviside(cls, h):
        return cls("heaviside", float(h))

    @classmethod
    def smooth(cls, h):
        return cls("smooth", float(h))

    @property
    def code(self) -> int:
        return _KIND_CODES[self.kind]

    @property
    def bounded(self) -> bool:
        return self.kind != "identity"

    @property
    def lipschitz(self) -> float:
        if self.kind in ("identity", "ramp"):
            return 1.0
        if self.kind == "scaled_ramp":
            return self.h / self.eps
        if self.kind == "smooth":
            return 2.0 / math.sqrt(math.pi)
        return math.inf

    @property
    def width(self) -> float:
        """Extent of the rising part in the v variable (0 for a relay)."""
        return {"identity": math.inf, "ramp": self.h, "scaled_ramp": self.eps,
                "heaviside": 0.0, "smooth": self.h}[self.kind]

    def __call__(self, x):
        return truncation_eval(self, x)

    def slope(self, x):
        return truncation_slope(self, x)

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind != "identity":
            d["h"] = self.h
        if self.kind == "scaled_ramp":
            d["eps"] = self.eps
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], float(d.get("h", math.inf)), float(d.get("eps", 0.0)))


def truncation_eval(t: Truncation, x):
    k = t.kind
    if isinstance(x, np.ndarray):
        if k == "identity":
            return x.astype(float, copy=True)
        if k == "ramp":
            return np.clip(x, 0.0, t.h)
        if k == "scaled_ramp":
            return (t.h / t.eps) * np.clip(x, 0.0, t.eps)
        if k == "heaviside":
            return np.where(x > 0, t.h, 0.0)
        return 0.5 * t.h * (erf(2.0 * x / t.h - 1.0) + 1.0)
    if k == "identity":
        return x
    if k == "ramp":
        return min(max(x, 0.0), t.h)
    if k == "scaled_ramp":
        return (t.h / t.eps) * min(max(x, 0.0), t.eps)
    if k == "heaviside":
        return t.h if x > 0 else 0.0
    return 0.5 * t.h * (math.erf(2.0 * x / t.h - 1.0) + 1.0)


def truncation_slope(t: Truncation, x):
    """Left-limit derivative of ``b``: the ramps count their right kink, not the left."""
    k = t.kind
    if k == "heaviside":
        raise SlopeUnavailable("the relay truncation has no derivative")
    if isinstance(x, np.ndarray):
        if k == "identity":
            return np.ones_like(x, dtype=float)
        if k == "ramp":
            return np.where((x > 0) & (x <= t.h), 1.0, 0.0)
        if k == "scaled_ramp":
            return np.where((x > 0) & (x <= t.eps), t.h / t.eps, 0.0)
        z = 2.0 * x / t.h - 1.0
        return (2.0 / math.sqrt(math.pi)) * np.exp(-z * z)
    if k == "identity":
        return 1.0
    if k == "ramp":
        return 1.0 if 0 < x <= t.h else 0.0
    if k == "scaled_ramp":
        return t.h / t.eps if 0 < x <= t.eps else 0.0
    z = 2.0 * x / t.h - 1.0
    return (2.0 / math.sqrt(math.pi)) * math.exp(-z * z)
