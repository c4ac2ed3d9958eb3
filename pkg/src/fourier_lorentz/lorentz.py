"""Lorentz quasi-norms of step rearrangements, enclosures and sequences.

For a nonincreasing step function the integral defining
``||f||_{r,s} = (int_0^inf (t^{1/r} f*(t))^s dt/t)^{1/s}`` is evaluated in
closed form, step by step, so no quadrature error enters; the only
approximation left is whatever the enclosure itself carries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, FeatureError, ValidationError
from .measure import PiecewiseConstantFn, RearrangementEnclosure, StepRearrangement

__all__ = [
    "LorentzIndex",
    "Bracket",
    "MagnitudeSequence",
    "lorentz_norm_step",
    "lorentz_norm_enclosure",
    "lorentz_power_enclosure",
    "lp_norm_pc",
    "sequence_lorentz_norm",
    "conjugate",
]

# Relative widening applied to every bracket to absorb summation rounding.
_ROUND = 1e-12


def conjugate(p: float) -> float:
    """Hölder conjugate exponent."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class LorentzIndex:
    r: float
    s: float

    def __post_init__(self):
        if not (self.r > 0 and math.isfinite(self.r)):
            raise DomainError("Lorentz index r must lie in (0, inf)")
        if not self.s > 0:
            raise DomainError("Lorentz index s must lie in (0, inf]")

    @classmethod
    def fourier_target(cls, p: float) -> "LorentzIndex":
        """The index (p', p) of the Fourier image of L^p."""
        return cls(conjugate(p), p)

    @property
    def beta(self) -> float:
        """Exponent s/r of the measure d(t^{s/r})."""
        return self.s / self.r

    @property
    def weak(self) -> bool:
        return math.isinf(self.s)


@dataclass(frozen=True)
class Bracket:
    """Closed interval ``[lo, hi]`` certified to contain a real quantity."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValidationError("bracket ends must be finite")
        if self.lo > self.hi:
            raise ValidationError(f"bracket lo {self.lo} exceeds hi {self.hi}")

    @classmethod
    def point(cls, x: float) -> "Bracket":
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def intersects(self, other: "Bracket") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __mul__(self, c: float) -> "Bracket":
        a, b = self.lo * c, self.hi * c
        return Bracket(min(a, b), max(a, b))

    __rmul__ = __mul__

    def power(self, e: float) -> "Bracket":
        """Monotone power of a nonnegative bracket."""
        if self.lo < 0:
            raise DomainError("power of a bracket with negative part")
        return Bracket(self.lo ** e, self.hi ** e)

    def widened(self, rel: float = _ROUND) -> "Bracket":
        return Bracket(max(0.0, self.lo * (1 - rel)) if self.lo >= 0 else self.lo * (1 + rel), self.hi * (1 + rel) + 1e-300)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


def _step_power(r: StepRearrangement, idx: LorentzIndex, lo=0.0, hi=math.inf) -> float:
    bps, vals = r.arrays()
    return kernels.step_power_integral(bps, vals, idx.beta, idx.s, float(lo), float(hi))


def _step_sup(r: StepRearrangement, idx: LorentzIndex) -> float:
    bps, vals = r.arrays()
    if vals.size == 0:
        return 0.0
    return float(np.max(bps[1:] ** (1.0 / idx.r) * vals))


def lorentz_norm_step(r: StepRearrangement, idx: LorentzIndex) -> float:
    """Exact ``||.||_{r,s}`` of a step rearrangement (float arithmetic)."""
    if idx.weak:
        return _step_sup(r, idx)
    return _step_power(r, idx) ** (1.0 / idx.s)


def _tail_power(d: float, t0: float, idx: LorentzIndex, lo: float, hi: float) -> float:
    """int over [max(t0,lo), hi] of t^{beta-1} (d/t)^s dt."""
    if d == 0:
        return 0.0
    a = max(t0, lo)
    if a >= hi:
        return 0.0
    e = idx.beta - idx.s
    if e >= 0:
        raise DomainError("C/t tail has infinite Lorentz norm for r <= 1")
    top = 0.0 if math.isinf(hi) else hi ** e
    return d ** idx.s * (a ** e - top) / -e


def lorentz_power_enclosure(
    enc: RearrangementEnclosure, idx: LorentzIndex, window: Optional[tuple] = None
) -> Bracket:
    """Bracket on ``int_window t^{s/r-1} f*(t)^s dt`` (the s-th power)."""
    if idx.weak:
        raise FeatureError("power form is undefined for s = inf")
    lo, hi = (0.0, math.inf) if window is None else (float(window[0]), float(window[1]))
    low = _step_power(enc.lower, idx, lo, min(hi, math.inf))
    up = _step_power(enc.upper, idx, lo, min(hi, enc.tail_start))
    up += _tail_power(enc.tail_constant, enc.tail_start, idx, lo, hi)
    low = min(low, up)
    return Bracket(low * (1 - _ROUND), up * (1 + _ROUND))


def lorentz_norm_enclosure(
    enc: RearrangementEnclosure, idx: LorentzIndex, window: Optional[tuple] = None
) -> Bracket:
    """Bracket on the Lorentz norm of the enclosed function, optionally
    restricted to a window ``(t_lo, t_hi)`` of the rearrangement variable."""
    if window is not None:
        if idx.weak:
            raise FeatureError("windowed integrals are not supported for s = inf")
        if not 0 < window[0] < window[1]:
            raise DomainError("window must satisfy 0 < lo < hi")
    if idx.weak:
        low = _step_sup(enc.lower, idx)
        up = _step_sup(enc.upper, idx)
        if enc.tail_constant > 0:
            if idx.r < 1:
                raise DomainError("C/t tail has infinite weak norm for r < 1")
            up = max(up, enc.tail_constant * enc.tail_start ** (1.0 / idx.r - 1.0))
        return Bracket(min(low, up) * (1 - _ROUND), up * (1 + _ROUND))
    return lorentz_power_enclosure(enc, idx, window).power(1.0 / idx.s)


def lp_norm_pc(f: PiecewiseConstantFn, p: float) -> float:
    """``(sum |v|^p * measure)^{1/p}`` over the pieces of ``f``."""
    if not p >= 1:
        raise DomainError("Lebesgue exponent must satisfy p >= 1")
    if not f.pieces:
        return 0.0
    if math.isinf(p):
        return float(max(abs(v) for _, v in f.pieces))
    total = 0.0
    for box, v in f.pieces:
        m = 1.0
        for lo, hi in box:
            m *= float(hi - lo)
        total += abs(float(v)) ** p * m
    return total ** (1.0 / p)


@dataclass(frozen=True, eq=False)
class MagnitudeSequence:
    """Nonnegative sequence known through a finite head and two tail bounds.

    ``head`` holds the magnitudes of finitely many entries (any order).
    ``tail_max`` bounds every entry outside the head, and the nonincreasing
    rearrangement of the *whole* sequence satisfies ``c*_k <= tail_constant/k``
    for ``k > len(head)``. The supplier guarantees both bounds.
    """

    head: np.ndarray
    tail_constant: float = 0.0
    tail_max: float = 0.0

    def __post_init__(self):
        h = np.asarray(self.head, dtype=float)
        if h.ndim != 1 or np.any(h < 0) or not np.all(np.isfinite(h)):
            raise ValidationError("head must be a 1-d array of finite nonnegative reals")
        if self.tail_constant < 0 or self.tail_max < 0:
            raise ValidationError("tail bounds must be nonnegative")
        object.__setattr__(self, "head", h)


def sequence_lorentz_norm(c: MagnitudeSequence, idx: LorentzIndex) -> Bracket:
    """Bracket on ``(sum_k (k^{1/r - 1/s} c*_k)^s)^{1/s}``."""
    if idx.weak:
        raise DomainError("sequence norm requires s < inf")
    head = np.sort(c.head)[::-1]
    k = np.arange(1, head.size + 1, dtype=float)
    w = k ** (idx.beta - 1.0)
    low = float(np.sum(w * head ** idx.s))
    up = float(np.sum(w * np.maximum(head, c.tail_max) ** idx.s))
    if c.tail_constant > 0:
        e = idx.beta - 1.0 - idx.s
        if e >= -1:
            raise DomainError("T/k tail has infinite norm for r <= 1")
        kk = head.size
        # sum_{k>K} k^e <= int_K^inf x^e dx  (K >= 1),  or 1 + int_1^inf for K = 0
        tail = kk ** (e + 1) / -(e + 1) if kk >= 1 else 1.0 + 1.0 / -(e + 1)
        up += c.tail_constant ** idx.s * tail
    elif c.tail_max > 0:
        raise ValidationError("entries outside the head need a tail constant")
    return Bracket(low * (1 - _ROUND), up * (1 + _ROUND)).power(1.0 / idx.s)
