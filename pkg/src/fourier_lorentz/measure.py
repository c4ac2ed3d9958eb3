"""Distribution functions and nonincreasing rearrangements.

Two representations are handled:

* :class:`PiecewiseConstantFn` -- finitely many boxes with constant values.
  Everything here is exact; with integer or ``Fraction`` endpoints no rounding
  happens at all.
* :class:`GridEnclosure` -- an even function on the line known only through
  per-cell lower/upper bounds on ``[0, X]`` plus an envelope ``C/|x|`` beyond.
  Its rearrangement is bracketed by :func:`rearrange_enclosure`.

Intervals are half-open ``[lo, hi)`` throughout.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Sequence

import numpy as np

from .errors import DomainError, ValidationError

__all__ = [
    "PiecewiseConstantFn",
    "StepRearrangement",
    "GridEnclosure",
    "RearrangementEnclosure",
    "distribution_pc",
    "rearrange_pc",
    "dilate_pc",
    "rearrange_enclosure",
    "intersect_regions",
]


def _div(x, c):
    if isinstance(x, Rational) and isinstance(c, Rational):
        return Fraction(x) / Fraction(c)
    return x / c


def _box_measure(box):
    m = 1
    for lo, hi in box:
        m = m * (hi - lo)
    return m


def _boxes_overlap(b1, b2):
    return all(l1 < h2 and l2 < h1 for (l1, h1), (l2, h2) in zip(b1, b2))


@dataclass(frozen=True)
class PiecewiseConstantFn:
    """Finite sum of constants on pairwise disjoint boxes.

    ``pieces`` is a tuple of ``(box, value)`` where ``box`` holds one
    ``(lo, hi)`` pair per dimension. The constructor canonicalizes: zero
    pieces are dropped, pieces are sorted and, in one dimension, adjacent
    intervals with equal values are merged.
    """

    pieces: tuple = ()
    dim: int = 1

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("dimension must be a positive integer")
        cleaned = []
        for box, value in self.pieces:
            box = tuple((lo, hi) for lo, hi in box)
            if len(box) != self.dim:
                raise ValidationError(f"box {box} does not have dimension {self.dim}")
            if not math.isfinite(float(value)):
                raise ValidationError("piece values must be finite")
            for lo, hi in box:
                if not (math.isfinite(float(lo)) and math.isfinite(float(hi))):
                    raise ValidationError("pieces must have finite measure")
                if hi < lo:
                    raise ValidationError(f"empty or reversed interval [{lo}, {hi})")
            if value == 0 or _box_measure(box) == 0:
                continue
            cleaned.append((box, value))
        cleaned.sort(key=lambda bv: tuple(lo for lo, _ in bv[0]) + tuple(hi for _, hi in bv[0]))
        if self.dim == 1:
            merged = []
            for box, value in cleaned:
                (lo, hi), = box
                if merged:
                    (plo, phi), = merged[-1][0]
                    if lo < phi:
                        raise ValidationError("pieces must be pairwise disjoint")
                    if lo == phi and merged[-1][1] == value:
                        merged[-1] = (((plo, hi),), value)
                        continue
                merged.append((box, value))
            cleaned = merged
        else:
            for i in range(len(cleaned)):
                for j in range(i + 1, len(cleaned)):
                    if _boxes_overlap(cleaned[i][0], cleaned[j][0]):
                        raise ValidationError("pieces must be pairwise disjoint")
        object.__setattr__(self, "pieces", tuple(cleaned))

    # construction helpers -------------------------------------------------
    @classmethod
    def from_intervals(cls, triples) -> "PiecewiseConstantFn":
        """One-dimensional function from ``(lo, hi, value)`` triples."""
        return cls(tuple((((lo, hi),), v) for lo, hi, v in triples), 1)

    @classmethod
    def indicator(cls, lo, hi, value=1) -> "PiecewiseConstantFn":
        return cls.from_intervals([(lo, hi, value)])

    @classmethod
    def zero(cls, dim=1) -> "PiecewiseConstantFn":
        return cls((), dim)

    # views ----------------------------------------------------------------
    @property
    def intervals(self):
        self._require_1d()
        return tuple((box[0][0], box[0][1], v) for box, v in self.pieces)

    @property
    def support_measure(self):
        return sum((_box_measure(b) for b, _ in self.pieces), 0)

    def is_zero(self) -> bool:
        return not self.pieces

    def _require_1d(self):
        if self.dim != 1:
            raise DomainError("operation only defined for one-dimensional functions")

    def __call__(self, x):
        self._require_1d()
        los = [b[0][0] for b, _ in self.pieces]
        i = bisect.bisect_right(los, x) - 1
        if i >= 0:
            (lo, hi), = self.pieces[i][0]
            if lo <= x < hi:
                return self.pieces[i][1]
        return 0

    def breakpoints(self):
        self._require_1d()
        pts = set()
        for (lo, hi, _) in self.intervals:
            pts.add(lo)
            pts.add(hi)
        return sorted(pts)

    # algebra (one-dimensional) ----------------------------------------------
    def __add__(self, other: "PiecewiseConstantFn") -> "PiecewiseConstantFn":
        if not isinstance(other, PiecewiseConstantFn):
            return NotImplemented
        self._require_1d()
        other._require_1d()
        pts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        triples = []
        for lo, hi in zip(pts[:-1], pts[1:]):
            v = self(lo) + other(lo)
            if v != 0:
                triples.append((lo, hi, v))
        return PiecewiseConstantFn.from_intervals(triples)

    def __mul__(self, c) -> "PiecewiseConstantFn":
        return PiecewiseConstantFn(tuple((b, v * c) for b, v in self.pieces), self.dim)

    __rmul__ = __mul__

    def __neg__(self) -> "PiecewiseConstantFn":
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def restrict(self, intervals) -> "PiecewiseConstantFn":
        """Multiply by the indicator of a union of disjoint ``[lo, hi)``."""
        self._require_1d()
        triples = []
        for lo, hi, v in self.intervals:
            for a, b in intervals:
                l, h = max(lo, a), min(hi, b)
                if l < h:
                    triples.append((l, h, v))
        return PiecewiseConstantFn.from_intervals(triples)


@dataclass(frozen=True, eq=False)
class StepRearrangement:
    """Nonincreasing right-continuous step function on ``(0, inf)``.

    Value ``values[k]`` on ``[breakpoints[k], breakpoints[k+1])`` and zero
    after the last breakpoint. Zero-length steps are tolerated (they carry
    no mass); :meth:`canonical` removes them.
    """

    breakpoints: Sequence
    values: Sequence

    def __post_init__(self):
        b, v = self.breakpoints, self.values
        if len(b) != len(v) + 1:
            raise ValidationError("need exactly one more breakpoint than values")
        if isinstance(b, np.ndarray) or isinstance(v, np.ndarray):
            b = np.asarray(b, dtype=float)
            v = np.asarray(v, dtype=float)
            if b[0] != 0 or np.any(np.diff(b) < 0):
                raise ValidationError("breakpoints must start at 0 and be nondecreasing")
            if np.any(np.diff(v) > 0) or (v.size and v[-1] < 0):
                raise ValidationError("values must be nonincreasing and nonnegative")
        else:
            if b[0] != 0 or any(x > y for x, y in zip(b[:-1], b[1:])):
                raise ValidationError("breakpoints must start at 0 and be nondecreasing")
            if any(x < y for x, y in zip(v[:-1], v[1:])) or (len(v) and v[-1] < 0):
                raise ValidationError("values must be nonincreasing and nonnegative")

    @classmethod
    def empty(cls) -> "StepRearrangement":
        return cls((0,), ())

    @property
    def total_measure(self):
        return self.breakpoints[-1]

    def arrays(self):
        return np.asarray(self.breakpoints, dtype=float), np.asarray(self.values, dtype=float)

    def __call__(self, t):
        if len(self.values) == 0:
            return 0
        if isinstance(self.breakpoints, np.ndarray):
            k = int(np.searchsorted(self.breakpoints, t, side="right")) - 1
        else:
            k = bisect.bisect_right(list(self.breakpoints), t) - 1
        if k < 0 or k >= len(self.values):
            return 0
        return self.values[k]

    def distribution(self, tau):
        """Measure of ``{t : R(t) > tau}``."""
        total = 0
        for k, v in enumerate(self.values):
            if v > tau:
                total = total + (self.breakpoints[k + 1] - self.breakpoints[k])
        return total

    def canonical(self) -> "StepRearrangement":
        bps = [self.breakpoints[0]]
        vals = []
        for k, v in enumerate(self.values):
            lo, hi = self.breakpoints[k], self.breakpoints[k + 1]
            if hi == lo or v == 0:
                continue
            if vals and vals[-1] == v:
                bps[-1] = hi
            else:
                vals.append(v)
                bps.append(hi)
        return StepRearrangement(tuple(bps), tuple(vals))

    def __eq__(self, other):
        if not isinstance(other, StepRearrangement):
            return NotImplemented
        a, b = self.canonical(), other.canonical()
        return tuple(a.breakpoints) == tuple(b.breakpoints) and tuple(a.values) == tuple(b.values)

    __hash__ = None

    def scaled_argument(self, c) -> "StepRearrangement":
        """t -> R(c t): breakpoints divided by ``c``."""
        return StepRearrangement(tuple(_div(b, c) for b in self.breakpoints), tuple(self.values))


def distribution_pc(f: PiecewiseConstantFn, tau):
    """Exact measure of ``{|f| > tau}``."""
    if not tau > 0:
        raise DomainError("distribution function is defined for tau > 0")
    return sum((_box_measure(b) for b, v in f.pieces if abs(v) > tau), 0)


def rearrange_pc(f: PiecewiseConstantFn) -> StepRearrangement:
    """Exact nonincreasing rearrangement: sort |values|, accumulate measures."""
    acc = {}
    for box, v in f.pieces:
        a = abs(v)
        acc[a] = acc.get(a, 0) + _box_measure(box)
    bps = [0]
    vals = []
    for a in sorted(acc, reverse=True):
        bps.append(bps[-1] + acc[a])
        vals.append(a)
    return StepRearrangement(tuple(bps), tuple(vals))


def dilate_pc(f: PiecewiseConstantFn, c) -> PiecewiseConstantFn:
    """x -> f(c x)."""
    if not c > 0:
        raise DomainError("dilation factor must be positive")
    pieces = tuple((tuple((_div(lo, c), _div(hi, c)) for lo, hi in box), v) for box, v in f.pieces)
    return PiecewiseConstantFn(pieces, f.dim)


def _normalize_region(intervals):
    out = []
    for lo, hi in sorted((max(0.0, float(lo)), float(hi)) for lo, hi in intervals):
        if hi <= lo:
            continue
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return tuple(out)


def intersect_regions(r1, r2):
    """Intersection of two finite unions of intervals on the half-line."""
    out = []
    for a, b in r1:
        for c, d in r2:
            lo, hi = max(a, c), min(b, d)
            if lo < hi:
                out.append((lo, hi))
    return _normalize_region(out)


@dataclass(frozen=True, eq=False)
class GridEnclosure:
    """Bounds on an even function |f| through cells on ``[0, X]``.

    ``lower[i] <= |f(x)| <= upper[i]`` on ``[edges[i], edges[i+1]]`` and
    ``|f(x)| <= tail_constant / |x|`` for ``|x| > X``. ``region`` (a union of
    intervals on the half-line) restricts the function: outside it, f is
    treated as zero. The tail constant is the supplier's responsibility.
    """

    edges: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    tail_constant: float = 0.0
    region: tuple = ((0.0, math.inf),)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if edges.ndim != 1 or edges.size < 1:
            raise ValidationError("edges must be a nonempty 1-d array")
        if lower.shape != (edges.size - 1,) or upper.shape != lower.shape:
            raise ValidationError("need one lower and one upper bound per cell")
        if edges[0] < 0 or np.any(np.diff(edges) <= 0):
            raise ValidationError("edges must start at >= 0 and be strictly increasing")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValidationError("cell bounds must be finite")
        if np.any(lower < 0) or np.any(lower > upper):
            raise ValidationError("cell bounds must satisfy 0 <= lower <= upper")
        if not (self.tail_constant >= 0 and math.isfinite(self.tail_constant)):
            raise ValidationError("tail constant must be finite and nonnegative")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "region", _normalize_region(self.region))

    @property
    def cutoff(self) -> float:
        return float(self.edges[-1])

    @property
    def n_cells(self) -> int:
        return self.lower.size

    @cached_property
    def cell_measure(self) -> np.ndarray:
        """Half-line measure of each cell inside ``region``."""
        a, b = self.edges[:-1], self.edges[1:]
        m = np.zeros(a.shape)
        for lo, hi in self.region:
            m += np.clip(np.minimum(b, hi) - np.maximum(a, lo), 0.0, None)
        return m

    @property
    def tail_pieces(self):
        if self.tail_constant == 0:
            return ()
        return intersect_regions(self.region, ((self.cutoff, math.inf),))

    def restrict(self, intervals) -> "GridEnclosure":
        region = intersect_regions(self.region, _normalize_region(intervals))
        return GridEnclosure(self.edges, self.lower, self.upper, self.tail_constant, region)

    @classmethod
    def from_even_pc(cls, f: PiecewiseConstantFn) -> "GridEnclosure":
        """Degenerate enclosure (lower = upper) of an even piecewise-constant f."""
        triples = [(max(lo, 0), hi, abs(v)) for lo, hi, v in f.intervals if hi > 0]
        if not triples:
            return cls(np.array([0.0, 1.0]), np.zeros(1), np.zeros(1))
        edges = [float(triples[0][0])]
        lo_b = []
        for lo, hi, v in triples:
            if float(lo) > edges[-1]:
                edges.append(float(lo))
                lo_b.append(0.0)
            edges.append(float(hi))
            lo_b.append(float(v))
        if edges[0] > 0:
            edges.insert(0, 0.0)
            lo_b.insert(0, 0.0)
        vals = np.array(lo_b)
        return cls(np.array(edges), vals, vals.copy())


@dataclass(frozen=True, eq=False)
class RearrangementEnclosure:
    """``lower(t) <= f*(t) <= upper(t)`` for ``t < tail_start``, and
    ``f*(t) <= tail_constant / t`` beyond ``tail_start``."""

    lower: StepRearrangement
    upper: StepRearrangement
    tail_start: float
    tail_constant: float

    def lower_at(self, t) -> float:
        return float(self.lower(t))

    def upper_at(self, t) -> float:
        if t >= self.tail_start:
            return self.tail_constant / t if t > 0 else math.inf
        return float(self.upper(t))


# Geometric levels used to fold the C/|x| tail into the upper rearrangement.
_TAIL_RATIO = 0.9
_TAIL_DEPTH = 64.0


def _tail_distribution(tau, c, pieces):
    """Measure (full line) of {C/|x| > tau} within the tail pieces."""
    out = np.zeros_like(tau)
    with np.errstate(divide="ignore"):
        reach = np.where(tau > 0, c / np.where(tau > 0, tau, 1.0), np.inf)
    for lo, hi in pieces:
        out += 2.0 * np.clip(np.minimum(hi, reach) - lo, 0.0, None)
    return out


def _upper_rearrangement(values, meas, c, pieces):
    total = float(meas.sum())
    if c == 0 or not pieces:
        order = np.argsort(-values, kind="stable")
        bps = np.concatenate([[0.0], np.cumsum(meas[order])])
        return StepRearrangement(bps, values[order]), total, 0.0
    top = c / min(lo for lo, _ in pieces)
    n_geo = int(math.ceil(math.log(_TAIL_DEPTH) / -math.log(_TAIL_RATIO)))
    pseudo = top * _TAIL_RATIO ** np.arange(n_geo + 1)
    tau_min = pseudo[-1]
    keep = values >= tau_min
    levels = np.concatenate([values[keep], pseudo])
    lmeas = np.concatenate([meas[keep], np.zeros(pseudo.size)])
    order = np.argsort(-levels, kind="stable")
    levels = levels[order]
    lmeas = lmeas[order]
    cum_before = np.concatenate([[0.0], np.cumsum(lmeas)[:-1]])
    b = cum_before + _tail_distribution(levels, c, pieces)
    t_k = max(float(b[-1]), total)
    bps = np.concatenate([b, [t_k]])
    bps[0] = 0.0
    return StepRearrangement(bps, levels), t_k, 2.0 * c


def rearrange_enclosure(g: GridEnclosure) -> RearrangementEnclosure:
    """Bracket the rearrangement of the even function described by ``g``.

    Lower: rearrangement of the per-cell lower bounds (tail taken as zero).
    Upper: per-cell upper bounds with the envelope tail folded into the
    distribution function, then inverted on a level set; beyond the last
    breakpoint ``f*(t) <= 2C/t``.
    """
    meas = 2.0 * g.cell_measure
    keep = meas > 0
    lo_v = g.lower[keep]
    lo_m = meas[keep]
    order = np.argsort(-lo_v, kind="stable")
    lower = StepRearrangement(np.concatenate([[0.0], np.cumsum(lo_m[order])]), lo_v[order])
    upper, t_k, d = _upper_rearrangement(g.upper[keep], lo_m, g.tail_constant, g.tail_pieces)
    return RearrangementEnclosure(lower, upper, t_k, d)
