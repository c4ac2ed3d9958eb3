"""Fourier transforms of the indicator test functions and the constant c_p.

With ``f_a = chi_[-1/a, 1/a]`` and ``g_a = (2/a)^{-1/p} f_a`` one has
``F f_a(x) = 2 sin(x/a)/x`` and ``F g_a(x) = (2/a)^{1/p'} sinc(x/a)``.
``c_p`` is the (p', p) Lorentz norm of ``F g_1``; it does not depend on a.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DomainError, UnresolvedError
from .lorentz import Bracket, LorentzIndex, conjugate, lorentz_norm_enclosure
from .measure import GridEnclosure, PiecewiseConstantFn, RearrangementEnclosure, rearrange_enclosure

__all__ = [
    "eval_ft_indicator",
    "SincProfile",
    "Resolution",
    "ReferenceProfile",
    "reference_profile",
    "scaled_lorentz_identity_check",
    "sinc_sum_enclosure",
    "cube_test_function",
    "check_exponent",
    "DEFAULT_RESOLUTION",
]


def check_exponent(p: float, allow_boundary: bool = False) -> float:
    p = float(p)
    ok = 1.0 < p < 2.0 or (allow_boundary and p == 2.0)
    if not ok:
        raise DomainError(f"p must lie in (1, 2), got {p}")
    return p


def eval_ft_indicator(a: float, d: int, x) -> float:
    """``prod_k 2 sin(x_k/a)/x_k`` with value ``2/a`` at ``x_k = 0``."""
    if not a > 0:
        raise DomainError("scale a must be positive")
    if d < 1:
        raise DomainError("dimension must be a positive integer")
    xs = [x] if np.ndim(x) == 0 else list(x)
    if len(xs) != d:
        raise DomainError(f"point has {len(xs)} coordinates, expected {d}")
    out = 1.0
    for xk in xs:
        xk = float(xk)
        out *= 2.0 / a if xk == 0 else 2.0 * math.sin(xk / a) / xk
    return out


@dataclass(frozen=True)
class SincProfile:
    """``F g_a`` for the L^p-normalized cube indicator ``g_a``."""

    a: float
    p: float
    d: int = 1

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError("scale a must be positive")
        check_exponent(self.p)
        if self.d < 1:
            raise DomainError("dimension must be a positive integer")

    @property
    def normalization(self) -> float:
        """The factor ``(2/a)^{-d/p}`` applied to the indicator."""
        return (2.0 / self.a) ** (-self.d / self.p)

    @property
    def amplitude(self) -> float:
        """Peak value ``(2/a)^{d/p'}`` at the origin."""
        return (2.0 / self.a) ** (self.d / conjugate(self.p))

    @property
    def tail_constant(self) -> float:
        """C with ``|F g_a(x)| <= C/|x|`` (d = 1)."""
        if self.d != 1:
            raise DomainError("tail constant is only defined for d = 1")
        return 2.0 * self.normalization

    def __call__(self, x) -> float:
        return self.normalization * eval_ft_indicator(self.a, self.d, x)

    def time_function(self) -> PiecewiseConstantFn:
        return cube_test_function(self.a, self.p, self.d)


def cube_test_function(a: float, p: float, d: int = 1) -> PiecewiseConstantFn:
    """``g_a`` on the cube ``[-1/a, 1/a]^d`` as a piecewise-constant function."""
    if not a > 0:
        raise DomainError("scale a must be positive")
    h = 1 / a
    return PiecewiseConstantFn(((tuple((-h, h) for _ in range(d)), (2 / a) ** (-d / p)),), d)


@dataclass(frozen=True)
class Resolution:
    """Cell layout on ``[0, cutoff]``: uniform ``width`` up to ``knee``, then
    cell width growing in proportion to x until it reaches ``max_width``.

    The step-enclosure error of a cell is about ``|f f'| * width``; for the
    sinc profile ``|f f'|`` decays like ``1/x^2``, which makes widths
    proportional to x the cheapest layout for a given total error.
    """

    cutoff: float
    width: float
    knee: float = math.inf
    max_width: float = 0.25

    def __post_init__(self):
        if not (self.cutoff > 0 and self.width > 0 and self.knee > 0 and self.max_width > 0):
            raise DomainError("resolution parameters must be positive")

    @classmethod
    def uniform(cls, cutoff: float, cells: int) -> "Resolution":
        if cells < 2:
            raise DomainError("need at least 2 cells")
        return cls(float(cutoff), float(cutoff) / cells)

    def edges(self) -> np.ndarray:
        knee = min(self.knee, self.cutoff)
        n = max(1, int(math.ceil(knee / self.width - 1e-9)))
        e = np.linspace(0.0, knee, n + 1)
        if knee < self.cutoff:
            ratio = 1.0 + self.width / knee
            cap = max(self.max_width, self.width)
            x_cap = min(self.cutoff, knee * cap / self.width)
            m = int(math.ceil(math.log(x_cap / knee) / math.log(ratio))) if x_cap > knee else 0
            g = knee * ratio ** np.arange(1, m + 1)
            g = g[g < x_cap]
            u = np.arange(x_cap, self.cutoff, cap)
            e = np.concatenate([e, g, u, [self.cutoff]])
            e = e[np.concatenate([[True], np.diff(e) > 0])]
        return e

    def refined(self) -> "Resolution":
        """Same range, every cell about half as wide."""
        return Resolution(self.cutoff, self.width / 2, self.knee, self.max_width / 2)

    def to_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "width": self.width,
            "knee": None if math.isinf(self.knee) else self.knee,
            "max_width": self.max_width,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Resolution":
        knee = d.get("knee")
        return cls(float(d["cutoff"]), float(d["width"]), math.inf if knee is None else float(knee),
                   float(d.get("max_width", 0.25)))


# Graded layout used when no explicit (X, cells) is requested.
DEFAULT_RESOLUTION = Resolution(1.0e4, 1.0e-4, 1.0, 0.25)


def sinc_sum_enclosure(edges: np.ndarray, scales: Sequence[float], amps: Sequence[float]) -> GridEnclosure:
    """Enclosure of ``|sum_j amps[j] sinc(x/scales[j])|`` on the given cells,
    with the envelope tail ``sum_j |amps[j]| scales[j] / |x|``."""
    scales = np.asarray(scales, dtype=float)
    amps = np.asarray(amps, dtype=float)
    lo, hi = kernels.sinc_sum_bounds(edges, scales, amps)
    c = float(np.sum(np.abs(amps) * scales))
    return GridEnclosure(edges, lo, hi, c * (1 + 1e-14))


@dataclass(frozen=True, eq=False)
class ReferenceProfile:
    p: float
    grid: GridEnclosure
    cp: Bracket
    resolution: Resolution
    rearrangement: RearrangementEnclosure = field(repr=False)

    @property
    def index(self) -> LorentzIndex:
        return LorentzIndex.fourier_target(self.p)

    @property
    def indicator_norm(self) -> Bracket:
        """Bracket on ``||F f_1||_{p',p} = 2^{1/p} c_p``."""
        return self.cp * 2.0 ** (1.0 / self.p)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "X": self.grid.cutoff,
            "cells": self.grid.n_cells,
            "resolution": self.resolution.to_dict(),
            "tail_constant": self.grid.tail_constant,
            "cp": self.cp.to_dict(),
        }


def reference_profile(
    p: float,
    X: Optional[float] = None,
    cells: Optional[int] = None,
    *,
    resolution: Optional[Resolution] = None,
    allow_boundary: bool = False,
    tolerance: Optional[float] = None,
) -> ReferenceProfile:
    """Certified bracket on c_p from a cell enclosure of ``|F g_1|``.

    Passing ``X`` and/or ``cells`` selects a uniform layout (defaults 400 and
    2^16); ``resolution`` selects any layout; with neither,
    :data:`DEFAULT_RESOLUTION` is used. With ``tolerance`` set, a bracket
    wider than it raises :class:`UnresolvedError`.
    """
    p = check_exponent(p, allow_boundary)
    if resolution is None:
        if X is None and cells is None:
            resolution = DEFAULT_RESOLUTION
        else:
            X = 400.0 if X is None else X
            if not X > 0:
                raise DomainError("cutoff X must be positive")
            resolution = Resolution.uniform(X, 2 ** 16 if cells is None else cells)
    amp = 2.0 ** (1.0 / conjugate(p))
    grid = sinc_sum_enclosure(resolution.edges(), [1.0], [amp])
    rea = rearrange_enclosure(grid)
    cp = lorentz_norm_enclosure(rea, LorentzIndex.fourier_target(p))
    if tolerance is not None and cp.width > tolerance:
        raise UnresolvedError(f"c_p bracket width {cp.width:.3g} exceeds {tolerance:.3g}", achieved=cp.width)
    return ReferenceProfile(p, grid, cp, resolution, rea)


def scaled_lorentz_identity_check(p: float, a: float, profile: ReferenceProfile) -> Bracket:
    """Bracket on ``||F g_a||_{p',p}`` computed on the profile's grid stretched
    by ``a`` and evaluated directly at scale ``a``."""
    if not a > 0:
        raise DomainError("scale a must be positive")
    p = check_exponent(p, allow_boundary=True)
    a = float(a)
    amp = (2.0 / a) ** (1.0 / conjugate(p))
    grid = sinc_sum_enclosure(profile.grid.edges * a, [a], [amp])
    return lorentz_norm_enclosure(rearrange_enclosure(grid), LorentzIndex.fourier_target(p))
