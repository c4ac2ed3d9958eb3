"""Isomorphism bounds and min-ratio probes on the span of a witness family.

For ``f = sum_j alpha_j phi_j`` the exact ``||f||_p`` is available from the
nested-interval representation, and a certified lower bound on
``||F f||_{p',p}`` follows from the level certificates alone:

    (sum_j |alpha_j|^p W_j^p)^{1/p} - sum_j |alpha_j| T_j

where ``W_j`` is the windowed lower bracket and ``T_j`` the off-window upper
bracket of level j. The same template with p' sums gives an L^{p'} bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError, UncertifiedError, UnresolvedError
from .fourier import Resolution, sinc_sum_enclosure
from .lorentz import Bracket, LorentzIndex, conjugate, lorentz_norm_enclosure, lp_norm_pc
from .measure import PiecewiseConstantFn, rearrange_enclosure
from .witness import WitnessFamily

__all__ = [
    "CoefficientVector",
    "RatioReport",
    "assemble_pc",
    "upper_estimate",
    "chain_lower_bound",
    "lebesgue_lower_bound",
    "direct_lorentz_norm",
    "min_ratio",
    "decay_exponent",
    "random_sphere_point",
    "DIRECT_RESOLUTION",
    "TARGETS",
]

TARGETS = ("lorentz", "lebesgue")
DIRECT_RESOLUTION = Resolution(2000.0, 1e-3, 1.0, 0.25)
_ROUND = 1e-12


@dataclass(frozen=True)
class CoefficientVector:
    alpha: tuple
    p: float

    def __post_init__(self):
        alpha = tuple(float(x) for x in self.alpha)
        if not all(math.isfinite(x) for x in alpha):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "alpha", alpha)

    @property
    def A(self) -> float:
        return float(np.sum(np.abs(self.alpha) ** self.p) ** (1 / self.p)) if self.alpha else 0.0

    def __len__(self):
        return len(self.alpha)

    def scaled(self, lam: float) -> "CoefficientVector":
        return CoefficientVector(tuple(lam * x for x in self.alpha), self.p)

    def normalized(self) -> "CoefficientVector":
        a = self.A
        if a == 0:
            raise DomainError("cannot normalize the zero vector")
        return self.scaled(1 / a)


def random_sphere_point(k: int, p: float, rng: np.random.Generator) -> CoefficientVector:
    """Random point of the unit l^p sphere (Gaussian direction, then scaled)."""
    x = rng.standard_normal(k)
    while not np.any(x):
        x = rng.standard_normal(k)
    return CoefficientVector(tuple(x), p).normalized()


def _check(family: WitnessFamily, coeffs: CoefficientVector):
    if len(coeffs) > family.J:
        raise DomainError(f"{len(coeffs)} coefficients for a family with {family.J} levels")
    if abs(coeffs.p - family.p) > 1e-15:
        raise DomainError("coefficient exponent differs from the family's p")


def assemble_pc(family: WitnessFamily, coeffs: CoefficientVector) -> PiecewiseConstantFn:
    """Exact ``sum_j alpha_j g_{a_j}`` on nested symmetric intervals."""
    _check(family, coeffs)
    p = family.p
    ends = [1 / l.a for l in family.levels[: len(coeffs)]]
    heights = [coeffs.alpha[i] * (float(family.levels[i].a) / 2) ** (1 / p) for i in range(len(coeffs))]
    triples = []
    acc = 0.0
    for i, h in enumerate(ends):
        acc += heights[i]
        inner = ends[i + 1] if i + 1 < len(ends) else Fraction(0)
        if inner > 0:
            triples.append((-h, -inner, acc))
            triples.append((inner, h, acc))
        else:
            triples.append((-h, h, acc))
    return PiecewiseConstantFn.from_intervals(triples)


def upper_estimate(family: WitnessFamily, coeffs: CoefficientVector) -> float:
    """Exact ``||sum alpha_j phi_j||_p``."""
    return lp_norm_pc(assemble_pc(family, coeffs), family.p)


def _level_values(family: WitnessFamily, k: int, target: str):
    """Per-level (window lower, off upper) for the first k levels; levels
    beyond J repeat level J (disjoint-support model)."""
    rows = []
    for j in range(k):
        c = family.levels[min(j, family.J - 1)].cert
        if target == "lorentz":
            rows.append((c.window_lower, c.off_upper))
        else:
            rows.append((c.lebesgue_window_lower, c.lebesgue_off_upper))
    w, t = np.array(rows).T
    return w, t


def _require_certified(family: WitnessFamily):
    if not family.certified:
        raise UncertifiedError("family is not certified")


def _chain(alpha: np.ndarray, w: np.ndarray, t: np.ndarray, e: float) -> float:
    a = np.abs(alpha)
    if not np.any(a):
        return 0.0
    main = float(np.sum(a ** e * w ** e) ** (1 / e))
    val = main * (1 - _ROUND) - float(np.sum(a * t)) * (1 + _ROUND)
    return val


def chain_lower_bound(family: WitnessFamily, coeffs: CoefficientVector) -> float:
    """Certified lower bound on ``||F sum alpha_j phi_j||_{p',p}``."""
    _require_certified(family)
    _check(family, coeffs)
    if len(coeffs) == 0:
        return 0.0
    w, t = _level_values(family, len(coeffs), "lorentz")
    return _chain(np.array(coeffs.alpha), w, t, family.p)


def lebesgue_lower_bound(family: WitnessFamily, coeffs: CoefficientVector) -> float:
    """Certified lower bound on ``||F sum alpha_j phi_j||_{p'}``."""
    _require_certified(family)
    _check(family, coeffs)
    if len(coeffs) == 0:
        return 0.0
    w, t = _level_values(family, len(coeffs), "lebesgue")
    return _chain(np.array(coeffs.alpha), w, t, conjugate(family.p))


def _multiscale_edges(scales: Sequence[float], base: np.ndarray) -> np.ndarray:
    parts = []
    start = 0.0
    for s in scales:
        e = base * s
        e = e[e > start]
        parts.append(e)
        start = float(e[-1]) if e.size else start
    return np.concatenate([[0.0]] + parts)


def direct_lorentz_norm(
    family: WitnessFamily,
    coeffs: CoefficientVector,
    resolution: Optional[Resolution] = None,
    *,
    tolerance: Optional[float] = None,
    target: str = "lorentz",
) -> Bracket:
    """Bracket on ``||F f||`` from a multi-scale grid enclosure of the sum of
    sinc terms (each layer of the grid is the base layout stretched by a_j)."""
    _check(family, coeffs)
    if target not in TARGETS:
        raise DomainError(f"unknown target {target!r}")
    p = family.p
    terms = [(float(l.a), x) for l, x in zip(family.levels, coeffs.alpha) if x != 0]
    if not terms:
        return Bracket(0.0, 0.0)
    resolution = resolution or DIRECT_RESOLUTION
    scales = [a for a, _ in terms]
    amps = [x * (2 / a) ** (1 / conjugate(p)) for a, x in terms]
    grid = sinc_sum_enclosure(_multiscale_edges(scales, resolution.edges()), scales, amps)
    q = conjugate(p)
    idx = LorentzIndex(q, p) if target == "lorentz" else LorentzIndex(q, q)
    br = lorentz_norm_enclosure(rearrange_enclosure(grid), idx)
    if tolerance is not None and br.width > tolerance:
        raise UnresolvedError(f"direct bracket width {br.width:.3g} exceeds {tolerance:.3g}", achieved=br.width)
    return br


@dataclass(frozen=True)
class RatioReport:
    k: int
    target: str
    min_ratio: float
    argmin: CoefficientVector
    budget: int
    seed: int
    converged: bool
    evaluations: int = 0
    model: bool = False
    method: str = "chain"

    def to_row(self) -> dict:
        return {
            "k": self.k,
            "target": self.target,
            "min_ratio": self.min_ratio,
            "converged": self.converged,
            "seed": self.seed,
            "budget": self.budget,
            "model": self.model,
            "method": self.method,
        }


class _Budget(Exception):
    pass


def min_ratio(
    family: WitnessFamily,
    k: int,
    target: str = "lorentz",
    budget: int = 200000,
    seed: int = 0,
    *,
    starts: int = 8,
    method: str = "chain",
    tol: float = 1e-6,
) -> RatioReport:
    """Smallest found ``||F f||_target / ||f||_p`` over the unit l^p sphere of
    ``span(phi_1..phi_k)``.

    The numerator is the certified chain bound (``method="chain"``) or the
    upper end of the direct grid bracket (``method="direct"``, small k only).
    For ``k > J`` levels beyond J repeat level J and ``||f||_p`` is replaced by
    A, the disjoint-support model; such reports carry ``model=True``.
    """
    _require_certified(family)
    if target not in TARGETS:
        raise DomainError(f"unknown target {target!r}")
    if not (isinstance(k, int) and k >= 1):
        raise DomainError("k must be a positive integer")
    if method not in ("chain", "direct"):
        raise DomainError(f"unknown method {method!r}")
    model = k > family.J
    if model and method == "direct":
        raise DomainError("direct evaluation needs k <= J")
    p = family.p
    e = p if target == "lorentz" else conjugate(p)
    w, t = _level_values(family, k, target)
    count = [0]

    def ratio(x: np.ndarray) -> float:
        if count[0] >= budget:
            raise _Budget
        count[0] += 1
        cv = CoefficientVector(tuple(x), p)
        a = cv.A
        if a == 0:
            return math.inf
        if method == "direct":
            num = direct_lorentz_norm(family, cv, target=target).hi
        else:
            num = _chain(x, w, t, e)
        den = a if model else upper_estimate(family, cv)
        return num / den

    rng = np.random.default_rng(seed)
    initial = [np.full(k, 1.0)] + [np.eye(k)[i] for i in range(min(k, 2))]
    initial += [np.array(random_sphere_point(k, p, rng).alpha) for _ in range(starts)]
    best_x, best = None, math.inf
    converged = True
    try:
        for x0 in initial:
            x = x0 / np.sum(np.abs(x0) ** p) ** (1 / p)
            fx = ratio(x)
            step = 0.5
            while step > tol:
                improved = False
                for i in range(k):
                    for sgn in (1.0, -1.0):
                        y = x.copy()
                        y[i] += sgn * step
                        ny = np.sum(np.abs(y) ** p) ** (1 / p)
                        if ny == 0:
                            continue
                        y /= ny
                        fy = ratio(y)
                        if fy < fx:
                            x, fx, improved = y, fy, True
                if not improved:
                    step /= 2
            if fx < best:
                best_x, best = x, fx
    except _Budget:
        converged = False
        if best_x is None or (fx < best):
            best_x, best = x, fx
    return RatioReport(
        k, target, float(best), CoefficientVector(tuple(best_x), p), budget, seed, converged,
        count[0], model, method,
    )


def decay_exponent(reports) -> float:
    """Least-squares slope of log(min ratio) against log(k).

    Accepts :class:`RatioReport` objects or ``(k, ratio)`` pairs.
    """
    pts = [(r.k, r.min_ratio, r.target) if isinstance(r, RatioReport) else (r[0], r[1], None) for r in reports]
    if len(pts) < 3:
        raise DomainError("need at least 3 points")
    if len({t for _, _, t in pts}) > 1:
        raise DomainError("reports mix targets")
    ks = [k for k, _, _ in pts]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise DomainError("k must be strictly increasing")
    if any(r <= 0 for _, r, _ in pts):
        raise DomainError("ratios must be positive")
    x = np.log(np.array(ks, dtype=float))
    y = np.log(np.array([r for _, r, _ in pts]))
    return float(np.polyfit(x, y, 1)[0])
