"""The torus analogue: Fourier coefficients of g_a and their sequence norm.

On ``[-pi, pi)`` with ``a`` a positive integer, ``g_a`` has coefficients
``c_m = 2 (a/2)^{1/p} sin(m/a)/m`` (``m != 0``) and ``c_0 = (2/a)^{1/p'}``.
The step function equal to ``c_m`` on ``[m - 1/2, m + 1/2)``, compressed by
``T_a f(x) = a^{1/p'} f(a x)``, converges uniformly to ``F g_1``, and its
(p',p) norm against the staircase weight ``psi_a(t) = k/a`` on
``[(k-1)/a, k/a)`` is exactly the sequence norm of ``(c_m)``. Hence the
sequence norm tends to ``c_p`` as ``a`` grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .fourier import ReferenceProfile, check_exponent, reference_profile
from .lorentz import Bracket, LorentzIndex, MagnitudeSequence, conjugate, sequence_lorentz_norm
from .measure import PiecewiseConstantFn, dilate_pc, rearrange_pc

__all__ = [
    "TorusTestFunction",
    "fourier_coefficient",
    "coefficient_head",
    "coefficient_sequence",
    "default_cutoff",
    "step_extension",
    "reverse_scale",
    "staircase_weighted_norm",
    "uniform_closeness_bound",
    "discrepancy",
    "convergence_study",
    "SINC_SLOPE_BOUND",
]

# sup |d/du (sin u / u)| = 0.43618... (attained near u = 2.0816)
SINC_SLOPE_BOUND = 0.4362


def _check_a(a) -> int:
    if isinstance(a, bool) or int(a) != a or a < 1:
        raise DomainError("a must be a positive integer")
    return int(a)


@dataclass(frozen=True)
class TorusTestFunction:
    a: int
    p: float

    def __post_init__(self):
        object.__setattr__(self, "a", _check_a(self.a))
        check_exponent(self.p)

    def coefficient(self, m: int) -> float:
        return fourier_coefficient(self.a, self.p, m)


def fourier_coefficient(a: int, p: float, m: int) -> float:
    """``int_{-pi}^{pi} g_a(t) e^{-itm} dt`` in closed form."""
    a = _check_a(a)
    if m == 0:
        return (2 / a) ** (1 / conjugate(p))
    return 2 * (a / 2) ** (1 / p) * math.sin(m / a) / m


def coefficient_head(a: int, p: float, M: int) -> np.ndarray:
    """``c_m`` for ``m = -M..M`` (signed), vectorized."""
    a = _check_a(a)
    m = np.arange(1, M + 1, dtype=float)
    pos = 2 * (a / 2) ** (1 / p) * np.sin(m / a) / m
    return np.concatenate([pos[::-1], [(2 / a) ** (1 / conjugate(p))], pos])


def default_cutoff(a: int) -> int:
    return max(64 * int(a), 4096)


def coefficient_sequence(a: int, p: float, M: Optional[int] = None) -> MagnitudeSequence:
    """Magnitudes ``|c_m|``, ``|m| <= M``, with rigorous tail bounds.

    Outside the head ``|c_m| <= E/(M+1)`` with ``E = 2 (a/2)^{1/p}``. Since at
    most ``2E/tau + 1`` entries exceed ``tau``, the whole sorted sequence obeys
    ``c*_k <= 2E/(k-1) <= T/k`` for ``k > K = 2M+1`` with ``T = 2E (K+1)/K``.
    """
    a = _check_a(a)
    check_exponent(p)
    M = default_cutoff(a) if M is None else int(M)
    if M < 1:
        raise DomainError("cutoff must be at least 1")
    env = 2 * (a / 2) ** (1 / p)
    K = 2 * M + 1
    head = np.abs(coefficient_head(a, p, M))
    return MagnitudeSequence(head, tail_constant=2 * env * (K + 1) / K * (1 + 1e-14),
                             tail_max=env / (M + 1) * (1 + 1e-14))


def step_extension(a: int, p: float, M: int) -> PiecewiseConstantFn:
    """Even step function with value ``c_m`` on ``[m - 1/2, m + 1/2)``, ``|m| <= M``."""
    head = coefficient_head(a, p, M)
    half = Fraction(1, 2)
    return PiecewiseConstantFn.from_intervals(
        [(m - half, m + half, float(v)) for m, v in zip(range(-M, M + 1), head)]
    )


def reverse_scale(f: PiecewiseConstantFn, a: int, p: float) -> PiecewiseConstantFn:
    """``x -> a^{1/p'} f(a x)``; maps the coefficient steps onto ``F g_1``."""
    return dilate_pc(f, a) * a ** (1 / conjugate(p))


def staircase_weighted_norm(a: int, p: float, M: int) -> float:
    """``(int (psi_a(t)^{1/p'-1/p} (T_a ghat)^*(t))^p dt)^{1/p}`` computed
    from the rearranged step function, with ``psi_a = k/a`` on the k-th cell."""
    a = _check_a(a)
    r = rearrange_pc(reverse_scale(step_extension(a, p, M), a, p))
    e = (1 / conjugate(p) - 1 / p) * p
    total = 0.0
    cell = Fraction(1, a)
    for (lo, hi), v in zip(zip(r.breakpoints[:-1], r.breakpoints[1:]), r.values):
        # a run of equal values spans several unit cells of width 1/a
        k0 = int(round(lo / cell))
        k1 = int(round(hi / cell))
        ks = np.arange(k0 + 1, k1 + 1, dtype=float)
        total += float(np.sum((ks / a) ** e)) * float(v) ** p / a
    return total ** (1 / p)


def uniform_closeness_bound(a: int, p: float) -> float:
    """Bound on ``|F g_1(x) - T_a ghat(x)|`` for ``|x| <= (M + 1/2)/a``:
    the step takes the value ``F g_1(m/a)`` on a cell of half-width ``1/(2a)``."""
    a = _check_a(a)
    return 2 ** (1 / conjugate(p)) * SINC_SLOPE_BOUND / (2 * a)


def _abs_difference(x: Bracket, y: Bracket) -> Bracket:
    lo = max(0.0, y.lo - x.hi, x.lo - y.hi)
    hi = max(x.hi - y.lo, y.hi - x.lo)
    return Bracket(lo, hi)


def discrepancy(
    a: int,
    p: float,
    resolution: Optional[int] = None,
    *,
    profile: Optional[ReferenceProfile] = None,
    sequence_factor: float = 1.0,
) -> dict:
    """Bracket on ``| ||F g_a||_{p',p} - factor * ||(c_m)||_{p',p} |``.

    ``resolution`` is the coefficient cutoff M (default ``max(64a, 4096)``).
    The continuous norm is c_p (scale invariance); ``sequence_factor`` selects
    the multiple of the sequence norm being compared.
    Returns ``{"continuous", "sequence", "discrepancy"}`` brackets.
    """
    a = _check_a(a)
    p = check_exponent(p)
    profile = profile or reference_profile(p)
    seq = sequence_lorentz_norm(coefficient_sequence(a, p, resolution), LorentzIndex.fourier_target(p))
    seq = seq * sequence_factor
    return {"continuous": profile.cp, "sequence": seq, "discrepancy": _abs_difference(profile.cp, seq)}


def convergence_study(
    p: float,
    scales: Sequence[int],
    gammas: Sequence[float] = (),
    *,
    profile: Optional[ReferenceProfile] = None,
    sequence_factor: float = 1.0,
) -> dict:
    """Discrepancy brackets along ``scales`` and, per gamma, the least tested
    scale whose certified upper end is ``<= gamma`` (None if none)."""
    scales = [_check_a(a) for a in scales]
    if any(b <= a for a, b in zip(scales, scales[1:])):
        raise DomainError("scales must be increasing")
    profile = profile or reference_profile(p)
    rows = []
    for a in scales:
        d = discrepancy(a, p, profile=profile, sequence_factor=sequence_factor)
        rows.append({
            "a": a,
            "p": p,
            "continuous_lo": d["continuous"].lo,
            "continuous_hi": d["continuous"].hi,
            "sequence_lo": d["sequence"].lo,
            "sequence_hi": d["sequence"].hi,
            "discrepancy_lo": d["discrepancy"].lo,
            "discrepancy_hi": d["discrepancy"].hi,
        })
    a0 = {}
    for g in gammas:
        hit = [r["a"] for r in rows if r["discrepancy_hi"] <= g]
        a0[repr(float(g))] = hit[0] if hit else None
    return {"rows": rows, "a0": a0, "cp": profile.cp.to_dict()}
