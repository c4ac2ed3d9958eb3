"""Randomized invariant suite for the exact rearrangement and norm calculus.

Used by ``fourier-lorentz norms check`` and by the tests. Random functions
have integer endpoints and rational values so every comparison is exact.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .lorentz import LorentzIndex, lorentz_norm_step, lp_norm_pc
from .measure import (
    PiecewiseConstantFn,
    StepRearrangement,
    dilate_pc,
    distribution_pc,
    rearrange_pc,
)

__all__ = ["random_pc", "brute_force_rearrangement", "run_norm_checks", "disjoint_family"]


def random_pc(rng: np.random.Generator, max_pieces: int = 8, span: int = 40, max_value: int = 9,
              signed: bool = True) -> PiecewiseConstantFn:
    """Random function with integer breakpoints in ``[-span, span]`` and
    values ``n/d`` with small integers."""
    n = int(rng.integers(0, max_pieces + 1))
    pts = sorted(set(int(x) for x in rng.integers(-span, span + 1, size=2 * n)))
    triples = []
    for lo, hi in zip(pts[::2], pts[1::2]):
        v = Fraction(int(rng.integers(1, max_value + 1)), int(rng.integers(1, 4)))
        if signed and rng.random() < 0.5:
            v = -v
        triples.append((lo, hi, v))
    return PiecewiseConstantFn.from_intervals(triples)


def disjoint_family(rng: np.random.Generator, count: int, span: int = 10):
    """``count`` random functions supported in consecutive disjoint blocks."""
    out = []
    for i in range(count):
        f = random_pc(rng, span=span)
        shift = (2 * span + 1) * i
        out.append(PiecewiseConstantFn.from_intervals([(lo + shift, hi + shift, v) for lo, hi, v in f.intervals]))
    return out


def brute_force_rearrangement(f: PiecewiseConstantFn) -> StepRearrangement:
    """Split into unit cells (endpoints must be integers), sort the cell
    magnitudes, and read off unit steps."""
    cells = []
    for lo, hi, v in f.intervals:
        cells.extend([abs(v)] * int(hi - lo))
    cells.sort(reverse=True)
    return StepRearrangement(tuple(range(len(cells) + 1)), tuple(cells))


def _sum(fs):
    out = PiecewiseConstantFn.zero()
    for f in fs:
        out = out + f
    return out


def run_norm_checks(seed: int = 0, samples: int = 200) -> list:
    """Returns ``[(name, passed, detail), ...]``."""
    rng = np.random.default_rng(seed)
    results = []

    def record(name, fails, total):
        results.append((name, fails == 0, f"{total - fails}/{total}"))

    fails = 0
    for _ in range(samples):
        f = random_pc(rng)
        fails += rearrange_pc(f) != brute_force_rearrangement(f)
    record("rearrangement matches brute force", fails, samples)

    fails = 0
    for _ in range(samples):
        f = random_pc(rng)
        r = rearrange_pc(f)
        taus = {abs(v) for _, _, v in f.intervals} | {Fraction(1, 2), Fraction(1, 7)}
        fails += any(distribution_pc(f, t) != r.distribution(t) for t in taus if t > 0)
    record("equimeasurability", fails, samples)

    fails = 0
    checks = 0
    for _ in range(samples // 4):
        fam = disjoint_family(rng, int(rng.integers(2, 5)))
        s = _sum(fam)
        for t in [Fraction(k, 3) for k in range(1, 30)]:
            checks += 1
            fails += distribution_pc(s, t) != sum(distribution_pc(g, t) for g in fam)
    record("disjoint-sum additivity", fails, checks)

    fails = 0
    checks = 0
    for _ in range(samples // 4):
        fam = disjoint_family(rng, int(rng.integers(2, 5)))
        s = rearrange_pc(_sum(fam))
        rs = [rearrange_pc(g) for g in fam]
        cuts = sorted(set(int(x) for x in rng.integers(0, 60, size=2 * len(fam))))
        ivs = list(zip(cuts[::2], cuts[1::2]))
        pts = set()
        for r in rs + [s]:
            pts |= set(r.breakpoints)
        pts |= set(cuts)
        for t in sorted(pts):
            for tt in (t, t + Fraction(1, 2)):
                checks += 1
                lower = sum(r(tt) for r, (a, b) in zip(rs, ivs) if a <= tt < b)
                fails += s(tt) < lower
    record("rearrangement lower bound", fails, checks)

    fails = 0
    for _ in range(samples):
        f = random_pc(rng)
        r = rearrange_pc(f)
        psi = lambda x: x ** 3 + 2 * x
        lhs = sum(psi(abs(v)) * (hi - lo) for lo, hi, v in f.intervals)
        rhs = sum(psi(v) * (b - a) for v, a, b in zip(r.values, r.breakpoints[:-1], r.breakpoints[1:]))
        fails += lhs != rhs
    record("layer-cake identity", fails, samples)

    fails = 0
    for _ in range(samples):
        f = random_pc(rng)
        c = Fraction(int(rng.integers(1, 6)), int(rng.integers(1, 6)))
        fails += rearrange_pc(dilate_pc(f, c)) != rearrange_pc(f).scaled_argument(c)
    record("dilation commutes with rearrangement", fails, samples)

    fails = 0
    for _ in range(samples):
        f = random_pc(rng)
        p = float(rng.uniform(1.05, 3.0))
        a = lorentz_norm_step(rearrange_pc(f), LorentzIndex(p, p))
        b = lp_norm_pc(f, p)
        fails += not math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-300)
    record("L(p,p) equals L^p", fails, samples)

    fails = 0
    for _ in range(samples):
        f = random_pc(rng)
        lam = Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 10)))
        idx = LorentzIndex(3.0, 1.5)
        a = lorentz_norm_step(rearrange_pc(f * lam), idx)
        b = float(lam) * lorentz_norm_step(rearrange_pc(f), idx)
        fails += not math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-300)
    record("positive homogeneity", fails, samples)

    fails = 0
    for _ in range(samples):
        f, g = random_pc(rng), random_pc(rng)
        p = float(rng.uniform(1.05, 1.95))
        idx = LorentzIndex.fourier_target(p)
        n = lambda h: lorentz_norm_step(rearrange_pc(h), idx)
        fails += n(f + g) > (n(f) + n(g)) * (1 + 1e-12)
    record("triangle inequality in L(p',p)", fails, samples)
    return results
