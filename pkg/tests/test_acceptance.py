"""The nine acceptance criteria, each at its stated tolerance and time limit.

Every test prints one PASS/FAIL line; the lines are repeated in the
"acceptance criteria" section of the pytest summary.
"""
import math
import time

import numpy as np
import pytest

from conftest import record
from fourier_lorentz.fourier import cube_test_function, reference_profile, scaled_lorentz_identity_check
from fourier_lorentz.invariants import brute_force_rearrangement, disjoint_family, random_pc
from fourier_lorentz.lorentz import lp_norm_pc
from fourier_lorentz.measure import PiecewiseConstantFn, distribution_pc, rearrange_pc
from fourier_lorentz.probe import (
    chain_lower_bound,
    decay_exponent,
    direct_lorentz_norm,
    min_ratio,
    random_sphere_point,
    upper_estimate,
)
from fourier_lorentz.torus import convergence_study
from fourier_lorentz.witness import build_family

P = 1.5
EPS = 0.25


def _check(n, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    record(n, ok, f"{detail}  ({elapsed:.2f}s, limit {limit:g}s)")
    return ok


def test_criterion_1_exact_norms():
    t0 = time.perf_counter()
    worst = max(
        abs(lp_norm_pc(cube_test_function(a, p), p) - 1)
        for a in (1, 2, 10, 100)
        for p in (1.25, 1.5, 1.75)
    )
    ok = _check(1, worst <= 1e-12, f"max |norm - 1| = {worst:.2e}", time.perf_counter() - t0, 1)
    assert ok


def test_criterion_2_scale_invariance(profile15):
    t0 = time.perf_counter()
    br = {a: scaled_lorentz_identity_check(P, a, profile15) for a in (0.25, 1, 32)}
    widths = max(b.width for b in br.values())
    pairwise = all(x.intersects(y) for x in br.values() for y in br.values())
    ok = _check(2, pairwise and widths < 1e-2, f"pairwise intersect={pairwise}, max width {widths:.2e}",
                time.perf_counter() - t0, 60)
    assert ok


def test_criterion_3_parseval_anchor():
    t0 = time.perf_counter()
    prof = reference_profile(2.0, allow_boundary=True)
    n, c = prof.indicator_norm, prof.cp
    tn, tc = 2 * math.sqrt(math.pi), math.sqrt(2 * math.pi)
    inside = all(abs(x - tn) <= 1e-3 for x in (n.lo, n.hi)) and all(abs(x - tc) <= 1e-3 for x in (c.lo, c.hi))
    ok = _check(3, inside, f"||F f_1|| in [{n.lo:.6f}, {n.hi:.6f}], c_2 in [{c.lo:.6f}, {c.hi:.6f}]",
                time.perf_counter() - t0, 60)
    assert ok


def test_criterion_4_rearrangement_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    fails = 0
    for _ in range(1000):
        f = random_pc(rng)
        fails += rearrange_pc(f) != brute_force_rearrangement(f)
    lemma_fails = 0
    for _ in range(250):
        fam = disjoint_family(rng, int(rng.integers(2, 5)))
        s = PiecewiseConstantFn.zero()
        for g in fam:
            s = s + g
        rs = [rearrange_pc(g) for g in fam]
        rsum = rearrange_pc(s)
        levels = {abs(v) for g in fam for _, _, v in g.intervals}
        for tau in levels:
            lemma_fails += distribution_pc(s, tau) != sum(distribution_pc(g, tau) for g in fam)
        # one interval per function, pairwise disjoint, in (0, inf)
        cuts = sorted(set(int(x) for x in rng.integers(0, 80, size=2 * len(fam))))
        ivs = list(zip(cuts[::2], cuts[1::2]))
        pts = set(cuts)
        for r in rs + [rsum]:
            pts |= set(r.breakpoints)
        for t in pts:
            lower = sum(r(t) for r, (a, b) in zip(rs, ivs) if a <= t < b)
            lemma_fails += rsum(t) < lower
    ok = _check(4, fails == 0 and lemma_fails == 0,
                f"rearrangement mismatches {fails}/1000, lemma failures {lemma_fails}",
                time.perf_counter() - t0, 10)
    assert ok


@pytest.fixture(scope="module")
def timed_family():
    t0 = time.perf_counter()
    fam = build_family(P, EPS, 4, reverify=True)
    return fam, time.perf_counter() - t0


def test_criterion_5_witness_certification(timed_family):
    fam, elapsed = timed_family
    margins = [m for l in fam.levels for m in l.cert.margins().values()]
    rv = fam.reverification
    ok = (fam.J == 4 and min(margins) > 0 and all(fam.disjointness.values()) and rv["preserved"]
          and all(r["preserved"] for r in rv["levels"]))
    _check(5, ok, f"min margin {min(margins):.2e}, disjoint {fam.disjointness}, "
                  f"re-verified at doubled resolution: {rv['preserved']}", elapsed, 300)
    assert ok and elapsed < 300


def test_criterion_6_isomorphism_witness(timed_family):
    fam, _ = timed_family
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    lo = fam.cp.lo
    floor = lo * (1 - 1.5 * EPS) / (1 + EPS)
    fails, worst = 0, math.inf
    for _ in range(200):
        x = random_sphere_point(fam.J, P, rng)
        up = upper_estimate(fam, x)
        ch = chain_lower_bound(fam, x)
        fails += not (up <= x.A * (1 + EPS) and ch >= x.A * lo * (1 - 1.5 * EPS) and ch / up >= floor > 0)
        worst = min(worst, ch / up)
    ok = _check(6, fails == 0, f"failures {fails}/200, worst ratio {worst:.4f} >= {floor:.4f}",
                time.perf_counter() - t0, 120)
    assert ok


def test_criterion_7_target_contrast(timed_family):
    fam, _ = timed_family
    t0 = time.perf_counter()
    ks = (1, 2, 4, 8, 16)
    lor = [min_ratio(fam, k, "lorentz") for k in ks]
    leb = [min_ratio(fam, k, "lebesgue") for k in ks]
    s_lor, s_leb = decay_exponent(lor), decay_exponent(leb)
    converged = all(r.converged for r in lor + leb)
    ok = _check(7, abs(s_lor) <= 0.05 and abs(s_leb + 1 / 3) <= 0.1 and converged,
                f"Lorentz slope {s_lor:+.4f}, Lebesgue slope {s_leb:+.4f}, converged {converged}",
                time.perf_counter() - t0, 300)
    assert ok


def test_criterion_8_discrete_lemma(profile15):
    t0 = time.perf_counter()
    study = convergence_study(P, [2 ** 4, 2 ** 6, 2 ** 8, 2 ** 10], profile=profile15)
    ups = [r["discrepancy_hi"] for r in study["rows"]]
    factor = ups[0] / ups[-1]
    bound = 0.05 * profile15.cp.hi
    ok = _check(8, factor >= 3 and ups[-1] < bound,
                f"upper ends {', '.join(f'{u:.4f}' for u in ups)}; decrease x{factor:.2f}, "
                f"last < {bound:.4f}", time.perf_counter() - t0, 300)
    assert ok


def test_criterion_9_cross_estimator(family2):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    fails = 0
    for _ in range(50):
        x = random_sphere_point(2, P, rng)
        fails += direct_lorentz_norm(family2, x).hi < chain_lower_bound(family2, x)
    ok = _check(9, fails == 0, f"direct upper < chain lower in {fails}/50 cases",
                time.perf_counter() - t0, 300)
    assert ok
