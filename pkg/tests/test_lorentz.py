import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourier_lorentz.errors import DomainError, FeatureError, ValidationError
from fourier_lorentz.fourier import cube_test_function
from fourier_lorentz.lorentz import (
    Bracket,
    LorentzIndex,
    MagnitudeSequence,
    conjugate,
    lorentz_norm_enclosure,
    lorentz_norm_step,
    lp_norm_pc,
    sequence_lorentz_norm,
)
from fourier_lorentz.measure import GridEnclosure, PiecewiseConstantFn, StepRearrangement, rearrange_enclosure, rearrange_pc
from fourier_lorentz.torus import coefficient_sequence


def test_conjugate():
    assert conjugate(1.5) == 3.0
    assert conjugate(2.0) == 2.0
    assert conjugate(1) == math.inf


def test_index_validation():
    with pytest.raises(DomainError):
        LorentzIndex(0, 1)
    with pytest.raises(DomainError):
        LorentzIndex(2, 0)
    assert LorentzIndex(2, math.inf).weak
    assert LorentzIndex.fourier_target(1.5) == LorentzIndex(3.0, 1.5)


def test_bracket_basics():
    b = Bracket(1.0, 3.0)
    assert b.width == 2 and b.mid == 2
    assert b.contains(1.0) and not b.contains(3.5)
    assert b.intersects(Bracket(3.0, 4.0)) and not b.intersects(Bracket(3.1, 4.0))
    assert (b * -2) == Bracket(-6.0, -2.0)
    with pytest.raises(ValidationError):
        Bracket(2.0, 1.0)


def test_indicator_closed_form():
    r = StepRearrangement((0, 4), (1,))
    assert lorentz_norm_step(r, LorentzIndex(3, 1.5)) == pytest.approx(2 ** (4 / 3), rel=1e-14)


def test_zero_rearrangement():
    assert lorentz_norm_step(StepRearrangement.empty(), LorentzIndex(3, 1.5)) == 0


def test_weak_norm_right_endpoints():
    r = StepRearrangement((0, 1, 4), (2, 1))
    # max(1^{1/2} * 2, 4^{1/2} * 1)
    assert lorentz_norm_step(r, LorentzIndex(2, math.inf)) == 2


@pytest.mark.parametrize("p", [1.1, 1.5, 2.0, 2.7])
def test_pp_index_is_lebesgue(p):
    f = PiecewiseConstantFn.from_intervals([(0, 1, 3), (2, 5, -1), (7, 8, Fraction(1, 2))])
    assert lorentz_norm_step(rearrange_pc(f), LorentzIndex(p, p)) == pytest.approx(lp_norm_pc(f, p), rel=1e-13)


def test_lp_norm_examples():
    assert lp_norm_pc(cube_test_function(2, 1.5) * (2 / 2) ** (1 / 1.5), 1.5) == pytest.approx(1.0)
    # f_a = chi_[-1/a, 1/a] has L^p norm (2/a)^{1/p}
    f2 = PiecewiseConstantFn.indicator(Fraction(-1, 2), Fraction(1, 2))
    assert lp_norm_pc(f2, 1.5) == 1.0
    for a in (1, 3, 17):
        assert lp_norm_pc(cube_test_function(a, 1.5), 1.5) == pytest.approx(1, abs=1e-12)
    assert lp_norm_pc(PiecewiseConstantFn.zero(), 1.5) == 0
    with pytest.raises(DomainError):
        lp_norm_pc(f2, 0.5)


def test_degenerate_enclosure_collapses():
    f = PiecewiseConstantFn.from_intervals([(-2, -1, 1), (-1, 1, 3), (1, 2, 1)])
    enc = rearrange_enclosure(GridEnclosure.from_even_pc(f))
    idx = LorentzIndex(3, 1.5)
    exact = lorentz_norm_step(rearrange_pc(f), idx)
    br = lorentz_norm_enclosure(enc, idx)
    assert br.contains(exact) and br.width < 1e-11 * exact


def test_window_outside_support():
    f = PiecewiseConstantFn.from_intervals([(-1, 1, 3)])
    enc = rearrange_enclosure(GridEnclosure.from_even_pc(f))
    assert lorentz_norm_enclosure(enc, LorentzIndex(3, 1.5), (5.0, 9.0)) == Bracket(0.0, 0.0)


def test_window_errors():
    f = PiecewiseConstantFn.from_intervals([(-1, 1, 3)])
    enc = rearrange_enclosure(GridEnclosure.from_even_pc(f))
    with pytest.raises(FeatureError):
        lorentz_norm_enclosure(enc, LorentzIndex(3, math.inf), (1.0, 2.0))
    with pytest.raises(DomainError):
        lorentz_norm_enclosure(enc, LorentzIndex(3, 1.5), (2.0, 1.0))


def _sorted_sample_oracle(p, X, h):
    # |F f_1| = |2 sin x / x| sampled at midpoints; sorting the samples is
    # distribution-function inversion, each sample carrying measure 2h
    x = (np.arange(int(X / h)) + 0.5) * h
    f = np.sort(np.abs(2 * np.sin(x) / x))[::-1]
    t = 2 * h * np.arange(f.size + 1)
    beta = p / conjugate(p)
    return (np.sum((t[1:] ** beta - t[:-1] ** beta) * f ** p) / beta) ** (1 / p)


@pytest.mark.slow
def test_indicator_norm_contains_quadrature_oracle(profile15):
    coarse = _sorted_sample_oracle(1.5, 1e4, 0.005)
    fine = _sorted_sample_oracle(1.5, 2e4, 0.0025)
    assert abs(fine - coarse) < 1e-4
    assert profile15.indicator_norm.contains(fine)


def test_single_entry_sequence():
    br = sequence_lorentz_norm(MagnitudeSequence(np.array([0.0, 2.5, 0.0])), LorentzIndex(3, 1.5))
    assert br.contains(2.5) and br.width < 1e-10


def test_constant_head_direct_sum():
    K, p = 50, 1.5
    br = sequence_lorentz_norm(MagnitudeSequence(np.ones(K)), LorentzIndex.fourier_target(p))
    direct = sum(k ** (p / conjugate(p) - 1) for k in range(1, K + 1)) ** (1 / p)
    assert br.contains(direct) and br.width < 1e-10


def test_torus_sequence_longer_head_oracle():
    idx = LorentzIndex.fourier_target(1.5)
    short = sequence_lorentz_norm(coefficient_sequence(64, 1.5, 4096), idx)
    longer = sequence_lorentz_norm(coefficient_sequence(64, 1.5, 40960), idx)
    assert short.contains(longer.lo) and short.contains(longer.hi)
    assert longer.width < short.width


def test_sequence_tail_contract():
    with pytest.raises(ValidationError):
        sequence_lorentz_norm(MagnitudeSequence(np.ones(3), 0.0, 0.1), LorentzIndex(3, 1.5))
    with pytest.raises(DomainError):
        sequence_lorentz_norm(MagnitudeSequence(np.ones(3)), LorentzIndex(3, math.inf))
    with pytest.raises(ValidationError):
        MagnitudeSequence(np.array([-1.0]))


values = st.lists(st.integers(1, 20), min_size=1, max_size=6)


@settings(max_examples=100, deadline=None)
@given(values, st.floats(1.05, 1.95), st.integers(1, 9))
def test_homogeneity_and_triangle(vals, p, lam):
    f = PiecewiseConstantFn.from_intervals([(2 * i, 2 * i + 1, v) for i, v in enumerate(vals)])
    g = PiecewiseConstantFn.from_intervals([(2 * i + 1, 2 * i + 3, v) for i, v in enumerate(reversed(vals))])
    idx = LorentzIndex.fourier_target(p)
    n = lambda h: lorentz_norm_step(rearrange_pc(h), idx)
    assert n(f * lam) == pytest.approx(lam * n(f), rel=1e-12)
    assert n(f + g) <= (n(f) + n(g)) * (1 + 1e-12)
