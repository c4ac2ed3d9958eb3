from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourier_lorentz.errors import DomainError, ValidationError
from fourier_lorentz.invariants import brute_force_rearrangement
from fourier_lorentz.measure import (
    GridEnclosure,
    PiecewiseConstantFn,
    StepRearrangement,
    dilate_pc,
    distribution_pc,
    rearrange_enclosure,
    rearrange_pc,
)

PC = PiecewiseConstantFn


def two_piece():
    return PC.from_intervals([(0, 3, 1), (5, 6, 2)])


def test_distribution_examples():
    f = two_piece()
    assert distribution_pc(f, 1.5) == 1
    assert distribution_pc(f, 0.5) == 4


def test_distribution_of_disjoint_sum():
    a = PC.indicator(0, 1)
    b = PC.indicator(2, 3, 3)
    assert distribution_pc(a + b, 2) == 1 == distribution_pc(a, 2) + distribution_pc(b, 2)


def test_distribution_rejects_nonpositive_tau():
    with pytest.raises(DomainError):
        distribution_pc(two_piece(), 0)


def test_rearrange_examples():
    assert rearrange_pc(two_piece()) == StepRearrangement((0, 1, 4), (2, 1))
    r = rearrange_pc(PC.zero())
    assert r.values == () and r.total_measure == 0
    assert rearrange_pc(PC.indicator(-2, 5, Fraction(7, 3))) == StepRearrangement((0, 7), (Fraction(7, 3),))


def test_canonical_form_merges_and_sorts():
    f = PC.from_intervals([(2, 3, 1), (0, 1, 5), (1, 2, 1), (4, 5, 0)])
    assert f.intervals == ((0, 1, 5), (1, 3, 1))


def test_overlap_rejected():
    with pytest.raises(ValidationError):
        PC.from_intervals([(0, 2, 1), (1, 3, 1)])
    with pytest.raises(ValidationError):
        PC(((((0, 2), (0, 2)), 1), (((1, 3), (1, 3)), 1)), 2)


def test_dilate_examples():
    f = PC.indicator(0, 4)
    g = dilate_pc(f, 2)
    assert g == PC.indicator(0, 2)
    assert rearrange_pc(g) == rearrange_pc(f).scaled_argument(2)
    assert dilate_pc(f, 1) == f
    with pytest.raises(DomainError):
        dilate_pc(f, 0)


def test_dilate_two_dimensional():
    sq = PC(((((0, 1), (0, 1)), 1),), 2)
    d = dilate_pc(sq, 2)
    assert d.pieces == ((((0, Fraction(1, 2)), (0, Fraction(1, 2))), 1),)
    r = rearrange_pc(d)
    assert r.breakpoints == (0, Fraction(1, 4))
    assert r == rearrange_pc(sq).scaled_argument(4)


def test_degenerate_enclosure_matches_exact():
    f = PC.from_intervals([(-3, -1, 2), (-1, 1, 5), (1, 3, 2), (4, 6, 1), (-6, -4, 1)])
    enc = rearrange_enclosure(GridEnclosure.from_even_pc(f))
    exact = rearrange_pc(f)
    assert tuple(enc.lower.canonical().breakpoints) == tuple(float(b) for b in exact.breakpoints)
    assert enc.lower == enc.upper
    assert enc.tail_constant == 0


def test_enclosure_validation():
    with pytest.raises(ValidationError):
        GridEnclosure(np.array([0.0, 1.0]), np.array([2.0]), np.array([1.0]))
    with pytest.raises(ValidationError):
        GridEnclosure(np.array([0.0, 1.0, 1.0]), np.zeros(2), np.zeros(2))


def _sinc_grid(X, n):
    from fourier_lorentz.fourier import sinc_sum_enclosure

    return sinc_sum_enclosure(np.linspace(0, X, n + 1), [1.0], [2.0])


def test_enclosure_brackets_brute_force_inversion():
    # oracle: sample |2 sin x / x| on a 10x finer grid and bisect on the
    # sampled distribution function for the level with measure 1
    X, n = 200.0, 2 ** 14
    enc = rearrange_enclosure(_sinc_grid(X, n))
    h = X / (10 * n)
    x = (np.arange(10 * n) + 0.5) * h
    f = np.abs(2 * np.sin(x) / x)

    def dist(tau):
        return 2 * h * np.count_nonzero(f > tau)

    lo, hi = 0.0, 2.0
    for _ in range(60):
        mid = (lo + hi) / 2
        if dist(mid) > 1:
            lo = mid
        else:
            hi = mid
    assert enc.lower_at(1.0) <= hi and lo <= enc.upper_at(1.0)
    assert enc.upper_at(1.0) - enc.lower_at(1.0) < 1e-2


def test_enclosure_ordering_and_tail():
    enc = rearrange_enclosure(_sinc_grid(50.0, 2000))
    for t in np.geomspace(1e-3, 1e4, 60):
        assert enc.lower_at(t) <= enc.upper_at(t)
    assert enc.upper_at(2 * enc.tail_start) == pytest.approx(enc.tail_constant / (2 * enc.tail_start))


def test_restriction_shrinks_support():
    g = _sinc_grid(10.0, 1000)
    r = g.restrict([(1.0, 2.5)])
    assert r.cell_measure.sum() == pytest.approx(1.5)
    assert r.tail_pieces == ()
    assert g.restrict([(5.0, np.inf)]).tail_pieces == ((10.0, np.inf),)


@st.composite
def pc_functions(draw, max_pieces=6):
    n = draw(st.integers(0, max_pieces))
    pos = draw(st.integers(-20, 0))
    triples = []
    for _ in range(n):
        pos += draw(st.integers(0, 3))
        length = draw(st.integers(1, 5))
        v = Fraction(draw(st.integers(-9, 9)), draw(st.integers(1, 4)))
        triples.append((pos, pos + length, v))
        pos += length
    return PC.from_intervals(triples)


@settings(max_examples=150, deadline=None)
@given(pc_functions())
def test_rearrangement_equals_brute_force(f):
    assert rearrange_pc(f) == brute_force_rearrangement(f)


@settings(max_examples=150, deadline=None)
@given(pc_functions(), st.fractions(min_value=Fraction(1, 100), max_value=10))
def test_equimeasurable(f, tau):
    assert distribution_pc(f, tau) == rearrange_pc(f).distribution(tau)


@settings(max_examples=100, deadline=None)
@given(pc_functions(), st.integers(1, 7), st.integers(1, 7))
def test_dilation_commutes(f, n, d):
    c = Fraction(n, d)
    assert rearrange_pc(dilate_pc(f, c)) == rearrange_pc(f).scaled_argument(c)


@settings(max_examples=100, deadline=None)
@given(pc_functions())
def test_layer_cake(f):
    r = rearrange_pc(f)
    psi = lambda x: x * x + 3 * x
    lhs = sum(psi(abs(v)) * (hi - lo) for lo, hi, v in f.intervals)
    rhs = sum(psi(v) * (b - a) for v, a, b in zip(r.values, r.breakpoints[:-1], r.breakpoints[1:]))
    assert lhs == rhs


@settings(max_examples=80, deadline=None)
@given(pc_functions(), pc_functions())
def test_disjoint_additivity(f, g):
    shift = 100
    g = PC.from_intervals([(lo + shift, hi + shift, v) for lo, hi, v in g.intervals])
    for tau in (Fraction(1, 3), Fraction(1), Fraction(5, 2)):
        assert distribution_pc(f + g, tau) == distribution_pc(f, tau) + distribution_pc(g, tau)
