import os
import subprocess
import sys

import numpy as np
import pytest

from fourier_lorentz import _pykernels, kernels

try:
    from fourier_lorentz import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_ext = pytest.mark.skipif(_ckernels is None, reason="compiled extension not built")


def _backend(env):
    out = subprocess.run(
        [sys.executable, "-c", "from fourier_lorentz import kernels; print(kernels.BACKEND)"],
        env={**os.environ, **env}, capture_output=True, text=True, check=True,
    )
    return out.stdout.strip()


def test_pure_override():
    assert _backend({"FOURIER_LORENTZ_PURE": "1"}) == "python"


@needs_ext
def test_compiled_is_default():
    env = {k: v for k, v in os.environ.items() if k != "FOURIER_LORENTZ_PURE"}
    out = subprocess.run(
        [sys.executable, "-c", "from fourier_lorentz import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "cython"


def _sinc_case(rng, n_terms):
    edges = np.concatenate([[0.0], np.cumsum(rng.uniform(1e-4, 0.8, 3000))])
    scales = rng.uniform(0.5, 50, n_terms)
    amps = rng.normal(size=n_terms)
    return edges, scales, amps


@needs_ext
@pytest.mark.parametrize("n_terms", [1, 3])
def test_sinc_bounds_parity(n_terms):
    rng = np.random.default_rng(n_terms)
    args = _sinc_case(rng, n_terms)
    lo1, hi1 = _pykernels.sinc_sum_bounds(*args)
    lo2, hi2 = _ckernels.sinc_sum_bounds(*args)
    np.testing.assert_allclose(lo1, lo2, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(hi1, hi2, rtol=1e-12, atol=1e-15)


@needs_ext
@pytest.mark.parametrize("beta,s", [(0.5, 1.5), (1.0, 2.0), (2 / 3, 1.25), (0.3, 1.0)])
def test_step_integral_parity(beta, s):
    rng = np.random.default_rng(7)
    breaks = np.concatenate([[0.0], np.cumsum(rng.uniform(0.01, 1, 5000))])
    values = np.sort(rng.uniform(0, 3, 5000))[::-1].copy()
    for lo, hi in ((0.0, np.inf), (3.0, 40.0), (1e5, np.inf)):
        a = _pykernels.step_power_integral(breaks, values, beta, s, lo, hi)
        b = _ckernels.step_power_integral(breaks, values, beta, s, lo, hi)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


def test_sinc_bounds_enclose_samples():
    rng = np.random.default_rng(3)
    edges, scales, amps = _sinc_case(rng, 2)
    lo, hi = kernels.sinc_sum_bounds(edges, scales, amps)
    assert np.all(lo <= hi)
    for i in rng.integers(0, edges.size - 1, 300):
        for x in np.linspace(edges[i], edges[i + 1], 7):
            v = abs(sum(a * (np.sin(x / s) / (x / s) if x else 1.0) for s, a in zip(scales, amps)))
            assert lo[i] - 1e-12 <= v <= hi[i] + 1e-12


def test_step_integral_closed_form():
    # one step of height 2 on [0, 4): int_0^4 t^{beta-1} 2^s dt = 2^s 4^beta / beta
    v = kernels.step_power_integral(np.array([0.0, 4.0]), np.array([2.0]), 0.5, 1.5, 0.0, np.inf)
    assert v == pytest.approx(2 ** 1.5 * 2 / 0.5)
