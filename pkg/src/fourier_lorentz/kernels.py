"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``FOURIER_LORENTZ_PURE=1`` to force the numpy backend.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("FOURIER_LORENTZ_PURE") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

sinc_sum_bounds = _impl.sinc_sum_bounds
step_power_integral = _impl.step_power_integral

__all__ = ["BACKEND", "sinc_sum_bounds", "step_power_integral"]
