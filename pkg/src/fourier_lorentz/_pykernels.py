"""Numpy implementations of the numerical kernels.

These are the reference versions; ``_ckernels.pyx`` must agree with them to
rounding.
"""
import numpy as np

# Relative and absolute slack added to every per-cell bound to absorb libm
# and argument rounding in sin(u)/u.
REL_SLACK = 1e-14
ABS_SLACK = 1e-15


def _sinc(u):
    out = np.ones_like(u)
    nz = u != 0.0
    out[nz] = np.sin(u[nz]) / u[nz]
    return out


def sinc_sum_bounds(edges, scales, amps, wide=0.5):
    """Bounds on |sum_j amps[j] * sinc(x / scales[j])| over each grid cell.

    ``edges`` are nonnegative and increasing. Returns ``(lower, upper)`` with
    ``lower <= |f(x)| <= upper`` for every x in ``[edges[i], edges[i+1]]``.
    Cells wider than ``wide`` in the variable u = x/scale fall back to the
    envelope |sinc(u)| <= min(1, 1/u).
    """
    edges = np.asarray(edges, dtype=float)
    x0 = edges[:-1]
    x1 = edges[1:]
    lo = np.zeros(x0.shape)
    hi = np.zeros(x0.shape)
    for scale, amp in zip(np.asarray(scales, float), np.asarray(amps, float)):
        if amp == 0.0:
            continue
        u0 = x0 / scale
        u1 = x1 / scale
        with np.errstate(divide="ignore"):
            inv = np.where(u0 > 0.0, 1.0 / np.where(u0 > 0.0, u0, 1.0), np.inf)
        env = np.minimum(1.0, inv)
        f0 = _sinc(u0)
        f1 = _sinc(u1)
        m2 = np.minimum(1.0 / 3.0, inv + 2.0 * inv * inv + 2.0 * inv * inv * inv)
        wu = u1 - u0
        pad = m2 * wu * wu / 8.0
        tlo = np.maximum(np.minimum(f0, f1) - pad, -env)
        thi = np.minimum(np.maximum(f0, f1) + pad, env)
        far = wu > wide
        tlo[far] = -env[far]
        thi[far] = env[far]
        slack = abs(amp) * (REL_SLACK * env + ABS_SLACK)
        if amp >= 0.0:
            lo += amp * tlo - slack
            hi += amp * thi + slack
        else:
            lo += amp * thi - slack
            hi += amp * tlo + slack
    abs_lo = np.maximum(np.maximum(lo, -hi), 0.0)
    abs_hi = np.maximum(np.abs(lo), np.abs(hi))
    return abs_lo, abs_hi


def step_power_integral(breaks, values, beta, s, lo=0.0, hi=np.inf):
    """sum_k values[k]**s * int_{[b_k, b_{k+1}] cap [lo, hi]} t**(beta-1) dt."""
    b = np.clip(np.asarray(breaks, dtype=float), lo, hi)
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0.0
    pw = b ** beta
    return float(np.sum(v ** s * (pw[1:] - pw[:-1])) / beta)
