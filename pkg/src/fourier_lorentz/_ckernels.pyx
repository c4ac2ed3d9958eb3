# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops in ``_pykernels``."""
import numpy as np

from libc.math cimport sin, pow, sqrt, fabs, INFINITY

cdef double REL_SLACK = 1e-14
cdef double ABS_SLACK = 1e-15


cdef inline double _sinc(double u) nogil:
    if u == 0.0:
        return 1.0
    return sin(u) / u


def sinc_sum_bounds(edges, scales, amps, double wide=0.5):
    cdef double[::1] e = np.ascontiguousarray(edges, dtype=np.float64)
    cdef double[::1] sc = np.ascontiguousarray(scales, dtype=np.float64)
    cdef double[::1] am = np.ascontiguousarray(amps, dtype=np.float64)
    cdef Py_ssize_t n = e.shape[0] - 1
    cdef Py_ssize_t nt = sc.shape[0]
    out_lo = np.empty(n if n > 0 else 0)
    out_hi = np.empty(n if n > 0 else 0)
    cdef double[::1] olo = out_lo
    cdef double[::1] ohi = out_hi
    cdef Py_ssize_t i, j
    cdef double lo, hi, u0, u1, inv, env, f0, f1, m2, wu, pad, tlo, thi, amp, slack, t
    with nogil:
        for i in range(n):
            lo = 0.0
            hi = 0.0
            for j in range(nt):
                amp = am[j]
                if amp == 0.0:
                    continue
                u0 = e[i] / sc[j]
                u1 = e[i + 1] / sc[j]
                if u0 > 0.0:
                    inv = 1.0 / u0
                    env = inv if inv < 1.0 else 1.0
                else:
                    inv = INFINITY
                    env = 1.0
                wu = u1 - u0
                if wu > wide:
                    tlo = -env
                    thi = env
                else:
                    f0 = _sinc(u0)
                    f1 = _sinc(u1)
                    m2 = inv + 2.0 * inv * inv + 2.0 * inv * inv * inv
                    if not (m2 < 1.0 / 3.0):
                        m2 = 1.0 / 3.0
                    pad = m2 * wu * wu / 8.0
                    tlo = (f0 if f0 < f1 else f1) - pad
                    thi = (f0 if f0 > f1 else f1) + pad
                    if tlo < -env:
                        tlo = -env
                    if thi > env:
                        thi = env
                slack = fabs(amp) * (REL_SLACK * env + ABS_SLACK)
                if amp >= 0.0:
                    lo += amp * tlo - slack
                    hi += amp * thi + slack
                else:
                    lo += amp * thi - slack
                    hi += amp * tlo + slack
            t = lo
            if -hi > t:
                t = -hi
            if t < 0.0:
                t = 0.0
            olo[i] = t
            ohi[i] = fabs(lo) if fabs(lo) > fabs(hi) else fabs(hi)
    return out_lo, out_hi


cdef inline double _pw(double x, double e) nogil:
    if e == 0.5:
        return sqrt(x)
    if e == 1.5:
        return x * sqrt(x)
    if e == 1.0:
        return x
    if e == 2.0:
        return x * x
    return pow(x, e)


def step_power_integral(breaks, values, double beta, double s, double lo=0.0, double hi=INFINITY):
    cdef double[::1] b = np.ascontiguousarray(breaks, dtype=np.float64)
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t k
    cdef double total = 0.0
    cdef double left, right, prev
    if n == 0:
        return 0.0
    with nogil:
        left = b[0]
        if left < lo:
            left = lo
        if left > hi:
            left = hi
        prev = _pw(left, beta)
        for k in range(n):
            right = b[k + 1]
            if right < lo:
                right = lo
            if right > hi:
                right = hi
            right = _pw(right, beta)
            if v[k] != 0.0:
                total += _pw(v[k], s) * (right - prev)
            prev = right
    return total / beta
