# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernels (Cython twin of relaytune._loops_py).

Same state updates in the same order as the pure-Python module; compiled
with -ffp-contract=off so both backends are bit-identical.
"""

from libc.math cimport isfinite


def lag_loop(double[::1] u, double[::1] y, double alpha, double b,
             Py_ssize_t delay, double u_pre):
    """First-order lag driven by u delayed an integer number of samples."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t k
    cdef double ud
    for k in range(n - 1):
        ud = u[k - delay] if k >= delay else u_pre
        y[k + 1] = alpha * y[k] + b * ud


def relay_loop(double[::1] y, double[::1] u, double alpha, double b,
               Py_ssize_t delay, double u_pre, double level,
               double hysteresis):
    """Relay in feedback around the delayed lag, regulating to zero."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t k
    cdef double state = level
    cdef double e, ud
    for k in range(n - 1):
        e = -y[k]
        if state > 0.0:
            if e < -hysteresis:
                state = -level
        elif e >= hysteresis:
            state = level
        u[k] = state
        ud = u[k - delay] if k >= delay else u_pre
        y[k + 1] = alpha * y[k] + b * ud
    e = -y[n - 1]
    if state > 0.0:
        if e < -hysteresis:
            state = -level
    elif e >= hysteresis:
        state = level
    u[n - 1] = state


def pid_loop(double[::1] sp, double[::1] y, double[::1] u, double alpha,
             double b, Py_ssize_t delay, double u_pre, double kp,
             double inv_ti, double td, double beta, double dt, double dist,
             Py_ssize_t dist_idx, double sat_lo, double sat_hi):
    """Sampled non-interacting PID around the delayed lag.

    Returns the index of the first non-finite sample, or -1 if none.
    """
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t k, j
    cdef double inv_dt = 1.0 / dt
    cdef double omb = 1.0 - beta
    cdef bint has_sat = sat_lo <= sat_hi
    cdef double acc = 0.0
    cdef double e_prev = sp[0] - y[0]
    cdef double f_prev = e_prev
    cdef double e, f, dterm, v, up, yn
    for k in range(n):
        e = sp[k] - y[k]
        if k > 0:
            acc = acc + 0.5 * (e + e_prev) * dt
        if td > 0.0:
            f = beta * f_prev + omb * e
            dterm = td * (f - f_prev) * inv_dt
        else:
            f = 0.0
            dterm = 0.0
        v = kp * (e + acc * inv_ti + dterm)
        if has_sat:
            if v < sat_lo:
                v = sat_lo
            elif v > sat_hi:
                v = sat_hi
        u[k] = v
        if not isfinite(v):
            return k
        e_prev = e
        f_prev = f
        if k < n - 1:
            j = k - delay
            if j >= 0:
                up = u[j] + dist if j >= dist_idx else u[j]
            else:
                up = u_pre
            yn = alpha * y[k] + b * up
            y[k + 1] = yn
            if not isfinite(yn):
                return k + 1
    return -1
