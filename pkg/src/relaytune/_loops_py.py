"""Pure-Python simulation kernels.

Fallback twin of the compiled extension relaytune._loops_c: same state
variables updated in the same order with the same floating-point operations,
so both backends produce bit-identical traces. Inner loops run over plain
lists (Python floats are C doubles) and write back into the caller's arrays.
"""

import math


def lag_loop(u, y, alpha, b, delay, u_pre):
    """First-order lag driven by u delayed an integer number of samples.

    y[k+1] = alpha*y[k] + b*u[k-delay]; samples before the run are held at
    u_pre. y[0] is the caller-set initial output.
    """
    n = y.shape[0]
    ul = u.tolist()
    yl = y.tolist()
    for k in range(n - 1):
        ud = ul[k - delay] if k >= delay else u_pre
        yl[k + 1] = alpha * yl[k] + b * ud
    y[1:] = yl[1:]


def relay_loop(y, u, alpha, b, delay, u_pre, level, hysteresis):
    """Relay in feedback around the delayed lag, regulating to zero.

    The relay holds its previous output inside the hysteresis band and
    outputs +level on a tie (error exactly at the switching threshold).
    Fills u with the relay output and y[1:] with the plant output.
    """
    n = y.shape[0]
    yl = y.tolist()
    ul = [0.0] * n
    state = level
    for k in range(n - 1):
        e = -yl[k]
        if state > 0.0:
            if e < -hysteresis:
                state = -level
        elif e >= hysteresis:
            state = level
        ul[k] = state
        ud = ul[k - delay] if k >= delay else u_pre
        yl[k + 1] = alpha * yl[k] + b * ud
    e = -yl[n - 1]
    if state > 0.0:
        if e < -hysteresis:
            state = -level
    elif e >= hysteresis:
        state = level
    ul[n - 1] = state
    u[:] = ul
    y[1:] = yl[1:]


def pid_loop(sp, y, u, alpha, b, delay, u_pre, kp, inv_ti, td, beta, dt,
             dist, dist_idx, sat_lo, sat_hi):
    """Sampled non-interacting PID around the delayed lag.

    Error integral by trapezoid; derivative acts on the error through a
    first-order filter (pole beta per sample) whose state starts at e[0], so
    a reference step coinciding with t = 0 produces no derivative kick.
    dist is added at the plant input from sample dist_idx onward. Saturation
    is active when sat_lo <= sat_hi (pass NaNs to disable).

    Returns the index of the first non-finite sample, or -1 if none.
    """
    n = y.shape[0]
    spl = sp.tolist()
    yl = y.tolist()
    ul = [0.0] * n
    inv_dt = 1.0 / dt
    omb = 1.0 - beta
    has_sat = sat_lo <= sat_hi
    acc = 0.0
    e_prev = spl[0] - yl[0]
    f_prev = e_prev
    for k in range(n):
        e = spl[k] - yl[k]
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
        ul[k] = v
        if not math.isfinite(v):
            u[:] = ul
            y[1:] = yl[1:]
            return k
        e_prev = e
        f_prev = f
        if k < n - 1:
            j = k - delay
            if j >= 0:
                up = ul[j] + dist if j >= dist_idx else ul[j]
            else:
                up = u_pre
            yn = alpha * yl[k] + b * up
            yl[k + 1] = yn
            if not math.isfinite(yn):
                u[:] = ul
                y[1:] = yl[1:]
                return k + 1
    u[:] = ul
    y[1:] = yl[1:]
    return -1
