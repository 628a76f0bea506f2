# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Dormand-Prince 5(4) core for chain systems.

Mirror of ``_dopri.py``: same tableau, step control, dense output and
status protocol.  Kept in C for the long near-critical integrations where
the Python loop dominates runtime.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, fmax, fmin, pow, sqrt

cnp.import_array()

cdef enum:
    MAXDIM = 34

STATUS_OK = 0
STATUS_DIVERGED = 1
STATUS_CAPITAL = 2
STATUS_STEP_UNDERFLOW = 3


cdef inline double _sigmoid(double t) nogil:
    cdef double e
    if t >= 0.0:
        return 1.0 / (1.0 + exp(-t))
    e = exp(t)
    return e / (1.0 + e)


cdef inline int _rhs(double* s, double* out, int m,
                     double alpha, double gamma, double delta, double g,
                     double G0, double rate,
                     double a, double c, double d, double v) nogil:
    """Chain-system derivative; returns -1 when k <= 0 (domain exit)."""
    cdef double k = s[m + 1]
    if k <= 0.0:
        return -1
    cdef double y = s[0]
    cdef double prev = y
    cdef int i
    out[0] = alpha * (k * (c + d * _sigmoid(a * (v * y / k - 1.0))) - gamma * y + G0) - g * y
    for i in range(1, m + 1):
        out[i] = rate * (prev - s[i])
        prev = s[i]
    out[m + 1] = k * (c + d * _sigmoid(a * (v * s[m] / k - 1.0))) - (g + delta) * k
    return 0


cdef inline double _rms_scaled(double* x, double* scale, int n) nogil:
    cdef double acc = 0.0
    cdef double r
    cdef int i
    for i in range(n):
        r = x[i] / scale[i]
        acc += r * r
    return sqrt(acc / n)


def integrate_chain(y0, int m,
                    double alpha, double gamma, double delta, double g,
                    double G0, double T,
                    double a, double c, double d, double v,
                    double t0, double t_end, double sample_dt,
                    double rtol, double atol, double max_abs=1e9,
                    double max_step=0.0):
    """Integrate the chain system on the sample grid t0 + j * sample_dt.

    Returns (times, states, status, t_stop); see ``_dopri.py`` for the
    status codes.
    """
    cdef int n = m + 2
    if n > MAXDIM:
        raise ValueError(f"compiled core supports m + 2 <= {MAXDIM}")
    if max_step <= 0.0:
        max_step = 10.0 * sample_dt

    # Dormand-Prince tableau (FSAL)
    cdef double A1[1]
    cdef double A2[2]
    cdef double A3[3]
    cdef double A4[4]
    cdef double A5[5]
    cdef double B[6]
    cdef double E[7]
    cdef double P[7][4]
    A1[0] = 1.0 / 5.0
    A2[0] = 3.0 / 40.0; A2[1] = 9.0 / 40.0
    A3[0] = 44.0 / 45.0; A3[1] = -56.0 / 15.0; A3[2] = 32.0 / 9.0
    A4[0] = 19372.0 / 6561.0; A4[1] = -25360.0 / 2187.0
    A4[2] = 64448.0 / 6561.0; A4[3] = -212.0 / 729.0
    A5[0] = 9017.0 / 3168.0; A5[1] = -355.0 / 33.0; A5[2] = 46732.0 / 5247.0
    A5[3] = 49.0 / 176.0; A5[4] = -5103.0 / 18656.0
    B[0] = 35.0 / 384.0; B[1] = 0.0; B[2] = 500.0 / 1113.0
    B[3] = 125.0 / 192.0; B[4] = -2187.0 / 6784.0; B[5] = 11.0 / 84.0
    E[0] = -71.0 / 57600.0; E[1] = 0.0; E[2] = 71.0 / 16695.0
    E[3] = -71.0 / 1920.0; E[4] = 17253.0 / 339200.0
    E[5] = -22.0 / 525.0; E[6] = 1.0 / 40.0
    P[0][0] = 1.0
    P[0][1] = -8048581381.0 / 2820520608.0
    P[0][2] = 8663915743.0 / 2820520608.0
    P[0][3] = -12715105075.0 / 11282082432.0
    P[1][0] = 0.0; P[1][1] = 0.0; P[1][2] = 0.0; P[1][3] = 0.0
    P[2][0] = 0.0
    P[2][1] = 131558114200.0 / 32700410799.0
    P[2][2] = -68118460800.0 / 10900136933.0
    P[2][3] = 87487479700.0 / 32700410799.0
    P[3][0] = 0.0
    P[3][1] = -1754552775.0 / 470086768.0
    P[3][2] = 14199869525.0 / 1410260304.0
    P[3][3] = -10690763975.0 / 1880347072.0
    P[4][0] = 0.0
    P[4][1] = 127303824393.0 / 49829197408.0
    P[4][2] = -318862633887.0 / 49829197408.0
    P[4][3] = 701980252875.0 / 199316789632.0
    P[5][0] = 0.0
    P[5][1] = -282668133.0 / 205662961.0
    P[5][2] = 2019193451.0 / 616988883.0
    P[5][3] = -1453857185.0 / 822651844.0
    P[6][0] = 0.0
    P[6][1] = 40617522.0 / 29380423.0
    P[6][2] = -110615467.0 / 29380423.0
    P[6][3] = 69997945.0 / 29380423.0

    cdef double rate = m / T
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y0_arr = np.ascontiguousarray(y0, dtype=np.float64)
    if y0_arr.shape[0] != n:
        raise ValueError(f"y0 must have shape ({n},)")

    cdef long n_samples = <long>((t_end - t0) / sample_dt + 1e-9) + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] times = np.empty(n_samples)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] states = np.empty((n_samples, n))

    cdef double y[MAXDIM]
    cdef double y_new[MAXDIM]
    cdef double y_stage[MAXDIM]
    cdef double err[MAXDIM]
    cdef double scale[MAXDIM]
    cdef double K[7][MAXDIM]
    cdef double bp[4]
    cdef int i, q, si
    cdef long j = 1
    cdef double t = t0
    cdef double t_new, h, h_step, theta, acc, err_norm, factor, ts, d0, d1, d2, h0, h1
    cdef int status = STATUS_OK
    cdef bint final
    cdef double big

    times[0] = t0
    for i in range(n):
        y[i] = y0_arr[i]
        states[0, i] = y[i]

    if _rhs(y, K[0], m, alpha, gamma, delta, g, G0, rate, a, c, d, v) != 0:
        return times[:1], states[:1], STATUS_CAPITAL, t

    # initial step heuristic (Hairer)
    d0 = 0.0
    d1 = 0.0
    for i in range(n):
        scale[i] = atol + rtol * fabs(y[i])
        d0 += (y[i] / scale[i]) ** 2
        d1 += (K[0][i] / scale[i]) ** 2
    d0 = sqrt(d0 / n)
    d1 = sqrt(d1 / n)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    for i in range(n):
        y_stage[i] = y[i] + h0 * K[0][i]
    if _rhs(y_stage, K[1], m, alpha, gamma, delta, g, G0, rate, a, c, d, v) != 0:
        h = h0 * 1e-3
    else:
        d2 = 0.0
        for i in range(n):
            d2 += ((K[1][i] - K[0][i]) / scale[i]) ** 2
        d2 = sqrt(d2 / n) / h0
        if fmax(d1, d2) <= 1e-15:
            h1 = fmax(1e-6, h0 * 1e-3)
        else:
            h1 = pow(0.01 / fmax(d1, d2), 0.2)
        h = fmin(100.0 * h0, h1)
    if not (h == h) or h <= 0.0 or h > 1e308:
        h = 1e-6
    h = fmin(h, max_step)

    while t < t_end:
        final = t + h >= t_end
        h_step = t_end - t if final else h
        if (not final) and h_step < 1e-14 * fmax(1.0, fabs(t)):
            status = STATUS_STEP_UNDERFLOW
            break

        # six derivative stages plus FSAL evaluation at y_new
        q = 0
        for si in range(1, 6):
            for i in range(n):
                acc = 0.0
                if si == 1:
                    acc = A1[0] * K[0][i]
                elif si == 2:
                    acc = A2[0] * K[0][i] + A2[1] * K[1][i]
                elif si == 3:
                    acc = A3[0] * K[0][i] + A3[1] * K[1][i] + A3[2] * K[2][i]
                elif si == 4:
                    acc = (A4[0] * K[0][i] + A4[1] * K[1][i]
                           + A4[2] * K[2][i] + A4[3] * K[3][i])
                else:
                    acc = (A5[0] * K[0][i] + A5[1] * K[1][i] + A5[2] * K[2][i]
                           + A5[3] * K[3][i] + A5[4] * K[4][i])
                y_stage[i] = y[i] + h_step * acc
            if _rhs(y_stage, K[si], m, alpha, gamma, delta, g, G0, rate, a, c, d, v) != 0:
                q = -1
                break
        if q == 0:
            for i in range(n):
                acc = (B[0] * K[0][i] + B[2] * K[2][i] + B[3] * K[3][i]
                       + B[4] * K[4][i] + B[5] * K[5][i])
                y_new[i] = y[i] + h_step * acc
            if _rhs(y_new, K[6], m, alpha, gamma, delta, g, G0, rate, a, c, d, v) != 0:
                q = -1
        if q != 0:
            h = 0.5 * h_step
            if h < 1e-14 * fmax(1.0, fabs(t)):
                status = STATUS_CAPITAL
                break
            continue

        for i in range(n):
            acc = 0.0
            for si in range(7):
                acc += E[si] * K[si][i]
            err[i] = h_step * acc
            scale[i] = atol + rtol * fmax(fabs(y[i]), fabs(y_new[i]))
        err_norm = _rms_scaled(err, scale, n)
        if not (err_norm <= 1.0):  # NaN-safe: non-finite norms reject
            factor = 0.9 * pow(err_norm, -0.2)
            if not (factor == factor) or factor < 0.2:
                factor = 0.2
            h = h_step * factor
            continue

        t_new = t_end if final else t + h_step
        while j < n_samples:
            ts = t0 + j * sample_dt
            if ts > t_new + 1e-12 * fmax(1.0, fabs(t_new)):
                break
            theta = (ts - t) / h_step
            bp[0] = theta
            bp[1] = theta * theta
            bp[2] = bp[1] * theta
            bp[3] = bp[2] * theta
            times[j] = ts
            for i in range(n):
                acc = 0.0
                for si in range(7):
                    acc += K[si][i] * (P[si][0] * bp[0] + P[si][1] * bp[1]
                                       + P[si][2] * bp[2] + P[si][3] * bp[3])
                states[j, i] = y[i] + h_step * acc
            j += 1

        big = 0.0
        for i in range(n):
            y[i] = y_new[i]
            K[0][i] = K[6][i]
            if fabs(y[i]) > big:
                big = fabs(y[i])
        t = t_new
        if err_norm == 0.0:
            factor = 5.0
        else:
            factor = 0.9 * pow(err_norm, -0.2)
            if factor > 5.0:
                factor = 5.0
            elif factor < 0.2:
                factor = 0.2
        h = fmin(h_step * factor, max_step)

        if big > max_abs:
            status = STATUS_DIVERGED
            break
        if y[n - 1] <= 0.0:
            status = STATUS_CAPITAL
            break

    return times[:j], states[:j], status, t
