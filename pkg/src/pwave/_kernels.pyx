# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Twin of ``pwave._kernels_py``: identical algorithms, coefficients and
operation order, with the inner loops in C.  See that module for the
reference implementation and docstrings.
"""

from libc.math cimport exp, fabs, pow, sqrt

import numpy as np

BACKEND_NAME = "compiled"

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK dqk15).
cdef double[8] _XGK
cdef double[8] _WGK
cdef double[4] _WG
_XGK[0] = 0.991455371120813
_XGK[1] = 0.949107912342759
_XGK[2] = 0.864864423359769
_XGK[3] = 0.741531185599394
_XGK[4] = 0.586087235467691
_XGK[5] = 0.405845151377397
_XGK[6] = 0.207784955007898
_XGK[7] = 0.000000000000000
_WGK[0] = 0.022935322010529
_WGK[1] = 0.063092092629979
_WGK[2] = 0.104790010322250
_WGK[3] = 0.140653259715525
_WGK[4] = 0.169004726639267
_WGK[5] = 0.190350578064785
_WGK[6] = 0.204432940075298
_WGK[7] = 0.209482141084728
_WG[0] = 0.129484966168870
_WG[1] = 0.279705391489277
_WG[2] = 0.381830050505119
_WG[3] = 0.417959183673469

cdef enum:
    MAX_INTERVALS_CAP = 256

cdef double _ERR_FLOOR = 1e-300
cdef double _SQRT_PI = 1.7724538509055160273


def g2_energy(double e, double delta, double k_const, double gamma):
    """K E / ((E - delta)^2 + gamma^2/4)."""
    cdef double d = e - delta
    return k_const * e / (d * d + 0.25 * gamma * gamma)


cdef inline double _integrand(
    double e, double t, double delta, double k_const, double gamma, double pref
) nogil:
    cdef double d
    if e <= 0.0:
        return 0.0
    d = e - delta
    return (
        pref * sqrt(e) * exp(-e / t) * k_const * e / (d * d + 0.25 * gamma * gamma)
    )


cdef inline void _gk15(
    double a,
    double b,
    double t,
    double delta,
    double k_const,
    double gamma,
    double pref,
    double* out_val,
    double* out_err,
) nogil:
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double fc = _integrand(c, t, delta, k_const, gamma, pref)
    cdef double resk = _WGK[7] * fc
    cdef double resg = _WG[3] * fc
    cdef double x, s
    cdef int j
    for j in range(7):
        x = h * _XGK[j]
        s = _integrand(c - x, t, delta, k_const, gamma, pref) + _integrand(
            c + x, t, delta, k_const, gamma, pref
        )
        resk += _WGK[j] * s
        if j % 2 == 1:
            resg += _WG[j // 2] * s
    out_val[0] = resk * h
    out_err[0] = fabs(resk - resg) * h


cdef int _integrate_piece(
    double a,
    double b,
    double t,
    double delta,
    double k_const,
    double gamma,
    double pref,
    double rtol,
    int max_intervals,
    double* out_val,
    double* out_err,
) nogil:
    cdef double[MAX_INTERVALS_CAP] lo
    cdef double[MAX_INTERVALS_CAP] hi
    cdef double[MAX_INTERVALS_CAP] vals
    cdef double[MAX_INTERVALS_CAP] errs
    cdef double total, total_err, emax, a_w, b_w, mid, v1, e1, v2, e2
    cdef int n = 1, worst, i
    _gk15(a, b, t, delta, k_const, gamma, pref, &vals[0], &errs[0])
    lo[0] = a
    hi[0] = b
    total = vals[0]
    total_err = errs[0]
    while (
        total_err > rtol * fabs(total)
        and total_err > _ERR_FLOOR
        and n < max_intervals
    ):
        worst = 0
        emax = errs[0]
        for i in range(1, n):
            if errs[i] > emax:
                emax = errs[i]
                worst = i
        a_w = lo[worst]
        b_w = hi[worst]
        mid = 0.5 * (a_w + b_w)
        _gk15(a_w, mid, t, delta, k_const, gamma, pref, &v1, &e1)
        _gk15(mid, b_w, t, delta, k_const, gamma, pref, &v2, &e2)
        total += v1 + v2 - vals[worst]
        total_err += e1 + e2 - errs[worst]
        hi[worst] = mid
        vals[worst] = v1
        errs[worst] = e1
        lo[n] = mid
        hi[n] = b_w
        vals[n] = v2
        errs[n] = e2
        n += 1
    out_val[0] = total
    out_err[0] = total_err
    return 1 if (total_err <= rtol * fabs(total) or total_err <= _ERR_FLOOR) else 0


def thermal_g2(
    double t,
    double delta,
    double k_const,
    double gamma,
    double rtol=1e-8,
    int max_intervals=256,
):
    """Maxwell-Boltzmann average of the resonant rate; see the pure-Python
    twin for details.  Returns (value, error_estimate, converged)."""
    cdef double pref, spike_hi, spike_lo, upper, value, error, v, e
    cdef double[4] points
    cdef int npts = 0, i, ok, converged = 1
    if max_intervals > MAX_INTERVALS_CAP:
        max_intervals = MAX_INTERVALS_CAP
    pref = 2.0 / (_SQRT_PI * t * sqrt(t))
    spike_hi = delta + 50.0 * gamma
    upper = (spike_hi if spike_hi > 0.0 else 0.0) + 45.0 * t
    points[npts] = 0.0
    npts += 1
    if delta > 0.0:
        spike_lo = delta - 50.0 * gamma
        if spike_lo > 0.0:
            points[npts] = spike_lo
            npts += 1
        points[npts] = spike_hi
        npts += 1
    points[npts] = upper
    npts += 1
    value = 0.0
    error = 0.0
    for i in range(npts - 1):
        ok = _integrate_piece(
            points[i],
            points[i + 1],
            t,
            delta,
            k_const,
            gamma,
            pref,
            rtol,
            max_intervals,
            &v,
            &e,
        )
        value += v
        error += e
        if ok == 0:
            converged = 0
    return value, error, converged != 0


# Dormand-Prince 5(4) coefficients.
cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0
cdef double _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0
cdef double _A42 = -56.0 / 15.0
cdef double _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0
cdef double _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0
cdef double _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0
cdef double _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0
cdef double _A64 = 49.0 / 176.0
cdef double _A65 = -5103.0 / 18656.0
cdef double _B1 = 35.0 / 384.0
cdef double _B3 = 500.0 / 1113.0
cdef double _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0
cdef double _B6 = 11.0 / 84.0
cdef double _E1 = 71.0 / 57600.0
cdef double _E3 = -71.0 / 16695.0
cdef double _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0
cdef double _E6 = 22.0 / 525.0
cdef double _E7 = -1.0 / 40.0


cdef inline double _rhs(double n, double c1, double c2, double c3) nogil:
    return -n * (c1 + n * (c2 + n * c3))


def decay_integrate(
    double n0,
    double c1,
    double c2,
    double c3,
    t_eval,
    double rtol=1e-9,
    double atol=1e-12,
    long max_steps=1000000,
):
    """Integrate dN/dt = -N (c1 + c2 N + c3 N^2) from t=0 through `t_eval`;
    see the pure-Python twin.  Returns (samples, status, t_fail)."""
    ts_arr = np.ascontiguousarray(t_eval, dtype=np.float64)
    cdef double[::1] ts = ts_arr
    out_arr = np.empty(ts.shape[0])
    cdef double[::1] out = out_arr
    cdef double t = 0.0
    cdef double y = n0
    cdef double k1 = _rhs(y, c1, c2, c3)
    cdef double span = ts[ts.shape[0] - 1] if ts.shape[0] else 0.0
    cdef double d0, h, hmin, target, ht
    cdef double k2, k3, k4, k5, k6, k7, y_new, err, ay, ayn, sc, ratio, fac
    cdef long steps = 0
    cdef Py_ssize_t i, j
    if span <= 0.0:
        out_arr[:] = y
        return out_arr, 0, 0.0
    d0 = fabs(k1)
    if d0 > 0.0:
        h = 0.01 * (fabs(y) + atol) / d0
        if h > span:
            h = span
    else:
        h = span
    hmin = span * 1e-15
    for i in range(ts.shape[0]):
        target = ts[i]
        while t < target:
            if steps >= max_steps:
                for j in range(i, ts.shape[0]):
                    out[j] = y
                return out_arr, 1, t
            if h < hmin:
                for j in range(i, ts.shape[0]):
                    out[j] = y
                return out_arr, 2, t
            ht = target - t
            if h < ht:
                ht = h
            k2 = _rhs(y + ht * (_A21 * k1), c1, c2, c3)
            k3 = _rhs(y + ht * (_A31 * k1 + _A32 * k2), c1, c2, c3)
            k4 = _rhs(y + ht * (_A41 * k1 + _A42 * k2 + _A43 * k3), c1, c2, c3)
            k5 = _rhs(
                y + ht * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4), c1, c2, c3
            )
            k6 = _rhs(
                y + ht * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
                c1,
                c2,
                c3,
            )
            y_new = y + ht * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
            k7 = _rhs(y_new, c1, c2, c3)
            err = ht * (
                _E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7
            )
            ay = fabs(y)
            ayn = fabs(y_new)
            sc = atol + rtol * (ay if ay > ayn else ayn)
            ratio = fabs(err) / sc if sc > 0.0 else 0.0
            steps += 1
            if ratio <= 1.0:
                t += ht
                y = y_new
                k1 = k7
                if ratio == 0.0:
                    fac = 10.0
                else:
                    fac = 0.9 * pow(ratio, -0.2)
                    if fac > 10.0:
                        fac = 10.0
                    elif fac < 0.2:
                        fac = 0.2
                h = ht * fac
            else:
                fac = 0.9 * pow(ratio, -0.2)
                if fac < 0.2:
                    fac = 0.2
                h = ht * fac
        out[i] = y if y > 0.0 else 0.0
    return out_arr, 0, 0.0
