"""Pure-Python numerical kernels.

Twin of the compiled extension ``pwave._kernels``: same algorithms, same
coefficients, same operation order, so the two backends agree to rounding
noise.  Kept dependency-free (numpy only to allocate output arrays) so the
package still works when the extension was not built.

Kernels
-------
g2_energy        Lorentzian resonant two-body rate at fixed collision energy.
thermal_g2       Thermal average of g2_energy over a Maxwell-Boltzmann
                 collision-energy distribution (adaptive Gauss-Kronrod 7/15,
                 domain split around the resonance spike).
decay_integrate  Adaptive Dormand-Prince 5(4) integration of the trap-loss
                 rate polynomial dN/dt = -N (c1 + c2 N + c3 N^2).
"""

import math

import numpy as np

BACKEND_NAME = "python"

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK dqk15).
# Even indices are Kronrod-only nodes, odd indices and the center belong to
# the embedded 7-point Gauss rule.
_XGK = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
)
_WGK = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)
_WG = (
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
)

_MAX_INTERVALS_CAP = 256
_ERR_FLOOR = 1e-300
_SQRT_PI = 1.7724538509055160273


def g2_energy(e, delta, k_const, gamma):
    """K E / ((E - delta)^2 + gamma^2/4)."""
    d = e - delta
    return k_const * e / (d * d + 0.25 * gamma * gamma)


def _integrand(e, t, delta, k_const, gamma, pref):
    # pref = 2 / (sqrt(pi) T^(3/2)); integrand = P(E; T) * g2(E)
    if e <= 0.0:
        return 0.0
    d = e - delta
    return (
        pref
        * math.sqrt(e)
        * math.exp(-e / t)
        * k_const
        * e
        / (d * d + 0.25 * gamma * gamma)
    )


def _gk15(a, b, t, delta, k_const, gamma, pref):
    # one Gauss-Kronrod 7/15 panel; returns (kronrod value, |kronrod - gauss|)
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = _integrand(c, t, delta, k_const, gamma, pref)
    resk = _WGK[7] * fc
    resg = _WG[3] * fc
    for j in range(7):
        x = h * _XGK[j]
        s = _integrand(c - x, t, delta, k_const, gamma, pref) + _integrand(
            c + x, t, delta, k_const, gamma, pref
        )
        resk += _WGK[j] * s
        if j % 2 == 1:
            resg += _WG[j // 2] * s
    return resk * h, abs(resk - resg) * h


def _integrate_piece(a, b, t, delta, k_const, gamma, pref, rtol, max_intervals):
    # globally adaptive: keep bisecting the interval with the largest error
    # until the summed error estimate meets the relative tolerance
    val, err = _gk15(a, b, t, delta, k_const, gamma, pref)
    lo = [a]
    hi = [b]
    vals = [val]
    errs = [err]
    total = val
    total_err = err
    while (
        total_err > rtol * abs(total)
        and total_err > _ERR_FLOOR
        and len(vals) < max_intervals
    ):
        worst = 0
        emax = errs[0]
        for i in range(1, len(errs)):
            if errs[i] > emax:
                emax = errs[i]
                worst = i
        a_w = lo[worst]
        b_w = hi[worst]
        mid = 0.5 * (a_w + b_w)
        v1, e1 = _gk15(a_w, mid, t, delta, k_const, gamma, pref)
        v2, e2 = _gk15(mid, b_w, t, delta, k_const, gamma, pref)
        total += v1 + v2 - vals[worst]
        total_err += e1 + e2 - errs[worst]
        hi[worst] = mid
        vals[worst] = v1
        errs[worst] = e1
        lo.append(mid)
        hi.append(b_w)
        vals.append(v2)
        errs.append(e2)
    converged = total_err <= rtol * abs(total) or total_err <= _ERR_FLOOR
    return total, total_err, converged


def thermal_g2(t, delta, k_const, gamma, rtol=1e-8, max_intervals=256):
    """Maxwell-Boltzmann average of the resonant rate over collision energy.

    Integrates (2/sqrt(pi)) T^(-3/2) sqrt(E) exp(-E/T) g2(E) over E in
    (0, inf), truncated where the Boltzmann factor is ~1e-19 of the scale.
    When the resonance spike sits at positive energy the domain is split at
    delta +/- 50 gamma so the adaptive rule cannot step over it.

    Returns (value, error_estimate, converged).
    """
    if max_intervals > _MAX_INTERVALS_CAP:
        max_intervals = _MAX_INTERVALS_CAP
    pref = 2.0 / (_SQRT_PI * t * math.sqrt(t))
    spike_hi = delta + 50.0 * gamma
    upper = (spike_hi if spike_hi > 0.0 else 0.0) + 45.0 * t
    points = [0.0]
    if delta > 0.0:
        spike_lo = delta - 50.0 * gamma
        if spike_lo > 0.0:
            points.append(spike_lo)
        points.append(spike_hi)
    points.append(upper)
    value = 0.0
    error = 0.0
    converged = True
    for i in range(len(points) - 1):
        v, e, ok = _integrate_piece(
            points[i], points[i + 1], t, delta, k_const, gamma, pref, rtol, max_intervals
        )
        value += v
        error += e
        converged = converged and ok
    return value, error, converged


# Dormand-Prince 5(4) coefficients.
_A21 = 1.0 / 5.0
_A31 = 3.0 / 40.0
_A32 = 9.0 / 40.0
_A41 = 44.0 / 45.0
_A42 = -56.0 / 15.0
_A43 = 32.0 / 9.0
_A51 = 19372.0 / 6561.0
_A52 = -25360.0 / 2187.0
_A53 = 64448.0 / 6561.0
_A54 = -212.0 / 729.0
_A61 = 9017.0 / 3168.0
_A62 = -355.0 / 33.0
_A63 = 46732.0 / 5247.0
_A64 = 49.0 / 176.0
_A65 = -5103.0 / 18656.0
_B1 = 35.0 / 384.0
_B3 = 500.0 / 1113.0
_B4 = 125.0 / 192.0
_B5 = -2187.0 / 6784.0
_B6 = 11.0 / 84.0
_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0


def _rhs(n, c1, c2, c3):
    return -n * (c1 + n * (c2 + n * c3))


def decay_integrate(n0, c1, c2, c3, t_eval, rtol=1e-9, atol=1e-12, max_steps=1000000):
    """Integrate dN/dt = -N (c1 + c2 N + c3 N^2) from t=0 through `t_eval`.

    `t_eval` must be non-decreasing with t_eval[0] >= 0.  Adaptive embedded
    5(4) pairs with FSAL; steps are clamped to land exactly on sample times.

    Returns (samples array, status, t_fail); status 0 = ok, 1 = step budget
    exhausted, 2 = step size underflow, with t_fail the time reached.
    """
    ts = np.asarray(t_eval, dtype=float)
    out = np.empty(ts.shape[0])
    t = 0.0
    y = float(n0)
    k1 = _rhs(y, c1, c2, c3)
    span = float(ts[-1]) if ts.shape[0] else 0.0
    if span <= 0.0:
        out[:] = y
        return out, 0, 0.0
    d0 = abs(k1)
    if d0 > 0.0:
        h = 0.01 * (abs(y) + atol) / d0
        if h > span:
            h = span
    else:
        h = span
    hmin = span * 1e-15
    steps = 0
    for i in range(ts.shape[0]):
        target = float(ts[i])
        while t < target:
            if steps >= max_steps:
                out[i:] = y
                return out, 1, t
            if h < hmin:
                out[i:] = y
                return out, 2, t
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
            ay = abs(y)
            ayn = abs(y_new)
            sc = atol + rtol * (ay if ay > ayn else ayn)
            ratio = abs(err) / sc if sc > 0.0 else 0.0
            steps += 1
            if ratio <= 1.0:
                t += ht
                y = y_new
                k1 = k7
                if ratio == 0.0:
                    fac = 10.0
                else:
                    fac = 0.9 * ratio**-0.2
                    if fac > 10.0:
                        fac = 10.0
                    elif fac < 0.2:
                        fac = 0.2
                h = ht * fac
            else:
                fac = 0.9 * ratio**-0.2
                if fac < 0.2:
                    fac = 0.2
                h = ht * fac
        out[i] = y if y > 0.0 else 0.0
    return out, 0, 0.0
