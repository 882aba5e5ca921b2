"""Hot kernels: characteristic fields and the embedded Runge-Kutta integrator.

Fields that admit a closed-form right-hand side are encoded as an integer
``code`` plus a flat float64 parameter vector, so the whole integration loop
can be compiled by numba (see `backend`).  Arbitrary Python callables go
through `dp45_callable`, which shares the same Dormand-Prince 5(4) tableau and
step control but stays in plain Python.

Step control is error-per-unit-step: a step of size h is accepted when the
scaled local error estimate is below h.  This keeps the accumulated defect
over a horizon T near T*tol instead of nsteps*tol.

Parameter layouts
-----------------
code 0  model quadratic H = (p^2+q^2-a^2x^2-b^2y^2)/2
        params = [a, b]
code 1  normal form H = f(p^2-a^2x^2, q^2-b^2y^2)/2 with polynomial f
        params = [a, b, d, c00, c01, ..., cdd]  (row-major (d+1)x(d+1))
code 2  normal form with f(u,v) = e^u + e^v - 2
        params = [a, b]
code 3  separated H = f(p,q) - h(x,y) with polynomial f, h
        params = [df, f-coeffs..., dh, h-coeffs...]
"""

import numpy as np

from .backend import maybe_jit

MODEL_QUADRATIC = 0
NORMAL_FORM_POLY = 1
NORMAL_FORM_EXP = 2
SEPARATED_POLY = 3

# statuses returned by the integrators
OK = 0
STEP_UNDERFLOW = 1
ESCAPED = 2

# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
])
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4, applied to the seven stage slopes for the error estimate
_DP_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
                  -17253 / 339200, 22 / 525, -1 / 40])


@maybe_jit
def _poly_du(coeffs, d, u, v):
    """d/du of sum c[i,j] u^i v^j with row-major flat coeffs."""
    acc = 0.0
    for i in range(1, d + 1):
        for j in range(0, d + 1):
            c = coeffs[i * (d + 1) + j]
            if c != 0.0:
                acc += i * c * u ** (i - 1) * v ** j
    return acc


@maybe_jit
def _poly_dv(coeffs, d, u, v):
    acc = 0.0
    for i in range(0, d + 1):
        for j in range(1, d + 1):
            c = coeffs[i * (d + 1) + j]
            if c != 0.0:
                acc += j * c * u ** i * v ** (j - 1)
    return acc


@maybe_jit
def field_eval(code, params, y):
    """Characteristic field xi_H = (H_p, H_q, -H_x, -H_y) for a coded spec."""
    out = np.empty(4)
    x, yy, p, q = y[0], y[1], y[2], y[3]
    if code == MODEL_QUADRATIC:
        a, b = params[0], params[1]
        out[0] = p
        out[1] = q
        out[2] = a * a * x
        out[3] = b * b * yy
    elif code == NORMAL_FORM_POLY or code == NORMAL_FORM_EXP:
        a, b = params[0], params[1]
        u = p * p - a * a * x * x
        v = q * q - b * b * yy * yy
        if code == NORMAL_FORM_POLY:
            d = int(params[2])
            fu = _poly_du(params[3:], d, u, v)
            fv = _poly_dv(params[3:], d, u, v)
        else:
            fu = np.exp(u)
            fv = np.exp(v)
        out[0] = fu * p
        out[1] = fv * q
        out[2] = a * a * fu * x
        out[3] = b * b * fv * yy
    else:  # SEPARATED_POLY
        df = int(params[0])
        nf = (df + 1) * (df + 1)
        fc = params[1:1 + nf]
        dh = int(params[1 + nf])
        hc = params[2 + nf:]
        out[0] = _poly_du(fc, df, p, q)
        out[1] = _poly_dv(fc, df, p, q)
        out[2] = _poly_du(hc, dh, x, yy)
        out[3] = _poly_dv(hc, dh, x, yy)
    return out


@maybe_jit
def dp45_code(code, params, y0, t_end, tol, max_step, escape_radius):
    """Integrate the coded field from t=0 to t_end.

    Returns (y, status).  On failure y holds the last accepted state.
    """
    y = y0.copy()
    if t_end == 0.0:
        return y, OK
    direction = 1.0 if t_end > 0.0 else -1.0
    t = 0.0
    h = min(max_step, abs(t_end))
    hmin = 1e-14 * max(1.0, abs(t_end))
    k = np.empty((7, 4))
    while direction * (t_end - t) > hmin:
        if h > abs(t_end - t):
            h = abs(t_end - t)
        hs = direction * h
        k[0] = field_eval(code, params, y)
        for s in range(1, 6):
            ytmp = y.copy()
            for j in range(s):
                ytmp += hs * _DP_A[s, j] * k[j]
            k[s] = field_eval(code, params, ytmp)
        ynew = y.copy()
        for j in range(6):
            ynew += hs * _DP_B5[j] * k[j]
        k[6] = field_eval(code, params, ynew)
        # scaled error estimate (error per step)
        errsum = 0.0
        for i in range(4):
            e = 0.0
            for j in range(7):
                e += _DP_E[j] * k[j, i]
            e *= hs
            sc = tol * (1.0 + abs(y[i]) + abs(ynew[i]))
            errsum += (e / sc) ** 2
        errnorm = np.sqrt(errsum / 4.0)
        if errnorm <= h:  # error per unit step below tol
            t += hs
            y = ynew
            norm2 = y[0] ** 2 + y[1] ** 2 + y[2] ** 2 + y[3] ** 2
            if norm2 > escape_radius * escape_radius:
                return y, ESCAPED
        if errnorm > 0.0:
            fac = 0.9 * (h / errnorm) ** 0.25
            if fac < 0.2:
                fac = 0.2
            elif fac > 5.0:
                fac = 5.0
        else:
            fac = 5.0
        h = min(h * fac, max_step)
        if h < hmin:
            return y, STEP_UNDERFLOW
    return y, OK


def dp45_callable(field, y0, t_end, tol, max_step, escape_radius=1e6):
    """Same scheme as `dp45_code` but with an arbitrary Python field."""
    y = np.asarray(y0, dtype=float).copy()
    if t_end == 0.0:
        return y, OK
    direction = 1.0 if t_end > 0.0 else -1.0
    t = 0.0
    h = min(max_step, abs(t_end))
    hmin = 1e-14 * max(1.0, abs(t_end))
    n = y.size
    k = np.empty((7, n))
    while direction * (t_end - t) > hmin:
        h = min(h, abs(t_end - t))
        hs = direction * h
        k[0] = field(y)
        for s in range(1, 6):
            k[s] = field(y + hs * (_DP_A[s, :s] @ k[:s]))
        ynew = y + hs * (_DP_B5[:6] @ k[:6])
        k[6] = field(ynew)
        err = hs * (_DP_E @ k)
        sc = tol * (1.0 + np.abs(y) + np.abs(ynew))
        errnorm = np.sqrt(np.mean((err / sc) ** 2))
        if errnorm <= h:
            t += hs
            y = ynew
            if np.linalg.norm(y) > escape_radius:
                return y, ESCAPED
        fac = 5.0 if errnorm == 0.0 else min(5.0, max(0.2, 0.9 * (h / errnorm) ** 0.25))
        h = min(h * fac, max_step)
        if h < hmin:
            return y, STEP_UNDERFLOW
    return y, OK
