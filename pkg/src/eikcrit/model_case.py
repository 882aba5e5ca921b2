"""Closed-form machinery for z_x^2 + z_y^2 = a^2 x^2 + b^2 y^2.

The saddle family is generated by flowing the two data curves

    gamma_pm(s) = s v1 +- s v2 + phi_pm(s) v3 -+ (a^2/b^2) phi_pm(s) v4

with the exact linear characteristic flow, then re-parameterized by the
coordinates (u, v) along the unstable/stable directions of the mixed plane.
Every sampled point lies exactly on the cone {H = 0} up to roundoff.
"""

import numpy as np

from .data_functions import DataFunction, Scaled, Zero
from .errors import PreconditionError
from .surfaces import JetSurface

def eigenbasis(a, b):
    """Columns v1..v4 of the linearized characteristic system's eigenbasis."""
    return np.array([
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [a, 0.0, -a, 0.0],
        [0.0, -b, 0.0, b],
    ])


def assemble_point(a, b, w1, w2, w3, w4):
    """Phase point w1 v1 + w2 v2 + w3 v3 + w4 v4 for the basis above."""
    x = w1 + w3
    y = w2 + w4
    p = a * (w1 - w3)
    q = b * (w4 - w2)
    return np.array([x, y, p, q])


def w_coordinates(a, b, point):
    """Inverse of `assemble_point`."""
    x, y, p, q = point
    w1 = 0.5 * (x + p / a)
    w2 = 0.5 * (y - q / b)
    w3 = 0.5 * (x - p / a)
    w4 = 0.5 * (y + q / b)
    return np.array([w1, w2, w3, w4])


def psi_model(a, b, phi, branch):
    """psi with psi(s) = -+ (a^2/b^2) phi(s) for the gamma_+- branch."""
    if branch not in ("+", "-"):
        raise PreconditionError("branch must be '+' or '-'")
    if isinstance(phi, Zero):
        return Zero()
    factor = -(a * a) / (b * b) if branch == "+" else (a * a) / (b * b)
    return Scaled(phi, factor)


def model_gamma(a, b, phi, branch, s):
    """The data curve gamma_pm(s) on the cone."""
    sgn = 1.0 if branch == "+" else -1.0
    w3 = float(phi(s))
    w4 = float(psi_model(a, b, phi, branch)(s))
    return assemble_point(a, b, s, sgn * s, w3, w4)


def model_linear_flow(a, b, point, t):
    """Exact flow of the linear characteristic system (cosh/sinh form)."""
    x, y, p, q = point
    ca, sa = np.cosh(a * t), np.sinh(a * t)
    cb, sb = np.cosh(b * t), np.sinh(b * t)
    return np.array([
        x * ca + p * sa / a,
        y * cb + q * sb / b,
        a * x * sa + p * ca,
        b * y * sb + q * cb,
    ])


def saddle_components(a, b, phi_plus, phi_minus, u, v):
    """(w3, w4) of the saddle surface at chart point (u, v); 0 on the axes."""
    if u == 0.0 or v == 0.0:
        return 0.0, 0.0
    branch_plus = u * v > 0
    phi = phi_plus if branch_plus else phi_minus
    alpha = a / (a + b)
    beta = b / (a + b)
    mag = abs(u) ** beta * abs(v) ** alpha
    s = np.sign(u) * mag
    ph = float(phi(s))
    w3 = ph * mag / abs(u)
    psi_factor = -(a * a) / (b * b) if branch_plus else (a * a) / (b * b)
    w4 = psi_factor * ph * mag / abs(v)
    return w3, w4


def _axis_flags(vals):
    vals = np.asarray(vals, dtype=float)
    if vals.size < 2:
        return np.abs(vals) == 0.0
    spacing = np.max(np.diff(vals))
    return np.abs(vals) <= spacing * (1.0 + 1e-12)


def regularity_warning(a, b, l):
    """True when the predicted regularity drops below C^1."""
    return l * min(a, b) <= max(a, b)


def model_saddle_surface(a, b, phi_plus, phi_minus, u_vals, v_vals):
    """Sample the saddle-family jet surface on a (u, v) rectangle.

    Quadrants select the branch (phi_plus for u v > 0); the v3, v4 components
    are the closure value 0 on the axes.
    """
    if a <= 0 or b <= 0:
        raise PreconditionError("need a, b > 0")
    u_vals = np.asarray(u_vals, dtype=float)
    v_vals = np.asarray(v_vals, dtype=float)
    pts = np.empty((u_vals.size, v_vals.size, 4))
    for i, u in enumerate(u_vals):
        for j, v in enumerate(v_vals):
            w3, w4 = saddle_components(a, b, phi_plus, phi_minus, u, v)
            pts[i, j] = assemble_point(a, b, u, v, w3, w4)
    l = min(phi_plus.order, phi_minus.order)
    meta = {
        "a": a, "b": b, "l": None if np.isinf(l) else l,
        "phi_plus": phi_plus.describe(), "phi_minus": phi_minus.describe(),
        "regularity_warning": bool(np.isfinite(l) and regularity_warning(a, b, l)),
        "chart": "uv",
    }
    mask = np.logical_or.outer(_axis_flags(u_vals), _axis_flags(v_vals))
    return JetSurface(u_vals, v_vals, pts, "model_saddle", meta, axis_mask=mask)


def model_saddle_on_base_grid(a, b, phi_plus, phi_minus, x_vals, y_vals,
                              tol=1e-14, max_iter=200):
    """Same surface, sampled on a rectangular base (x, y) grid.

    Inverts the base map (u, v) -> (u + w3, v + w4) by fixed-point iteration;
    the correction terms are o(|s|) so the map is a contraction near 0.
    """
    x_vals = np.asarray(x_vals, dtype=float)
    y_vals = np.asarray(y_vals, dtype=float)
    pts = np.empty((x_vals.size, y_vals.size, 4))
    for i, x in enumerate(x_vals):
        for j, y in enumerate(y_vals):
            u, v = x, y
            for _ in range(max_iter):
                w3, w4 = saddle_components(a, b, phi_plus, phi_minus, u, v)
                un, vn = x - w3, y - w4
                if abs(un - u) + abs(vn - v) < tol:
                    u, v = un, vn
                    break
                u, v = un, vn
            w3, w4 = saddle_components(a, b, phi_plus, phi_minus, u, v)
            pts[i, j] = assemble_point(a, b, u, v, w3, w4)
    l = min(phi_plus.order, phi_minus.order)
    meta = {
        "a": a, "b": b, "l": None if np.isinf(l) else l,
        "phi_plus": phi_plus.describe(), "phi_minus": phi_minus.describe(),
        "regularity_warning": bool(np.isfinite(l) and regularity_warning(a, b, l)),
        "chart": "base",
    }
    mask = np.logical_or.outer(_axis_flags(x_vals), _axis_flags(y_vals))
    return JetSurface(x_vals, y_vals, pts, "model_saddle_base", meta, axis_mask=mask)


def predicted_regularity(a, b, l):
    """n = ceil(min{(l+1)a, (l+1)b} / (a+b)) - 1; infinite l maps to inf."""
    if a <= 0 or b <= 0:
        raise PreconditionError("need a, b > 0")
    if np.isinf(l):
        return np.inf
    if l < 1:
        raise PreconditionError("need vanishing order l >= 1")
    val = (l + 1.0) * min(a, b) / (a + b)
    return int(np.ceil(val)) - 1


def eval_E(phi, alpha, beta, u, v):
    """E(u,v) = u^(alpha-1) v^beta phi(u^alpha v^beta) on the open quadrant,
    0 elsewhere; probes the C^n threshold n < min{(l+1)alpha - 1, (l+1)beta}."""
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise PreconditionError("need alpha, beta in (0, 1)")
    if u <= 0.0 or v <= 0.0:
        return 0.0
    t = u ** alpha * v ** beta
    return float(u ** (alpha - 1.0) * v ** beta * phi(t))
