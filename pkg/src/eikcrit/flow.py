"""Numerical characteristic flows and the surfaces they generate.

Covers: adaptive flow integration (Dormand-Prince 5(4), error-per-unit-step
control), method-of-characteristics surfaces from noncharacteristic strips,
strip completion by 1-D root finding, stable/unstable manifolds by
seed-and-flow with per-cell shooting, and the general normal-form saddle
surfaces obtained by shooting onto a (w1, w2) chart.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .errors import (CharacteristicDataError, IntegrationError,
                     PreconditionError, StripError)
from .hamiltonian import NormalForm, as_point_array, linearize
from .model_case import assemble_point, w_coordinates
from .surfaces import JetSurface

DEFAULT_TOL = 1e-10
DEFAULT_MAX_STEP = 0.1
ESCAPE_RADIUS = 1e6


def integrate_flow(spec, P, t, tol=DEFAULT_TOL, max_step=DEFAULT_MAX_STEP,
                   escape_radius=ESCAPE_RADIUS):
    """Flow P for time t along the characteristic field of spec."""
    y0 = as_point_array(P)
    if not np.all(np.isfinite(y0)) or not np.isfinite(t):
        raise PreconditionError("non-finite flow input")
    code = spec.kernel_code()
    if code is not None:
        y, status = kernels.dp45_code(code[0], code[1], y0, float(t), tol,
                                      max_step, escape_radius)
    else:
        y, status = kernels.dp45_callable(spec.field, y0, float(t), tol,
                                          max_step, escape_radius)
    if status == kernels.STEP_UNDERFLOW:
        raise IntegrationError("step-size underflow", partial=y)
    if status == kernels.ESCAPED:
        raise IntegrationError(
            f"trajectory escaped radius {escape_radius:g}", partial=y)
    return y


def flow_with_drift(spec, P, t, **kw):
    """Flow and return (end point, |H(end) - H(start)|)."""
    y0 = as_point_array(P)
    y = integrate_flow(spec, y0, t, **kw)
    return y, abs(spec.value(y) - spec.value(y0))


@dataclass
class CharacteristicStrip:
    s_min: float
    s_max: float
    evaluator: object               # callable s -> phase point
    max_abs_h: float
    metadata: dict = field(default_factory=dict)

    def __call__(self, s):
        return self.evaluator(s)


def strip_from_callable(spec, c, s_min, s_max, n_check=101, strip_tol=1e-10):
    """Wrap a curve s -> R^4 as a strip, verifying |H| along it."""
    samples = np.linspace(s_min, s_max, n_check)
    worst = max(abs(spec.value(c(s))) for s in samples)
    if worst >= strip_tol:
        raise StripError(f"curve leaves {{H=0}}: max |H| = {worst:.3e}")
    return CharacteristicStrip(s_min, s_max, c, worst)


def complete_strip(spec, phi, branch, s_range=(-0.5, 0.5), n_check=101,
                   strip_tol=1e-10):
    """Data curve gamma(s) = s v1 +- s v2 + phi(s) v3 + psi(s) v4 on {H=0}.

    psi(s) solves f(-4 a^2 s phi(s), -4 b^2 s psi(s)) = 0 by safeguarded
    bracketing + brentq, seeded at the model value -+(a^2/b^2) phi(s).
    """
    if not isinstance(spec, NormalForm):
        raise PreconditionError("complete_strip needs a NormalForm spec")
    if branch not in ("+", "-"):
        raise PreconditionError("branch must be '+' or '-'")
    a, b = spec.a, spec.b
    sgn = 1.0 if branch == "+" else -1.0

    def psi(s):
        ph = float(phi(s))
        ubar = -4.0 * a * a * s * ph
        if ubar == 0.0:
            return 0.0
        g = lambda vbar: spec.f.deriv(ubar, vbar)
        v0 = -ubar                     # model seed: f = u + v
        width = max(abs(v0), 1e-12)
        lo, hi = v0 - 0.5 * width, v0 + 0.5 * width
        for _ in range(80):
            if g(lo) * g(hi) <= 0.0:
                break
            width *= 2.0
            lo, hi = v0 - width, v0 + width
        else:
            raise StripError(
                f"could not bracket the zero-level of f near u = {ubar:.3e}")
        vbar = brentq(g, lo, hi, xtol=1e-16, rtol=8.9e-16)
        return vbar / (-4.0 * b * b * sgn * s)

    def gamma(s):
        return assemble_point(a, b, s, sgn * s, float(phi(s)), psi(s))

    strip = strip_from_callable(spec, gamma, s_range[0], s_range[1],
                                n_check=n_check, strip_tol=strip_tol)
    strip.metadata = {"branch": branch, "a": a, "b": b, "phi": phi.describe()}
    strip.psi = psi
    return strip


def surface_from_strip(spec, strip, s_vals, t_vals, tol=DEFAULT_TOL,
                       transversality_tol=1e-8):
    """Method of characteristics: grid of Phi_t(c(s)).

    Transversality of the projected strip direction against the projected
    field is required at every interior s (waived at s = 0 when the strip
    passes through the critical point).
    """
    s_vals = np.asarray(s_vals, dtype=float)
    t_vals = np.asarray(t_vals, dtype=float)
    ds = 1e-7 * max(1.0, np.max(np.abs(s_vals)))
    for s in s_vals:
        c = strip(s)
        if s == 0.0 and np.linalg.norm(c) < 1e-12:
            continue
        tangent = (np.asarray(strip(s + ds)) - np.asarray(strip(s - ds))) / (2 * ds)
        xi = spec.field(c)
        det = tangent[0] * xi[1] - tangent[1] * xi[0]
        if abs(det) <= transversality_tol:
            raise CharacteristicDataError(
                f"transversality failure at s = {s:.6g} (det = {det:.3e})")

    pts = np.empty((s_vals.size, t_vals.size, 4))
    for i, s in enumerate(s_vals):
        for j, t in enumerate(t_vals):
            pts[i, j] = integrate_flow(spec, strip(s), t, tol=tol)
    surf = JetSurface(s_vals, t_vals, pts, "strip_flow",
                      {"chart": "st", "tol": tol})
    surf.record_residual(spec)
    return surf


@dataclass
class ManifoldResult:
    surface: JetSurface
    kind: str
    eps: float
    diagnostics: dict


def _correct_to_level_set(spec, P, directions, max_iter=12, tol=1e-13):
    """Newton-correct P onto {H = 0} moving only within the given span."""
    P = P.copy()
    for _ in range(max_iter):
        h = spec.value(P)
        if abs(h) < tol:
            return P, True
        g = spec.gradient(P)
        d = np.zeros(4)
        for c in directions:
            d += (g @ c) * c
        gd = g @ d
        if abs(gd) < 1e-300:
            return P, abs(h) < 1e-9
        P = P - (h / gd) * d
    return P, abs(spec.value(P)) < 1e-9


def invariant_manifold(spec, P0, kind, radius, tol=DEFAULT_TOL, grid_n=25,
                       eps_factor=1e-4, newton_tol=1e-11, max_newton=25):
    """Stable or unstable manifold as a jet surface over the base disk.

    Seeds sit on an eps-circle in the relevant eigenplane, are corrected onto
    {H=0} along the complementary plane, and each base-grid target is reached
    by shooting (seed angle, flow time) with the linearized flow as the
    initial guess.
    """
    if kind not in ("stable", "unstable"):
        raise PreconditionError("kind must be 'stable' or 'unstable'")
    P0 = as_point_array(P0)
    lin = linearize(spec, P0)
    if not (lin.hyperbolic and lin.real_distinct):
        raise PreconditionError("manifold computation needs a real hyperbolic "
                                "distinct spectrum")
    # eigenvalue ordering is (a, -b, -a, b)
    if kind == "unstable":
        idx, rates, tsign = (0, 3), (lin.a, lin.b), 1.0
    else:
        idx, rates, tsign = (2, 1), (lin.a, lin.b), -1.0
    e1 = lin.eigenvectors[:, idx[0]]
    e2 = lin.eigenvectors[:, idx[1]]
    e1 = e1 / np.linalg.norm(e1)
    e2 = e2 / np.linalg.norm(e2)
    comp = [lin.eigenvectors[:, k] / np.linalg.norm(lin.eigenvectors[:, k])
            for k in range(4) if k not in idx]
    M = np.array([[e1[0], e2[0]], [e1[1], e2[1]]])
    if abs(np.linalg.det(M)) < 1e-10:
        raise PreconditionError("eigenplane does not project onto the base")
    Minv = np.linalg.inv(M)
    mu1, mu2 = rates

    eps = eps_factor * radius

    def seed(theta):
        P = P0 + eps * (np.cos(theta) * e1 + np.sin(theta) * e2)
        return _correct_to_level_set(spec, P, comp)

    def flowed_coords(theta, tau):
        P, ok = seed(theta)
        end = integrate_flow(spec, P, tsign * tau, tol=tol)
        ab = Minv @ (end[:2] - P0[:2])
        return end, ab, ok

    grid = np.linspace(-radius, radius, grid_n)
    pts = np.empty((grid_n, grid_n, 4))
    valid = np.ones((grid_n, grid_n), dtype=bool)
    failures = []
    total_newton = 0

    for i, xt in enumerate(grid):
        for j, yt in enumerate(grid):
            target = Minv @ np.array([xt, yt])
            A, B = target
            if abs(A) < eps and abs(B) < eps:
                pts[i, j] = P0
                continue
            # linearized-flow initial guess
            rho = lambda tau: ((A * np.exp(-mu1 * tau)) ** 2
                               + (B * np.exp(-mu2 * tau)) ** 2 - eps ** 2)
            tau_hi = np.log(max(abs(A), abs(B), eps) / eps) / min(mu1, mu2) + 5.0
            tau = brentq(rho, 0.0, tau_hi, xtol=1e-12)
            theta = np.arctan2(B * np.exp(-mu2 * tau), A * np.exp(-mu1 * tau))
            ok_cell = False
            for _ in range(max_newton):
                total_newton += 1
                end, ab, _ = flowed_coords(theta, tau)
                res = ab - target
                if np.max(np.abs(res)) < newton_tol * max(1.0, radius):
                    ok_cell = True
                    break
                dth = 1e-7
                _, ab_t, _ = flowed_coords(theta + dth, tau)
                col_theta = (ab_t - ab) / dth
                col_tau = Minv @ (tsign * spec.field(end)[:2])
                Jm = np.column_stack([col_theta, col_tau])
                try:
                    step = np.linalg.solve(Jm, res)
                except np.linalg.LinAlgError:
                    break
                # damped update
                scale = 1.0
                for _ in range(8):
                    th_n, ta_n = theta - scale * step[0], tau - scale * step[1]
                    if ta_n >= 0.0:
                        _, ab_n, _ = flowed_coords(th_n, ta_n)
                        if np.max(np.abs(ab_n - target)) < np.max(np.abs(res)):
                            theta, tau = th_n, ta_n
                            break
                    scale *= 0.5
                else:
                    break
            if ok_cell:
                pts[i, j] = end
            else:
                pts[i, j] = np.nan
                valid[i, j] = False
                failures.append((float(xt), float(yt)))

    surf = JetSurface(grid, grid, pts, f"{kind}_manifold",
                      {"chart": "base", "kind": kind, "radius": radius,
                       "eps": eps, "tol": tol},
                      valid_mask=valid)
    surf.record_residual(spec)

    # contraction diagnostic: a sample point must approach P0 under the flow
    contraction = None
    if valid[0, 0]:
        sample = pts[0, 0]
        horizon = np.log(4.0) / min(mu1, mu2)
        moved = integrate_flow(spec, sample, -tsign * horizon, tol=tol)
        d0 = np.linalg.norm(sample - P0)
        d1 = np.linalg.norm(moved - P0)
        contraction = float(d0 / d1) if d1 > 0 else np.inf
    diag = {
        "newton_iterations": total_newton,
        "failed_cells": failures,
        "contraction_factor": contraction,
        "max_abs_h": surf.max_abs_h,
    }
    return ManifoldResult(surf, kind, eps, diag)


def general_saddle_surface(spec, phi_plus, phi_minus, u_vals, v_vals,
                           tol=DEFAULT_TOL, newton_tol=1e-11, max_newton=25,
                           axis_threshold=1e-8, s_range=(-0.6, 0.6)):
    """Saddle-family surface for a normal-form spec on a (w1, w2) chart.

    Each off-axis cell is reached by shooting (s, t) from the quadrant's data
    curve, with the model-case closed form as initial guess; axis cells take
    the closure values w3 = w4 = 0.
    """
    if not isinstance(spec, NormalForm):
        raise PreconditionError("general_saddle_surface needs a NormalForm spec")
    a, b = spec.a, spec.b
    strips = {
        "+": complete_strip(spec, phi_plus, "+", s_range=s_range),
        "-": complete_strip(spec, phi_minus, "-", s_range=s_range),
    }
    u_vals = np.asarray(u_vals, dtype=float)
    v_vals = np.asarray(v_vals, dtype=float)
    pts = np.empty((u_vals.size, v_vals.size, 4))
    valid = np.ones((u_vals.size, v_vals.size), dtype=bool)
    failures = []
    alpha, beta = a / (a + b), b / (a + b)

    def shoot(strip, s, t):
        end = integrate_flow(spec, strip(s), t, tol=tol)
        return end, w_coordinates(a, b, end)

    for i, u in enumerate(u_vals):
        for j, v in enumerate(v_vals):
            if min(abs(u), abs(v)) < axis_threshold:
                pts[i, j] = assemble_point(a, b, u, v, 0.0, 0.0)
                continue
            branch = "+" if u * v > 0 else "-"
            strip = strips[branch]
            s = np.sign(u) * abs(u) ** beta * abs(v) ** alpha
            t = np.log(abs(u) / abs(v)) / (a + b)
            target = np.array([u, v])
            ok_cell = False
            for _ in range(max_newton):
                end, w = shoot(strip, s, t)
                res = w[:2] - target
                if np.max(np.abs(res)) < newton_tol:
                    ok_cell = True
                    break
                ds = 1e-6 * max(abs(s), 1e-3)
                _, w_s = shoot(strip, s + ds, t)
                col_s = (w_s[:2] - w[:2]) / ds
                col_t = w_coordinates(a, b, spec.field(end))[:2]
                Jm = np.column_stack([col_s, col_t])
                try:
                    step = np.linalg.solve(Jm, res)
                except np.linalg.LinAlgError:
                    break
                scale = 1.0
                for _ in range(8):
                    sn, tn = s - scale * step[0], t - scale * step[1]
                    _, w_n = shoot(strip, sn, tn)
                    if np.max(np.abs(w_n[:2] - target)) < np.max(np.abs(res)):
                        s, t = sn, tn
                        break
                    scale *= 0.5
                else:
                    break
            if ok_cell:
                pts[i, j] = end
            else:
                pts[i, j] = np.nan
                valid[i, j] = False
                failures.append((float(u), float(v)))

    from .model_case import _axis_flags
    mask = np.logical_or.outer(_axis_flags(u_vals), _axis_flags(v_vals))
    l = min(phi_plus.order, phi_minus.order)
    surf = JetSurface(
        u_vals, v_vals, pts, "general_saddle",
        {"chart": "w", "a": a, "b": b, "l": None if np.isinf(l) else l,
         "phi_plus": phi_plus.describe(), "phi_minus": phi_minus.describe(),
         "failed_cells": failures},
        axis_mask=mask, valid_mask=valid)
    surf.record_residual(spec)
    return surf
