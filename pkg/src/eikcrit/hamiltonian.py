"""Hamiltonians on R^4, their characteristic fields, linearizations at
critical points, and second-order jet classification.

Phase space carries coordinates (x, y, p, q) with p ~ z_x, q ~ z_y and the
symplectic form convention omega = dp^dx + dq^dy, i.e.

    omega(V, W) = V_p W_x - W_p V_x + V_q W_y - W_q V_y.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bivariate import Callable2, ExpSum2, Poly2
from .errors import (AmbiguousSpectrumError, ComplexSpectrumError,
                     EvaluationDomainError, PreconditionError)

CRITICAL_TOL = 1e-8
_J = np.array([
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
])


@dataclass(frozen=True)
class PhasePoint:
    x: float
    y: float
    p: float
    q: float

    def as_array(self):
        return np.array([self.x, self.y, self.p, self.q])

    @classmethod
    def from_array(cls, arr):
        x, y, p, q = (float(c) for c in arr)
        return cls(x, y, p, q)


def as_point_array(P):
    """Coerce a PhasePoint or length-4 array-like to an ndarray."""
    if isinstance(P, PhasePoint):
        return P.as_array()
    arr = np.asarray(P, dtype=float)
    if arr.shape != (4,):
        raise PreconditionError(f"phase point must have 4 coordinates, got shape {arr.shape}")
    return arr


def omega(V, W):
    """Symplectic pairing of two tangent vectors."""
    V = np.asarray(V, float)
    W = np.asarray(W, float)
    return V[2] * W[0] - W[2] * V[0] + V[3] * W[1] - W[3] * V[1]


class HamiltonianSpec:
    """Base class: value / gradient / hessian in (x, y, p, q) order."""

    def value(self, P):
        raise NotImplementedError

    def gradient(self, P):
        raise NotImplementedError

    def hessian(self, P):
        raise NotImplementedError

    def kernel_code(self):
        """(code, params) for the compiled integrator, or None."""
        return None

    def field(self, P):
        g = self.gradient(P)
        return np.array([g[2], g[3], -g[0], -g[1]])


class ModelQuadratic(HamiltonianSpec):
    """H = (p^2 + q^2 - a^2 x^2 - b^2 y^2) / 2."""

    def __init__(self, a, b):
        if a <= 0 or b <= 0:
            raise PreconditionError("model quadratic needs a, b > 0")
        self.a = float(a)
        self.b = float(b)

    def value(self, P):
        x, y, p, q = as_point_array(P)
        return 0.5 * (p * p + q * q - self.a ** 2 * x * x - self.b ** 2 * y * y)

    def gradient(self, P):
        x, y, p, q = as_point_array(P)
        return np.array([-self.a ** 2 * x, -self.b ** 2 * y, p, q])

    def hessian(self, P):
        return np.diag([-self.a ** 2, -self.b ** 2, 1.0, 1.0])

    def kernel_code(self):
        return kernels.MODEL_QUADRATIC, np.array([self.a, self.b])


class SeparatedEikonal(HamiltonianSpec):
    """H = f(p, q) - h(x, y) with bivariate evaluators f and h."""

    def __init__(self, f, h):
        self.f = f
        self.h = h

    def value(self, P):
        x, y, p, q = as_point_array(P)
        val = self.f.deriv(p, q) - self.h.deriv(x, y)
        if not np.isfinite(val):
            raise EvaluationDomainError("non-finite H value")
        return float(val)

    def gradient(self, P):
        x, y, p, q = as_point_array(P)
        return np.array([
            -self.h.deriv(x, y, du=1),
            -self.h.deriv(x, y, dv=1),
            self.f.deriv(p, q, du=1),
            self.f.deriv(p, q, dv=1),
        ])

    def hessian(self, P):
        x, y, p, q = as_point_array(P)
        H = np.zeros((4, 4))
        H[0, 0] = -self.h.deriv(x, y, du=2)
        H[0, 1] = H[1, 0] = -self.h.deriv(x, y, du=1, dv=1)
        H[1, 1] = -self.h.deriv(x, y, dv=2)
        H[2, 2] = self.f.deriv(p, q, du=2)
        H[2, 3] = H[3, 2] = self.f.deriv(p, q, du=1, dv=1)
        H[3, 3] = self.f.deriv(p, q, dv=2)
        return H

    def kernel_code(self):
        if isinstance(self.f, Poly2) and isinstance(self.h, Poly2):
            df, fflat = self.f.flat()
            dh, hflat = self.h.flat()
            params = np.concatenate([[df], fflat, [dh], hflat])
            return kernels.SEPARATED_POLY, params
        return None


class NormalForm(HamiltonianSpec):
    """Sternberg-style H = f(p^2 - a^2 x^2, q^2 - b^2 y^2) / 2.

    Construction enforces f(0,0)=0 and f_u(0,0)=f_v(0,0)=1 to 1e-9.
    """

    CONSTRAINT_TOL = 1e-9

    def __init__(self, f, a, b):
        if a <= 0 or b <= 0:
            raise PreconditionError("normal form needs a, b > 0")
        bad = (abs(f.deriv(0.0, 0.0)) > self.CONSTRAINT_TOL
               or abs(f.deriv(0.0, 0.0, du=1) - 1.0) > self.CONSTRAINT_TOL
               or abs(f.deriv(0.0, 0.0, dv=1) - 1.0) > self.CONSTRAINT_TOL)
        if bad:
            raise PreconditionError("f must satisfy f(0,0)=0, f_u(0,0)=f_v(0,0)=1")
        self.f = f
        self.a = float(a)
        self.b = float(b)

    def _args(self, P):
        x, y, p, q = as_point_array(P)
        return x, y, p, q, p * p - self.a ** 2 * x * x, q * q - self.b ** 2 * y * y

    def value(self, P):
        _, _, _, _, u, v = self._args(P)
        return 0.5 * self.f.deriv(u, v)

    def gradient(self, P):
        x, y, p, q, u, v = self._args(P)
        fu = self.f.deriv(u, v, du=1)
        fv = self.f.deriv(u, v, dv=1)
        return np.array([-self.a ** 2 * fu * x, -self.b ** 2 * fv * y, fu * p, fv * q])

    def hessian(self, P):
        x, y, p, q, u, v = self._args(P)
        a2, b2 = self.a ** 2, self.b ** 2
        fu = self.f.deriv(u, v, du=1)
        fv = self.f.deriv(u, v, dv=1)
        fuu = self.f.deriv(u, v, du=2)
        fuv = self.f.deriv(u, v, du=1, dv=1)
        fvv = self.f.deriv(u, v, dv=2)
        H = np.zeros((4, 4))
        H[0, 0] = -a2 * fu + 2 * a2 * a2 * x * x * fuu
        H[1, 1] = -b2 * fv + 2 * b2 * b2 * y * y * fvv
        H[2, 2] = fu + 2 * p * p * fuu
        H[3, 3] = fv + 2 * q * q * fvv
        H[0, 1] = H[1, 0] = 2 * a2 * b2 * x * y * fuv
        H[0, 2] = H[2, 0] = -2 * a2 * x * p * fuu
        H[0, 3] = H[3, 0] = -2 * a2 * x * q * fuv
        H[1, 2] = H[2, 1] = -2 * b2 * y * p * fuv
        H[1, 3] = H[3, 1] = -2 * b2 * y * q * fvv
        H[2, 3] = H[3, 2] = 2 * p * q * fuv
        return H

    def kernel_code(self):
        if isinstance(self.f, Poly2):
            d, flat = self.f.flat()
            return kernels.NORMAL_FORM_POLY, np.concatenate([[self.a, self.b, d], flat])
        if isinstance(self.f, ExpSum2):
            return kernels.NORMAL_FORM_EXP, np.array([self.a, self.b])
        return None


class Generic(HamiltonianSpec):
    """Arbitrary H(x, y, p, q) with central finite-difference derivatives."""

    def __init__(self, func, eta=1e-5):
        self.func = func
        self.eta = eta

    def value(self, P):
        arr = as_point_array(P)
        val = float(self.func(*arr))
        if not np.isfinite(val):
            raise EvaluationDomainError("non-finite H value")
        return val

    def gradient(self, P):
        arr = as_point_array(P)
        g = np.empty(4)
        for i in range(4):
            hi = arr.copy()
            lo = arr.copy()
            hi[i] += self.eta
            lo[i] -= self.eta
            g[i] = (self.func(*hi) - self.func(*lo)) / (2 * self.eta)
        return g

    def hessian(self, P):
        arr = as_point_array(P)
        e = self.eta
        H = np.empty((4, 4))
        f0 = self.func(*arr)
        for i in range(4):
            hi = arr.copy(); hi[i] += e
            lo = arr.copy(); lo[i] -= e
            H[i, i] = (self.func(*hi) - 2 * f0 + self.func(*lo)) / e ** 2
        for i in range(4):
            for j in range(i + 1, 4):
                pp = arr.copy(); pp[[i, j]] += e
                pm = arr.copy(); pm[i] += e; pm[j] -= e
                mp = arr.copy(); mp[i] -= e; mp[j] += e
                mm = arr.copy(); mm[[i, j]] -= e
                H[i, j] = H[j, i] = (self.func(*pp) - self.func(*pm)
                                     - self.func(*mp) + self.func(*mm)) / (4 * e ** 2)
        return H


def eval_H(spec, P):
    return spec.value(P)


def characteristic_field(spec, P):
    """xi_H = (H_p, H_q, -H_x, -H_y) at P."""
    return spec.field(P)


def c2_invariant(H):
    """Quadratic coefficient of the characteristic polynomial of L = J D2H."""
    return (2 * H[0, 1] * H[2, 3] - 2 * H[0, 3] * H[1, 2]
            + H[1, 1] * H[3, 3] - H[1, 3] ** 2
            + H[0, 0] * H[2, 2] - H[0, 2] ** 2)


def closed_form_eigenvalues(c2, det_hess):
    """The four roots of lambda^4 + c2 lambda^2 + det_hess."""
    disc = np.sqrt(complex(c2 * c2 - 4.0 * det_hess))
    lam1 = np.sqrt((-c2 + disc) / 2.0)
    lam2 = np.sqrt((-c2 - disc) / 2.0)
    return np.array([lam1, -lam1, lam2, -lam2])


@dataclass
class Linearization:
    L: np.ndarray
    c2: float
    det_hess: float
    eigenvalues: np.ndarray        # length 4, complex
    eigenvectors: np.ndarray       # (4, 4); column k pairs with eigenvalues[k]
    hyperbolic: bool
    real_distinct: bool
    degenerate: bool
    complex_spectrum: bool
    a: float | None = None         # positive rates when the spectrum is real
    b: float | None = None
    closed_form_eigenvalues: np.ndarray = field(default=None, repr=False)


def _order_real_spectrum(vals, vecs):
    """Order a real spectrum {a, -a, b, -b} as (a, -b, -a, b).

    The rate called ``a`` is the positive eigenvalue whose eigenvector has the
    more x-dominant base projection; eigenvectors are rescaled so their
    dominant base component equals 1.
    """
    vals = vals.real
    vecs = vecs.real
    pos = np.where(vals > 0)[0]
    xdom = [abs(vecs[0, i]) - abs(vecs[1, i]) for i in pos]
    ia = pos[int(np.argmax(xdom))]
    ib = pos[0] if ia == pos[1] else pos[1]
    a_val, b_val = vals[ia], vals[ib]
    ima = int(np.argmin(np.abs(vals + a_val)))
    imb = int(np.argmin(np.abs(vals + b_val)))
    order = [ia, imb, ima, ib]
    ordered_vals = vals[order].astype(complex)
    ordered_vecs = np.empty((4, 4))
    for k, idx in enumerate(order):
        w = vecs[:, idx]
        dom = w[0] if abs(w[0]) >= abs(w[1]) else w[1]
        if dom == 0.0:
            dom = w[np.argmax(np.abs(w))]
        ordered_vecs[:, k] = w / dom
    return ordered_vals, ordered_vecs, a_val, b_val


def linearize(spec, P0, tol=CRITICAL_TOL, cross_check_tol=1e-8):
    """Linearization L = J D2H of the characteristic system at a critical point.

    Closed-form eigenvalues from (c2, det D2H) are cross-checked against a
    general eigensolver.
    """
    g = spec.gradient(P0)
    if np.linalg.norm(g) >= tol:
        raise PreconditionError(f"not a critical point: |grad H| = {np.linalg.norm(g):.3e}")
    H = spec.hessian(P0)
    L = _J @ H
    c2 = c2_invariant(H)
    det_hess = float(np.linalg.det(H))
    degenerate = abs(det_hess) < 1e-12

    vals, vecs = np.linalg.eig(L)
    closed = closed_form_eigenvalues(c2, det_hess)
    key = lambda z: (np.round(z.real, 12), np.round(z.imag, 12))
    mismatch = max(abs(np.array(sorted(vals, key=key)) - np.array(sorted(closed, key=key))))
    if mismatch > cross_check_tol * max(1.0, np.max(np.abs(vals))):
        raise EvaluationDomainError(
            f"closed-form / eigensolver disagreement: {mismatch:.3e}")

    hyperbolic = bool(np.all(np.abs(vals.real) > 1e-9))
    complex_spectrum = bool(np.any(np.abs(vals.imag) > 1e-9 * max(1.0, np.max(np.abs(vals)))))
    real_distinct = False
    a_val = b_val = None
    if hyperbolic and not complex_spectrum:
        rv = np.sort(vals.real)
        real_distinct = bool(np.min(np.diff(rv)) > 1e-9 * max(1.0, rv[-1]))
        vals, vecs, a_val, b_val = _order_real_spectrum(vals, vecs)
    return Linearization(
        L=L, c2=float(c2), det_hess=det_hess,
        eigenvalues=vals, eigenvectors=vecs,
        hyperbolic=hyperbolic, real_distinct=real_distinct,
        degenerate=degenerate, complex_spectrum=complex_spectrum,
        a=a_val, b=b_val, closed_form_eigenvalues=closed,
    )


@dataclass
class PlaneRecord:
    pair: tuple            # eigenvector indices, 1-based
    omega_value: float
    lagrangian: bool
    projectable: bool
    role: str | None       # 'unstable' | 'stable' | 'saddle' | None


@dataclass
class PlaneReport:
    planes: list

    def lagrangian_projectable(self):
        return [r for r in self.planes if r.lagrangian and r.projectable]


def classify_invariant_planes(lin, tol=1e-10):
    """The six L-invariant eigen-planes with symplectic / projection status."""
    if lin.complex_spectrum:
        raise ComplexSpectrumError("complex spectrum: no real invariant-plane classification")
    if not lin.hyperbolic:
        raise PreconditionError("linearization is not hyperbolic")
    if not lin.real_distinct:
        raise AmbiguousSpectrumError()
    vals = lin.eigenvalues.real
    vecs = lin.eigenvectors
    planes = []
    for i in range(4):
        for j in range(i + 1, 4):
            om = omega(vecs[:, i], vecs[:, j])
            lag = bool(abs(om) < tol)
            det = vecs[0, i] * vecs[1, j] - vecs[0, j] * vecs[1, i]
            proj = bool(abs(det) > tol)
            role = None
            if vals[i] > 0 and vals[j] > 0:
                role = "unstable"
            elif vals[i] < 0 and vals[j] < 0:
                role = "stable"
            elif lag:
                role = "saddle"
            planes.append(PlaneRecord((i + 1, j + 1), float(om), lag, proj, role))
    return PlaneReport(planes)


@dataclass
class Jet2Candidates:
    a: float
    b: float
    candidates: list       # of dicts with keys A, B, C, xi


def classify_second_order(a, b, theta=None, tol=1e-9):
    """Quadratic jets z ~ (A x^2 + 2B xy + C y^2)/2 compatible with the
    second-order part a^2 x^2 + b^2 y^2 of the data.

    For a != b only the four axis-aligned candidates exist (B = 0).  When
    a = b a one-parameter rotated family exists; pass theta in [-1,1]\\{0} to
    obtain the pair of rotated candidates for that parameter (ignored when
    a != b, where no such candidates exist).
    """
    if a <= 0 or b <= 0:
        raise PreconditionError("need a, b > 0")
    cands = [
        {"A": a, "B": 0.0, "C": b, "xi": 0.0},
        {"A": a, "B": 0.0, "C": -b, "xi": 0.0},
        {"A": -a, "B": 0.0, "C": b, "xi": 0.0},
        {"A": -a, "B": 0.0, "C": -b, "xi": 0.0},
    ]
    if theta is not None and theta != 0.0 and abs(a - b) <= tol * max(a, b):
        r = np.sqrt(1.0 - theta ** 2)
        xi = np.arctan2(theta, 1.0 + r)
        cands.append({"A": a * r, "B": a * theta, "C": -a * r, "xi": float(xi)})
        cands.append({"A": -a * r, "B": a * theta, "C": a * r, "xi": float(xi)})
    return Jet2Candidates(float(a), float(b), cands)
