"""Bivariate scalar functions with derivative access.

These back the `f` and `h` slots of the Hamiltonian variants.  Polynomials
carry exact derivatives; arbitrary callables fall back to central finite
differences with step eta.
"""

import numpy as np

from .errors import EvaluationDomainError


class Poly2:
    """Polynomial sum c[i,j] u^i v^j given by a coefficient matrix."""

    def __init__(self, coeffs):
        self.coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
        if not np.all(np.isfinite(self.coeffs)):
            raise EvaluationDomainError("non-finite polynomial coefficient")

    @classmethod
    def from_terms(cls, terms):
        """terms: iterable of (i, j, c)."""
        terms = list(terms)
        d = max((max(i, j) for i, j, _ in terms), default=0)
        c = np.zeros((d + 1, d + 1))
        for i, j, val in terms:
            c[i, j] += val
        return cls(c)

    @classmethod
    def quadratic_form(cls, m):
        """u,v quadratic form (u v) M (u v)^T / 1 with symmetric 2x2 M."""
        m = np.asarray(m, dtype=float)
        c = np.zeros((3, 3))
        c[2, 0] = m[0, 0]
        c[1, 1] = m[0, 1] + m[1, 0]
        c[0, 2] = m[1, 1]
        return cls(c)

    def _dcoef(self, du, dv):
        c = self.coeffs
        for _ in range(du):
            c = c[1:, :] * np.arange(1, c.shape[0])[:, None]
        for _ in range(dv):
            c = c[:, 1:] * np.arange(1, c.shape[1])[None, :]
        return c

    def deriv(self, u, v, du=0, dv=0):
        c = self._dcoef(du, dv)
        iu = np.power.outer(float(u), np.arange(c.shape[0]))
        iv = np.power.outer(float(v), np.arange(c.shape[1]))
        return float(iu @ c @ iv)

    def __call__(self, u, v):
        return self.deriv(u, v)

    def flat(self):
        """Square row-major flat coefficients (for the kernel codes)."""
        d = max(self.coeffs.shape) - 1
        sq = np.zeros((d + 1, d + 1))
        sq[: self.coeffs.shape[0], : self.coeffs.shape[1]] = self.coeffs
        return d, sq.ravel()


class Callable2:
    """Callable f(u, v) with central finite-difference derivatives."""

    def __init__(self, func, eta=1e-5):
        self.func = func
        self.eta = eta

    def __call__(self, u, v):
        val = float(self.func(u, v))
        if not np.isfinite(val):
            raise EvaluationDomainError(f"non-finite value at ({u}, {v})")
        return val

    def deriv(self, u, v, du=0, dv=0):
        e, f = self.eta, self.func
        if du == 0 and dv == 0:
            return self(u, v)
        if (du, dv) == (1, 0):
            return (f(u + e, v) - f(u - e, v)) / (2 * e)
        if (du, dv) == (0, 1):
            return (f(u, v + e) - f(u, v - e)) / (2 * e)
        if (du, dv) == (2, 0):
            return (f(u + e, v) - 2 * f(u, v) + f(u - e, v)) / e ** 2
        if (du, dv) == (0, 2):
            return (f(u, v + e) - 2 * f(u, v) + f(u, v - e)) / e ** 2
        if (du, dv) == (1, 1):
            return (f(u + e, v + e) - f(u + e, v - e)
                    - f(u - e, v + e) + f(u - e, v - e)) / (4 * e ** 2)
        raise ValueError(f"unsupported derivative order ({du}, {dv})")


class ExpSum2:
    """f(u, v) = e^u + e^v - 2; satisfies f(0,0)=0, f_u=f_v=1 at the origin."""

    def __call__(self, u, v):
        return float(np.exp(u) + np.exp(v) - 2.0)

    def deriv(self, u, v, du=0, dv=0):
        if du and dv:
            return 0.0
        if du:
            return float(np.exp(u))
        if dv:
            return float(np.exp(v))
        return self(u, v)


def normal_form_builtin(name, c=1.0):
    """Named f for the normal form: 'linear', 'product' or 'exp'."""
    if name == "linear":
        return Poly2.from_terms([(1, 0, 1.0), (0, 1, 1.0)])
    if name == "product":
        return Poly2.from_terms([(1, 0, 1.0), (0, 1, 1.0), (1, 1, c)])
    if name == "exp":
        return ExpSum2()
    raise ValueError(f"unknown built-in normal-form f: {name!r}")
