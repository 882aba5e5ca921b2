"""Truncated bivariate power series and the saddle-series recursion.

Series are stored as dense (N+1) x (N+1) coefficient arrays with the
total-degree constraint m + n <= N enforced after every product.  The
degree-d equations of z_x^2 + z_y^2 = h are never formed symbolically; they
are obtained by multiplying the partially built series and reading off the
degree-d defect, which reproduces the classical recursion

    2 (m a - n b) z_{m,n} = h_{m,n} - (lower-order products).
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import convolve2d

from .errors import PreconditionError


class BivariateSeries:
    """sum c_{m,n} x^m y^n over m + n <= N."""

    def __init__(self, N, coeffs=None):
        if N < 0:
            raise PreconditionError("truncation order must be >= 0")
        self.N = int(N)
        if coeffs is None:
            self.coeffs = np.zeros((self.N + 1, self.N + 1))
        else:
            self.coeffs = np.array(coeffs, dtype=float)
            if self.coeffs.shape != (self.N + 1, self.N + 1):
                raise PreconditionError("coefficient array shape must be (N+1, N+1)")
            self._mask()
        if not np.all(np.isfinite(self.coeffs)):
            raise PreconditionError("non-finite series coefficient")

    def _mask(self):
        m, n = np.indices(self.coeffs.shape)
        self.coeffs[m + n > self.N] = 0.0

    @classmethod
    def from_terms(cls, N, terms):
        s = cls(N)
        for m, n, c in terms:
            if m + n <= N:
                s.coeffs[m, n] += c
        return s

    def __getitem__(self, mn):
        m, n = mn
        if m + n > self.N or m < 0 or n < 0:
            return 0.0
        return float(self.coeffs[m, n])

    def copy(self):
        return BivariateSeries(self.N, self.coeffs.copy())

    def truncate(self, N):
        out = BivariateSeries(N)
        k = min(N, self.N) + 1
        out.coeffs[:k, :k] = self.coeffs[:k, :k]
        out._mask()
        return out

    def __add__(self, other):
        N = max(self.N, other.N)
        a, b = self.truncate(N), other.truncate(N)
        return BivariateSeries(N, a.coeffs + b.coeffs)

    def __sub__(self, other):
        N = max(self.N, other.N)
        a, b = self.truncate(N), other.truncate(N)
        return BivariateSeries(N, a.coeffs - b.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return BivariateSeries(self.N, self.coeffs * other)
        N = max(self.N, other.N)
        full = convolve2d(self.coeffs, other.coeffs)
        out = BivariateSeries(N)
        out.coeffs = full[: N + 1, : N + 1].copy()
        out._mask()
        return out

    __rmul__ = __mul__

    def diff_x(self):
        out = BivariateSeries(max(self.N - 1, 0))
        d = self.coeffs[1:, :] * np.arange(1, self.N + 1)[:, None]
        out.coeffs[: d.shape[0], : min(d.shape[1], out.N + 1)] = \
            d[:, : out.N + 1][: out.N + 1]
        out._mask()
        return out

    def diff_y(self):
        out = BivariateSeries(max(self.N - 1, 0))
        d = self.coeffs[:, 1:] * np.arange(1, self.N + 1)[None, :]
        out.coeffs[: min(d.shape[0], out.N + 1), : d.shape[1]] = \
            d[: out.N + 1][:, : out.N + 1]
        out._mask()
        return out

    def degree_slice(self, d):
        """Coefficients (m, n, c) with m + n == d."""
        return [(m, d - m, self.coeffs[m, d - m]) for m in range(d + 1)]

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs)))

    def terms(self, drop_zero=True):
        out = []
        for m in range(self.N + 1):
            for n in range(self.N + 1 - m):
                c = self.coeffs[m, n]
                if c != 0.0 or not drop_zero:
                    out.append((m, n, float(c)))
        return out

    def eval(self, x, y):
        acc = 0.0
        for m, n, c in self.terms():
            acc += c * x ** m * y ** n
        return acc

    # serialization -------------------------------------------------------

    def to_json(self):
        return json.dumps({"N": self.N, "coeffs": [[m, n, c] for m, n, c in self.terms()]})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls.from_terms(obj["N"], obj["coeffs"])

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "n", "c"])
            for m, n, c in self.terms():
                w.writerow([m, n, repr(float(c))])

    @classmethod
    def read_csv(cls, path, N):
        terms = []
        with open(path) as fh:
            for row in csv.DictReader(fh):
                terms.append((int(row["m"]), int(row["n"]), float(row["c"])))
        return cls.from_terms(N, terms)

    def __eq__(self, other):
        return (isinstance(other, BivariateSeries) and self.N == other.N
                and np.array_equal(self.coeffs, other.coeffs))


@dataclass
class ResonanceEntry:
    m: int
    n: int
    gap: float                      # 2 (m a - n b)
    obstruction: float | None       # None while not yet reached by the solver
    free_coefficient: bool


@dataclass
class ResonanceReport:
    entries: list = field(default_factory=list)
    nonexistence: bool = False

    def at(self, m, n):
        for e in self.entries:
            if (e.m, e.n) == (m, n):
                return e
        return None


def detect_resonances(a, b, N, tol=1e-9):
    """All (m, n) with 3 <= m + n <= N and |m a - n b| < tol."""
    if N < 3:
        raise PreconditionError("need N >= 3")
    out = []
    for d in range(3, N + 1):
        for m in range(d + 1):
            n = d - m
            if abs(m * a - n * b) < tol:
                out.append((m, n))
    return out


def series_residual(z, h, N):
    """z_x^2 + z_y^2 - h truncated at total degree N.

    The derivatives are lifted back to order N before squaring so the
    degree-N part of the products (e.g. cubic x cubic) is retained.
    """
    zx = z.diff_x().truncate(N)
    zy = z.diff_y().truncate(N)
    r = zx * zx + zy * zy - h.truncate(N)
    return r.truncate(N)


def solve_saddle_series(h, a, b, sign=+1, N=None, res_tol=1e-9, obs_tol=1e-9):
    """Degree-by-degree saddle solution of z_x^2 + z_y^2 = h.

    The quadratic part of z is sign * (a x^2 - b y^2) / 2.  At a resonant
    index the divisor 2(m a - n b) vanishes: a vanishing right-hand side
    leaves the coefficient free (set to 0), a non-vanishing one is recorded
    as an obstruction and flags non-existence.
    """
    if a <= 0 or b <= 0:
        raise PreconditionError("need a, b > 0")
    if sign not in (+1, -1):
        raise PreconditionError("sign must be +1 or -1")
    if N is None:
        N = h.N
    h = h.truncate(N)
    quad_err = max(
        abs(h[2, 0] - a * a), abs(h[0, 2] - b * b), abs(h[1, 1]),
        abs(h[0, 0]), abs(h[1, 0]), abs(h[0, 1]),
    )
    if quad_err > 1e-10:
        raise PreconditionError(
            f"h must start at a^2 x^2 + b^2 y^2 (defect {quad_err:.3e}); "
            "pre-rotate via classify_second_order")

    z = BivariateSeries.from_terms(N, [(2, 0, sign * a / 2.0), (0, 2, -sign * b / 2.0)])
    report = ResonanceReport()
    for d in range(3, N + 1):
        defect = series_residual(z, h, d)
        for m in range(d + 1):
            n = d - m
            rhs = -defect[m, n]
            gap = 2.0 * (m * a - n * b)
            if abs(gap) < res_tol:
                free = abs(rhs) < obs_tol
                report.entries.append(ResonanceEntry(m, n, gap, float(rhs), free))
                if not free:
                    report.nonexistence = True
                # canonical representative: leave the coefficient at 0
            else:
                z.coeffs[m, n] = rhs / (sign * gap)
    return z, report
