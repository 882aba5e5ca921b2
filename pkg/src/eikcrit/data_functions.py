"""One-variable data functions phi with a declared vanishing order.

These are the free data of the saddle family: phi(0) = 0 and phi vanishes to
order l at the origin (l may be +inf).  The Table variant requires an
explicitly declared order; l is an analytic property and is not inferred
from samples.
"""

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import PreconditionError


class DataFunction:
    order = None     # vanishing order l (float or np.inf)

    def __call__(self, s):
        raise NotImplementedError

    def describe(self):
        return {"kind": type(self).__name__.lower(), "order": self.order}


class Zero(DataFunction):
    order = np.inf

    def __call__(self, s):
        return 0.0 * np.asarray(s, dtype=float)

    def describe(self):
        return {"kind": "zero", "order": None}


class Monomial(DataFunction):
    """phi(s) = c s^l for s >= 0; odd or even extension to s < 0."""

    def __init__(self, c, l, extension="odd"):
        if l < 1:
            raise PreconditionError("monomial data needs vanishing order l >= 1")
        if extension not in ("odd", "even"):
            raise PreconditionError("extension must be 'odd' or 'even'")
        self.c = float(c)
        self.order = float(l)
        self.extension = extension

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        mag = self.c * np.abs(s) ** self.order
        if self.extension == "odd":
            return np.sign(s) * mag
        return mag

    def describe(self):
        return {"kind": "monomial", "c": self.c, "order": self.order,
                "extension": self.extension}


class SmoothBump(DataFunction):
    """Compactly supported bump at s0 > 0: vanishes identically near 0,
    hence to infinite order there."""

    order = np.inf

    def __init__(self, c, center, width):
        if center - width <= 0:
            raise PreconditionError("bump support must avoid the origin (center > width)")
        self.c = float(c)
        self.center = float(center)
        self.width = float(width)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        t = (s - self.center) / self.width
        out = np.zeros_like(t)
        inside = np.abs(t) < 1.0
        out[inside] = self.c * np.exp(-1.0 / (1.0 - t[inside] ** 2)) * np.e
        return out

    def describe(self):
        return {"kind": "bump", "c": self.c, "center": self.center,
                "width": self.width, "order": None}


class Table(DataFunction):
    """Sampled (s, phi(s)) pairs with cubic-spline interpolation and a
    declared vanishing order."""

    def __init__(self, s, values, order):
        s = np.asarray(s, dtype=float)
        values = np.asarray(values, dtype=float)
        if s.ndim != 1 or s.shape != values.shape:
            raise PreconditionError("table needs matching 1-d sample arrays")
        if order is None:
            raise PreconditionError("table data requires an explicit vanishing order")
        i0 = np.argmin(np.abs(s))
        if abs(values[i0]) > 1e-12 or abs(s[i0]) > 1e-12:
            raise PreconditionError("table must contain the sample phi(0) = 0")
        self.s = s
        self.values = values
        self.order = float(order)
        self._spline = CubicSpline(s, values)

    def __call__(self, s):
        return self._spline(np.asarray(s, dtype=float))

    def describe(self):
        return {"kind": "table", "order": self.order, "n_samples": len(self.s)}


class Scaled(DataFunction):
    """factor * phi(s); same vanishing order as phi."""

    def __init__(self, base, factor):
        self.base = base
        self.factor = float(factor)
        self.order = base.order

    def __call__(self, s):
        return self.factor * self.base(s)

    def describe(self):
        return {"kind": "scaled", "factor": self.factor, "base": self.base.describe()}


def from_config(cfg):
    """Build a data function from a JSON-style description."""
    kind = cfg.get("kind", "zero")
    if kind == "zero":
        return Zero()
    if kind == "monomial":
        return Monomial(cfg["c"], cfg["l"], cfg.get("extension", "odd"))
    if kind == "bump":
        return SmoothBump(cfg["c"], cfg["center"], cfg["width"])
    if kind == "table":
        return Table(cfg["s"], cfg["values"], cfg["l"])
    raise PreconditionError(f"unknown data-function kind {kind!r}")
