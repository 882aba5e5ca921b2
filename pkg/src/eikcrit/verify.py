"""Scientific-claim checks: non-uniqueness profiles and axis decay rates.

compare_solutions measures how fast two solutions with the same quadratic
part separate (order of contact at the origin); axis_decay_exponents fits
log-log slopes of the transverse jet components against distance to the
axes and reports them next to the predicted exponents.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .model_case import w_coordinates

EPS100 = 100 * np.finfo(float).eps


@dataclass
class DivergenceProfile:
    radii: np.ndarray
    differences: np.ndarray         # max |z1 - z2| per annulus
    contact_order: float            # np.inf when no usable radii
    contact_order_bound: float = None   # "at least this" when differences ~ 0
    residual_1: float = None
    residual_2: float = None
    n_fit: int = 0

    def to_json(self):
        obj = {
            "radii": list(map(float, self.radii)),
            "differences": list(map(float, self.differences)),
            "contact_order": None if np.isinf(self.contact_order)
            else float(self.contact_order),
            "contact_order_bound": self.contact_order_bound,
            "residual_1": self.residual_1,
            "residual_2": self.residual_2,
            "n_fit": self.n_fit,
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["radius", "difference"])
            for r, d in zip(self.radii, self.differences):
                w.writerow([repr(float(r)), repr(float(d))])


def compare_solutions(s1, s2, n_radii=8):
    """Divergence profile of two SolutionGrids on the same base grid."""
    if (s1.x.shape != s2.x.shape or s1.y.shape != s2.y.shape
            or not np.allclose(s1.x, s2.x, atol=1e-9)
            or not np.allclose(s1.y, s2.y, atol=1e-9)):
        raise PreconditionError("solution grids must share the same base grid")
    if n_radii < 5:
        raise PreconditionError("need at least 5 radii")
    X, Y = np.meshgrid(s1.x, s1.y, indexing="ij")
    R = np.hypot(X, Y)
    rmax = min(np.max(np.abs(s1.x)), np.max(np.abs(s1.y)))
    radii = rmax * np.geomspace(0.1, 1.0, n_radii)
    diff = np.abs(s1.z - s2.z)
    maxima = np.empty(n_radii)
    lo = 0.0
    for k, r in enumerate(radii):
        ring = (R > lo) & (R <= r)
        maxima[k] = np.max(diff[ring]) if np.any(ring) else 0.0
        lo = r
    usable = maxima > EPS100
    if np.count_nonzero(usable) >= 2:
        slope = np.polyfit(np.log(radii[usable]), np.log(maxima[usable]), 1)[0]
        profile = DivergenceProfile(radii, maxima, float(slope))
    else:
        profile = DivergenceProfile(radii, maxima, np.inf)
        profile.contact_order_bound = float(-np.log(EPS100)
                                            / max(np.log(1.0 / radii[0]), 1e-300))
    profile.n_fit = int(np.count_nonzero(usable))
    return profile


@dataclass
class DecayExponents:
    exp_w3_u: float
    exp_w3_v: float
    exp_w4_u: float
    exp_w4_v: float
    predicted_pair: tuple           # ((b l - a)/(a+b), (a l - b)/(a+b))
    model_component_exponents: dict
    low_confidence: bool = False

    def to_json(self):
        def clean(v):
            return None if v is None or np.isinf(v) else float(v)
        obj = {
            "exp_w3_u": clean(self.exp_w3_u),
            "exp_w3_v": clean(self.exp_w3_v),
            "exp_w4_u": clean(self.exp_w4_u),
            "exp_w4_v": clean(self.exp_w4_v),
            "predicted_pair": [clean(t) for t in self.predicted_pair],
            "model_component_exponents": {k: clean(v) for k, v in
                                          self.model_component_exponents.items()},
            "low_confidence": self.low_confidence,
        }
        return json.dumps(obj, indent=2, sort_keys=True)


def _fit_slope(offsets, values):
    """Log-log slope; (inf, False) for identically negligible data."""
    offsets = np.asarray(offsets, dtype=float)
    values = np.asarray(values, dtype=float)
    keep = values > EPS100
    if np.count_nonzero(keep) < 2:
        return np.inf, False
    xs = np.log(offsets[keep])
    slope = np.polyfit(xs, np.log(values[keep]), 1)[0]
    spans_two_decades = (xs.max() - xs.min()) >= 2 * np.log(10.0)
    return float(slope), spans_two_decades


def axis_decay_exponents(surface):
    """Measured vs predicted decay of w3, w4 toward the chart axes.

    The surface must come from a saddle construction on a (u, v) chart with
    a, b, l in its metadata.  Slopes are fitted on a dyadic sequence of
    offsets |u| (or |v|) at a fixed value of the complementary coordinate.
    """
    meta = surface.metadata
    for key in ("a", "b"):
        if meta.get(key) is None:
            raise PreconditionError(f"surface metadata missing {key!r}")
    if meta.get("chart") not in ("uv", "w"):
        raise PreconditionError("need a surface parameterized on the (u, v) chart")
    a, b = meta["a"], meta["b"]
    l = meta.get("l")
    if l is None:
        l = np.inf               # data vanishing to infinite order
    predicted = ((b * l - a) / (a + b), (a * l - b) / (a + b))
    model = {
        "w3_u": (b * l - a) / (a + b),
        "w3_v": a * (l + 1.0) / (a + b),
        "w4_u": b * (l + 1.0) / (a + b),
        "w4_v": (a * l - b) / (a + b),
    }

    u_vals, v_vals = surface.sigma, surface.tau
    w = np.empty(surface.points.shape[:2] + (4,))
    for i in range(u_vals.size):
        for j in range(v_vals.size):
            w[i, j] = w_coordinates(a, b, surface.points[i, j])
    if surface.valid_mask is not None:
        w[~surface.valid_mask] = np.nan

    def profile(comp, axis):
        """max |w_comp| at each positive offset from the named axis."""
        if axis == "u":
            offs = u_vals[u_vals > 0]
            vals = [np.nanmax(np.abs(w[u_vals > 0, :, comp][k]))
                    for k in range(offs.size)]
        else:
            offs = v_vals[v_vals > 0]
            vals = [np.nanmax(np.abs(w[:, v_vals > 0, comp][:, k]))
                    for k in range(offs.size)]
        return offs, np.array(vals)

    results = {}
    confident = True
    for name, comp, axis in (("w3_u", 2, "u"), ("w3_v", 2, "v"),
                             ("w4_u", 3, "u"), ("w4_v", 3, "v")):
        offs, vals = profile(comp, axis)
        slope, spans = _fit_slope(offs, vals)
        results[name] = slope
        if np.isfinite(slope) and not spans:
            confident = False
    return DecayExponents(results["w3_u"], results["w3_v"], results["w4_u"],
                          results["w4_v"], predicted, model,
                          low_confidence=not confident)
