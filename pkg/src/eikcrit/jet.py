"""From jet surfaces to functions z(x, y).

A projectable Lagrangian surface {(x, y, p, q)} is the jet of a function;
here that is made concrete: closedness is measured as q_x - p_y on the base
chart, z is rebuilt by trapezoidal integration of p dx + q dy along grid
paths, and residual reports compare the result against a Hamiltonian.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, ReconstructionError
from .surfaces import JetSurface


@dataclass
class SolutionGrid:
    x: np.ndarray                   # (nx,)
    y: np.ndarray                   # (ny,)
    z: np.ndarray                   # (nx, ny), z(base) = 0
    p: np.ndarray                   # (nx, ny)
    q: np.ndarray                   # (nx, ny)
    base: tuple = (0.0, 0.0)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        for name in ("z", "p", "q"):
            arr = np.asarray(getattr(self, name), dtype=float)
            setattr(self, name, arr)
            if arr.shape != (self.x.size, self.y.size):
                raise PreconditionError(f"{name} must have shape (len(x), len(y))")
        if not (np.all(np.isfinite(self.p)) and np.all(np.isfinite(self.q))):
            raise PreconditionError("p, q must be finite")

    def write(self, csv_path):
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "z", "p", "q"])
            for i, xv in enumerate(self.x):
                for j, yv in enumerate(self.y):
                    w.writerow([repr(float(xv)), repr(float(yv)),
                                repr(float(self.z[i, j])),
                                repr(float(self.p[i, j])),
                                repr(float(self.q[i, j]))])

    @classmethod
    def read(cls, csv_path):
        rows = []
        with open(csv_path) as fh:
            for row in csv.DictReader(fh):
                rows.append([float(row[k]) for k in ("x", "y", "z", "p", "q")])
        arr = np.array(rows)
        x = np.unique(arr[:, 0])
        y = np.unique(arr[:, 1])
        z = np.empty((x.size, y.size))
        p = np.empty_like(z)
        q = np.empty_like(z)
        xi = {v: i for i, v in enumerate(x)}
        yj = {v: j for j, v in enumerate(y)}
        for row in arr:
            i, j = xi[row[0]], yj[row[1]]
            z[i, j], p[i, j], q[i, j] = row[2:]
        return cls(x, y, z, p, q)


@dataclass
class DefectReport:
    max_closedness: float = 0.0     # max |q_x - p_y|
    mean_closedness: float = 0.0
    max_abs_h: float = 0.0
    max_loop_defect: float = 0.0
    projectable: bool = True
    lagrangian: bool = True
    max_closedness_off_axis: float = None
    max_dz_dx_error: float = None   # |z_x - p| via finite differences
    max_dz_dy_error: float = None

    def to_json(self):
        return json.dumps({k: v for k, v in self.__dict__.items()},
                          indent=2, sort_keys=True)


def _grad_nonuniform(f, coords, axis):
    """Central differences on a possibly nonuniform grid; second-order
    one-sided stencils at the boundaries."""
    return np.gradient(f, coords, axis=axis, edge_order=2)


def _projectable(surface):
    """x strictly monotone along sigma rows, y along tau columns."""
    dx = np.diff(surface.x, axis=0)
    dy = np.diff(surface.y, axis=1)
    return (np.all(dx > 0) or np.all(dx < 0)) and (np.all(dy > 0) or np.all(dy < 0))


def _base_derivatives(surface):
    """q_x and p_y on the parameter grid via the inverse chain rule.

    Derivatives with respect to (sigma, tau) are central differences; the
    Jacobian of (x, y) wrt the parameters is inverted per node.
    """
    s, t = surface.sigma, surface.tau
    x, y, p, q = surface.x, surface.y, surface.p, surface.q
    x_s = _grad_nonuniform(x, s, 0)
    x_t = _grad_nonuniform(x, t, 1)
    y_s = _grad_nonuniform(y, s, 0)
    y_t = _grad_nonuniform(y, t, 1)
    p_s = _grad_nonuniform(p, s, 0)
    p_t = _grad_nonuniform(p, t, 1)
    q_s = _grad_nonuniform(q, s, 0)
    q_t = _grad_nonuniform(q, t, 1)
    det = x_s * y_t - x_t * y_s
    with np.errstate(divide="ignore", invalid="ignore"):
        q_x = (q_s * y_t - q_t * y_s) / det
        p_y = (p_t * x_s - p_s * x_t) / det
    return q_x, p_y, det


def check_lagrangian(surface, tol=1e-8):
    """Closedness diagnostic: max and mean of |q_x - p_y| over the grid."""
    rep = DefectReport(max_abs_h=surface.max_abs_h or 0.0)
    if not _projectable(surface):
        rep.projectable = False
        rep.lagrangian = False
        return rep
    q_x, p_y, det = _base_derivatives(surface)
    defect = np.abs(q_x - p_y)
    ok = np.isfinite(defect) & (np.abs(det) > 1e-14)
    if surface.valid_mask is not None:
        ok &= surface.valid_mask
    if not np.any(ok):
        rep.projectable = False
        rep.lagrangian = False
        return rep
    rep.max_closedness = float(np.max(defect[ok]))
    rep.mean_closedness = float(np.mean(defect[ok]))
    if surface.axis_mask is not None:
        off = ok & ~surface.axis_mask
        if np.any(off):
            rep.max_closedness_off_axis = float(np.max(defect[off]))
    rep.lagrangian = rep.max_closedness < tol
    return rep


def _cumtrap(values, coords):
    """Cumulative trapezoid along the first axis, starting at 0."""
    dc = np.diff(coords)
    incr = 0.5 * (values[1:] + values[:-1]) * dc[(...,) + (None,) * (values.ndim - 1)]
    out = np.zeros_like(values)
    out[1:] = np.cumsum(incr, axis=0)
    return out


def reconstruct_z(surface, base=(0.0, 0.0), defect_warn=1e-6, defect_max=1e-3):
    """Integrate p dx + q dy along horizontal-then-vertical grid paths.

    The loop defect (max discrete circulation over grid cells) is recorded in
    the metadata; z is normalized to 0 at the grid node nearest base.
    """
    if not _projectable(surface):
        raise ReconstructionError("surface is not projectable over its grid")
    rep = check_lagrangian(surface, tol=defect_warn)
    measured = (rep.max_closedness_off_axis
                if rep.max_closedness_off_axis is not None else rep.max_closedness)
    if measured > defect_max:
        raise ReconstructionError(
            f"Lagrangian defect {measured:.3e} exceeds {defect_max:.1e}")

    # base-aligned rectangular grid required for path integration
    x = surface.x[:, 0]
    y = surface.y[0, :]
    if (np.max(np.abs(surface.x - x[:, None])) > 1e-10
            or np.max(np.abs(surface.y - y[None, :])) > 1e-10):
        raise ReconstructionError("reconstruction needs a rectangular base grid")
    p, q = surface.p, surface.q

    i0 = int(np.argmin(np.abs(x - base[0])))
    j0 = int(np.argmin(np.abs(y - base[1])))

    # horizontal leg along the base row j0, then vertical legs per column
    along_x = _cumtrap(p[:, j0], x)
    along_x -= along_x[i0]
    along_y = _cumtrap(q.T, y).T
    z = along_x[:, None] + (along_y - along_y[:, j0][:, None])

    # loop defect: discrete circulation around each grid cell
    dx = np.diff(x)[:, None]
    dy = np.diff(y)[None, :]
    bottom = 0.5 * (p[:-1, :-1] + p[1:, :-1]) * dx
    top = 0.5 * (p[:-1, 1:] + p[1:, 1:]) * dx
    left = 0.5 * (q[:-1, :-1] + q[:-1, 1:]) * dy
    right = 0.5 * (q[1:, :-1] + q[1:, 1:]) * dy
    loop = np.abs(bottom + right - top - left)
    meta = dict(surface.metadata)
    meta.update({
        "loop_defect": float(np.max(loop)),
        "loop_defect_density": float(np.max(loop / (dx * dy))),
        "closedness_defect": measured,
        "construction": surface.construction,
    })
    return SolutionGrid(x, y, z, p, q, base=(float(x[i0]), float(y[j0])),
                        metadata=meta)


def residual_grid(spec, sol):
    """Max |H| at the carried jets plus |z_x - p|, |z_y - q| FD errors."""
    h = np.array([
        [spec.value((sol.x[i], sol.y[j], sol.p[i, j], sol.q[i, j]))
         for j in range(sol.y.size)]
        for i in range(sol.x.size)
    ])
    zx = _grad_nonuniform(sol.z, sol.x, 0)
    zy = _grad_nonuniform(sol.z, sol.y, 1)
    rep = DefectReport(
        max_abs_h=float(np.max(np.abs(h))),
        max_dz_dx_error=float(np.max(np.abs(zx - sol.p))),
        max_dz_dy_error=float(np.max(np.abs(zy - sol.q))),
    )
    return rep
