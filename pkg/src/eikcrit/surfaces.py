"""Sampled 2-parameter surfaces in phase space and their file formats.

A JetSurface is a rectangular (sigma, tau) parameter grid with one phase
point per node.  Export is CSV rows (sigma, tau, x, y, p, q) plus a JSON
metadata sidecar; floats are written with repr for exact round trips.
"""

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError


@dataclass
class JetSurface:
    sigma: np.ndarray               # (nu,)
    tau: np.ndarray                 # (nv,)
    points: np.ndarray              # (nu, nv, 4) = (x, y, p, q)
    construction: str
    metadata: dict = field(default_factory=dict)
    axis_mask: np.ndarray = None    # bool (nu, nv): cells on/next to parameter axes
    valid_mask: np.ndarray = None   # bool (nu, nv): False marks unconverged holes
    max_abs_h: float = None

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=float)
        self.tau = np.asarray(self.tau, dtype=float)
        self.points = np.asarray(self.points, dtype=float)
        if self.points.shape != (self.sigma.size, self.tau.size, 4):
            raise PreconditionError("points grid must have shape (len(sigma), len(tau), 4)")
        if np.any(np.diff(self.sigma) <= 0) or np.any(np.diff(self.tau) <= 0):
            raise PreconditionError("parameter grids must be strictly increasing")

    @property
    def x(self):
        return self.points[:, :, 0]

    @property
    def y(self):
        return self.points[:, :, 1]

    @property
    def p(self):
        return self.points[:, :, 2]

    @property
    def q(self):
        return self.points[:, :, 3]

    def record_residual(self, spec):
        vals = np.array([
            [spec.value(self.points[i, j]) for j in range(self.tau.size)]
            for i in range(self.sigma.size)
        ])
        if self.valid_mask is not None:
            vals = np.where(self.valid_mask, vals, 0.0)
        self.max_abs_h = float(np.max(np.abs(vals)))
        return self.max_abs_h

    def write(self, csv_path, meta_path=None):
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sigma", "tau", "x", "y", "p", "q"])
            for i, s in enumerate(self.sigma):
                for j, t in enumerate(self.tau):
                    x, y, p, q = (float(c) for c in self.points[i, j])
                    w.writerow([repr(float(s)), repr(float(t)),
                                repr(x), repr(y), repr(p), repr(q)])
        if meta_path is not None:
            meta = dict(self.metadata)
            meta["construction"] = self.construction
            meta["max_abs_h"] = self.max_abs_h
            meta["shape"] = [int(self.sigma.size), int(self.tau.size)]
            with open(meta_path, "w") as fh:
                json.dump(meta, fh, indent=2, sort_keys=True)

    @classmethod
    def read(cls, csv_path, meta_path=None):
        rows = []
        with open(csv_path) as fh:
            for row in csv.DictReader(fh):
                rows.append([float(row[k]) for k in ("sigma", "tau", "x", "y", "p", "q")])
        arr = np.array(rows)
        sigma = np.unique(arr[:, 0])
        tau = np.unique(arr[:, 1])
        pts = np.empty((sigma.size, tau.size, 4))
        si = {s: i for i, s in enumerate(sigma)}
        tj = {t: j for j, t in enumerate(tau)}
        for row in arr:
            pts[si[row[0]], tj[row[1]]] = row[2:]
        meta = {}
        construction = "imported"
        max_h = None
        if meta_path is not None:
            with open(meta_path) as fh:
                meta = json.load(fh)
            construction = meta.pop("construction", "imported")
            max_h = meta.pop("max_abs_h", None)
            meta.pop("shape", None)
        return cls(sigma, tau, pts, construction, meta, max_abs_h=max_h)
