"""Command-line front end.

Subcommands take a JSON config (validated against the shipped schema, with
unknown keys rejected) and write CSV/JSON artifacts into --out.  Exit codes:
0 success, 2 config/validation error, 3 numerical failure.  Errors are also
emitted as a structured JSON object on stderr.
"""

import argparse
import csv
import importlib.resources
import json
import os
import sys

import jsonschema
import numpy as np

from . import flow, jet, model_case, series, verify
from .bivariate import Poly2, normal_form_builtin
from .data_functions import Zero, from_config as data_from_config
from .errors import (CharacteristicDataError, ConfigError, EikcritError,
                     IngestionError, IntegrationError, PreconditionError,
                     ReconstructionError, StripError)
from .hamiltonian import (ModelQuadratic, NormalForm, SeparatedEikonal,
                          classify_invariant_planes, classify_second_order,
                          linearize)
from .surfaces import JetSurface

SUBCOMMANDS = ("linearize", "classify", "series", "resonance", "model-saddle",
               "flow-surface", "manifold", "reconstruct", "verify-nonunique",
               "exponents", "sfs-ingest")

_VALIDATION_ERRORS = (ConfigError, IngestionError, PreconditionError,
                      jsonschema.ValidationError)
_NUMERICAL_ERRORS = (IntegrationError, StripError, ReconstructionError,
                     CharacteristicDataError, np.linalg.LinAlgError,
                     FloatingPointError)


def load_schema():
    text = importlib.resources.files("eikcrit").joinpath(
        "config_schema.json").read_text()
    return json.loads(text)


def validate_config(cfg):
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid config: {exc.message}") from exc
    return cfg


def hamiltonian_from_config(cfg):
    kind = cfg["kind"]
    if kind == "model":
        return ModelQuadratic(cfg["a"], cfg["b"])
    if kind == "normal_form":
        f = cfg["f"]
        if f["kind"] == "builtin":
            fn = normal_form_builtin(f["name"], f.get("c", 1.0))
        else:
            fn = Poly2.from_terms(f["terms"])
        return NormalForm(fn, cfg["a"], cfg["b"])
    if kind == "separated":
        return SeparatedEikonal(Poly2.from_terms(cfg["f_terms"]),
                                Poly2.from_terms(cfg["h_terms"]))
    raise ConfigError(f"unknown hamiltonian kind {kind!r}")


def _range(cfg):
    return np.linspace(cfg["min"], cfg["max"], cfg["n"])


def _write_json(path, text):
    with open(path, "w") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def intensity_to_h(I):
    """Shading intensity to slope-squared data: h = 1/I^2 - 1."""
    I = np.asarray(I, dtype=float)
    bad = np.argwhere(I <= 0.0)
    if bad.size:
        i, j = bad[0]
        raise IngestionError(f"non-positive intensity at pixel ({i}, {j})")
    clipped = int(np.count_nonzero(I > 1.0))
    if clipped:
        print(f"warning: clipped {clipped} intensities above 1 to h = 0",
              file=sys.stderr)
    I = np.minimum(I, 1.0)
    return 1.0 / (I * I) - 1.0, clipped


def read_intensity(path):
    """Plain-text PGM (P2) or CSV grid of intensities in (0, 1]."""
    with open(path) as fh:
        head = fh.read(2)
    if head == "P2":
        with open(path) as fh:
            tokens = []
            for line in fh:
                line = line.split("#", 1)[0]
                tokens.extend(line.split())
        if tokens[0] != "P2":
            raise IngestionError("not a plain-text PGM file")
        w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
        vals = np.array(tokens[4:4 + w * h], dtype=float)
        if vals.size != w * h:
            raise IngestionError("PGM pixel count mismatch")
        return vals.reshape(h, w) / maxval
    rows = []
    with open(path) as fh:
        for row in csv.reader(fh):
            if row:
                rows.append([float(v) for v in row])
    return np.array(rows)


# subcommand handlers -----------------------------------------------------

def _cmd_linearize(cfg, out, tol):
    spec = hamiltonian_from_config(cfg["hamiltonian"])
    lin = linearize(spec, cfg.get("point", [0, 0, 0, 0]),
                    tol=cfg.get("tol", 1e-8))
    obj = {
        "eigenvalues": [complex(v).real if abs(complex(v).imag) < 1e-300
                        else repr(complex(v)) for v in lin.eigenvalues],
        "eigenvectors": lin.eigenvectors.tolist(),
        "c2": lin.c2,
        "det_hessian": lin.det_hess,
        "hyperbolic": lin.hyperbolic,
        "real_distinct": lin.real_distinct,
        "degenerate": lin.degenerate,
        "complex_spectrum": lin.complex_spectrum,
        "a": lin.a,
        "b": lin.b,
    }
    _write_json(os.path.join(out, "linearize.json"),
                json.dumps(obj, indent=2, sort_keys=True))
    return 0


def _cmd_classify(cfg, out, tol):
    spec = hamiltonian_from_config(cfg["hamiltonian"])
    lin = linearize(spec, cfg.get("point", [0, 0, 0, 0]))
    report = classify_invariant_planes(lin, tol=cfg.get("tol", 1e-10))
    obj = {
        "planes": [{
            "pair": list(rec.pair),
            "omega_value": rec.omega_value,
            "lagrangian": rec.lagrangian,
            "projectable": rec.projectable,
            "role": rec.role,
        } for rec in report.planes],
    }
    if cfg.get("theta") is not None:
        cands = classify_second_order(lin.a, lin.b, theta=cfg["theta"])
        obj["jet2_candidates"] = cands.candidates
    _write_json(os.path.join(out, "classify.json"),
                json.dumps(obj, indent=2, sort_keys=True))
    return 0


def _cmd_series(cfg, out, tol):
    N = cfg["N"]
    h = series.BivariateSeries.from_terms(N, cfg["h_terms"])
    z, report = series.solve_saddle_series(
        h, cfg["a"], cfg["b"], sign=cfg.get("sign", 1), N=N,
        res_tol=tol or cfg.get("tol", 1e-9))
    _write_json(os.path.join(out, "series.json"), z.to_json())
    z.write_csv(os.path.join(out, "series.csv"))
    obj = {
        "nonexistence": report.nonexistence,
        "resonances": [{
            "m": e.m, "n": e.n, "gap": e.gap,
            "obstruction": e.obstruction, "free_coefficient": e.free_coefficient,
        } for e in report.entries],
        "max_residual": series.series_residual(z, h, N).max_abs(),
    }
    _write_json(os.path.join(out, "resonance_report.json"),
                json.dumps(obj, indent=2, sort_keys=True))
    return 0


def _cmd_resonance(cfg, out, tol):
    pairs = series.detect_resonances(cfg["a"], cfg["b"], cfg["N"],
                                     tol=tol or cfg.get("tol", 1e-9))
    obj = {"a": cfg["a"], "b": cfg["b"], "N": cfg["N"],
           "resonant_indices": [list(p) for p in pairs]}
    _write_json(os.path.join(out, "resonance.json"),
                json.dumps(obj, indent=2, sort_keys=True))
    return 0


def _cmd_model_saddle(cfg, out, tol):
    a, b = cfg["a"], cfg["b"]
    pp = data_from_config(cfg["phi_plus"])
    pm = data_from_config(cfg["phi_minus"])
    u, v = _range(cfg["u"]), _range(cfg["v"])
    if cfg.get("chart", "uv") == "base":
        surf = model_case.model_saddle_on_base_grid(a, b, pp, pm, u, v)
    else:
        surf = model_case.model_saddle_surface(a, b, pp, pm, u, v)
    surf.record_residual(ModelQuadratic(a, b))
    surf.write(os.path.join(out, "surface.csv"),
               os.path.join(out, "surface_meta.json"))
    rep = jet.check_lagrangian(surf)
    _write_json(os.path.join(out, "defects.json"), rep.to_json())
    return 0


def _cmd_flow_surface(cfg, out, tol):
    spec = hamiltonian_from_config(cfg["hamiltonian"])
    phi = data_from_config(cfg["phi"])
    s_cfg = cfg["s"]
    strip = flow.complete_strip(spec, phi, cfg["branch"],
                                s_range=(s_cfg["min"], s_cfg["max"]))
    surf = flow.surface_from_strip(spec, strip, _range(s_cfg),
                                   _range(cfg["t"]),
                                   tol=tol or cfg.get("tol", 1e-10))
    surf.write(os.path.join(out, "surface.csv"),
               os.path.join(out, "surface_meta.json"))
    return 0


def _cmd_manifold(cfg, out, tol):
    spec = hamiltonian_from_config(cfg["hamiltonian"])
    result = flow.invariant_manifold(
        spec, [0, 0, 0, 0], cfg["kind"], cfg["radius"],
        tol=tol or cfg.get("tol", 1e-10), grid_n=cfg.get("grid_n", 25))
    result.surface.write(os.path.join(out, "surface.csv"),
                         os.path.join(out, "surface_meta.json"))
    rep = jet.check_lagrangian(result.surface)
    obj = json.loads(rep.to_json())
    obj["diagnostics"] = {k: v for k, v in result.diagnostics.items()}
    _write_json(os.path.join(out, "defects.json"),
                json.dumps(obj, indent=2, sort_keys=True))
    return 0


def _cmd_reconstruct(cfg, out, tol):
    meta = cfg.get("surface_meta")
    surf = JetSurface.read(cfg["surface_csv"], meta)
    sol = jet.reconstruct_z(surf, base=tuple(cfg.get("base", (0.0, 0.0))))
    sol.write(os.path.join(out, "solution.csv"))
    if cfg.get("hamiltonian") is not None:
        spec = hamiltonian_from_config(cfg["hamiltonian"])
        rep = jet.residual_grid(spec, sol)
        _write_json(os.path.join(out, "defects.json"), rep.to_json())
    return 0


def _cmd_verify_nonunique(cfg, out, tol):
    a, b = cfg["a"], cfg["b"]
    phi = data_from_config(cfg["phi"])
    r = cfg.get("radius", 0.5)
    n = cfg.get("grid_n", 81)
    grid = np.linspace(-r, r, n if n % 2 else n + 1)
    spec = ModelQuadratic(a, b)
    surfaces = []
    for data in (Zero(), phi):
        s = model_case.model_saddle_on_base_grid(a, b, data, data, grid, grid)
        s.record_residual(spec)
        surfaces.append(s)
    sols = [jet.reconstruct_z(s) for s in surfaces]
    profile = verify.compare_solutions(sols[0], sols[1],
                                       n_radii=cfg.get("n_radii", 8))
    profile.residual_1 = surfaces[0].max_abs_h
    profile.residual_2 = surfaces[1].max_abs_h
    _write_json(os.path.join(out, "divergence.json"), profile.to_json())
    profile.write_csv(os.path.join(out, "divergence.csv"))
    return 0


def _cmd_exponents(cfg, out, tol):
    a, b = cfg["a"], cfg["b"]
    phi = data_from_config(cfg["phi"])
    n = cfg.get("n_dyadic", 10)
    offs = cfg.get("offset_max", 0.4) * 0.5 ** np.arange(n)
    grid = np.sort(offs)
    if cfg.get("general_f") is not None:
        f = cfg["general_f"]
        fn = (normal_form_builtin(f["name"], f.get("c", 1.0))
              if f["kind"] == "builtin" else Poly2.from_terms(f["terms"]))
        spec = NormalForm(fn, a, b)
        surf = flow.general_saddle_surface(spec, phi, phi, grid, grid,
                                           tol=tol or 1e-10)
    else:
        surf = model_case.model_saddle_surface(a, b, phi, phi, grid, grid)
    result = verify.axis_decay_exponents(surf)
    _write_json(os.path.join(out, "exponents.json"), result.to_json())
    return 0


def _cmd_sfs_ingest(cfg, out, tol):
    I = read_intensity(cfg["input"])
    h, clipped = intensity_to_h(I)
    with open(os.path.join(out, "h.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        for row in h:
            w.writerow([repr(float(v)) for v in row])
    obj = {"shape": list(h.shape), "clipped": clipped,
           "h_min": float(np.min(h)), "h_max": float(np.max(h))}
    _write_json(os.path.join(out, "ingest.json"),
                json.dumps(obj, indent=2, sort_keys=True))
    return 0


_HANDLERS = {
    "linearize": _cmd_linearize,
    "classify": _cmd_classify,
    "series": _cmd_series,
    "resonance": _cmd_resonance,
    "model-saddle": _cmd_model_saddle,
    "flow-surface": _cmd_flow_surface,
    "manifold": _cmd_manifold,
    "reconstruct": _cmd_reconstruct,
    "verify-nonunique": _cmd_verify_nonunique,
    "exponents": _cmd_exponents,
    "sfs-ingest": _cmd_sfs_ingest,
}


def run(config, out_dir, tol=None, seed=None):
    """Dispatch a validated config; returns the process exit status."""
    command = config.get("command")
    if command not in _HANDLERS:
        raise ConfigError(f"unknown command {command!r}")
    validate_config(config)
    os.makedirs(out_dir, exist_ok=True)
    if seed is not None:
        np.random.seed(seed)
    return _HANDLERS[command](config, out_dir, tol)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="eikcrit",
        description="Eikonal equations near critical points: linearization, "
                    "series, saddle surfaces, manifolds, verification.")
    parser.add_argument("command", choices=SUBCOMMANDS)
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2
    if "command" in config and config["command"] != args.command:
        print(json.dumps({"error": "ConfigError",
                          "message": "config command does not match CLI"}),
              file=sys.stderr)
        return 2
    config["command"] = args.command

    try:
        return run(config, args.out, tol=args.tol, seed=args.seed)
    except _VALIDATION_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except (_NUMERICAL_ERRORS + (EikcritError,)) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
