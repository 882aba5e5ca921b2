import json

import numpy as np
import pytest

from eikcrit import BivariateSeries, IngestionError, JetSurface
from eikcrit.cli import (hamiltonian_from_config, intensity_to_h, main,
                         read_intensity, validate_config)
from eikcrit.errors import ConfigError

SQRT2 = 1.4142135623730951


def run_cli(tmp_path, command, config, extra=()):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(config))
    out = tmp_path / "out"
    return main([command, "--config", str(cfg_path), "--out", str(out),
                 *extra]), out


# --- validation ----------------------------------------------------------

def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        validate_config({"command": "resonance", "a": 1.0, "b": 1.0, "N": 6,
                         "bogus": True})


def test_unknown_command_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text("{}")
    with pytest.raises(SystemExit):
        main(["frobnicate", "--config", str(cfg)])


def test_invalid_config_returns_2(tmp_path):
    code, _ = run_cli(tmp_path, "resonance", {"a": 1.0, "b": 1.0})
    assert code == 2


def test_numerical_failure_returns_3(tmp_path):
    # reconstruction of a non-Lagrangian surface is a numerical failure
    g = np.linspace(-0.5, 0.5, 11)
    pts = np.empty((11, 11, 4))
    X, Y = np.meshgrid(g, g, indexing="ij")
    pts[:, :, 0] = X
    pts[:, :, 1] = Y
    pts[:, :, 2] = Y
    pts[:, :, 3] = 0.0
    surf = JetSurface(g, g, pts, "artificial")
    csv_path = tmp_path / "surf.csv"
    surf.write(csv_path)
    code, _ = run_cli(tmp_path, "reconstruct", {"surface_csv": str(csv_path)})
    assert code == 3


def test_hamiltonian_from_config_variants():
    m = hamiltonian_from_config({"kind": "model", "a": 1.0, "b": 2.0})
    assert m.value([0, 0, 1.0, 0]) == pytest.approx(0.5)
    nf = hamiltonian_from_config({
        "kind": "normal_form", "a": 1.0, "b": 1.0,
        "f": {"kind": "builtin", "name": "exp"}})
    assert nf.value([0, 0, 0, 0]) == 0.0
    with pytest.raises(ConfigError):
        hamiltonian_from_config({"kind": "mystery"})


# --- subcommand artifacts ------------------------------------------------

def test_series_command_artifacts(tmp_path):
    code, out = run_cli(tmp_path, "series", {
        "h_terms": [[2, 0, 1.0], [0, 2, 2.0], [3, 0, 1.0]],
        "a": 1.0, "b": SQRT2, "N": 10})
    assert code == 0
    z = BivariateSeries.from_json((out / "series.json").read_text())
    assert z[3, 0] == pytest.approx(1 / 6, abs=1e-12)
    report = json.loads((out / "resonance_report.json").read_text())
    assert report["nonexistence"] is False


def test_resonance_command(tmp_path):
    code, out = run_cli(tmp_path, "resonance", {"a": 1.0, "b": 1.0, "N": 6})
    assert code == 0
    obj = json.loads((out / "resonance.json").read_text())
    assert obj["resonant_indices"] == [[2, 2], [3, 3]]


def test_manifold_command_and_round_trip(tmp_path):
    code, out = run_cli(tmp_path, "manifold", {
        "hamiltonian": {"kind": "model", "a": 1.0, "b": SQRT2},
        "kind": "unstable", "radius": 0.3, "grid_n": 7})
    assert code == 0
    defects = json.loads((out / "defects.json").read_text())
    assert defects["max_abs_h"] < 1e-7
    surf = JetSurface.read(out / "surface.csv", out / "surface_meta.json")
    reread = JetSurface.read(out / "surface.csv", out / "surface_meta.json")
    np.testing.assert_array_equal(surf.points, reread.points)


def test_surface_round_trip_exact(tmp_path):
    code, out = run_cli(tmp_path, "model-saddle", {
        "a": 1.0, "b": SQRT2,
        "phi_plus": {"kind": "monomial", "c": 1.0, "l": 5},
        "phi_minus": {"kind": "zero"},
        "u": {"min": -0.3, "max": 0.3, "n": 11},
        "v": {"min": -0.3, "max": 0.3, "n": 11}})
    assert code == 0
    surf = JetSurface.read(out / "surface.csv", out / "surface_meta.json")
    # repr round trip: re-export must be byte-identical
    surf.write(tmp_path / "again.csv")
    assert (tmp_path / "again.csv").read_bytes() == (out / "surface.csv").read_bytes()


def test_determinism_byte_identical(tmp_path):
    cfg = {"h_terms": [[2, 0, 1.0], [0, 2, 2.0], [3, 0, 0.7]],
           "a": 1.0, "b": SQRT2, "N": 8}
    outs = []
    for name in ("r1", "r2"):
        sub = tmp_path / name
        sub.mkdir()
        code, out = run_cli(sub, "series", cfg, extra=["--seed", "7"])
        assert code == 0
        outs.append((out / "series.csv").read_bytes())
    assert outs[0] == outs[1]


def test_verify_nonunique_command(tmp_path):
    code, out = run_cli(tmp_path, "verify-nonunique", {
        "a": 1.0, "b": SQRT2, "phi": {"kind": "monomial", "c": 1.0, "l": 5},
        "grid_n": 41})
    assert code == 0
    obj = json.loads((out / "divergence.json").read_text())
    assert obj["contact_order"] > 2.5
    assert obj["differences"][-1] > 1e-4


def test_exponents_command(tmp_path):
    code, out = run_cli(tmp_path, "exponents", {
        "a": 1.0, "b": SQRT2, "phi": {"kind": "monomial", "c": 1.0, "l": 5},
        "n_dyadic": 12})
    assert code == 0
    obj = json.loads((out / "exponents.json").read_text())
    assert obj["exp_w4_v"] == pytest.approx((5 - SQRT2) / (1 + SQRT2), abs=0.05)


# --- shape-from-shading ingestion ---------------------------------------

def test_intensity_to_h_values():
    h, clipped = intensity_to_h(np.array([[1.0, 1 / np.sqrt(2.0), 0.5]]))
    np.testing.assert_allclose(h, [[0.0, 1.0, 3.0]], atol=1e-12)
    assert clipped == 0


def test_intensity_nonpositive_names_pixel():
    with pytest.raises(IngestionError, match=r"\(1, 2\)"):
        intensity_to_h(np.array([[0.5, 0.5, 0.5], [0.5, 0.5, 0.0]]))


def test_intensity_above_one_clipped():
    h, clipped = intensity_to_h(np.array([[1.5, 0.5]]))
    assert clipped == 1
    assert h[0, 0] == 0.0


def test_read_pgm(tmp_path):
    path = tmp_path / "img.pgm"
    path.write_text("P2\n# comment\n3 2\n255\n255 128 64\n255 255 32\n")
    I = read_intensity(path)
    assert I.shape == (2, 3)
    assert I[0, 0] == 1.0
    assert I[1, 2] == pytest.approx(32 / 255)


def test_read_csv_grid(tmp_path):
    path = tmp_path / "img.csv"
    path.write_text("1.0,0.5\n0.25,1.0\n")
    I = read_intensity(path)
    np.testing.assert_allclose(I, [[1.0, 0.5], [0.25, 1.0]])


def test_sfs_ingest_command(tmp_path):
    img = tmp_path / "img.pgm"
    img.write_text("P2\n2 2\n100\n100 50\n100 100\n")
    code, out = run_cli(tmp_path, "sfs-ingest", {"input": str(img)})
    assert code == 0
    obj = json.loads((out / "ingest.json").read_text())
    assert obj["h_max"] == pytest.approx(3.0)
    rows = (out / "h.csv").read_text().strip().splitlines()
    assert len(rows) == 2
