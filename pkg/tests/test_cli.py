import csv
import json
import math

import pytest

from phasecert.benchmark import CALIBRATED_A
from phasecert.cli import main
from phasecert.lti import delta_family, rotating_body_T


def write_matrix(path, entries):
    path.write_text(json.dumps({"matrix": entries}))
    return str(path)


def base_config(tmp_path, b=22.0, points=24, **overrides):
    cfg = {
        "plant": rotating_body_T(CALIBRATED_A).to_dict(),
        "perturbation": delta_family(b).to_dict(),
        "structure": {"scalar_dims": [], "full_dims": [1, 1]},
        "grid": {"min": 0.01, "max": 1000.0, "points": points},
        "criteria": ["phase", "gain"],
        "margins": {"phase": 0.01, "gain": 0.005},
        "seed": 0,
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_phases_identity(tmp_path, capsys):
    path = write_matrix(tmp_path / "m.json", [[1, 0], [0, 1]])
    assert main(["phases", path]) == 0
    out = capsys.readouterr().out
    assert "sectorial" in out
    assert "phase index (rad): 0" in out


def test_phases_flat_segment(tmp_path, capsys):
    path = write_matrix(tmp_path / "m.json", [[1, 0], [0, -1]])
    assert main(["phases", path]) == 0
    out = capsys.readouterr().out
    assert "semi-sectorial" in out
    assert "3.14159265358979" in out


def test_phases_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"matrix": [[1, 0], [0]]}))
    assert main(["phases", str(path)]) == 1
    err = capsys.readouterr().err
    assert "matrix[1]" in err


def test_phases_missing_field(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"data": [[1]]}))
    assert main(["phases", str(path)]) == 1
    assert "matrix" in capsys.readouterr().err


def test_phases_boundary_emission(tmp_path, capsys):
    path = write_matrix(tmp_path / "m.json", [[1, 0], [0, [0, 1]]])
    out_csv = tmp_path / "boundary.csv"
    assert main(["phases", path, "--emit-boundary", str(out_csv),
                 "--boundary-points", "90"]) == 0
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["theta", "re", "im"]
    assert len(rows) == 91
    # the numerical range of diag(1, j) is the segment re + im = 1
    for _, re, im in rows[1:]:
        z = complex(float(re), float(im))
        assert z.real + z.imag == pytest.approx(1.0, abs=1e-9)
        assert -1e-9 <= z.real <= 1 + 1e-9


def test_indices_identity(tmp_path, capsys):
    path = write_matrix(tmp_path / "m.json", [[1, 0], [0, 1]])
    rc = main(["indices", path, "--structure",
               '{"scalar_dims": [], "full_dims": [1, 1]}'])
    assert rc == 0
    out = capsys.readouterr().out
    assert "psi_upper (rad): 0" in out
    assert "mu_upper: 1" in out


def test_indices_rotated(tmp_path, capsys):
    c = math.sqrt(2) / 2
    path = write_matrix(tmp_path / "m.json",
                        [[[c, c], 0], [0, [c, c]]])
    rc = main(["indices", path, "--structure",
               '{"scalar_dims": [], "full_dims": [1, 1]}'])
    assert rc == 0
    out = capsys.readouterr().out
    psi_line = [ln for ln in out.splitlines() if ln.startswith("psi_upper")][0]
    assert float(psi_line.split()[2]) == pytest.approx(math.pi / 4, abs=1e-4)


def test_indices_singular_matrix_no_crash(tmp_path, capsys):
    path = write_matrix(tmp_path / "m.json", [[0, 0], [0, 1]])
    rc = main(["indices", path, "--structure",
               '{"scalar_dims": [], "full_dims": [1, 1]}'])
    assert rc == 0
    out = capsys.readouterr().out
    assert "mu_upper" in out


def test_indices_dimension_mismatch(tmp_path, capsys):
    path = write_matrix(tmp_path / "m.json", [[1, 0], [0, 1]])
    rc = main(["indices", path, "--structure",
               '{"scalar_dims": [3], "full_dims": []}'])
    assert rc == 1


def test_analyze_certified(tmp_path, capsys):
    cfg = base_config(tmp_path, b=22.0)
    out_json = tmp_path / "report.json"
    out_csv = tmp_path / "per_freq.csv"
    rc = main(["analyze", cfg, "--out", str(out_json), "--csv", str(out_csv),
               "--workers", "2"])
    assert rc == 0
    doc = json.loads(out_json.read_text())
    assert doc["verdict"] == "CertifiedStable"
    assert "grid-certified" in doc["qualifier"]
    assert doc["seed"] == 0
    assert len(doc["records"]) == len(doc["grid"])


def test_analyze_not_certified(tmp_path):
    cfg = base_config(tmp_path, b=1.0, points=12)
    assert main(["analyze", cfg]) == 2


def test_analyze_invalid_grid(tmp_path):
    cfg = base_config(tmp_path, grid={"min": 0.01, "max": 1000.0, "points": 1})
    assert main(["analyze", cfg]) == 1


def test_analyze_csv_roundtrip(tmp_path):
    cfg = base_config(tmp_path, b=22.0, points=12)
    out_csv = tmp_path / "per_freq.csv"
    assert main(["analyze", cfg, "--csv", str(out_csv)]) == 0
    rows = list(csv.DictReader(out_csv.open()))
    assert len(rows) == 14  # 12 log points plus 0 and inf
    out_json = tmp_path / "report.json"
    assert main(["analyze", cfg, "--out", str(out_json)]) == 0
    doc = json.loads(out_json.read_text())
    for row, rec in zip(rows, doc["records"]):
        for key in ("omega", "psi_bar_G", "mu_bar_G", "R_G", "phi_Delta",
                    "norm_Delta"):
            parsed = float(row[key])
            ref = float(rec[key])
            if math.isinf(ref):
                assert math.isinf(parsed)
            else:
                assert parsed == pytest.approx(ref, rel=1e-12, abs=1e-300)
        assert row["phase_ok"] in ("true", "false")


def test_analyze_deterministic(tmp_path):
    cfg = base_config(tmp_path, b=22.0, points=10)
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    assert main(["analyze", cfg, "--out", str(out1)]) == 0
    assert main(["analyze", cfg, "--out", str(out2), "--workers", "3"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_analyze_bounds_perturbation(tmp_path):
    cfg = base_config(
        tmp_path, points=10,
        perturbation={
            "phase_bound": [[0.0, 0.0], [1000.0, 0.05]],
            "gain_bound": [[0.0, 0.05], [1000.0, 0.05]],
        })
    assert main(["analyze", cfg]) == 0


def test_analyze_bounds_rejects_passivity(tmp_path):
    cfg = base_config(
        tmp_path, points=10,
        criteria=["gain", "passivity"],
        perturbation={
            "phase_bound": [[0.0, 0.0]],
            "gain_bound": [[0.0, 0.05]],
        })
    assert main(["analyze", cfg]) == 1


def test_benchmark_smoke(tmp_path, capsys):
    outdir = tmp_path / "bench"
    rc = main(["benchmark", "--b-grid", "0.2:50:4", "--points", "16",
               "--out-dir", str(outdir)])
    assert rc == 0
    out = capsys.readouterr().out
    assert "pole oracle" in out
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert manifest["family"] == "rotating-body"
    assert manifest["a"] == pytest.approx(CALIBRATED_A)
    assert manifest["a_provenance"].startswith("calibrated")
    assert len(manifest["rows"]) == 4
    assert (outdir / "sweep_summary.csv").exists()
    assert (outdir / "plant_frequency.csv").exists()
    for name in ("benchmark_phase.png", "benchmark_gain.png",
                 "benchmark_passivity.png", "benchmark_sweep.png"):
        assert (outdir / name).exists()


def test_benchmark_unknown_family():
    assert main(["benchmark", "--family", "unknown"]) == 1
