"""Command-line interface.

Subcommands:

* ``phases``    -- sectoriality classification and matrix phases of one matrix.
* ``indices``   -- the four structured robustness indices of one matrix.
* ``analyze``   -- frequency-sweep certification from a JSON config
                   (exit 0 = certified, 2 = not certified, 1 = error).
* ``benchmark`` -- the rotating-body comparison study with manifest, CSV
                   series and figures.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .benchmark import default_b_grid, run_benchmark
from .blocks import BlockDims
from .certify import (assemble_report, plant_frequency_data,
                      _delta_quantities, _record_from)
from .config import (load_config, load_matrix_file, parse_structure)
from .errors import ConfigError, PhasecertError
from .indices import mu_upper, psi_lower, psi_upper, relative_passivity
from .linalg import hermitian_parts, spectral_norm
from .lti import freq_response
from .phases import (Sectoriality, classify_sectoriality, matrix_phases,
                     phase_index)
from .report import (fmt_float, render_benchmark_figures,
                     render_criterion_figures, report_document,
                     write_benchmark_csvs, write_json,
                     write_per_frequency_csv)


def _load_structure(spec: str) -> BlockDims:
    if os.path.exists(spec):
        with open(spec) as fh:
            doc = json.load(fh)
    else:
        try:
            doc = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"structure: invalid JSON ({exc})") from exc
    return parse_structure(doc)


def _emit_boundary(A, path, points):
    """Numerical-range boundary samples (support direction, boundary point)."""
    H, K = hermitian_parts(A)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta", "re", "im"])
        for theta in np.linspace(-math.pi, math.pi, points, endpoint=False):
            M = math.cos(theta) * H + math.sin(theta) * K
            w, V = np.linalg.eigh(M)
            x = V[:, -1]
            z = complex(x.conj() @ A @ x)
            writer.writerow([fmt_float(theta), fmt_float(z.real), fmt_float(z.imag)])


def cmd_phases(args) -> int:
    A = load_matrix_file(args.matrix)
    cls = classify_sectoriality(A, args.tol)
    print(f"sectoriality: {cls.value}")
    idx = phase_index(A, args.tol)
    if cls.is_quasi_sectorial:
        spec = matrix_phases(A, args.tol)
        print("phases (rad):", " ".join(fmt_float(p) for p in spec.phases))
        print("phases (deg):",
              " ".join(fmt_float(math.degrees(p)) for p in spec.phases))
        print(f"center gamma (rad): {fmt_float(spec.center)}")
        print(f"field angle (rad): {fmt_float(spec.field_angle)}")
        print(f"rank deficiency: {spec.rank_deficiency}")
    else:
        print("phases (rad): unavailable for this class")
        angle = math.pi if cls is Sectoriality.SEMI_SECTORIAL else 2.0 * math.pi
        print(f"field angle (rad): {fmt_float(angle)}")
    print(f"phase index (rad): {fmt_float(idx)}")
    print(f"phase index (deg): {fmt_float(math.degrees(idx))}")
    if args.emit_boundary:
        _emit_boundary(A, args.emit_boundary, args.boundary_points)
        print(f"boundary samples written to {args.emit_boundary}")
    return 0


def cmd_indices(args) -> int:
    A = load_matrix_file(args.matrix)
    chi = _load_structure(args.structure)
    if chi.n != A.shape[0]:
        raise ConfigError(
            f"structure: total dimension {chi.n} does not match matrix "
            f"dimension {A.shape[0]}")
    up = psi_upper(A, chi, args.tol)
    low = psi_lower(A, chi, restarts=args.restarts, seed=args.seed)
    mu = mu_upper(A, chi)
    R = relative_passivity(A, chi)
    print(f"psi_upper (rad): {fmt_float(up.value)}  [stage: {up.stage.value}]")
    print(f"psi_lower (rad): {fmt_float(low.value)}")
    print(f"mu_upper: {fmt_float(mu.value)}")
    print(f"relative_passivity: {fmt_float(R)}")
    if up.witness_D is not None:
        print(f"witness scaling norm: {fmt_float(spectral_norm(up.witness_D))}")
    print(f"witness P norm: {fmt_float(spectral_norm(mu.witness_P))}")
    return 0


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    grid = cfg.grid.build()
    plants = plant_frequency_data(cfg.plant, cfg.structure, grid,
                                  workers=args.workers)
    records = []
    for plant in plants:
        if cfg.uses_bounds:
            phi_d = cfg.phase_bound(plant.omega)
            norm_d = cfg.gain_bound(plant.omega)
            norm_sd = math.nan
        else:
            Dw = freq_response(cfg.perturbation_system, plant.omega)
            phi_d, norm_d, norm_sd = _delta_quantities(Dw, cfg.structure)
        records.append(_record_from(plant, phi_d, norm_d, norm_sd, cfg.margins))
    report = assemble_report(records, cfg.criteria, cfg.margins)

    if args.out:
        write_json(report_document(report, config_echo=cfg.raw, seed=cfg.seed),
                   args.out)
        print(f"report written to {args.out}")
    if args.csv:
        write_per_frequency_csv(report, args.csv)
        print(f"per-frequency table written to {args.csv}")
    if args.plots:
        for path in render_criterion_figures(report, args.plots):
            print(f"figure written to {path}")
    print(f"verdict: {report.verdict} ({report.qualifier})")
    return 0 if report.certified else 2


def _parse_b_grid(spec: str):
    parts = spec.split(":")
    if len(parts) not in (3, 4):
        raise ConfigError("b-grid: expected lo:hi:points[:log|linear]")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"b-grid: {exc}") from exc
    spacing = parts[3] if len(parts) == 4 else "log"
    if lo <= 0 or hi <= lo or points < 2:
        raise ConfigError("b-grid: need 0 < lo < hi and points >= 2")
    if spacing == "log":
        return list(np.logspace(math.log10(lo), math.log10(hi), points))
    if spacing == "linear":
        return list(np.linspace(lo, hi, points))
    raise ConfigError(f"b-grid: unknown spacing {spacing!r}")


def cmd_benchmark(args) -> int:
    if args.family != "rotating-body":
        raise ConfigError(f"unknown benchmark family {args.family!r}")
    b_grid = _parse_b_grid(args.b_grid) if args.b_grid else default_b_grid()
    from .certify import default_grid
    grid = default_grid(points=args.points)
    study = run_benchmark(b_grid=b_grid, a=args.a, calibrate=args.calibrate_a,
                          grid=grid, workers=args.workers)

    names = ["+".join(cs) for cs in study.criteria_sets]
    print(f"family: rotating-body   coupling a = {study.a:.6f} "
          f"({'calibrated' if study.calibrated else 'user-supplied'})")
    if study.oracle_interval:
        print(f"pole oracle: unstable for b in "
              f"[{study.oracle_interval[0]:.4f}, {study.oracle_interval[1]:.4f}]")
    else:
        print("pole oracle: stable for every b on the sweep")
    header = f"{'b':>10}  {'oracle':>8}  " + "  ".join(f"{n:>16}" for n in names)
    print(header)
    for row in study.rows:
        cells = "  ".join(
            f"{('yes' if row.certified[cs] else 'no'):>16}"
            for cs in study.criteria_sets)
        print(f"{row.b:>10.4f}  {('stable' if row.oracle_stable else 'UNSTABLE'):>8}  "
              + cells)
    for cs in study.criteria_sets:
        count = sum(1 for r in study.rows if r.certified[cs])
        print(f"certified by {'+'.join(cs)}: {count}/{len(study.rows)}")

    os.makedirs(args.out_dir, exist_ok=True)
    manifest_path = os.path.join(args.out_dir, "manifest.json")
    write_json(study.manifest(), manifest_path)
    print(f"manifest written to {manifest_path}")
    for path in write_benchmark_csvs(study, args.out_dir):
        print(f"table written to {path}")
    if not args.no_plots:
        for path in render_benchmark_figures(study, args.out_dir):
            print(f"figure written to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phasecert",
        description="Phase/gain robust-stability certification for "
                    "structured perturbations of MIMO LTI systems.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phases", help="matrix phases and sectoriality")
    p.add_argument("matrix", help="JSON matrix file ([re, im] entries)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--emit-boundary", metavar="CSV",
                   help="write numerical-range boundary samples")
    p.add_argument("--boundary-points", type=int, default=360)
    p.set_defaults(func=cmd_phases)

    p = sub.add_parser("indices", help="structured robustness indices")
    p.add_argument("matrix", help="JSON matrix file")
    p.add_argument("--structure", required=True,
                   help="JSON structure document or inline string")
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("analyze", help="frequency-sweep certification")
    p.add_argument("config", help="JSON analysis configuration")
    p.add_argument("--out", metavar="JSON", help="full report document")
    p.add_argument("--csv", metavar="CSV", help="per-frequency table")
    p.add_argument("--plots", metavar="DIR", help="render criterion figures")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("benchmark", help="rotating-body comparison study")
    p.add_argument("--family", default="rotating-body")
    p.add_argument("--b-grid", metavar="LO:HI:N[:SPACING]", default=None)
    p.add_argument("--a", type=float, default=None,
                   help="coupling gain (default: shipped calibrated value)")
    p.add_argument("--calibrate-a", action="store_true",
                   help="recalibrate the coupling from the pole oracle")
    p.add_argument("--points", type=int, default=200,
                   help="frequency grid points")
    p.add_argument("--out-dir", default="phasecert-benchmark")
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PhasecertError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
