"""Report emission: per-frequency CSV, JSON documents, and figure files.

All floats are written with 15 significant digits so every printed value
re-parses to within 1e-12 relative.  JSON output is key-sorted and free of
timestamps, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
import os

import numpy as np

from .certify import CertificationReport

CSV_COLUMNS = ("omega", "psi_bar_G", "mu_bar_G", "R_G", "phi_Delta",
               "norm_Delta", "phase_ok", "gain_ok", "passivity_ok")


def fmt_float(value) -> str:
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return format(value, ".15g")


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return fmt_float(value)


def write_per_frequency_csv(report: CertificationReport, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in report.records:
            row = rec.row()
            writer.writerow([_cell(row[c]) for c in CSV_COLUMNS])


def write_json(doc: dict, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def report_document(report: CertificationReport, config_echo: dict | None = None,
                    seed: int | None = None) -> dict:
    doc = report.to_dict()
    if config_echo is not None:
        doc["config"] = config_echo
    if seed is not None:
        doc["seed"] = seed
    return doc


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _finite_grid(report: CertificationReport):
    omegas = np.array([r.omega for r in report.records])
    mask = np.isfinite(omegas) & (omegas > 0)
    return omegas, mask


def render_criterion_figures(report: CertificationReport, outdir) -> list[str]:
    """Criterion-margin curves vs frequency, one PNG per criterion."""
    plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    omegas, mask = _finite_grid(report)
    w = omegas[mask]
    paths = []

    def save(fig, name):
        path = os.path.join(outdir, name)
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)

    psi = np.array([r.psi_bar_G for r in report.records])[mask]
    phi = np.array([r.phi_Delta for r in report.records])[mask]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(w, np.pi - psi, label="phase budget of plant")
    ax.semilogx(w, phi, "--", label="perturbation phase index")
    ax.set_xlabel("frequency (rad/s)")
    ax.set_ylabel("angle (rad)")
    ax.set_title("Phase criterion (budget must stay above the dashed curve)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    save(fig, "phase_criterion.png")

    mu = np.array([r.mu_bar_G for r in report.records])[mask]
    nd = np.array([r.norm_Delta for r in report.records])[mask]
    fig, ax = plt.subplots(figsize=(6, 4))
    with np.errstate(divide="ignore"):
        ax.loglog(w, 1.0 / mu, label="reciprocal scaled-norm bound of plant")
    ax.loglog(w, nd, "--", label="perturbation norm")
    ax.set_xlabel("frequency (rad/s)")
    ax.set_ylabel("gain")
    ax.set_title("Gain criterion")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    save(fig, "gain_criterion.png")

    R = np.array([r.R_G for r in report.records])[mask]
    ns = np.array([r.norm_SDelta for r in report.records])[mask]
    if np.all(np.isfinite(ns)):
        fig, ax = plt.subplots(figsize=(6, 4))
        with np.errstate(divide="ignore"):
            ax.loglog(w, 1.0 / R, label="reciprocal passivity index of plant")
        ax.loglog(w, ns, "--", label="perturbation scattering norm")
        ax.set_xlabel("frequency (rad/s)")
        ax.set_ylabel("gain")
        ax.set_title("Passivity criterion")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        save(fig, "passivity_criterion.png")
    return paths


def render_benchmark_figures(study, outdir) -> list[str]:
    """Sweep and per-frequency figures for the benchmark study."""
    plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    paths = []

    def save(fig, name):
        path = os.path.join(outdir, name)
        fig.savefig(path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        paths.append(path)

    omegas = np.array([p.omega for p in study.plant_records])
    mask = np.isfinite(omegas) & (omegas > 0)
    w = omegas[mask]
    psi = np.array([p.psi.value for p in study.plant_records])[mask]
    mu = np.array([p.mu.value for p in study.plant_records])[mask]
    R = np.array([p.R for p in study.plant_records])[mask]

    from .lti import delta_family, freq_response
    from .certify import scattering
    from .phases import phase_index
    from .linalg import spectral_norm

    b_show = [b for b in (1.0, 5.0, 22.0, 100.0)
              if study.b_grid[0] <= b <= study.b_grid[-1]] or list(study.b_grid[:2])

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(w, np.pi - psi, "k", label="phase budget of plant")
    for b in b_show:
        d = delta_family(b)
        phi = [phase_index(freq_response(d, x)) for x in w]
        ax.semilogx(w, phi, "--", label=f"perturbation phase, b={b:g}")
    ax.set_xlabel("frequency (rad/s)")
    ax.set_ylabel("angle (rad)")
    ax.set_title("Phase criterion across the sweep")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    save(fig, "benchmark_phase.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(w, 1.0 / mu, "k", label="reciprocal scaled-norm bound")
    ax.loglog(w, 0.5 * np.ones_like(w), "--", label="perturbation norm (0.5)")
    ax.set_xlabel("frequency (rad/s)")
    ax.set_ylabel("gain")
    ax.set_title("Gain criterion across the sweep")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    save(fig, "benchmark_gain.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(w, 1.0 / R, "k", label="reciprocal passivity index")
    for b in b_show:
        d = delta_family(b)
        ns = [spectral_norm(scattering(freq_response(d, x))) for x in w]
        ax.loglog(w, ns, "--", label=f"perturbation scattering norm, b={b:g}")
    ax.set_xlabel("frequency (rad/s)")
    ax.set_ylabel("gain")
    ax.set_title("Passivity criterion across the sweep")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    save(fig, "benchmark_passivity.png")

    fig, ax = plt.subplots(figsize=(6, 4))
    bs = np.array(study.b_grid)
    stable = np.array([r.oracle_stable for r in study.rows])
    ax.semilogx(bs, stable.astype(int), "k.-", label="pole oracle stable")
    offsets = {cs: 0.04 * (i + 1) for i, cs in enumerate(study.criteria_sets)}
    for cs in study.criteria_sets:
        cert = np.array([r.certified[cs] for r in study.rows]).astype(float)
        ax.semilogx(bs, cert - offsets[cs], ".--", label="certified: " + "+".join(cs))
    ax.set_xlabel("perturbation pole parameter b")
    ax.set_yticks([0, 1], ["no", "yes"])
    ax.set_ylim(-0.3, 1.1)
    ax.set_title("Sweep verdicts (curves offset for visibility)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    save(fig, "benchmark_sweep.png")
    return paths


def write_benchmark_csvs(study, outdir) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    paths = []

    sweep_path = os.path.join(outdir, "sweep_summary.csv")
    with open(sweep_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        names = ["certified_" + "+".join(cs) for cs in study.criteria_sets]
        writer.writerow(["b", "oracle_stable"] + names)
        for row in study.rows:
            writer.writerow([fmt_float(row.b), _cell(row.oracle_stable)]
                            + [_cell(row.certified[cs]) for cs in study.criteria_sets])
    paths.append(sweep_path)

    plant_path = os.path.join(outdir, "plant_frequency.csv")
    with open(plant_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "psi_bar_G", "mu_bar_G", "R_G", "stage"])
        for p in study.plant_records:
            writer.writerow([fmt_float(p.omega), fmt_float(p.psi.value),
                             fmt_float(p.mu.value), fmt_float(p.R),
                             p.psi.stage.value])
    paths.append(plant_path)
    return paths
