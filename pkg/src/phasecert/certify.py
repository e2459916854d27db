"""Frequency-sweep robust-stability certification.

Per frequency, three sufficient criteria are evaluated against a structured
perturbation: a phase criterion (perturbation phase index plus the plant's
structured phase upper bound stays below pi), a gain criterion (perturbation
norm times the structured-singular-value upper bound stays below one), and a
passivity criterion (the same gain test after a scattering transform of both
sides).  A grid verdict certifies stability when every grid point passes at
least one enabled criterion; the report is explicit that this is a
grid-level approximation of the underlying all-frequency hypotheses.

Every certified point can be audited a posteriori: ``build_iqc_certificate``
reconstructs the frequency-domain multiplier behind the criterion that fired
and re-evaluates both of its inequalities directly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import blocks, indices
from .blocks import BlockDims
from .errors import (CertificateFailure, NotQuasiSectorial, PhasecertError,
                     SingularScattering, StructureViolation, ZeroMatrix)
from .indices import MuResult, PsiStage, PsiUpperResult
from .linalg import as_square, spectral_norm
from .lti import StateSpace, freq_response
from .phases import matrix_phases, phase_index

CRITERIA = ("phase", "gain", "passivity")

VERDICT_CERTIFIED = "CertifiedStable"
VERDICT_NOT_CERTIFIED = "NotCertified"

GRID_QUALIFIER = ("grid-certified: criteria were verified on the finite "
                  "frequency grid only, not on all of [0, inf]")

_NEARZERO = 1e-13
_EPS_CAP = 1e6


@dataclass(frozen=True)
class Margins:
    """Decision margins absorbing inter-grid variation of the criteria."""

    phase: float = 0.01   # rad subtracted from the pi budget
    gain: float = 0.005   # subtracted from the unit gain budget


@dataclass(frozen=True)
class FrequencyRecord:
    omega: float
    psi_bar_G: float
    mu_bar_G: float
    R_G: float
    phi_Delta: float
    norm_Delta: float
    norm_SDelta: float
    phase_ok: bool
    gain_ok: bool
    passivity_ok: bool
    stage: PsiStage
    psi_detail: PsiUpperResult = field(repr=False, compare=False)
    mu_detail: MuResult = field(repr=False, compare=False)

    def row(self) -> dict:
        return {
            "omega": self.omega,
            "psi_bar_G": self.psi_bar_G,
            "mu_bar_G": self.mu_bar_G,
            "R_G": self.R_G,
            "phi_Delta": self.phi_Delta,
            "norm_Delta": self.norm_Delta,
            "phase_ok": self.phase_ok,
            "gain_ok": self.gain_ok,
            "passivity_ok": self.passivity_ok,
        }


@dataclass(frozen=True)
class CertificationReport:
    grid: tuple[float, ...]
    records: tuple[FrequencyRecord, ...]
    omega_psi: tuple[int, ...]
    omega_mu: tuple[int, ...]
    omega_passivity: tuple[int, ...]
    verdict: str
    criteria_used: tuple[str, ...]
    margins: Margins
    qualifier: str = GRID_QUALIFIER

    @property
    def certified(self) -> bool:
        return self.verdict == VERDICT_CERTIFIED

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "qualifier": self.qualifier,
            "criteria_used": list(self.criteria_used),
            "margins": {"phase": self.margins.phase, "gain": self.margins.gain},
            "grid": list(self.grid),
            "omega_psi": list(self.omega_psi),
            "omega_mu": list(self.omega_mu),
            "omega_passivity": list(self.omega_passivity),
            "records": [
                dict(r.row(), norm_SDelta=r.norm_SDelta, stage=r.stage.value)
                for r in self.records
            ],
        }


@dataclass(frozen=True)
class IqcCertificate:
    omega: float
    kind: str                     # "PhaseMultiplier" or "GainMultiplier"
    fdi_delta_margin: float
    fdi_G_margin: float
    D: np.ndarray | None = None
    beta: float | None = None
    level: float | None = None    # gain branch: the norm level used in Pi


def scattering(M) -> np.ndarray:
    """Scattering transform (I - M)(I + M)^{-1}."""
    M = as_square(M)
    n = M.shape[0]
    IM = np.eye(n) + M
    if np.linalg.cond(IM) > 1e12:
        raise SingularScattering("I + M is numerically singular")
    return (np.eye(n) - M) @ np.linalg.inv(IM)


@dataclass(frozen=True)
class PlantPoint:
    """Per-frequency plant indices, independent of the perturbation."""

    omega: float
    Gw: np.ndarray
    psi: PsiUpperResult
    mu: MuResult
    R: float


def plant_point(G_of_omega, omega: float, chi: BlockDims,
                tol: float = 1e-5) -> PlantPoint:
    Gw = as_square(G_of_omega)
    psi = indices.psi_upper(Gw, chi, tol)
    mu = indices.mu_upper(Gw, chi)
    try:
        R = indices.relative_passivity(Gw, chi)
    except SingularScattering:
        R = math.inf
    return PlantPoint(omega=omega, Gw=Gw, psi=psi, mu=mu, R=R)


def _resolve_workers(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("PHASECERT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(os.cpu_count() or 1, 8)


def plant_frequency_data(G: StateSpace, chi: BlockDims, grid,
                         tol: float = 1e-5, workers=None) -> list[PlantPoint]:
    """Evaluate the perturbation-independent plant indices over the grid."""
    grid = list(grid)

    def job(omega):
        try:
            return plant_point(freq_response(G, omega), omega, chi, tol)
        except PhasecertError as exc:
            raise type(exc)(f"at omega = {omega} rad/s: {exc}") from exc

    nw = _resolve_workers(workers)
    if nw == 1 or len(grid) <= 1:
        return [job(w) for w in grid]
    with ThreadPoolExecutor(max_workers=min(nw, len(grid))) as pool:
        return list(pool.map(job, grid))


def _delta_quantities(Dw, chi: BlockDims):
    Dw = as_square(Dw)
    if not blocks.is_member_B(chi, Dw, tol=1e-7):
        raise StructureViolation("perturbation response violates the block structure")
    if spectral_norm(Dw) == 0.0:
        phi = 0.0
    else:
        phi = phase_index(Dw)
    norm = spectral_norm(Dw)
    try:
        norm_S = spectral_norm(scattering(Dw))
    except SingularScattering:
        norm_S = math.inf
    return phi, norm, norm_S


def _record_from(plant: PlantPoint, phi_d, norm_d, norm_Sd,
                 margins: Margins) -> FrequencyRecord:
    phase_ok = phi_d + plant.psi.value < math.pi - margins.phase
    gain_ok = norm_d * plant.mu.value < 1.0 - margins.gain
    passivity_ok = (math.isfinite(norm_Sd)
                    and plant.R * norm_Sd < 1.0 - margins.gain)
    return FrequencyRecord(
        omega=plant.omega,
        psi_bar_G=plant.psi.value,
        mu_bar_G=plant.mu.value,
        R_G=plant.R,
        phi_Delta=phi_d,
        norm_Delta=norm_d,
        norm_SDelta=norm_Sd,
        phase_ok=bool(phase_ok),
        gain_ok=bool(gain_ok),
        passivity_ok=bool(passivity_ok),
        stage=plant.psi.stage,
        psi_detail=plant.psi,
        mu_detail=plant.mu,
    )


def analyze_frequency(Gw, Dw, chi: BlockDims, margins: Margins = Margins(),
                      omega: float = math.nan, tol: float = 1e-5) -> FrequencyRecord:
    """All per-frequency indices and criterion verdicts for one plant/
    perturbation response pair."""
    plant = plant_point(Gw, omega, chi, tol)
    phi_d, norm_d, norm_Sd = _delta_quantities(Dw, chi)
    return _record_from(plant, phi_d, norm_d, norm_Sd, margins)


def analyze_frequency_bounds(Gw, chi: BlockDims, phi_delta: float,
                             gain_delta: float, margins: Margins = Margins(),
                             omega: float = math.nan,
                             tol: float = 1e-5) -> FrequencyRecord:
    """Variant taking per-frequency perturbation bounds instead of a response
    matrix.  The passivity criterion is unavailable in this mode."""
    plant = plant_point(Gw, omega, chi, tol)
    return _record_from(plant, float(phi_delta), float(gain_delta),
                        math.nan, margins)


def assemble_report(records, enabled_criteria, margins: Margins) -> CertificationReport:
    enabled = tuple(c for c in CRITERIA if c in set(enabled_criteria))
    if not enabled:
        raise ValueError("at least one criterion must be enabled")
    omega_psi = tuple(i for i, r in enumerate(records)
                      if "phase" in enabled and r.phase_ok)
    omega_mu = tuple(i for i, r in enumerate(records)
                     if "gain" in enabled and r.gain_ok)
    omega_pass = tuple(i for i, r in enumerate(records)
                       if "passivity" in enabled and r.passivity_ok)
    covered = set(omega_psi) | set(omega_mu) | set(omega_pass)
    verdict = (VERDICT_CERTIFIED if covered == set(range(len(records)))
               else VERDICT_NOT_CERTIFIED)
    return CertificationReport(
        grid=tuple(r.omega for r in records),
        records=tuple(records),
        omega_psi=omega_psi,
        omega_mu=omega_mu,
        omega_passivity=omega_pass,
        verdict=verdict,
        criteria_used=enabled,
        margins=margins,
    )


def default_grid(lo: float = 1e-2, hi: float = 1e3, points: int = 200,
                 include_zero: bool = True,
                 include_inf: bool = True) -> list[float]:
    """Log-spaced frequency grid plus representatives of omega = 0 and inf."""
    grid = list(np.logspace(math.log10(lo), math.log10(hi), points))
    if include_zero:
        grid = [0.0] + grid
    if include_inf:
        grid = grid + [math.inf]
    return grid


def certify(G: StateSpace, Delta: StateSpace, chi: BlockDims, grid,
            enabled_criteria=("phase", "gain"), margins: Margins = Margins(),
            tol: float = 1e-5, workers=None) -> CertificationReport:
    """Grid certification of the negative-feedback loop of G and Delta.

    Both systems must carry the stable flag; the verdict is CertifiedStable
    iff at every grid point at least one enabled criterion holds.  The grid
    should include 0 and a representative of omega = inf (the feedthrough
    evaluation); the report carries an explicit grid-certified qualifier.
    """
    if not G.stable or not Delta.stable:
        raise ValueError("certification requires both systems flagged stable")
    grid = list(grid)
    if not grid:
        raise ValueError("frequency grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("frequency grid must be strictly ascending")

    plants = plant_frequency_data(G, chi, grid, tol, workers)
    records = []
    for plant in plants:
        try:
            Dw = freq_response(Delta, plant.omega)
            phi_d, norm_d, norm_Sd = _delta_quantities(Dw, chi)
        except PhasecertError as exc:
            raise type(exc)(f"at omega = {plant.omega} rad/s: {exc}") from exc
        records.append(_record_from(plant, phi_d, norm_d, norm_Sd, margins))
    return assemble_report(records, enabled_criteria, margins)


def _phase_interval(M) -> tuple[float, float]:
    """Enclosing [phi_min, phi_max] for the numerical range of M."""
    if spectral_norm(np.asarray(M, dtype=complex)) < _NEARZERO:
        return 0.0, 0.0
    try:
        spec = matrix_phases(M)
        return spec.phi_min, spec.phi_max
    except (NotQuasiSectorial, ZeroMatrix, PhasecertError):
        idx = phase_index(M)
        return -idx, idx


def _sup_eps(M, N) -> float:
    """Largest eps with M - eps*N >= 0 (M Hermitian, N PSD), capped.

    Returns lambda_min(M) when it is negative, as the failure signal.
    """
    lo_M = float(np.linalg.eigvalsh(M)[0])
    if lo_M < 0:
        return lo_M
    if spectral_norm(N) < _NEARZERO:
        return _EPS_CAP
    lo, hi = 0.0, _EPS_CAP
    if np.linalg.eigvalsh(M - hi * N)[0] >= 0:
        return _EPS_CAP
    for _ in range(60):
        mid = (lo + hi) / 2.0
        if np.linalg.eigvalsh(M - mid * N)[0] >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def build_iqc_certificate(omega: float, Gw, Dw, chi: BlockDims,
                          record: FrequencyRecord,
                          branch: str | None = None) -> IqcCertificate:
    """Reconstruct and audit the per-frequency multiplier behind a verdict.

    Phase branch: with the scaling witness D of the plant's phase bound,
    a rotation beta is chosen so that both the scaled plant and the scaled
    perturbation sit in half-plane cones, and the two frequency-domain
    inequalities Re(e^{-j beta} D^{-1} Delta) >= 0 and
    2 Re(e^{j beta} D^{-*} G) >= eps G*G are evaluated directly.

    Gain branch: with the scaling witness P and a norm level between the
    plant bound and the reciprocal perturbation norm, the inequalities
    P - level^2 Delta* P Delta >= 0 and P - level^{-2} G* P G >= eps G*G
    are evaluated.

    ``branch`` forces "phase" or "gain" when both criteria hold at omega.
    Raises CertificateFailure when an inequality fails beyond -1e-8, which
    would indicate an index-computation bug upstream.
    """
    Gw = as_square(Gw)
    Dw = as_square(Dw)
    phase_possible = record.phase_ok and record.psi_detail.witness_D is not None
    if branch is None:
        branch = "phase" if phase_possible else "gain"
    if branch == "phase" and not phase_possible:
        raise ValueError("phase branch requested without a phase verdict")
    if branch == "gain" and not record.gain_ok:
        raise ValueError("gain branch requested without a gain verdict")
    if branch == "phase":
        D = record.psi_detail.witness_D
        Dinv = np.linalg.inv(D)
        GD = Gw @ D
        DiDelta = Dinv @ Dw
        lo1, hi1 = _phase_interval(GD)
        lo2, hi2 = _phase_interval(DiDelta)
        b_lo = max(-math.pi / 2.0 - lo1, hi2 - math.pi / 2.0)
        b_hi = min(math.pi / 2.0 - hi1, lo2 + math.pi / 2.0)
        beta = (b_lo + b_hi) / 2.0
        beta = min(max(beta, -math.pi / 2.0 + 1e-6), math.pi / 2.0 - 1e-6)

        M_delta = np.exp(-1j * beta) * DiDelta
        M_delta = (M_delta + M_delta.conj().T) / 2.0
        fdi_delta = float(np.linalg.eigvalsh(M_delta)[0])

        M_G = np.exp(1j * beta) * (np.linalg.inv(D.conj().T) @ Gw)
        M_G = M_G + M_G.conj().T
        fdi_G = _sup_eps(M_G, Gw.conj().T @ Gw)
        cert = IqcCertificate(omega=omega, kind="PhaseMultiplier",
                              fdi_delta_margin=fdi_delta, fdi_G_margin=fdi_G,
                              D=D, beta=float(beta))
    elif branch == "gain" and record.gain_ok:
        P = record.mu_detail.witness_P
        mu_bar = record.mu_bar_G
        norm_d = record.norm_Delta
        if mu_bar <= 0.0:
            level = 0.0
        elif norm_d <= _NEARZERO:
            level = mu_bar * (1.0 + 1e-6)
        else:
            level = math.sqrt(mu_bar / norm_d)
        M_delta = P - level**2 * (Dw.conj().T @ P @ Dw)
        fdi_delta = float(np.linalg.eigvalsh((M_delta + M_delta.conj().T) / 2.0)[0])
        if level > 0.0:
            M_G = P - (Gw.conj().T @ P @ Gw) / level**2
        else:
            M_G = P
        M_G = (M_G + M_G.conj().T) / 2.0
        fdi_G = _sup_eps(M_G, Gw.conj().T @ Gw)
        cert = IqcCertificate(omega=omega, kind="GainMultiplier",
                              fdi_delta_margin=fdi_delta, fdi_G_margin=fdi_G,
                              D=P, level=float(level))
    else:
        raise ValueError("certificate construction needs phase_ok or gain_ok")

    if cert.fdi_delta_margin < -1e-8 or cert.fdi_G_margin < -1e-8:
        raise CertificateFailure(
            f"FDI margin negative at omega = {omega}: "
            f"delta-side {cert.fdi_delta_margin:.3e}, "
            f"plant-side {cert.fdi_G_margin:.3e}")
    return cert
