"""Numerical-range geometry and matrix phases.

The phases of a rotated-positive-real matrix are recovered exactly from a
Hermitian-definite pencil: if A = T* diag(e^{j phi_i}) T then
Re(A) = T* diag(cos phi) T and Im(A) = T* diag(sin phi) T, so the
generalized eigenvalues of (Im, Re) are tan(phi_i) whenever Re(A) > 0.
A one-dimensional support search finds the rotation that makes the real
part positive (semi)definite, classifies sectoriality from the achieved
margin, and deflates a normal kernel when the optimum sits on the boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRotation, NotQuasiSectorial, ZeroMatrix
from .linalg import (eig_general, gevp_hermitian_definite, hermitian_parts,
                     spectral_norm)

SUPPORT_GRID_POINTS = 720
CLASSIFY_RTOL = 1e-8
KERNEL_CUTOFF_RTOL = 1e-8
KERNEL_RESIDUAL_RTOL = 1e-7


class Sectoriality(enum.Enum):
    SECTORIAL = "sectorial"
    QUASI_SECTORIAL = "quasi-sectorial"
    SEMI_SECTORIAL = "semi-sectorial"
    NON_SEMI_SECTORIAL = "non-semi-sectorial"

    @property
    def is_sectorial(self) -> bool:
        return self is Sectoriality.SECTORIAL

    @property
    def is_quasi_sectorial(self) -> bool:
        return self in (Sectoriality.SECTORIAL, Sectoriality.QUASI_SECTORIAL)

    @property
    def is_semi_sectorial(self) -> bool:
        return self is not Sectoriality.NON_SEMI_SECTORIAL


@dataclass(frozen=True)
class PhaseSpectrum:
    """Phases of a (quasi-)sectorial matrix, descending, plus derived angles."""

    sectoriality: Sectoriality
    phases: np.ndarray
    center: float
    field_angle: float
    phase_index: float
    rank_deficiency: int

    @property
    def phi_max(self) -> float:
        return float(self.phases[0])

    @property
    def phi_min(self) -> float:
        return float(self.phases[-1])


def support_min(A, theta: float) -> float:
    """Smallest eigenvalue of Re(e^{-j theta} A).

    Strictly positive iff the numerical range of A lies in the open
    half-plane with inward normal direction theta.
    """
    H, K = hermitian_parts(A)
    M = math.cos(theta) * H + math.sin(theta) * K
    return float(np.linalg.eigvalsh(M)[0])


def _support_grid(H, K, thetas):
    M = (np.cos(thetas)[:, None, None] * H[None, :, :]
         + np.sin(thetas)[:, None, None] * K[None, :, :])
    return np.linalg.eigvalsh(M)[:, 0]


def _golden_max(f, lo, hi, tol=1e-12):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


@dataclass(frozen=True)
class _SupportAnalysis:
    sectoriality: Sectoriality
    theta_star: float        # rotation used for decomposition (cluster midpoint)
    g_star: float            # achieved support maximum
    theta_ray: float         # maximizer of smallest |theta| (semi-sectorial ray)
    norm: float


def _analyze_support(A) -> _SupportAnalysis:
    H, K = hermitian_parts(A)
    n = H.shape[0]
    scale = spectral_norm(np.asarray(A, dtype=complex))
    if scale == 0.0:
        raise ZeroMatrix("support analysis of the zero matrix")

    N = SUPPORT_GRID_POINTS
    thetas = -np.pi + (2.0 * np.pi) * (np.arange(N) + 1) / N  # (-pi, pi]
    g = _support_grid(H, K, thetas)
    step = 2.0 * np.pi / N

    def gfun(t):
        M = math.cos(t) * H + math.sin(t) * K
        return float(np.linalg.eigvalsh(M)[0])

    # Cluster near-maximal grid points circularly; each cluster is either an
    # isolated peak or a plateau arc (the normal cone of a boundary point).
    gmax = float(np.max(g))
    band = max(1e-10 * scale, 1e-14)
    sel = np.flatnonzero(g >= gmax - band)
    clusters = []
    current = [int(sel[0])]
    for idx in sel[1:]:
        if idx == current[-1] + 1:
            current.append(int(idx))
        else:
            clusters.append(current)
            current = [int(idx)]
    clusters.append(current)
    if len(clusters) > 1 and clusters[0][0] == 0 and clusters[-1][-1] == N - 1:
        clusters[0] = clusters.pop() + clusters[0]

    refined = []  # (theta_peak, g_peak, theta_mid, width)
    for cl in clusters:
        k0 = cl[0]
        # Unwrapped angles for a possibly wrapping cluster.
        angs = [thetas[k0] + step * i for i in range(len(cl))]
        best_local = max(range(len(cl)), key=lambda i: g[cl[i]])
        t_peak, g_peak = _golden_max(
            gfun, angs[best_local] - step, angs[best_local] + step)
        t_mid = (angs[0] + angs[-1]) / 2.0
        refined.append((t_peak, g_peak, t_mid, len(cl)))

    g_star = max(r[1] for r in refined)
    margin = CLASSIFY_RTOL * scale

    def wrap(t):
        t = math.remainder(t, 2.0 * math.pi)
        if t <= -math.pi:
            t += 2.0 * math.pi
        return t

    if g_star > margin:
        best = max(refined, key=lambda r: r[1])
        theta = wrap(best[0])
        return _SupportAnalysis(Sectoriality.SECTORIAL, theta, g_star, theta, scale)
    if g_star < -margin:
        best = max(refined, key=lambda r: r[1])
        theta = wrap(best[0])
        return _SupportAnalysis(
            Sectoriality.NON_SEMI_SECTORIAL, theta, g_star, theta, scale)

    # Boundary: zero sits on the boundary of the numerical range.  Decide
    # quasi vs semi by deflating the kernel at the widest support plateau.
    widest = max(refined, key=lambda r: r[3])
    theta_defl = wrap(widest[2] if widest[3] > 1 else widest[0])
    reps = [wrap(r[2] if r[3] > 1 else r[0]) for r in refined]
    theta_ray = min(reps, key=lambda t: (abs(t), -t))

    cls = Sectoriality.SEMI_SECTORIAL
    parts = _deflate(A, H, K, theta_defl, scale)
    if parts is not None:
        _, Hd, _ = parts
        if Hd.shape[0] == 0 or np.min(np.linalg.eigvalsh(Hd)) > margin:
            # After removing the normal kernel the rest is strictly rotated
            # positive definite: zero was a sharp point.
            cls = Sectoriality.QUASI_SECTORIAL
    return _SupportAnalysis(cls, theta_defl, g_star, theta_ray, scale)


def _deflate(A, H, K, theta, scale):
    """Split off the near-null directions of Re(e^{-j theta} A).

    Returns (A_rot_deflated, Re_deflated, n_null), or None when the null
    directions are not an actual (normal) kernel of A.
    """
    A = np.asarray(A, dtype=complex)
    Hr = math.cos(theta) * H + math.sin(theta) * K
    w, V = np.linalg.eigh(Hr)
    null_mask = w <= KERNEL_CUTOFF_RTOL * scale
    if not np.any(null_mask):
        R = A * np.exp(-1j * theta)
        return R, (R + R.conj().T) / 2.0, 0
    U0 = V[:, null_mask]
    if spectral_norm(A @ U0) > KERNEL_RESIDUAL_RTOL * scale:
        return None
    U1 = V[:, ~null_mask]
    R = np.exp(-1j * theta) * (U1.conj().T @ A @ U1)
    return R, (R + R.conj().T) / 2.0, int(np.sum(null_mask))


def classify_sectoriality(A, tol: float = CLASSIFY_RTOL) -> Sectoriality:
    """Classify A by its field angle.

    Sectorial requires the support maximum to clear tol * ||A||;
    non-semi-sectorial requires it below -tol * ||A||; the boundary band is
    split into quasi-sectorial (zero is a normal eigenvalue at a sharp
    point) and semi-sectorial.
    """
    return _analyze_support(np.asarray(A, dtype=complex)).sectoriality


def matrix_phases(A, tol: float = CLASSIFY_RTOL) -> PhaseSpectrum:
    """Phases of a sectorial or quasi-sectorial matrix, descending.

    Semi-sectorial matrices with field angle pi are classified but refused
    here (NotQuasiSectorial); a rotation failing to produce a positive
    definite real part raises DegenerateRotation.
    """
    A = np.asarray(A, dtype=complex)
    info = _analyze_support(A)
    if not info.sectoriality.is_quasi_sectorial:
        raise NotQuasiSectorial(
            f"matrix is {info.sectoriality.value}; phases are undefined here")

    H, K = hermitian_parts(A)
    parts = _deflate(A, H, K, info.theta_star, info.norm)
    if parts is None:
        raise NotQuasiSectorial(
            "support boundary directions are not a normal kernel of A")
    R, Hd, n_null = parts
    m = Hd.shape[0]
    if m == 0:
        raise DegenerateRotation("no directions left after kernel deflation")
    if np.min(np.linalg.eigvalsh(Hd)) <= 0.0:
        raise DegenerateRotation(
            "no rotation achieves a positive definite real part with margin")

    Kd = (R - R.conj().T) / 2.0j
    lam = gevp_hermitian_definite(Kd, Hd)
    phases = np.sort(info.theta_star + np.arctan(lam))[::-1]

    center = (phases[0] + phases[-1]) / 2.0
    if center > np.pi:
        phases = phases - 2.0 * np.pi
    elif center <= -np.pi:
        phases = phases + 2.0 * np.pi
    center = (phases[0] + phases[-1]) / 2.0
    field_angle = float(phases[0] - phases[-1])
    idx = float(min(np.pi, max(abs(phases[0]), abs(phases[-1]))))
    return PhaseSpectrum(
        sectoriality=info.sectoriality,
        phases=phases,
        center=float(center),
        field_angle=field_angle,
        phase_index=idx,
        rank_deficiency=n_null,
    )


def phase_index(A, tol: float = CLASSIFY_RTOL) -> float:
    """Supremum of |angle(z)| over the numerical range of A (minus zero).

    Computed from the phase spectrum when that exists; for semi-sectorial
    matrices from the supporting rays; pi when the negative real axis meets
    the angular numerical range or A is non-semi-sectorial.
    """
    A = np.asarray(A, dtype=complex)
    if spectral_norm(A) == 0.0:
        return 0.0
    info = _analyze_support(A)
    if info.sectoriality.is_quasi_sectorial:
        return matrix_phases(A, tol).phase_index
    if info.sectoriality is Sectoriality.SEMI_SECTORIAL:
        # The angular range is the half-plane cone normal to the surviving
        # support direction; its extreme rays sit at theta_ray +- pi/2.
        return float(min(np.pi, abs(info.theta_ray) + np.pi / 2.0))
    return float(np.pi)


def phase_bound_lmi_check(A, kappa: float, tol: float = 1e-9) -> bool:
    """Check kappa*Re(A) >= +-Im(A) up to a tol * ||A|| slack.

    When true, A is quasi-sectorial with phase index at most arctan(kappa).
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    H, K = hermitian_parts(A)
    slack = tol * max(spectral_norm(np.asarray(A, dtype=complex)), 1e-300)
    lo1 = np.linalg.eigvalsh(kappa * H - K)[0]
    lo2 = np.linalg.eigvalsh(kappa * H + K)[0]
    return bool(lo1 >= -slack and lo2 >= -slack)


def eig_phase_bound_holds(A, B, tol: float = 1e-7) -> bool:
    """Test oracle: every eigenvalue angle of AB lies in the summed phase
    interval of A and B, modulo 2 pi."""
    pa = matrix_phases(A)
    pb = matrix_phases(B)
    lo = pa.phi_min + pb.phi_min
    hi = pa.phi_max + pb.phi_max
    mid = (lo + hi) / 2.0
    half = (hi - lo) / 2.0
    eig = eig_general(np.asarray(A, dtype=complex) @ np.asarray(B, dtype=complex))
    for lam in eig.eigenvalues:
        if abs(lam) == 0.0:
            continue
        d = math.remainder(np.angle(lam) - mid, 2.0 * math.pi)
        if abs(d) > half + tol:
            return False
    return True
