"""Structured robustness indices of a complex matrix.

Four quantities with respect to a block structure chi:

* ``psi_upper``  -- LMI-certified upper bound on the structured phase index,
  computed by a two-stage bisection over scaled cone constraints (first with
  a positive definite scaling, then with a rotated one).
* ``psi_lower``  -- optimization-based lower bound: ascent on the largest
  eigenvalue phase of X A X over Hermitian structured scalings X.
* ``mu_upper``   -- the classical scaled-norm upper bound on the structured
  singular value, via a quadratic-in-P reformulation and bisection.
* ``relative_passivity`` -- mu_upper of the scattering transform of A.

plus the first-order eigenvalue derivative used by the ascent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import blocks
from .blocks import BlockDims
from .errors import (IllConditionedPair, NonSimpleEigenvalue,
                     PhasecertError, SingularScattering)
from .linalg import GeneralEigen, as_square, eig_general, spectral_norm
from .lmi import LinearMatrixPencil, feasibility, gevp_bisection
from .phases import matrix_phases, phase_index

KAPPA_MAX = math.tan(math.radians(89.9))
EIG_FLOOR = 1e-12


class PsiStage(enum.Enum):
    POSITIVE_DEFINITE_D = "positive-definite-scaling"
    ROTATED_D = "rotated-scaling"
    VACUOUS = "vacuous"


@dataclass(frozen=True)
class PsiUpperResult:
    value: float
    stage: PsiStage
    witness_D: np.ndarray | None
    kappa: float | None


@dataclass(frozen=True)
class PsiLowerResult:
    value: float
    witness_x: np.ndarray
    witness_eig: complex
    restarts_used: int


class MuResult(NamedTuple):
    value: float
    witness_P: np.ndarray


def _herm(M):
    return (M + M.conj().T) / 2.0


def _skew(M):
    return (M - M.conj().T) / 2.0j


def spectral_phase_bound(A) -> float:
    """Largest absolute eigenvalue angle of A (zero eigenvalues ignored)."""
    A = as_square(A)
    lam = np.linalg.eigvals(A)
    keep = np.abs(lam) > EIG_FLOOR * max(1.0, spectral_norm(A))
    if not np.any(keep):
        return 0.0
    return float(np.max(np.abs(np.angle(lam[keep]))))


def _stage1_system(Ah, basis):
    """Pencils for: D >= t, kappa*Re(Ah D) -+ Im(Ah D) >= t, D Hermitian."""
    E = basis
    d = Ah.shape[0]
    re = [_herm(Ah @ Ei) for Ei in E]
    im = [_skew(Ah @ Ei) for Ei in E]
    zero = np.zeros((d, d), dtype=complex)
    a = [float(np.trace(Ei).real) for Ei in E]

    def system(kappa: float):
        p_pos = LinearMatrixPencil(zero, tuple(E))
        p_m = LinearMatrixPencil(zero, tuple(kappa * r - i for r, i in zip(re, im)))
        p_p = LinearMatrixPencil(zero, tuple(kappa * r + i for r, i in zip(re, im)))
        return feasibility([p_pos, p_m, p_p], (a, float(d)))

    return system


def _stage2_system(Ah, basis):
    """Pencils for: Re(D) >= t, Re(Ah D) >= 0, kappa*Re(D) -+ Im(D) >= t,
    over general structured D = X + jY with X, Y Hermitian structured."""
    E = basis
    k = len(E)
    d = Ah.shape[0]
    zero = np.zeros((d, d), dtype=complex)
    zcoef = [zero] * k
    re_x = [_herm(Ah @ Ei) for Ei in E]     # d/dx of Re(Ah D)
    re_y = [-_skew(Ah @ Ei) for Ei in E]    # d/dy of Re(Ah D) = Re(j Ah E)
    a = [float(np.trace(Ei).real) for Ei in E] + [0.0] * k

    def system(kappa: float):
        p_reD = LinearMatrixPencil(zero, tuple(E) + tuple(zcoef))
        p_reAD = LinearMatrixPencil(zero, tuple(re_x) + tuple(re_y))
        p_m = LinearMatrixPencil(
            zero, tuple(kappa * Ei for Ei in E) + tuple(-Ei for Ei in E))
        p_p = LinearMatrixPencil(
            zero, tuple(kappa * Ei for Ei in E) + tuple(Ei for Ei in E))
        return feasibility([p_reD, p_reAD, p_m, p_p], (a, float(d)))

    return system


def _polish_stage1(Ah, D, fallback):
    """Sharpest value certified by a definite scaling witness: the exact
    phase index of the scaled matrix (the bisected cone angle can carry the
    feasibility margin as excess)."""
    try:
        return min(fallback, phase_index(Ah @ D))
    except PhasecertError:
        return fallback


def _polish_stage2(Ah, D, fallback):
    """Sharpest value certified by a rotated scaling witness.

    Any rotation e^{js} D keeping the phases of A D e^{js} inside the
    closed half-plane cone certifies pi/2 + (phase index of e^{js} D);
    the best rotation centers the scaling's own phases.  Everything is
    evaluated through exact phase arithmetic, so the result is free of
    the LMI feasibility margin.  Returns (value, rotated witness).
    """
    try:
        spec_AD = matrix_phases(Ah @ D)
        spec_D = matrix_phases(D)
    except PhasecertError:
        return fallback, D
    s_lo = -math.pi / 2.0 - spec_AD.phi_min
    s_hi = math.pi / 2.0 - spec_AD.phi_max
    if s_hi < s_lo:
        return fallback, D
    s = min(max(-spec_D.center, s_lo), s_hi)
    phi_D = abs(spec_D.center + s) + spec_D.field_angle / 2.0
    value = math.pi / 2.0 + phi_D
    if value >= fallback:
        return fallback, D
    return value, np.exp(1j * s) * D


def psi_upper(A, chi: BlockDims, tol: float = 1e-5) -> PsiUpperResult:
    """LMI upper bound on the structured phase index of A.

    Stage one searches a Hermitian positive definite structured scaling D
    with the scaled matrix confined to a half-angle arctan(kappa) cone;
    on success the bound is arctan(kappa*).  Stage two allows a rotated
    scaling (Re D > 0) and certifies pi/2 + arctan(kappa*).  When both
    fail the bound is vacuous (pi).  The bisected bound is polished
    against the exact phases of the returned witness.
    """
    A = as_square(A)
    if not blocks.validate(chi, A.shape[0]):
        raise ValueError("structure is not compatible with the matrix dimension")
    scale = spectral_norm(A)
    Ah = A / scale if scale > 0 else A
    basis = blocks.hermitian_basis(chi, blocks.D_CHI)
    E = basis.basis
    k = len(E)

    res1 = gevp_bisection(_stage1_system(Ah, E), KAPPA_MAX, tol)
    if res1.feasible:
        D = blocks.assemble(basis, res1.witness.x)
        value = _polish_stage1(Ah, D, float(math.atan(res1.kappa)))
        return PsiUpperResult(value, PsiStage.POSITIVE_DEFINITE_D, D,
                              float(math.tan(value)))

    res2 = gevp_bisection(_stage2_system(Ah, E), KAPPA_MAX, tol)
    if res2.feasible:
        x = res2.witness.x
        D = blocks.assemble(basis, x[:k]) + 1j * blocks.assemble(basis, x[k:])
        value, D = _polish_stage2(Ah, D,
                                  float(math.pi / 2.0 + math.atan(res2.kappa)))
        return PsiUpperResult(value, PsiStage.ROTATED_D, D,
                              float(math.tan(value - math.pi / 2.0)))

    return PsiUpperResult(float(math.pi), PsiStage.VACUOUS, None, None)


def mu_upper(A, chi: BlockDims, tol: float = 1e-6) -> MuResult:
    """Scaled-norm upper bound on the structured singular value of A.

    Bisects the least gamma admitting a Hermitian structured P > 0 with
    gamma^2 P - A* P A >= 0 (P plays the role of D*D, and the structured
    scaling set is closed under that square).  The returned value never
    exceeds ||A||, and the witness satisfies
    || P^(1/2) A P^(-1/2) || <= value + 10*tol.
    """
    A = as_square(A)
    if not blocks.validate(chi, A.shape[0]):
        raise ValueError("structure is not compatible with the matrix dimension")
    n = A.shape[0]
    scale = spectral_norm(A)
    if scale == 0.0:
        return MuResult(0.0, np.eye(n, dtype=complex))
    Ah = A / scale
    E = blocks.hermitian_basis(chi, blocks.D_CHI).basis
    a = [float(np.trace(Ei).real) for Ei in E]
    zero = np.zeros((n, n), dtype=complex)

    def system(gamma: float):
        p_pos = LinearMatrixPencil(zero, tuple(E))
        p_con = LinearMatrixPencil(
            zero,
            tuple(gamma**2 * Ei - Ah.conj().T @ Ei @ Ah for Ei in E))
        return feasibility([p_pos, p_con], (a, float(n)))

    # mu_upper(Ah) <= 1, so a slightly inflated unit gamma is feasible.
    hi = 1.0 + max(10.0 * tol / scale, 1e-7)
    res = gevp_bisection(system, hi, tol / scale)
    if not res.feasible:  # pragma: no cover - hi is feasible by construction
        return MuResult(scale, np.eye(n, dtype=complex))
    value = min(float(res.kappa), 1.0) * scale
    P = blocks.assemble(blocks.hermitian_basis(chi, blocks.D_CHI), res.witness.x)
    return MuResult(value, P)


def scaled_norm(A, P) -> float:
    """||P^(1/2) A P^(-1/2)|| for Hermitian positive definite P."""
    w, V = np.linalg.eigh(_herm(np.asarray(P, dtype=complex)))
    if np.min(w) <= 0:
        raise ValueError("P must be positive definite")
    R = V @ np.diag(np.sqrt(w)) @ V.conj().T
    Rinv = V @ np.diag(1.0 / np.sqrt(w)) @ V.conj().T
    return spectral_norm(R @ np.asarray(A, dtype=complex) @ Rinv)


def relative_passivity(M, chi: BlockDims, tol: float = 1e-6) -> float:
    """mu_upper of the scattering transform (I - M)(I + M)^{-1}."""
    M = as_square(M)
    n = M.shape[0]
    IM = np.eye(n) + M
    if np.linalg.cond(IM) > 1e12:
        raise SingularScattering("I + M is numerically singular")
    S = (np.eye(n) - M) @ np.linalg.inv(IM)
    return mu_upper(S, chi, tol).value


def eig_derivative(eig: GeneralEigen, index: int, dA) -> complex:
    """First-order change of a simple eigenvalue under a perturbation dA.

    Uses the left/right eigenvector pair of ``eig`` at ``index``:
    d(lambda) = v* dA u / (v* u).
    """
    if not eig.simple[index]:
        raise NonSimpleEigenvalue(
            "eigenvalue derivative requires a simple eigenvalue")
    u = eig.right_vectors[:, index]
    v = eig.left_vectors[:, index]
    denom = complex(v.conj() @ u)
    if abs(denom) < 1e-10 * np.linalg.norm(u) * np.linalg.norm(v):
        raise IllConditionedPair("left/right eigenvector pair is nearly defective")
    dA = np.asarray(dA, dtype=complex)
    return complex(v.conj() @ dA @ u) / denom


def _worst_phase_eig(lams, floor):
    """Index of the eigenvalue with the largest absolute angle.

    Ties within 1e-10 rad prefer larger modulus, then lexicographic
    (Re, Im).  Returns None when every eigenvalue is negligible.
    """
    keep = np.abs(lams) > floor
    if not np.any(keep):
        return None
    angs = np.abs(np.angle(lams))
    angs[~keep] = -np.inf
    best = np.max(angs)
    cand = np.flatnonzero(angs >= best - 1e-10)
    order = sorted(cand, key=lambda i: (-np.abs(lams[i]), lams[i].real, lams[i].imag))
    return int(order[0])


def _objective(A, basis, x):
    X = blocks.assemble(basis, x)
    At = X @ A @ X
    lams = np.linalg.eigvals(At)
    floor = EIG_FLOOR * max(1.0, spectral_norm(At))
    i = _worst_phase_eig(lams, floor)
    if i is None:
        return -math.inf, None
    return float(abs(np.angle(lams[i]))), complex(lams[i])


def _gradient(A, basis, x):
    """Ascent direction of |angle(lambda_star)| in the scaling coordinates."""
    X = blocks.assemble(basis, x)
    At = X @ A @ X
    eig = eig_general(At)
    floor = EIG_FLOOR * max(1.0, spectral_norm(At))
    i = _worst_phase_eig(eig.eigenvalues, floor)
    if i is None:
        return None, None
    lam = eig.eigenvalues[i]
    AX = A @ X
    XA = X @ A
    s = math.copysign(1.0, np.angle(lam)) if np.angle(lam) != 0 else 0.0
    g_re = -s * lam.imag / abs(lam) ** 2
    g_im = s * lam.real / abs(lam) ** 2
    grad = np.zeros(len(basis.basis))
    for idx, Ei in enumerate(basis.basis):
        d_lam = eig_derivative(eig, i, Ei @ AX + XA @ Ei)
        grad[idx] = g_re * d_lam.real + g_im * d_lam.imag
    return grad, complex(lam)


def psi_lower(A, chi: BlockDims, restarts: int = 8, seed: int = 0,
              max_iters: int = 200) -> PsiLowerResult:
    """Lower bound on the structured phase index by eigenvalue-phase ascent.

    Maximizes |angle(lambda_star(X A X))| over Hermitian structured X.
    The identity scaling is always the first start (its value is the
    spectral phase bound, so the result can never fall below it); the
    remaining starts are random unit coordinate vectors.  Non-simple
    worst eigenvalues trigger a small random perturbation of the iterate;
    persistent failure falls back to the spectral bound.
    """
    A = as_square(A)
    if not blocks.validate(chi, A.shape[0]):
        raise ValueError("structure is not compatible with the matrix dimension")
    if restarts < 1:
        raise ValueError("need at least one start")
    basis = blocks.hermitian_basis(chi, blocks.B_CHI)
    k = len(basis.basis)
    rng = np.random.default_rng(seed)

    x_id = np.array([float(np.trace(Ei).real) / float(np.trace(Ei @ Ei).real)
                     for Ei in basis.basis])

    best_val = -math.inf
    best_x = x_id.copy()
    best_lam = complex(np.nan)

    for start in range(restarts):
        x = x_id.copy() if start == 0 else rng.standard_normal(k)
        nx = np.linalg.norm(x)
        if nx == 0:
            continue
        x = x / nx
        f, lam = _objective(A, basis, x)
        if lam is None:
            continue
        for _ in range(max_iters):
            grad = None
            for _retry in range(5):
                try:
                    grad, _ = _gradient(A, basis, x)
                    break
                except (NonSimpleEigenvalue, IllConditionedPair):
                    x = x + 1e-8 * rng.standard_normal(k)
                    x = x / np.linalg.norm(x)
                    f, lam = _objective(A, basis, x)
            if grad is None:
                break
            gn = np.linalg.norm(grad)
            if gn < 1e-10:
                break
            alpha = 0.5
            improved = False
            while alpha > 1e-10:
                x_n = x + alpha * grad
                x_n = x_n / np.linalg.norm(x_n)
                f_n, lam_n = _objective(A, basis, x_n)
                if f_n > f + 1e-4 * alpha * gn * gn:
                    x, f, lam = x_n, f_n, lam_n
                    improved = True
                    break
                alpha *= 0.5
            if not improved:
                break
        if f > best_val:
            best_val, best_x, best_lam = f, x.copy(), lam

    if not math.isfinite(best_val):
        return PsiLowerResult(spectral_phase_bound(A), x_id, complex(np.nan),
                              restarts)
    return PsiLowerResult(float(best_val), best_x, best_lam, restarts)
