"""Dense complex matrix primitives: Hermitian splits and eigendecompositions.

All routines operate on square complex ndarrays and are pure functions.
Target problem sizes are small (n <= 16), so everything is dense O(n^3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConvergenceFailure, NotDefinite, NotHermitian

DEFAULT_TOL = 1e-9

# Eigenvalues closer than this (relative to ||A||) are treated as a cluster
# and flagged non-simple; the eigenvalue-derivative machinery refuses them.
SIMPLE_GAP_RTOL = 1e-8


def as_square(A) -> np.ndarray:
    """Coerce to a square complex ndarray, validating shape and finiteness."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def hermitian_parts(A) -> tuple[np.ndarray, np.ndarray]:
    """Split A into Hermitian parts H, K with A = H + jK.

    H = (A + A*)/2 and K = (A - A*)/2j are both Hermitian.
    """
    A = as_square(A)
    H = (A + A.conj().T) / 2.0
    K = (A - A.conj().T) / 2.0j
    return H, K


def spectral_norm(A) -> float:
    """Largest singular value of A."""
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class GeneralEigen:
    """Two-sided eigendecomposition of a general square matrix.

    Column i of ``right_vectors``/``left_vectors`` holds the right/left
    eigenvector of ``eigenvalues[i]``; for simple eigenvalues the pair is
    normalized so that v* u is real and positive.  ``simple[i]`` is False
    when eigenvalue i sits in a cluster of relative width below
    ``SIMPLE_GAP_RTOL`` (defective or nearly so).
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    simple: np.ndarray


def eig_hermitian(H, tol: float = DEFAULT_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix.

    Raises NotHermitian if ||H - H*|| exceeds tol * ||H||.
    """
    H = as_square(H)
    scale = spectral_norm(H)
    if spectral_norm(H - H.conj().T) > max(tol * scale, 10 * np.finfo(float).eps):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, V = np.linalg.eigh((H + H.conj().T) / 2.0)
    return HermitianEigen(eigenvalues=w, eigenvectors=V)


def eig_general(A, tol: float = DEFAULT_TOL) -> GeneralEigen:
    """Spectrum of A with right and left eigenvectors.

    Left vectors satisfy v* A = lambda v*.  Clustered eigenvalues
    (gap < SIMPLE_GAP_RTOL * ||A||) are flagged non-simple.
    """
    A = as_square(A)
    try:
        w, vl, vr = scipy.linalg.eig(A, left=True, right=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceFailure(str(exc)) from exc

    n = len(w)
    scale = max(spectral_norm(A), np.finfo(float).eps)
    simple = np.ones(n, dtype=bool)
    for i in range(n):
        gaps = np.abs(w - w[i])
        gaps[i] = np.inf
        if np.min(gaps) < SIMPLE_GAP_RTOL * scale:
            simple[i] = False

    vr = vr / np.linalg.norm(vr, axis=0)
    vl = vl / np.linalg.norm(vl, axis=0)
    # Rotate left vectors so v* u is real positive where that is meaningful.
    for i in range(n):
        ip = vl[:, i].conj() @ vr[:, i]
        if abs(ip) > 0:
            vl[:, i] = vl[:, i] * (ip / abs(ip))
    return GeneralEigen(eigenvalues=w, right_vectors=vr, left_vectors=vl, simple=simple)


def gevp_hermitian_definite(M, P, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Real eigenvalues of the Hermitian-definite pencil M x = lambda P x.

    P must be Hermitian positive definite with margin tol * ||P||;
    equivalent to the eigenvalues of P^{-1/2} M P^{-1/2}, ascending.
    """
    M = as_square(M)
    P = as_square(P)
    if M.shape != P.shape:
        raise ValueError("pencil matrices must share one dimension")
    scaleP = spectral_norm(P)
    if spectral_norm(P - P.conj().T) > max(tol * scaleP, 10 * np.finfo(float).eps):
        raise NotHermitian("P is not Hermitian within tolerance")
    wP = np.linalg.eigvalsh((P + P.conj().T) / 2.0)
    if wP[0] < tol * scaleP:
        raise NotDefinite("P is not positive definite with the required margin")
    w = scipy.linalg.eigh((M + M.conj().T) / 2.0, (P + P.conj().T) / 2.0,
                          eigvals_only=True)
    return np.asarray(w, dtype=float)
