"""Block-diagonal perturbation structure and its commuting scaling set.

A structure is a pair of dimension tuples (scalar blocks, full blocks).
The perturbation set contains block-diagonal matrices with b*I on the
scalar-block positions and arbitrary square blocks on the full positions;
the scaling set is the dual pattern (full blocks where the perturbation
has scalar blocks and d*I where it has full blocks), so the two sets
commute elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .linalg import as_square, spectral_norm

B_CHI = "B_chi"
D_CHI = "D_chi"


@dataclass(frozen=True)
class BlockDims:
    """Block dimension tuples: scalar-block sizes and full-block sizes."""

    scalar_dims: tuple[int, ...]
    full_dims: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "scalar_dims", tuple(int(v) for v in self.scalar_dims))
        object.__setattr__(self, "full_dims", tuple(int(v) for v in self.full_dims))
        if any(v <= 0 for v in self.scalar_dims + self.full_dims):
            raise ValueError("block dimensions must be positive")
        if len(self.scalar_dims) + len(self.full_dims) == 0:
            raise ValueError("structure needs at least one block")

    @property
    def n(self) -> int:
        return sum(self.scalar_dims) + sum(self.full_dims)

    def block_slices(self) -> list[tuple[str, slice]]:
        """(kind, slice) per block in order; kind is 'scalar' or 'full'."""
        out = []
        off = 0
        for d in self.scalar_dims:
            out.append(("scalar", slice(off, off + d)))
            off += d
        for d in self.full_dims:
            out.append(("full", slice(off, off + d)))
            off += d
        return out

    def to_dict(self) -> dict:
        return {"scalar_dims": list(self.scalar_dims), "full_dims": list(self.full_dims)}

    @staticmethod
    def from_dict(doc: dict) -> "BlockDims":
        return BlockDims(tuple(doc.get("scalar_dims", ())), tuple(doc.get("full_dims", ())))


@dataclass(frozen=True)
class StructuredBasis:
    """Hermitian basis for one of the two structured sets."""

    basis: tuple[np.ndarray, ...]
    target: str


def validate(chi: BlockDims, n: int) -> bool:
    """True iff the structure is compatible with an n x n plant."""
    return chi.n == int(n)


def _check_dim(chi: BlockDims, M: np.ndarray):
    if M.shape[0] != chi.n:
        raise DimensionMismatch(
            f"matrix dimension {M.shape[0]} does not match structure total {chi.n}")


def is_member_B(chi: BlockDims, M, tol: float = 1e-9) -> bool:
    """Membership in the perturbation pattern: scalar blocks b*I, full blocks free."""
    M = as_square(M)
    _check_dim(chi, M)
    thresh = tol * max(spectral_norm(M), 1e-300)
    pattern = np.zeros_like(M)
    for kind, sl in chi.block_slices():
        blk = M[sl, sl]
        if kind == "scalar":
            b = np.trace(blk) / blk.shape[0]
            pattern[sl, sl] = b * np.eye(blk.shape[0])
        else:
            pattern[sl, sl] = blk
    return spectral_norm(M - pattern) <= thresh


def is_member_D(chi: BlockDims, M, tol: float = 1e-9) -> bool:
    """Membership in the dual scaling pattern: full blocks on scalar positions,
    d*I on full positions."""
    M = as_square(M)
    _check_dim(chi, M)
    thresh = tol * max(spectral_norm(M), 1e-300)
    pattern = np.zeros_like(M)
    for kind, sl in chi.block_slices():
        blk = M[sl, sl]
        if kind == "scalar":
            pattern[sl, sl] = blk
        else:
            d = np.trace(blk) / blk.shape[0]
            pattern[sl, sl] = d * np.eye(blk.shape[0])
    return spectral_norm(M - pattern) <= thresh


def _hermitian_block_basis(m: int) -> list[np.ndarray]:
    """Canonical Hermitian basis of an m x m block: diagonal units, then
    real-symmetric pairs, then imaginary-antisymmetric pairs, row-major."""
    out = []
    for i in range(m):
        E = np.zeros((m, m), dtype=complex)
        E[i, i] = 1.0
        out.append(E)
    for i in range(m):
        for k in range(i + 1, m):
            E = np.zeros((m, m), dtype=complex)
            E[i, k] = 1.0
            E[k, i] = 1.0
            out.append(E)
    for i in range(m):
        for k in range(i + 1, m):
            E = np.zeros((m, m), dtype=complex)
            E[i, k] = 1.0j
            E[k, i] = -1.0j
            out.append(E)
    return out


def hermitian_basis(chi: BlockDims, target: str) -> StructuredBasis:
    """Basis of the Hermitian members of the chosen structured set.

    Ordering is fixed (scalar-position blocks first, then full-position
    blocks) so LMI variable indexing is reproducible across runs.
    """
    if target not in (B_CHI, D_CHI):
        raise ValueError(f"unknown target set {target!r}")
    n = chi.n
    basis: list[np.ndarray] = []
    for kind, sl in chi.block_slices():
        m = sl.stop - sl.start
        # In B_chi the scalar positions carry b*I (Hermitian iff b real) and
        # full positions are free; in D_chi the roles are swapped.
        scalar_like = (kind == "scalar") == (target == B_CHI)
        if scalar_like:
            E = np.zeros((n, n), dtype=complex)
            E[sl, sl] = np.eye(m)
            basis.append(E)
        else:
            for blk in _hermitian_block_basis(m):
                E = np.zeros((n, n), dtype=complex)
                E[sl, sl] = blk
                basis.append(E)
    return StructuredBasis(basis=tuple(basis), target=target)


def assemble(basis: StructuredBasis, x) -> np.ndarray:
    """Linear combination sum_i x[i] * basis[i]."""
    x = np.asarray(x, dtype=float)
    if len(x) != len(basis.basis):
        raise ValueError("coordinate vector length does not match basis size")
    n = basis.basis[0].shape[0]
    M = np.zeros((n, n), dtype=complex)
    for xi, E in zip(x, basis.basis):
        M += xi * E
    return M


def commutation_check(chi: BlockDims, B, D, tol: float = 1e-9) -> bool:
    """True iff ||DB - BD|| <= tol * ||B|| * ||D||."""
    B = as_square(B)
    D = as_square(D)
    _check_dim(chi, B)
    _check_dim(chi, D)
    bound = tol * max(spectral_norm(B) * spectral_norm(D), 1e-300)
    return spectral_norm(D @ B - B @ D) <= bound
