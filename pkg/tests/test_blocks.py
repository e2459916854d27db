import numpy as np
import pytest

from phasecert.blocks import (B_CHI, D_CHI, BlockDims, assemble,
                              commutation_check, hermitian_basis, is_member_B,
                              is_member_D, validate)
from phasecert.errors import DimensionMismatch
from phasecert.linalg import spectral_norm

from conftest import random_member_B, random_member_D, random_structure


def test_validate():
    assert validate(BlockDims((), (1, 1)), 2)
    assert not validate(BlockDims((2,), ()), 3)
    assert validate(BlockDims((1,), (2,)), 3)


def test_blockdims_rejects_empty():
    with pytest.raises(ValueError):
        BlockDims((), ())
    with pytest.raises(ValueError):
        BlockDims((0,), (1,))


def test_is_member_B_examples():
    chi = BlockDims((), (1, 1))
    assert is_member_B(chi, np.diag([0.5, 0.25]))
    assert not is_member_B(chi, np.array([[1.0, 1.0], [0.0, 1.0]]))
    chi2 = BlockDims((2,), ())
    assert is_member_B(chi2, (0.3 - 2.0j) * np.eye(2))


def test_is_member_B_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        is_member_B(BlockDims((), (1, 1)), np.eye(3))


def test_is_member_D_examples():
    chi = BlockDims((), (1, 1))
    assert is_member_D(chi, np.diag([2.0, 3.0]))
    assert not is_member_D(chi, np.array([[1.0, 0.5], [0.5, 1.0]]))
    chi2 = BlockDims((2,), ())
    assert is_member_D(chi2, np.array([[1.0, 2.0 + 1j], [2.0 - 1j, 0.5]]))


def test_hermitian_basis_dimensions(rng):
    for _ in range(20):
        chi = random_structure(rng)
        s, dims_n = len(chi.scalar_dims), chi.scalar_dims
        b, dims_m = len(chi.full_dims), chi.full_dims
        basis_B = hermitian_basis(chi, B_CHI).basis
        basis_D = hermitian_basis(chi, D_CHI).basis
        assert len(basis_B) == s + sum(m * m for m in dims_m)
        assert len(basis_D) == sum(n * n for n in dims_n) + b
        for E in basis_B + basis_D:
            np.testing.assert_allclose(E, E.conj().T)
        # linear independence via the Gram matrix of the flattened basis
        for basis in (basis_B, basis_D):
            V = np.stack([E.flatten() for E in basis])
            gram = V.conj() @ V.T
            assert np.linalg.matrix_rank(gram) == len(basis)


def test_hermitian_basis_examples():
    chi = BlockDims((), (1, 1))
    basis = hermitian_basis(chi, D_CHI).basis
    assert len(basis) == 2
    np.testing.assert_allclose(basis[0], np.diag([1.0, 0.0]))
    np.testing.assert_allclose(basis[1], np.diag([0.0, 1.0]))
    assert len(hermitian_basis(BlockDims((2,), ()), D_CHI).basis) == 4
    assert len(hermitian_basis(BlockDims((2,), ()), B_CHI).basis) == 1


def test_basis_members_live_in_their_sets(rng):
    for _ in range(10):
        chi = random_structure(rng)
        for E in hermitian_basis(chi, B_CHI).basis:
            assert is_member_B(chi, E, tol=1e-12)
        for E in hermitian_basis(chi, D_CHI).basis:
            assert is_member_D(chi, E, tol=1e-12)


def test_assemble_roundtrip(rng):
    chi = BlockDims((1,), (2,))
    basis = hermitian_basis(chi, D_CHI)
    x = rng.standard_normal(len(basis.basis))
    M = assemble(basis, x)
    np.testing.assert_allclose(M, M.conj().T)
    assert is_member_D(chi, M, tol=1e-12)


def test_commutation_property(rng):
    ok = 0
    for _ in range(500):
        chi = random_structure(rng)
        B, _ = random_member_B(rng, chi, phases=(-2.0, 1.0))
        D = random_member_D(rng, chi)
        ok += commutation_check(chi, B, D)
    assert ok == 500


def test_commutation_counterexample(rng):
    chi = BlockDims((), (1, 1))
    B, _ = random_member_B(rng, chi, phases=(-1.0, 1.0))
    D_bad = np.array([[1.0, 0.7], [0.0, 2.0]])  # off-pattern entry
    assert not commutation_check(chi, B, D_bad)


def test_scalar_block_commutes_with_full_D(rng):
    chi = BlockDims((3,), ())
    B = (1.3 - 0.4j) * np.eye(3)
    D = random_member_D(rng, chi)
    assert commutation_check(chi, B, D)


def test_D_closure_properties(rng):
    for _ in range(100):
        chi = random_structure(rng)
        D1 = random_member_D(rng, chi)
        D2 = random_member_D(rng, chi)
        assert is_member_D(chi, D1 @ D2, tol=1e-10)
        assert is_member_D(chi, D1.conj().T, tol=1e-10)
        if np.linalg.cond(D1) < 1e8:
            assert is_member_D(chi, np.linalg.inv(D1), tol=1e-8)


def test_B_hermitian_square_stays_in_B(rng):
    for _ in range(100):
        chi = random_structure(rng)
        X = np.zeros((chi.n, chi.n), dtype=complex)
        basis = hermitian_basis(chi, B_CHI)
        X = assemble(basis, rng.standard_normal(len(basis.basis)))
        assert is_member_B(chi, X @ X, tol=1e-10)


def test_BD_product_block_pattern(rng):
    """B D is block diagonal with the B pattern (scalar blocks scaled by the
    D full block, full blocks scaled by the D scalar)."""
    for _ in range(50):
        chi = random_structure(rng)
        B, _ = random_member_B(rng, chi, phases=(-1.0, 1.0))
        D = random_member_D(rng, chi)
        P = B @ D
        off = P.copy()
        for _kind, sl in chi.block_slices():
            off[sl, sl] = 0.0
        assert spectral_norm(off) <= 1e-10 * max(1.0, spectral_norm(P))
