import numpy as np
import pytest

from phasecert.errors import NotDefinite, NotHermitian
from phasecert.linalg import (eig_general, eig_hermitian,
                              gevp_hermitian_definite, hermitian_parts,
                              spectral_norm)

from conftest import random_complex


def test_hermitian_parts_identity():
    H, K = hermitian_parts(np.eye(2))
    np.testing.assert_allclose(H, np.eye(2))
    np.testing.assert_allclose(K, np.zeros((2, 2)))


def test_hermitian_parts_skew():
    H, K = hermitian_parts(1j * np.eye(2))
    np.testing.assert_allclose(H, np.zeros((2, 2)), atol=1e-15)
    np.testing.assert_allclose(K, np.eye(2))


def test_hermitian_parts_scalar():
    H, K = hermitian_parts(np.array([[1.0 + 1.0j]]))
    assert H[0, 0] == pytest.approx(1.0)
    assert K[0, 0] == pytest.approx(1.0)


def test_hermitian_parts_reconstruction(rng):
    eps = np.finfo(float).eps
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        A = random_complex(rng, n)
        H, K = hermitian_parts(A)
        assert spectral_norm(H + 1j * K - A) <= 4 * eps * spectral_norm(A)


def test_eig_hermitian_diagonal():
    res = eig_hermitian(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(res.eigenvalues, [1.0, 3.0])


def test_eig_hermitian_identity():
    res = eig_hermitian(np.eye(4))
    np.testing.assert_allclose(res.eigenvalues, np.ones(4))


def test_eig_hermitian_swap():
    res = eig_hermitian(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(res.eigenvalues, [-1.0, 1.0])


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_hermitian_unitary_vectors(rng):
    A = random_complex(rng, 5)
    H = (A + A.conj().T) / 2
    res = eig_hermitian(H)
    V = res.eigenvectors
    np.testing.assert_allclose(V.conj().T @ V, np.eye(5), atol=1e-12)
    recon = V @ np.diag(res.eigenvalues) @ V.conj().T
    assert spectral_norm(recon - H) <= 1e-12 * max(1.0, spectral_norm(H))


def test_eig_general_diagonal():
    res = eig_general(np.diag([1j, -1j]))
    np.testing.assert_allclose(sorted(res.eigenvalues, key=lambda z: z.imag),
                               [-1j, 1j])
    assert res.simple.all()


def test_eig_general_jordan_block_flagged():
    res = eig_general(np.array([[0.0, 1.0], [0.0, 0.0]]))
    np.testing.assert_allclose(res.eigenvalues, [0.0, 0.0], atol=1e-12)
    assert not res.simple.any()


def test_eig_general_complex_pair():
    # characteristic polynomial x^2 - 2x + 101 by hand: roots 1 +- 10j
    res = eig_general(np.array([[1.0, 10.0], [-10.0, 1.0]]))
    got = sorted(res.eigenvalues, key=lambda z: z.imag)
    np.testing.assert_allclose(got, [1 - 10j, 1 + 10j], atol=1e-12)


def test_eig_general_residuals(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        A = random_complex(rng, n)
        res = eig_general(A)
        nA = spectral_norm(A)
        for i in range(n):
            lam = res.eigenvalues[i]
            u = res.right_vectors[:, i]
            v = res.left_vectors[:, i]
            assert np.linalg.norm(A @ u - lam * u) <= 1e-10 * nA
            assert np.linalg.norm(v.conj() @ A - lam * v.conj()) <= 1e-10 * nA
            if res.simple[i]:
                ip = v.conj() @ u
                assert abs(ip.imag) <= 1e-10
                assert ip.real > 0


def test_eig_general_matches_hermitian(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        A = random_complex(rng, n)
        H = (A + A.conj().T) / 2
        wh = eig_hermitian(H).eigenvalues
        wg = np.sort(eig_general(H).eigenvalues.real)
        np.testing.assert_allclose(wh, wg, atol=1e-10)


def test_gevp_identity_pencil(rng):
    P = random_complex(rng, 3)
    P = P @ P.conj().T + np.eye(3)
    np.testing.assert_allclose(gevp_hermitian_definite(P, P), np.ones(3),
                               atol=1e-10)


def test_gevp_zero():
    np.testing.assert_allclose(
        gevp_hermitian_definite(np.zeros((2, 2)), np.eye(2)), np.zeros(2))


def test_gevp_diagonal():
    lam = gevp_hermitian_definite(np.diag([2.0, -2.0]), np.diag([1.0, 2.0]))
    np.testing.assert_allclose(lam, [-1.0, 2.0])


def test_gevp_rejects_indefinite():
    with pytest.raises(NotDefinite):
        gevp_hermitian_definite(np.eye(2), np.diag([1.0, -1.0]))


def test_gevp_matches_explicit_reduction(rng):
    for _ in range(30):
        n = int(rng.integers(2, 6))
        M = random_complex(rng, n)
        M = (M + M.conj().T) / 2
        P = random_complex(rng, n)
        P = P @ P.conj().T + 0.5 * np.eye(n)
        w, V = np.linalg.eigh(P)
        Pinvh = V @ np.diag(w ** -0.5) @ V.conj().T
        expect = np.linalg.eigvalsh(Pinvh @ M @ Pinvh)
        got = gevp_hermitian_definite(M, P)
        np.testing.assert_allclose(got, expect, atol=1e-10)


def test_spectral_norm_examples():
    assert spectral_norm(np.eye(3)) == pytest.approx(1.0)
    assert spectral_norm(np.diag([0.5, 0.25])) == pytest.approx(0.5)
    assert spectral_norm(np.array([[0.0, 2.0], [0.0, 0.0]])) == pytest.approx(2.0)


def test_spectral_norm_submultiplicative(rng):
    for _ in range(100):
        n = int(rng.integers(2, 7))
        A = random_complex(rng, n)
        B = random_complex(rng, n)
        assert spectral_norm(A @ B) <= spectral_norm(A) * spectral_norm(B) * (1 + 1e-12)
