"""Shared generators for randomized tests.

Structured test matrices are built from known ground truth: a sectorial
matrix is congruence-assembled from chosen phases, so its phase spectrum
is known exactly without going through the code under test.
"""

import numpy as np
import pytest

from phasecert.blocks import BlockDims


@pytest.fixture
def rng():
    return np.random.default_rng(20240809)


def random_complex(rng, n, scale=1.0):
    return scale * (rng.standard_normal((n, n))
                    + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_invertible(rng, n, max_cond=50.0):
    for _ in range(100):
        T = random_complex(rng, n)
        if np.linalg.cond(T) <= max_cond:
            return T
    raise RuntimeError("could not draw a well-conditioned matrix")


def random_unitary(rng, n):
    Q, R = np.linalg.qr(random_complex(rng, n))
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))


def random_sectorial(rng, n, lo, hi, max_cond=50.0):
    """Matrix with known phases: T* diag(e^{j phi}) T for drawn phi.

    The phase multiset of the result is exactly the drawn phi (congruence
    invariance), provided hi - lo < pi.
    """
    assert hi - lo < np.pi
    phases = rng.uniform(lo, hi, n)
    if n >= 2:
        phases[0] = hi - rng.uniform(0, 0.05) * (hi - lo)
        phases[-1] = lo + rng.uniform(0, 0.05) * (hi - lo)
    phases = np.sort(phases)[::-1]
    T = random_invertible(rng, n, max_cond)
    A = T.conj().T @ np.diag(np.exp(1j * phases)) @ T
    return A, phases


def random_structure(rng, n=None, max_block=3):
    """Random block partition; at least one block."""
    if n is None:
        n = int(rng.integers(2, 7))
    scalar, full = [], []
    left = n
    while left > 0:
        d = int(rng.integers(1, min(max_block, left) + 1))
        if rng.random() < 0.4:
            scalar.append(d)
        else:
            full.append(d)
        left -= d
    if not scalar and not full:
        full.append(n)
    return BlockDims(tuple(scalar), tuple(full))


def random_member_B(rng, chi, phases=None, scale=1.0):
    """Random perturbation-set member with an exactly known phase multiset.

    ``phases`` is an (lo, hi) interval with hi - lo < pi; every block phase
    is drawn from it, so the phase index of the result is the largest
    drawn |phase|.  Returns (B, drawn_phases).
    """
    n = chi.n
    B = np.zeros((n, n), dtype=complex)
    drawn = []
    for kind, sl in chi.block_slices():
        m = sl.stop - sl.start
        if phases is None:
            block_ph = np.zeros(1 if kind == "scalar" else m)
        elif kind == "scalar":
            block_ph = rng.uniform(phases[0], phases[1], 1)
        else:
            block_ph = rng.uniform(phases[0], phases[1], m)
        r = scale * rng.uniform(0.3, 1.5)
        if kind == "scalar":
            B[sl, sl] = r * np.exp(1j * block_ph[0]) * np.eye(m)
            drawn.extend([block_ph[0]] * m)
        else:
            T = random_invertible(rng, m, max_cond=20.0)
            B[sl, sl] = r * (T.conj().T @ np.diag(np.exp(1j * block_ph)) @ T)
            drawn.extend(list(block_ph))
    return B, np.array(drawn)


def random_member_D(rng, chi, hermitian=False, definite=False):
    """Random scaling-set member (full blocks on scalar positions, d*I on
    full positions)."""
    n = chi.n
    D = np.zeros((n, n), dtype=complex)
    for kind, sl in chi.block_slices():
        m = sl.stop - sl.start
        if kind == "scalar":
            blk = random_complex(rng, m)
            if hermitian or definite:
                blk = (blk + blk.conj().T) / 2
            if definite:
                blk = blk @ blk.conj().T / m + 0.2 * np.eye(m)
            D[sl, sl] = blk
        else:
            if definite:
                d = rng.uniform(0.2, 2.0)
            elif hermitian:
                d = rng.uniform(-2.0, 2.0)
            else:
                d = complex(rng.standard_normal(), rng.standard_normal())
            D[sl, sl] = d * np.eye(m)
    return D


def sample_numerical_range(rng, A, samples=10000):
    """Monte-Carlo points of {x* A x : ||x|| = 1}.

    Half the vectors are isotropic; half are support eigenvectors of the
    rotated Hermitian part at random directions, which lie on the boundary
    of the range and make the sample a tight inner approximation.
    """
    n = A.shape[0]
    half = samples // 2
    X1 = rng.standard_normal((half, n)) + 1j * rng.standard_normal((half, n))
    H = (A + A.conj().T) / 2.0
    K = (A - A.conj().T) / 2.0j
    thetas = rng.uniform(-np.pi, np.pi, samples - half)
    M = (np.cos(thetas)[:, None, None] * H[None]
         + np.sin(thetas)[:, None, None] * K[None])
    _, V = np.linalg.eigh(M)
    X = np.vstack([X1, V[:, :, 0]])
    X = X / np.linalg.norm(X, axis=1, keepdims=True)
    return np.einsum("si,ij,sj->s", X.conj(), A, X)


def sampled_phase_sup(rng, A, samples=10000):
    """Angle supremum over an inner approximation of the numerical range.

    The range is convex, so the convex hull of sampled points lies inside
    it; the supremum of |angle| over the hull (edges included, with exact
    handling of negative-real-axis crossings) can only under-estimate the
    true phase index.
    """
    vals = sample_numerical_range(rng, A, samples)
    scale = max(np.max(np.abs(vals)), 1e-300)
    keep = np.abs(vals) > 1e-12 * scale
    vals = vals[keep]
    if vals.size == 0:
        return 0.0
    best = float(np.max(np.abs(np.angle(vals))))

    pts = np.column_stack([vals.real, vals.imag])
    try:
        from scipy.spatial import ConvexHull, QhullError
        hull = ConvexHull(pts)
        verts = pts[hull.vertices]
    except (QhullError, ValueError):
        # collinear range: the segment between the two extreme points
        i = int(np.argmax(np.abs(vals)))
        j = int(np.argmax(np.abs(vals - vals[i])))
        verts = np.array([[vals[i].real, vals[i].imag],
                          [vals[j].real, vals[j].imag]])

    m = len(verts)
    ts = np.linspace(0.0, 1.0, 257)
    for k in range(m):
        p, q = verts[k], verts[(k + 1) % m]
        # exact crossing of the negative real axis inside the hull
        if (p[1] == 0 and p[0] < 0) or (q[1] == 0 and q[0] < 0):
            return np.pi
        if p[1] * q[1] < 0:
            t = p[1] / (p[1] - q[1])
            if p[0] + t * (q[0] - p[0]) < -1e-12 * scale:
                return np.pi
        seg = p[None, :] + ts[:, None] * (q - p)[None, :]
        z = seg[:, 0] + 1j * seg[:, 1]
        z = z[np.abs(z) > 1e-12 * scale]
        if z.size:
            best = max(best, float(np.max(np.abs(np.angle(z)))))
    return best
