"""Small dense Hermitian LMI feasibility with a certified margin.

Feasibility of a system of affine Hermitian constraints F_j(x) >= 0 is
decided by maximizing t subject to F_j(x) >= t*I under one linear
normalization that removes the scaling ray.  The inner solver follows the
analytic center of the log-det barrier

    t + nu * sum_j log det(F_j(x) - t*I)

down a geometric schedule in nu; at a nu-center the duality gap is
nu * sum_j dim(F_j), which certifies the reported optimum within an
absolute tolerance.  The feasibility question is decided early whenever
the exact margin at the current iterate already clears the threshold, or
the dual bound certifies it never will.  A subgradient ascent on
min_j lambda_min(F_j) restarts from the barrier iterate when Newton
stalls near rank-deficient optima.  Problem sizes are capped (k <= 64
variables, blocks d <= 32), so everything stays dense.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import SolverStall

EPS_FEAS = 1e-8
EPS_SDP = 1e-7
MAX_VARS = 64
MAX_DIM = 32


@dataclass(frozen=True)
class LinearMatrixPencil:
    """Affine Hermitian-valued map x -> F0 + sum_i x_i F_i."""

    constant: np.ndarray
    coefficients: tuple[np.ndarray, ...]

    def __post_init__(self):
        F0 = np.asarray(self.constant, dtype=complex)
        coeffs = tuple(np.asarray(F, dtype=complex) for F in self.coefficients)
        d = F0.shape[0]
        for F in (F0,) + coeffs:
            if F.shape != (d, d):
                raise ValueError("pencil matrices must share one dimension")
            if np.max(np.abs(F - F.conj().T)) > 1e-10 * max(1.0, np.max(np.abs(F))):
                raise ValueError("pencil matrices must be Hermitian")
        object.__setattr__(self, "constant", F0)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def dim(self) -> int:
        return self.constant.shape[0]

    @property
    def n_vars(self) -> int:
        return len(self.coefficients)

    def evaluate(self, x) -> np.ndarray:
        M = self.constant.copy()
        for xi, F in zip(np.asarray(x, dtype=float), self.coefficients):
            M = M + xi * F
        return (M + M.conj().T) / 2.0


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    x: np.ndarray
    margin: float     # exact min_j lambda_min(F_j(x)) after pencil normalization
    gap: float        # certified distance of margin to the true optimum t*


@dataclass(frozen=True)
class BisectionResult:
    feasible: bool
    kappa: float | None
    witness: FeasibilityResult | None
    calls: int


class _Problem:
    """Normalized max-t problem on reduced coordinates, pencils batched by size."""

    def __init__(self, pencils, a, c):
        a = np.asarray(a, dtype=float)
        k = len(a)
        # Pencils are rescaled to unit spectral size so one margin applies
        # uniformly; identically-zero constraints are vacuous and dropped.
        scales = [max([np.linalg.norm(p.constant, 2)]
                      + [np.linalg.norm(F, 2) for F in p.coefficients])
                  for p in pencils]
        smax = max(scales) if scales else 0.0
        keep = [i for i, s in enumerate(scales) if s > 1e-14 * max(smax, 1.0)]

        self.x_p = c * a / float(a @ a)
        Q, _ = np.linalg.qr(np.column_stack([a, np.eye(k)]))
        N = Q[:, 1:k]  # orthonormal basis of the nullspace of a

        by_dim: dict[int, list[int]] = {}
        for i in keep:
            by_dim.setdefault(pencils[i].dim, []).append(i)
        self.groups = []
        self.total_dim = 0
        eff = np.zeros(N.shape[1])
        for d, idxs in sorted(by_dim.items()):
            F0 = np.stack([pencils[i].constant / scales[i] for i in idxs])
            C = np.stack([np.stack(pencils[i].coefficients) / scales[i]
                          for i in idxs])          # (m, k, d, d)
            G = np.tensordot(C, N, axes=(1, 0)).transpose(0, 3, 1, 2)  # (m, p, d, d)
            self.groups.append({"F0": F0, "C": C, "G": G, "d": d})
            self.total_dim += d * len(idxs)
            if N.shape[1]:
                eff = np.maximum(eff, np.max(np.abs(G), axis=(0, 2, 3)))
        # Directions with no effect on any constraint are frozen at zero.
        if N.shape[1] and self.groups:
            live = eff > 1e-14
            N = N[:, live]
            for grp in self.groups:
                grp["G"] = grp["G"][:, live]
        self.N = N
        self.p = N.shape[1] if self.groups else 0

    def x_of(self, y) -> np.ndarray:
        return self.x_p + (self.N @ y if self.p else 0.0)

    def block_stacks(self, y, t=0.0):
        x = self.x_of(y)
        out = []
        for grp in self.groups:
            M = grp["F0"] + np.tensordot(x, grp["C"], axes=(0, 1))
            M = (M + np.conj(np.swapaxes(M, -1, -2))) / 2.0
            if t != 0.0:
                M = M - t * np.eye(grp["d"])
            out.append(M)
        return out

    def min_eig_at(self, y) -> float:
        vals = [float(np.min(np.linalg.eigvalsh(M)))
                for M in self.block_stacks(y)]
        return min(vals) if vals else math.inf


def _chol_logdet(stacks):
    """Sum of log det over all blocks, or None if any block is not PD."""
    total = 0.0
    for M in stacks:
        try:
            L = np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            return None
        diag = np.diagonal(L, axis1=-2, axis2=-1).real
        if np.any(diag <= 0):
            return None
        total += 2.0 * float(np.sum(np.log(diag)))
    return total


def _center(prob: _Problem, y, t, nu, max_steps=40):
    """Newton-center the barrier for fixed nu.  Returns (y, t, ok)."""
    p = prob.p
    for _ in range(max_steps):
        stacks = prob.block_stacks(y, t)
        obj0 = _chol_logdet(stacks)
        if obj0 is None:
            return y, t, False
        obj0 = t + nu * obj0

        grad = np.zeros(p + 1)
        hess = np.zeros((p + 1, p + 1))
        grad[p] = 1.0
        for M, grp in zip(stacks, prob.groups):
            S = np.linalg.inv(M)
            S = (S + np.conj(np.swapaxes(S, -1, -2))) / 2.0
            trS = float(np.einsum("maa->", S).real)
            grad[p] -= nu * trS
            hess[p, p] -= nu * float(np.einsum("mab,mba->", S, S).real)
            if p:
                SG = np.einsum("mab,mlbc->mlac", S, grp["G"])
                grad[:p] += nu * np.einsum("mlaa->l", SG).real
                hess[:p, :p] -= nu * np.einsum("mlab,mnba->ln", SG, SG).real
                ht = nu * np.einsum("mlab,mba->l", SG, S).real
                hess[:p, p] += ht
                hess[p, :p] += ht

        try:
            step = np.linalg.solve(-hess + 1e-14 * np.eye(p + 1), grad)
        except np.linalg.LinAlgError:
            return y, t, False
        decrement2 = float(grad @ step)
        if decrement2 < 0:
            return y, t, False
        # lambda <= 0.05 is centered enough for the x2-slack gap bound.
        if decrement2 <= 2.5e-3:
            return y, t, True

        alpha = 1.0
        moved = False
        for _bt in range(60):
            y_n = y + alpha * step[:p] if p else y
            t_n = t + alpha * step[p]
            obj_n = _chol_logdet(prob.block_stacks(y_n, t_n))
            if obj_n is not None:
                obj_n = t_n + nu * obj_n
                if obj_n > obj0 + 1e-4 * alpha * decrement2 or alpha < 1e-7:
                    y, t = y_n, t_n
                    moved = True
                    break
            alpha *= 0.5
        if not moved:
            return y, t, False
    return y, t, True


def _subgradient_polish(prob: _Problem, y, max_iters=200):
    """Ascent on min_j lambda_min from the barrier iterate."""
    best_y = y.copy()
    best_v = prob.min_eig_at(y)
    if prob.p == 0:
        return best_y, best_v
    step = 0.1
    for _ in range(max_iters):
        worst_v = math.inf
        g = None
        for M, grp in zip(prob.block_stacks(y), prob.groups):
            w, V = np.linalg.eigh(M)
            m_idx = int(np.argmin(w[:, 0]))
            if w[m_idx, 0] < worst_v:
                worst_v = float(w[m_idx, 0])
                u = V[m_idx, :, 0]
                g = np.einsum("lab,a,b->l", grp["G"][m_idx], u.conj(), u).real
        gn = np.linalg.norm(g)
        if gn < 1e-14:
            break
        y_n = y + step * g / gn
        v_n = prob.min_eig_at(y_n)
        if v_n > worst_v:
            y = y_n
            if v_n > best_v:
                best_v, best_y = v_n, y_n.copy()
        else:
            step *= 0.5
            if step < 1e-12:
                break
    return best_y, best_v


def feasibility(pencils: Sequence[LinearMatrixPencil],
                normalization: tuple[Sequence[float], float],
                eps_feas: float = EPS_FEAS,
                eps_sdp: float = EPS_SDP) -> FeasibilityResult:
    """Decide whether all pencils admit a common x with F_j(x) >= eps_feas*I.

    The pencils share one variable vector; ``normalization`` is a pair
    (a, c) imposing a.x = c to fix the scale of homogeneous systems.
    Maximizes the uniform margin t and reports feasible when the certified
    optimum clears eps_feas; the witness margin is exact (re-evaluated by
    eigendecomposition at the witness).

    Raises SolverStall when neither the barrier nor the fallback ascent
    can certify the answer within the iteration caps.
    """
    pencils = list(pencils)
    if not pencils:
        raise ValueError("need at least one pencil")
    k = pencils[0].n_vars
    if k > MAX_VARS:
        raise ValueError(f"too many variables ({k} > {MAX_VARS})")
    for pcl in pencils:
        if pcl.n_vars != k:
            raise ValueError("pencils must share the variable vector")
        if pcl.dim > MAX_DIM:
            raise ValueError(f"pencil dimension {pcl.dim} exceeds {MAX_DIM}")
    a, c = normalization
    a = np.asarray(a, dtype=float)
    if len(a) != k or not np.any(a != 0.0):
        raise ValueError("normalization functional must be nonzero of length k")

    prob = _Problem(pencils, a, float(c))
    if prob.total_dim == 0:
        # Every constraint was identically zero: vacuously feasible.
        return FeasibilityResult(True, prob.x_p.copy(), math.inf, 0.0)

    y = np.zeros(prob.p)
    margin = prob.min_eig_at(y)
    if prob.p == 0 or margin >= eps_feas:
        return FeasibilityResult(margin >= eps_feas, prob.x_of(y), margin, 0.0)

    t = margin - 1.0
    nu = 0.3
    nu_min = eps_sdp / (4.0 * prob.total_dim)
    stalled = False
    while True:
        y, t, ok = _center(prob, y, t, nu)
        if not ok:
            stalled = True
            break
        margin = prob.min_eig_at(y)
        gap = 2.0 * nu * prob.total_dim
        if margin >= eps_feas:
            return FeasibilityResult(True, prob.x_of(y), margin, gap)
        if t + gap < eps_feas:
            return FeasibilityResult(False, prob.x_of(y), margin, gap)
        if nu <= nu_min:
            break
        nu = max(nu * 0.1, nu_min)
        if abs(t) > 1e8 or np.linalg.norm(y) > 1e10:
            break

    if stalled:
        y, margin = _subgradient_polish(prob, y)
        if margin >= eps_feas:
            return FeasibilityResult(True, prob.x_of(y), float(margin), math.nan)
        raise SolverStall("barrier stalled before certifying the optimality gap")

    margin = prob.min_eig_at(y)
    gap = 2.0 * nu_min * prob.total_dim
    return FeasibilityResult(margin >= eps_feas, prob.x_of(y), float(margin), gap)


def gevp_bisection(feasible_at: Callable[[float], FeasibilityResult],
                   kappa_max: float,
                   tol_kappa: float) -> BisectionResult:
    """Least kappa in [0, kappa_max] whose system is feasible, within tol.

    Relies on feasibility being monotone nondecreasing in kappa.  The
    number of inner calls is at most ceil(log2(kappa_max / tol_kappa)) + 2.
    """
    calls = 0
    hi_res = feasible_at(kappa_max)
    calls += 1
    if not hi_res.feasible:
        return BisectionResult(False, None, None, calls)
    lo_res = feasible_at(0.0)
    calls += 1
    if lo_res.feasible:
        return BisectionResult(True, 0.0, lo_res, calls)

    lo, hi = 0.0, kappa_max
    witness = hi_res
    while hi - lo > tol_kappa:
        mid = (lo + hi) / 2.0
        res = feasible_at(mid)
        calls += 1
        if res.feasible:
            hi, witness = mid, res
        else:
            lo = mid
    return BisectionResult(True, hi, witness, calls)
