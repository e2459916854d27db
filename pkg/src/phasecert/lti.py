"""State-space LTI systems: frequency response, interconnection, pole oracle,
and the rotating-body benchmark family."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FrequencyAtPole, IllPosed, InvalidParameter


@dataclass(frozen=True)
class StateSpace:
    """Real state-space realization (a, b, c, d); frequency in rad/s.

    ``stable`` marks membership of the stable subspace; it is verified
    (a Hurwitz) at construction when set.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    stable: bool = field(default=False)

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        d = np.atleast_2d(np.asarray(self.d, dtype=float))
        if a.size == 0:
            a = a.reshape(0, 0)
        nx = a.shape[0]
        ny, nu = d.shape
        b = np.asarray(self.b, dtype=float).reshape(nx, nu)
        c = np.asarray(self.c, dtype=float).reshape(ny, nx)
        if a.shape != (nx, nx):
            raise ValueError("state matrix must be square")
        for M in (a, b, c, d):
            if not np.all(np.isfinite(M)):
                raise ValueError("state-space data must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        if self.stable and nx > 0:
            if np.max(np.linalg.eigvals(a).real) >= 0.0:
                raise ValueError("stable flag set but the state matrix is not Hurwitz")

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.d.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.d.shape[0]

    def poles(self) -> np.ndarray:
        if self.n_states == 0:
            return np.zeros(0, dtype=complex)
        return np.linalg.eigvals(self.a)

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist(),
                "c": self.c.tolist(), "d": self.d.tolist()}

    @staticmethod
    def from_dict(doc: dict, stable: bool = False) -> "StateSpace":
        return StateSpace(np.asarray(doc["a"], dtype=float),
                          np.asarray(doc["b"], dtype=float),
                          np.asarray(doc["c"], dtype=float),
                          np.asarray(doc["d"], dtype=float),
                          stable=stable)


def static_gain(M) -> StateSpace:
    """State-free system with constant response M."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    ny, nu = M.shape
    return StateSpace(np.zeros((0, 0)), np.zeros((0, nu)), np.zeros((ny, 0)), M,
                      stable=True)


def freq_response(sys: StateSpace, omega: float) -> np.ndarray:
    """Frequency response C (jw I - A)^{-1} B + D; the direct feedthrough
    at omega = inf."""
    if math.isinf(omega):
        return sys.d.astype(complex)
    if sys.n_states == 0:
        return sys.d.astype(complex)
    M = 1j * omega * np.eye(sys.n_states) - sys.a
    if np.linalg.cond(M) > 1e12:
        raise FrequencyAtPole(f"omega = {omega} rad/s sits on a pole")
    return sys.c @ np.linalg.solve(M, sys.b) + sys.d


def series(first: StateSpace, second: StateSpace) -> StateSpace:
    """Cascade: output of ``first`` feeds ``second`` (response = G2 G1)."""
    if first.n_outputs != second.n_inputs:
        raise ValueError("cascade dimensions do not match")
    n1, n2 = first.n_states, second.n_states
    A = np.block([[first.a, np.zeros((n1, n2))],
                  [second.b @ first.c, second.a]])
    B = np.vstack([first.b, second.b @ first.d])
    C = np.hstack([second.d @ first.c, second.c])
    D = second.d @ first.d
    return StateSpace(A, B, C, D, stable=first.stable and second.stable)


def rotating_body_T(a: float) -> StateSpace:
    """Complementary sensitivity of the rotating-body benchmark:
    T(s) = 1/(s+1) * [[1, a], [-a, 1]]."""
    C = np.array([[1.0, float(a)], [-float(a), 1.0]])
    return StateSpace(-np.eye(2), np.eye(2), C, np.zeros((2, 2)), stable=True)


def delta_family(b: float) -> StateSpace:
    """Diagonal first-order perturbation diag(0.5, 0.25/(s/b + 1)).

    Its response is diagonal at every frequency with norm 0.5 throughout.
    """
    b = float(b)
    if b <= 0:
        raise InvalidParameter("pole parameter b must be positive")
    A = np.array([[-b]])
    B = np.array([[0.0, 1.0]])
    C = np.array([[0.0], [0.25 * b]])
    D = np.array([[0.5, 0.0], [0.0, 0.0]])
    return StateSpace(A, B, C, D, stable=True)


def closed_loop_poles(G: StateSpace, Delta: StateSpace) -> np.ndarray:
    """Poles of the negative-feedback loop e1 = -Delta e2 + u1, e2 = G e1 + u2."""
    if G.n_inputs != Delta.n_outputs or G.n_outputs != Delta.n_inputs:
        raise ValueError("loop dimensions do not match")
    n = G.n_outputs
    W = np.eye(n) + G.d @ Delta.d
    if np.linalg.cond(W) > 1e10:
        raise IllPosed("direct feedthrough loop I + Dg*Dd is numerically singular")
    Winv = np.linalg.inv(W)
    ng, nd = G.n_states, Delta.n_states
    # e2 = Winv (Cg xg - Dg Cd xd); e1 = -Cd xd - Dd e2
    E2g = Winv @ G.c
    E2d = -Winv @ G.d @ Delta.c
    E1g = -Delta.d @ E2g
    E1d = -Delta.c - Delta.d @ E2d
    A_cl = np.block([[G.a + G.b @ E1g, G.b @ E1d],
                     [Delta.b @ E2g, Delta.a + Delta.b @ E2d]])
    if A_cl.size == 0:
        return np.zeros(0, dtype=complex)
    return np.linalg.eigvals(A_cl)


def is_hurwitz(poles, margin: float = 1e-9) -> bool:
    """True iff every pole has real part below -margin."""
    poles = np.asarray(poles, dtype=complex)
    if poles.size == 0:
        return True
    return bool(np.max(poles.real) < -margin)
