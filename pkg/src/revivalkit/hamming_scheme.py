"""Binary Hamming scheme H(N, 2): hypercube walks and their chain quotient.

Vertices are N-bit integers; the distance-i relation graph G_i connects
words differing in exactly i bits.  All adjacency applications are
matrix-free (XOR gathers over the C(N, i) masks of weight i) - no
2^N x 2^N matrix is ever stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .chain_dynamics import evolve
from .orthopoly import KrawtchoukParams, RecurrenceCoefficients, krawtchouk_eval

__all__ = [
    "adjacency_apply",
    "verify_bose_mesner",
    "krawtchouk_eigenvalue_check",
    "project_hypercube",
    "projection_equivalence",
    "hypercube_evolve",
    "column_project",
    "BoseMesnerReport",
    "EigenvalueReport",
    "ProjectionReport",
]

FULL_SPACE_MAX_N = 20          # 2^N vector length cap
BOSE_MESNER_MAX_N = 10
PROJECTION_MAX_N = 14


@dataclass(frozen=True)
class BoseMesnerReport:
    N: int
    max_deviation: int

    @property
    def passed(self) -> bool:
        return self.max_deviation == 0


@dataclass(frozen=True)
class EigenvalueReport:
    N: int
    max_residual: float
    tol: float = 1e-8

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


@dataclass(frozen=True)
class ProjectionReport:
    N: int
    t: float
    max_deviation: float
    column_leakage: float
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tol and self.column_leakage < self.tol


def _weight_masks(N: int, i: int) -> np.ndarray:
    masks = np.empty(comb(N, i), dtype=np.int64)
    for k, pos in enumerate(combinations(range(N), i)):
        m = 0
        for p in pos:
            m |= 1 << p
        masks[k] = m
    return masks


def adjacency_apply(i: int, v: np.ndarray, N: int) -> np.ndarray:
    """Apply the distance-i adjacency matrix: (A_i v)_x = sum_{d(x,y)=i} v_y."""
    if N > FULL_SPACE_MAX_N:
        raise ValueError(f"N capped at {FULL_SPACE_MAX_N} for full-space work")
    if not 0 <= i <= N:
        raise ValueError(f"relation index must lie in 0..{N}, got {i}")
    v = np.asarray(v)
    if v.shape != (1 << N,):
        raise ValueError(f"vector length must be 2^{N} = {1 << N}, got {v.shape}")
    idx = np.arange(1 << N)
    out = np.zeros_like(v)
    for m in _weight_masks(N, i):
        out += v[idx ^ m]
    return out


def verify_bose_mesner(N: int) -> BoseMesnerReport:
    """Brute-force check of A_1 A_i = (i+1) A_{i+1} + (N-i+1) A_{i-1}.

    The relation is applied to every indicator vector in integer
    arithmetic; out-of-range relation classes count as zero.  Passing means
    the deviation is exactly 0.
    """
    if N > BOSE_MESNER_MAX_N:
        raise ValueError(f"N capped at {BOSE_MESNER_MAX_N}, got {N}")
    dim = 1 << N
    dev = 0
    for x in range(dim):
        e = np.zeros(dim, dtype=np.int64)
        e[x] = 1
        for i in range(N + 1):
            lhs = adjacency_apply(1, adjacency_apply(i, e, N), N)
            rhs = np.zeros(dim, dtype=np.int64)
            if i + 1 <= N:
                rhs += (i + 1) * adjacency_apply(i + 1, e, N)
            if i - 1 >= 0:
                rhs += (N - i + 1) * adjacency_apply(i - 1, e, N)
            dev = max(dev, int(np.abs(lhs - rhs).max()))
    return BoseMesnerReport(N=N, max_deviation=dev)


def krawtchouk_eigenvalue_check(N: int) -> EigenvalueReport:
    """Verify A_i v_s = C(N,i) K_i^N(s; 1/2) v_s on each A_1 eigenspace.

    One parity-character representative per eigenvalue N-2s is used (the
    sign vector of a weight-s word); each is first confirmed to be an A_1
    eigenvector, then tested against every relation.
    """
    if N > BOSE_MESNER_MAX_N:
        raise ValueError(f"N capped at {BOSE_MESNER_MAX_N}, got {N}")
    params = KrawtchoukParams(N=N, p=0.5)
    idx = np.arange(1 << N)
    residual = 0.0
    for s in range(N + 1):
        z = (1 << s) - 1                       # canonical weight-s word
        v = (-1.0) ** np.array([bin(x & z).count("1") for x in idx])
        residual = max(residual, float(
            np.abs(adjacency_apply(1, v, N) - (N - 2 * s) * v).max()))
        for i in range(N + 1):
            lam = comb(N, i) * krawtchouk_eval(i, s, params)
            residual = max(residual, float(
                np.abs(adjacency_apply(i, v, N) - lam * v).max()))
    return EigenvalueReport(N=N, max_residual=residual)


def project_hypercube(N: int) -> RecurrenceCoefficients:
    """Quotient chain of A_1 on the Hamming-weight columns:

        J_n = sqrt(n(N-n+1)),  B_n = 0

    which is the perfect-transfer chain with coupling scale 2.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    n = np.arange(1, N + 1, dtype=float)
    return RecurrenceCoefficients(J=np.sqrt(n * (N - n + 1)), B=np.zeros(N + 1))


def hypercube_evolve(N: int, t: float, v0: np.ndarray,
                     tol: float = 1e-13) -> np.ndarray:
    """e^{-it A_1} v0, matrix-free.

    Iterated Taylor steps with |tau| * ||A_1|| <= 2 per step; each step's
    series is summed until the term norm falls below tol relative to the
    accumulated state.  Independent of the column-quotient route, so it can
    arbitrate it.
    """
    if N > FULL_SPACE_MAX_N:
        raise ValueError(f"N capped at {FULL_SPACE_MAX_N} for full-space work")
    v0 = np.asarray(v0, dtype=complex)
    if v0.shape != (1 << N,):
        raise ValueError(f"vector length must be 2^{N}, got {v0.shape}")
    if t == 0:
        return v0.copy()
    idx = np.arange(1 << N)
    gathers = [idx ^ (1 << b) for b in range(N)]

    def apply_a1(v):
        out = np.zeros_like(v)
        for g in gathers:
            out += v[g]
        return out

    steps = max(1, int(np.ceil(abs(t) * N / 2.0)))
    tau = t / steps
    state = v0
    for _ in range(steps):
        term = state
        acc = state.copy()
        for j in range(1, 200):
            term = (-1j * tau / j) * apply_a1(term)
            acc = acc + term
            if np.linalg.norm(term) <= tol * np.linalg.norm(acc):
                break
        state = acc
    return state


def column_project(N: int, psi: np.ndarray) -> tuple[np.ndarray, float]:
    """Components of psi on the normalised Hamming-weight column vectors.

    Returns (projections, leakage) where leakage is the squared norm of the
    part of psi orthogonal to column space.
    """
    weights = np.array([bin(x).count("1") for x in range(1 << N)])
    proj = np.empty(N + 1, dtype=complex)
    for n in range(N + 1):
        proj[n] = psi[weights == n].sum() / np.sqrt(comb(N, n))
    leak = float(np.sum(np.abs(psi) ** 2) - np.sum(np.abs(proj) ** 2))
    return proj, leak


def projection_equivalence(N: int, t: float) -> ProjectionReport:
    """Full hypercube walk from the zero word vs the quotient chain.

    The 2^N-dimensional state is evolved by the Taylor route, projected
    onto the weight columns, and compared site-by-site with the chain
    evolution of project_hypercube(N); also checks that nothing escaped
    column space.
    """
    if N > PROJECTION_MAX_N:
        raise ValueError(f"N capped at {PROJECTION_MAX_N}, got {N}")
    v0 = np.zeros(1 << N, dtype=complex)
    v0[0] = 1.0
    psi = hypercube_evolve(N, t, v0)
    proj, leak = column_project(N, psi)
    chain_amp = evolve(project_hypercube(N), t, source=0)
    dev = float(np.abs(proj - chain_amp).max())
    return ProjectionReport(N=N, t=t, max_deviation=dev,
                            column_leakage=abs(leak))
