"""Ordered 2-Hamming scheme and its triangular spin-lattice quotient.

Vertices are N-tuples of bit pairs, packed two bits per position into a
2N-bit integer.  The shape of a word counts pairs equal to (1, 0) in e1 and
pairs equal to (0, 1) or (1, 1) in e2; words are related under shape e when
their XOR has shape e.  The weighted walk alpha*A_(1,0) + beta*A_(0,1)
projects onto the (N+1)(N+2)/2 shape columns, where it becomes a triangular
lattice Hamiltonian whose transition amplitudes have a closed product form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb, sqrt
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .bivariate_krawtchouk import multinomial, triangle

__all__ = [
    "OrderedWord",
    "Shape",
    "TriangleOperator",
    "AmplitudeGrid",
    "TransferEvent2D",
    "Transfer2DReport",
    "OrderedBoseMesnerReport",
    "OrderedProjectionReport",
    "shape_of",
    "related_under",
    "column_cardinality",
    "words_of_shape",
    "scheme_adjacency_apply",
    "verify_ordered_bose_mesner",
    "triangle_hamiltonian",
    "ordered_walk_evolve",
    "column_project",
    "project_ordered_walk",
    "closed_form_amplitude",
    "amplitude_grid",
    "detect_2d_transfer",
]

FULL_SPACE_MAX_N = 8      # 4^N vector cap
BOSE_MESNER_MAX_N = 4
PROJECTION_MAX_N = 7
DEFAULT_TOL = 1e-9
DEFAULT_GRID = 8192


class Shape(NamedTuple):
    e1: int
    e2: int


@dataclass(frozen=True)
class OrderedWord:
    """N bit-pairs packed into a 2N-bit integer (pair j at bits 2j, 2j+1)."""

    n_pairs: int
    bits: int

    def __post_init__(self):
        if self.n_pairs < 1:
            raise ValueError("need at least one pair")
        if not 0 <= self.bits < (1 << (2 * self.n_pairs)):
            raise ValueError(
                f"bits out of range for {self.n_pairs} pairs: {self.bits}")

    @classmethod
    def from_pairs(cls, pairs) -> "OrderedWord":
        bits = 0
        for j, (a, b) in enumerate(pairs):
            bits |= (a & 1) << (2 * j)
            bits |= (b & 1) << (2 * j + 1)
        return cls(n_pairs=len(pairs), bits=bits)

    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(((self.bits >> (2 * j)) & 1, (self.bits >> (2 * j + 1)) & 1)
                     for j in range(self.n_pairs))

    def __xor__(self, other: "OrderedWord") -> "OrderedWord":
        if other.n_pairs != self.n_pairs:
            raise ValueError("word lengths differ")
        return OrderedWord(self.n_pairs, self.bits ^ other.bits)


def _low_mask(N: int) -> int:
    m = 0
    for j in range(N):
        m |= 1 << (2 * j)
    return m


def _shape_counts(bits, N: int):
    """(e1, e2) of packed word(s); works on ints and integer arrays."""
    lo = bits & _low_mask(N)
    hi = (bits >> 1) & _low_mask(N)
    only10 = lo & ~hi
    if isinstance(bits, np.ndarray):
        return np.bitwise_count(only10), np.bitwise_count(hi)
    return int(only10).bit_count(), int(hi).bit_count()


def shape_of(x: OrderedWord) -> Shape:
    """Count pairs equal to (1,0) in e1; pairs (0,1) or (1,1) in e2."""
    e1, e2 = _shape_counts(x.bits, x.n_pairs)
    return Shape(e1, e2)


def related_under(x: OrderedWord, y: OrderedWord, e: Shape | tuple[int, int]) -> bool:
    """True iff the mod-2 difference of the words has shape e."""
    return shape_of(x ^ y) == tuple(e)


def column_cardinality(N: int, i: int, j: int) -> int:
    """Number of words of shape (i, j): multinomial(N; i, j) * 2^j."""
    if i < 0 or j < 0 or i + j > N:
        raise ValueError(f"shape ({i}, {j}) outside the triangle for N={N}")
    return multinomial(N, i, j) * (1 << j)


def words_of_shape(N: int, e: Shape | tuple[int, int]) -> np.ndarray:
    """All packed words of shape e: choose e1 positions for the (1,0) pair,
    e2 positions each holding (0,1) or (1,1)."""
    e1, e2 = e
    if e1 < 0 or e2 < 0 or e1 + e2 > N:
        raise ValueError(f"shape ({e1}, {e2}) outside the triangle for N={N}")
    out = np.empty(column_cardinality(N, e1, e2), dtype=np.int64)
    k = 0
    for pos1 in combinations(range(N), e1):
        rest = [p for p in range(N) if p not in pos1]
        base = 0
        for p in pos1:
            base |= 1 << (2 * p)
        for pos2 in combinations(rest, e2):
            for vals in product((2, 3), repeat=e2):
                w = base
                for p, v in zip(pos2, vals):
                    w |= v << (2 * p)
                out[k] = w
                k += 1
    return out


def scheme_adjacency_apply(e: Shape | tuple[int, int], v: np.ndarray,
                           N: int) -> np.ndarray:
    """(A_e v)_x = sum over difference words d of shape e of v_{x XOR d}."""
    if N > FULL_SPACE_MAX_N:
        raise ValueError(f"N capped at {FULL_SPACE_MAX_N} for full-space work")
    v = np.asarray(v)
    if v.shape != (1 << (2 * N),):
        raise ValueError(f"vector length must be 4^{N} = {1 << (2 * N)}")
    idx = np.arange(1 << (2 * N))
    out = np.zeros_like(v)
    for d in words_of_shape(N, e):
        out += v[idx ^ d]
    return out


@dataclass(frozen=True)
class OrderedBoseMesnerReport:
    N: int
    max_deviation: int

    @property
    def passed(self) -> bool:
        return self.max_deviation == 0


def verify_ordered_bose_mesner(N: int) -> OrderedBoseMesnerReport:
    """Exact integer check of both product expansions

        A_(1,0) A_(i,j) = (N+1-i-j) A_(i-1,j) + j A_(i,j) + (i+1) A_(i+1,j)
        A_(0,1) A_(i,j) = 2(N+1-i-j) A_(i,j-1) + 2(i+1) A_(i+1,j-1)
                          + (j+1) A_(i-1,j+1) + (j+1) A_(i,j+1)

    applied to every indicator vector; out-of-triangle shapes are zero.
    """
    if N > BOSE_MESNER_MAX_N:
        raise ValueError(f"N capped at {BOSE_MESNER_MAX_N}, got {N}")
    dim = 1 << (2 * N)
    shapes = triangle(N)

    def a_apply(i, j, vec):
        if i < 0 or j < 0 or i + j > N:
            return np.zeros_like(vec)
        return scheme_adjacency_apply((i, j), vec, N)

    dev = 0
    for x in range(dim):
        ex = np.zeros(dim, dtype=np.int64)
        ex[x] = 1
        for (i, j) in shapes:
            aij = a_apply(i, j, ex)
            lhs10 = a_apply(1, 0, aij)
            rhs10 = ((N + 1 - i - j) * a_apply(i - 1, j, ex)
                     + j * aij
                     + (i + 1) * a_apply(i + 1, j, ex))
            lhs01 = a_apply(0, 1, aij)
            rhs01 = (2 * (N + 1 - i - j) * a_apply(i, j - 1, ex)
                     + 2 * (i + 1) * a_apply(i + 1, j - 1, ex)
                     + (j + 1) * a_apply(i - 1, j + 1, ex)
                     + (j + 1) * a_apply(i, j + 1, ex))
            dev = max(dev, int(np.abs(lhs10 - rhs10).max()),
                      int(np.abs(lhs01 - rhs01).max()))
    return OrderedBoseMesnerReport(N=N, max_deviation=dev)


@dataclass(frozen=True, eq=False)
class TriangleOperator:
    """One-excitation Hamiltonian on the lattice sites {(i,j): i+j <= N}."""

    N: int
    alpha: float
    beta: float
    sites: tuple[tuple[int, int], ...]
    matrix: np.ndarray

    def site_index(self, i: int, j: int) -> int:
        return self.sites.index((i, j))

    @property
    def dim(self) -> int:
        return len(self.sites)


def triangle_hamiltonian(N: int, alpha: float, beta: float) -> TriangleOperator:
    """Lattice operator acting on site (i, j) by

        H e_{i,j} = alpha sqrt((i+1)(N-i-j)) e_{i+1,j}
                  + beta sqrt(2(j+1)(N-i-j)) e_{i,j+1}
                  + alpha sqrt(i(N+1-i-j)) e_{i-1,j}
                  + beta sqrt(2j(N+1-i-j)) e_{i,j-1}
                  + beta sqrt(2(i+1)j) e_{i+1,j-1}
                  + beta sqrt(2i(j+1)) e_{i-1,j+1}
                  + alpha j e_{i,j},

    a real symmetric matrix with eigenvalues
    alpha(N-2x) + beta(2N-2x-4y) over the triangle.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    sites = tuple(triangle(N))
    pos = {s: k for k, s in enumerate(sites)}
    D = len(sites)
    H = np.zeros((D, D))
    for (i, j) in sites:
        col = pos[(i, j)]
        H[col, col] = alpha * j
        hops = (
            ((i + 1, j), alpha * sqrt((i + 1) * (N - i - j))),
            ((i, j + 1), beta * sqrt(2 * (j + 1) * (N - i - j))),
            ((i - 1, j), alpha * sqrt(i * (N + 1 - i - j))),
            ((i, j - 1), beta * sqrt(2 * j * (N + 1 - i - j))),
            ((i + 1, j - 1), beta * sqrt(2 * (i + 1) * j)),
            ((i - 1, j + 1), beta * sqrt(2 * i * (j + 1))),
        )
        for target, val in hops:
            row = pos.get(target)
            if row is not None:
                H[row, col] += val
    return TriangleOperator(N=N, alpha=alpha, beta=beta, sites=sites, matrix=H)


def triangle_eigensystem(op: TriangleOperator) -> tuple[np.ndarray, np.ndarray]:
    return np.linalg.eigh(op.matrix)


def triangle_evolve(op: TriangleOperator, t: float,
                    source: tuple[int, int] = (0, 0)) -> np.ndarray:
    """Amplitudes over op.sites of e^{-itH} applied to the source site."""
    vals, vecs = triangle_eigensystem(op)
    src = op.site_index(*source)
    return vecs @ (np.exp(-1j * t * vals) * vecs[src])


def ordered_walk_evolve(N: int, alpha: float, beta: float, t: float,
                        v0: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """e^{-it(alpha A_(1,0) + beta A_(0,1))} v0, matrix-free.

    Same iterated-Taylor scheme as the hypercube walk; the operator norm is
    bounded by alpha*N + 2*beta*N (regularity degrees of the two graphs).
    """
    if N > FULL_SPACE_MAX_N:
        raise ValueError(f"N capped at {FULL_SPACE_MAX_N} for full-space work")
    v0 = np.asarray(v0, dtype=complex)
    if v0.shape != (1 << (2 * N),):
        raise ValueError(f"vector length must be 4^{N}")
    if t == 0:
        return v0.copy()
    idx = np.arange(1 << (2 * N))
    g10 = idx[None, :] ^ words_of_shape(N, (1, 0))[:, None]
    g01 = idx[None, :] ^ words_of_shape(N, (0, 1))[:, None]

    def apply_h(v):
        return alpha * v[g10].sum(axis=0) + beta * v[g01].sum(axis=0)

    bound = (alpha + 2 * beta) * N
    steps = max(1, int(np.ceil(abs(t) * bound / 2.0)))
    tau = t / steps
    state = v0
    for _ in range(steps):
        term = state
        acc = state.copy()
        for j in range(1, 200):
            term = (-1j * tau / j) * apply_h(term)
            acc = acc + term
            if np.linalg.norm(term) <= tol * np.linalg.norm(acc):
                break
        state = acc
    return state


def column_project(N: int, psi: np.ndarray) -> tuple[np.ndarray, float]:
    """Components on the normalised shape columns, plus off-column leakage."""
    e1, e2 = _shape_counts(np.arange(1 << (2 * N), dtype=np.int64), N)
    sites = triangle(N)
    proj = np.empty(len(sites), dtype=complex)
    for k, (i, j) in enumerate(sites):
        proj[k] = psi[(e1 == i) & (e2 == j)].sum() / sqrt(column_cardinality(N, i, j))
    leak = float(np.sum(np.abs(psi) ** 2) - np.sum(np.abs(proj) ** 2))
    return proj, leak


@dataclass(frozen=True)
class OrderedProjectionReport:
    N: int
    alpha: float
    beta: float
    t: float
    max_deviation: float
    column_leakage: float
    tol: float = 1e-8

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tol and self.column_leakage < self.tol


def project_ordered_walk(N: int, alpha: float, beta: float,
                         t: float) -> OrderedProjectionReport:
    """Full 4^N walk from the zero word vs the triangle lattice evolution.

    The full state is evolved by the Taylor route, projected onto the shape
    columns, and compared against triangle_hamiltonian dynamics started at
    site (0, 0); also verifies the walk never leaves column space.
    """
    if N > PROJECTION_MAX_N:
        raise ValueError(f"N capped at {PROJECTION_MAX_N}, got {N}")
    v0 = np.zeros(1 << (2 * N), dtype=complex)
    v0[0] = 1.0
    psi = ordered_walk_evolve(N, alpha, beta, t, v0)
    proj, leak = column_project(N, psi)
    lattice = triangle_evolve(triangle_hamiltonian(N, alpha, beta), t)
    dev = float(np.abs(proj - lattice).max())
    return OrderedProjectionReport(N=N, alpha=alpha, beta=beta, t=t,
                                   max_deviation=dev, column_leakage=abs(leak))


def closed_form_amplitude(N: int, alpha: float, beta: float, t: float,
                          k: int, l: int) -> complex:
    """Endpoint-start transition amplitude to site (k, l):

        f = e^{-iN(alpha+2beta)t} sqrt(2^l)/4^N sqrt(multinomial(N;k,l))
            (1+2 z1+z2)^{N-k-l} (1-2 z1+z2)^k (1-z2)^l

    with z1 = e^{2i(alpha+beta)t}, z2 = e^{4i beta t}.  Global phase is kept
    as printed so direct evolution matches the formula exactly, not just in
    modulus.
    """
    if k < 0 or l < 0 or k + l > N:
        raise ValueError(f"site ({k}, {l}) outside the triangle for N={N}")
    z1 = np.exp(2j * (alpha + beta) * t)
    z2 = np.exp(4j * beta * t)
    return complex(
        np.exp(-1j * N * (alpha + 2 * beta) * t) * sqrt(2.0**l) / 4.0**N
        * sqrt(multinomial(N, k, l))
        * (1 + 2 * z1 + z2) ** (N - k - l)
        * (1 - 2 * z1 + z2) ** k
        * (1 - z2) ** l)


@dataclass(frozen=True, eq=False)
class AmplitudeGrid:
    """Transition amplitudes f_{(i,j)}(t), zero outside the triangle."""

    N: int
    times: np.ndarray
    values: np.ndarray          # shape (len(times), N+1, N+1), complex

    def norms(self) -> np.ndarray:
        """Per-time total probability (should be 1)."""
        return np.sum(np.abs(self.values) ** 2, axis=(1, 2))


def amplitude_grid(N: int, alpha: float, beta: float, times) -> AmplitudeGrid:
    """Evolve from the apex and tabulate amplitudes at the given times."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    op = triangle_hamiltonian(N, alpha, beta)
    vals, vecs = triangle_eigensystem(op)
    src = vecs[op.site_index(0, 0)]
    values = np.zeros((len(times), N + 1, N + 1), dtype=complex)
    phases = np.exp(-1j * np.outer(times, vals))
    amps = phases @ (vecs * src).T       # (T, D)
    for k, (i, j) in enumerate(op.sites):
        values[:, i, j] = amps[:, k]
    return AmplitudeGrid(N=N, times=times, values=values)


@dataclass(frozen=True, eq=False)
class TransferEvent2D:
    """One revival event on the lattice.

    kind: "PST" (single-site transfer away from the apex), "return" (back
    at the apex), or "FR" (support confined to the j = 0 edge).
    """

    kind: str
    time: float
    site: tuple[int, int] | None
    amplitude_deficit: float
    off_edge_leakage: float
    closed_form_deviation: float
    amplitudes: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class Transfer2DReport:
    N: int
    alpha: float
    beta: float
    t_max: float
    tol: float
    events: tuple[TransferEvent2D, ...]

    def first(self, kind: str) -> TransferEvent2D | None:
        for ev in self.events:
            if ev.kind == kind:
                return ev
        return None


def detect_2d_transfer(N: int, alpha: float, beta: float, t_max: float,
                       tol: float = DEFAULT_TOL,
                       grid: int = DEFAULT_GRID) -> Transfer2DReport:
    """Scan (0, t_max] for lattice transfer events.

    Candidate times are grid extrema of two diagnostics - the best
    single-site probability and the off-edge (j > 0) probability - refined
    by bounded scalar optimisation.  A refined time becomes a PST event
    when 1 - max|f| <= tol at a non-apex site, a return event at the apex,
    and an FR event when off-edge leakage <= tol.  Each event is
    cross-validated against the closed-form amplitude.
    """
    if t_max <= 0 or grid < 16:
        raise ValueError("need t_max > 0 and grid >= 16")
    if alpha <= 0 or beta <= 0:
        raise ValueError("weights must be positive")
    op = triangle_hamiltonian(N, alpha, beta)
    vals, vecs = triangle_eigensystem(op)
    src = vecs[op.site_index(0, 0)]
    comp = vecs * src                      # (D, S): amplitudes = comp @ phases
    off_edge = np.array([j > 0 for (_, j) in op.sites])

    ts = np.linspace(t_max / grid, t_max, grid)
    phases = np.exp(-1j * np.outer(ts, vals))
    probs = np.abs(phases @ comp.T) ** 2   # (T, D)
    conc = probs.max(axis=1)
    leak = probs[:, off_edge].sum(axis=1)

    def prob_vec(t):
        return np.abs(comp @ np.exp(-1j * t * vals)) ** 2

    def deficit_at(t):
        return 1.0 - np.sqrt(prob_vec(t).max())

    def leak_at(t):
        return prob_vec(t)[off_edge].sum()

    cands = []
    cands.extend(_grid_extrema(ts, -conc, threshold=-(1.0 - 1e-2)))
    cands.extend(_grid_extrema(ts, leak, threshold=1e-2))
    dt = ts[1] - ts[0]
    refined = []
    for t0, objective in cands:
        res = minimize_scalar(
            deficit_at if objective == "conc" else leak_at,
            bounds=(max(t0 - dt, ts[0] / 2), min(t0 + dt, t_max)),
            method="bounded", options={"xatol": 1e-12})
        refined.append(float(res.x))
    merged = []
    for t in sorted(refined):
        if merged and t - merged[-1] < dt / 4:    # same peak, both diagnostics
            continue
        merged.append(t)
    events = []
    for t in merged:
        amp = comp @ np.exp(-1j * t * vals)
        p = np.abs(amp) ** 2
        best = int(np.argmax(p))
        amp_deficit = 1.0 - float(np.sqrt(p[best]))
        edge_leak = float(p[off_edge].sum())
        if amp_deficit <= tol:
            kind = "PST" if op.sites[best] != (0, 0) else "return"
            site = op.sites[best]
        elif edge_leak <= tol:
            kind = "FR"
            site = None
        else:
            continue
        cf = np.array([closed_form_amplitude(N, alpha, beta, t, i, j)
                       for (i, j) in op.sites])
        events.append(TransferEvent2D(
            kind=kind, time=t, site=site, amplitude_deficit=amp_deficit,
            off_edge_leakage=edge_leak,
            closed_form_deviation=float(np.abs(amp - cf).max()),
            amplitudes=amp))
    return Transfer2DReport(N=N, alpha=alpha, beta=beta, t_max=t_max, tol=tol,
                            events=tuple(events))


def _grid_extrema(ts: np.ndarray, y: np.ndarray, threshold: float):
    """Interior minima of y below threshold, tagged with their objective."""
    tag = "conc" if threshold < 0 else "leak"
    mins = np.nonzero((y[1:-1] <= y[:-2]) & (y[1:-1] <= y[2:])
                      & (y[1:-1] <= threshold))[0] + 1
    out = [(ts[k], tag) for k in mins]
    if y[0] <= threshold and y[0] <= y[1]:
        out.append((ts[0], tag))
    if y[-1] <= threshold and y[-1] <= y[-2]:
        out.append((ts[-1], tag))
    return out
