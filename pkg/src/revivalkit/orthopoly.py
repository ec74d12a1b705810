"""Univariate Krawtchouk and para-Krawtchouk polynomial families.

Couplings and fields are packaged as `RecurrenceCoefficients`: the symmetric
tridiagonal (Jacobi) matrix

    B_0 J_1
    J_1 B_1 J_2
        J_2 ...

is the one-excitation Hamiltonian of an XX spin chain, and its orthonormal
polynomials chi_n(x) obey

    x chi_n = J_{n+1} chi_{n+1} + B_n chi_n + J_n chi_{n-1},  chi_0 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RecurrenceCoefficients",
    "KrawtchoukParams",
    "ParaKrawtchoukParams",
    "InfeasibleParametersError",
    "krawtchouk_eval",
    "krawtchouk_chain",
    "para_krawtchouk_chain",
    "evaluate_chi",
]

# chi_n forward recurrence overflows in double precision past desk scale;
# chains above this length are rejected rather than mitigated.
MAX_SITES = 65


class InfeasibleParametersError(ValueError):
    """Requested parameters give some J_n^2 <= 0 (no valid chain exists)."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True, eq=False)
class RecurrenceCoefficients:
    """Spin-chain specification: couplings J_1..J_N and fields B_0..B_N."""

    J: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        J = np.atleast_1d(np.asarray(self.J, dtype=float))
        B = np.atleast_1d(np.asarray(self.B, dtype=float))
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "B", B)
        if len(B) != len(J) + 1:
            raise ValueError(
                f"need len(B) == len(J) + 1, got {len(B)} and {len(J)}"
            )
        if len(B) < 2:
            raise ValueError("a chain needs at least 2 sites")
        if not np.all(np.isfinite(J)) or not np.all(np.isfinite(B)):
            raise ValueError("coefficients must be finite")
        if np.any(J <= 0):
            k = int(np.argmax(J <= 0))
            raise InfeasibleParametersError(
                f"coupling J_{k + 1} = {J[k]} is not strictly positive", index=k + 1
            )

    @property
    def n_sites(self) -> int:
        return len(self.B)

    @property
    def n(self) -> int:
        """Largest site index N (sites run 0..N)."""
        return len(self.J)


@dataclass(frozen=True)
class KrawtchoukParams:
    """Degree cap N and success probability p of K_n^N(x; p)."""

    N: int
    p: float = 0.5

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")


@dataclass(frozen=True)
class ParaKrawtchoukParams:
    """Odd length N, scale beta and bi-lattice spacing delta in (0, 2)."""

    N: int
    beta: float = 1.0
    delta: float = 0.5

    def __post_init__(self):
        if self.N < 1 or self.N % 2 == 0:
            # the closed-form couplings below are the odd-N expression;
            # even-N chains come from spectral reconstruction instead
            raise ValueError(f"N must be odd and >= 1, got {self.N}")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not 0.0 < self.delta < 2.0:
            raise InfeasibleParametersError(
                f"delta must lie in (0, 2), got {self.delta}; "
                "outside that range some J_n^2 <= 0"
            )


def _krawtchouk_sum(n: int, x: float, cap: int, p: float) -> float:
    """Terminating sum sum_k (-n)_k (-x)_k / (k! (-cap)_k) p^{-k}.

    Term-by-term running products; the loop stops as soon as a numerator
    Pochhammer factor hits zero, which for integer x in 0..cap happens
    before the (-cap)_k denominator can vanish.
    """
    total = 1.0
    term = 1.0
    for k in range(n):
        num = (k - n) * (k - x)
        if num == 0.0:
            break
        term *= num / ((k + 1) * (k - cap) * p)
        total += term
    return total


def krawtchouk_eval(n: int, x: float, params: KrawtchoukParams) -> float:
    """Evaluate the Krawtchouk polynomial K_n^N(x; p).

    Exact (to rounding) for integer x in 0..N; defined for real x by the
    same degree-n terminating sum.
    """
    N = params.N
    if not 0 <= n <= N:
        raise ValueError(f"degree n must lie in 0..{N}, got {n}")
    if N > MAX_SITES - 1:
        raise ValueError(f"N capped at {MAX_SITES - 1}, got {N}")
    return _krawtchouk_sum(n, x, N, params.p)


def krawtchouk_chain(N: int, beta: float = 1.0) -> RecurrenceCoefficients:
    """Chain with J_n = beta*sqrt(n(N+1-n))/2 and zero fields.

    Exhibits perfect state transfer at t = pi/beta and no fractional
    revival at intermediate times.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    n = np.arange(1, N + 1, dtype=float)
    J = beta * np.sqrt(n * (N + 1 - n)) / 2.0
    return RecurrenceCoefficients(J=J, B=np.zeros(N + 1))


def para_krawtchouk_chain(params: ParaKrawtchoukParams) -> RecurrenceCoefficients:
    """Chain orthogonal on the bi-lattice, odd N:

        J_n = (beta/2) sqrt( n(N+1-n)((N+1-2n)^2 - delta^2)
                             / ((N-2n)(N-2n+2)) ),   B_n = 0.

    Mirror symmetric (J_{N-n+1} = J_n) in closed form; supports both
    fractional revival at t = pi/beta and perfect state transfer when
    delta is rational.
    """
    N, beta, delta = params.N, params.beta, params.delta
    n = np.arange(1, N + 1, dtype=float)
    jsq = (beta / 2.0) ** 2 * (
        n * (N + 1 - n) * ((N + 1 - 2 * n) ** 2 - delta**2)
        / ((N - 2 * n) * (N - 2 * n + 2))
    )
    if np.any(jsq <= 0):
        k = int(np.argmax(jsq <= 0)) + 1
        raise InfeasibleParametersError(
            f"J_{k}^2 = {jsq[k - 1]} <= 0 for N={N}, delta={delta}", index=k
        )
    return RecurrenceCoefficients(J=np.sqrt(jsq), B=np.zeros(N + 1))


def evaluate_chi(coeffs: RecurrenceCoefficients, x: float) -> np.ndarray:
    """Orthonormal polynomial values (chi_0(x), ..., chi_N(x)).

    Forward three-term recurrence; no overflow mitigation (length cap
    MAX_SITES applies).
    """
    if coeffs.n_sites > MAX_SITES:
        raise ValueError(f"chain length capped at {MAX_SITES} sites")
    J, B = coeffs.J, coeffs.B
    chi = np.empty(coeffs.n_sites)
    chi[0] = 1.0
    prev = 0.0
    for n in range(coeffs.n):
        jn = J[n - 1] if n >= 1 else 0.0
        chi[n + 1] = ((x - B[n]) * chi[n] - jn * prev) / J[n]
        prev = chi[n]
    return chi
