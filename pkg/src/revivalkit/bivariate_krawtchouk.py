"""Bivariate Krawtchouk polynomials on the discrete triangle 0 <= x+y <= N.

Two constructions are implemented and played against each other:

* the product form T_{m,n}(x, y) - two univariate Krawtchouk factors with a
  Pochhammer prefactor, orthogonal for the trinomial distribution;
* the quadruple hypergeometric sum G_{m,n}(x, y) in parameters
  (u1, v1, u2, v2), which reduces to the product form for
  u1 = 1/p, v1 = 0, u2 = 1, v2 = (1-p)/q.

A rotation matrix R in SO(3) induces an orthonormal family via the
quadruple sum with its rational parametrisation; those polynomials satisfy
a pair of seven-term recurrences in the degree indices, verified here.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial, sqrt

import numpy as np

from .orthopoly import _krawtchouk_sum

__all__ = [
    "TratnikParams",
    "GriffithsParams",
    "Rotation3",
    "SingularRotationError",
    "triangle",
    "multinomial",
    "trinomial_weight",
    "tratnik_eval",
    "griffiths_eval",
    "so3_weight",
    "orthonormal_eval",
    "rotation_polynomials",
    "verify_seven_term",
    "generating_function_check",
    "random_rotation",
    "tratnik_rotation",
    "SevenTermReport",
    "GeneratingFunctionReport",
]

SEVEN_TERM_MAX_N = 12
# summation condition above which the quadruple sum cannot certify 1e-8
MAX_BUILD_CONDITION = 1e6


class SingularRotationError(ValueError):
    """Rotation entries required by the parametrisation (nearly) vanish."""


@dataclass(frozen=True)
class TratnikParams:
    """Trinomial parameters: p, q > 0 with p + q < 1."""

    N: int
    p: float = 0.5
    q: float = 0.25

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.p <= 0 or self.q <= 0 or self.p + self.q >= 1:
            raise ValueError(
                f"need p, q > 0 and p + q < 1, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class GriffithsParams:
    """Series parameters constrained by p u_i + q v_i = 1 and
    p u1 u2 + q v1 v2 = 1."""

    u1: float
    v1: float
    u2: float
    v2: float
    p: float
    q: float

    def __post_init__(self):
        for i, (u, v) in enumerate(((self.u1, self.v1), (self.u2, self.v2)), 1):
            r = self.p * u + self.q * v - 1.0
            if abs(r) > 1e-12:
                raise ValueError(f"p*u{i} + q*v{i} - 1 = {r:.2e} (must vanish)")
        r = self.p * self.u1 * self.u2 + self.q * self.v1 * self.v2 - 1.0
        if abs(r) > 1e-12:
            raise ValueError(f"p*u1*u2 + q*v1*v2 - 1 = {r:.2e} (must vanish)")

    @classmethod
    def tratnik(cls, p: float, q: float) -> "GriffithsParams":
        """Parameters collapsing the quadruple sum to the product form."""
        return cls(u1=1.0 / p, v1=0.0, u2=1.0, v2=(1.0 - p) / q, p=p, q=q)


@dataclass(frozen=True, eq=False)
class Rotation3:
    """Validated 3x3 rotation matrix."""

    R: np.ndarray

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        object.__setattr__(self, "R", R)
        if R.shape != (3, 3):
            raise ValueError(f"expected a 3x3 matrix, got shape {R.shape}")
        if np.abs(R.T @ R - np.eye(3)).max() > 1e-12:
            raise ValueError("matrix is not orthogonal within 1e-12")
        if abs(np.linalg.det(R) - 1.0) > 1e-12:
            raise ValueError("determinant must be +1 within 1e-12")


def triangle(N: int) -> list[tuple[int, int]]:
    """All index pairs (i, j) with 0 <= i + j <= N, row-major in i."""
    return [(i, j) for i in range(N + 1) for j in range(N + 1 - i)]


def multinomial(N: int, i: int, j: int) -> int:
    """N! / (i! j! (N-i-j)!)."""
    return comb(N, i) * comb(N - i, j)


def _check_triangle(N: int, i: int, j: int, what: str) -> None:
    if i < 0 or j < 0 or i + j > N:
        raise ValueError(f"{what} ({i}, {j}) outside the triangle 0 <= i+j <= {N}")


def trinomial_weight(params: TratnikParams, x: int, y: int) -> float:
    """multinomial(N; x, y) p^x q^y (1-p-q)^{N-x-y}."""
    _check_triangle(params.N, x, y, "point")
    N, p, q = params.N, params.p, params.q
    return multinomial(N, x, y) * p**x * q**y * (1 - p - q) ** (N - x - y)


def _pochhammer(a: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def tratnik_eval(idx: tuple[int, int], point: tuple[int, int],
                 params: TratnikParams) -> float:
    """Product-form polynomial

        T_{m,n}(x, y) = (n-N)_m (x-N)_n / (-N)_{m+n}
                        * K_m^{N-n}(x; p) * K_n^{N-x}(y; q/(1-p)).

    The inner factor's length cap N-x can drop below its degree n; the
    terminating sums stop on the first vanishing numerator factor, which
    keeps every in-triangle evaluation finite.
    """
    m, n = idx
    x, y = point
    N, p, q = params.N, params.p, params.q
    _check_triangle(N, m, n, "index")
    _check_triangle(N, x, y, "point")
    pre = _pochhammer(n - N, m) * _pochhammer(x - N, n) / _pochhammer(-N, m + n)
    return (pre * _krawtchouk_sum(m, x, N - n, p)
            * _krawtchouk_sum(n, y, N - x, q / (1.0 - p)))


def griffiths_eval(idx: tuple[int, int], point: tuple[int, int],
                   gparams: GriffithsParams, N: int) -> float:
    """Quadruple terminating sum over i+j+k+l <= N with term

        (-m)_{i+j} (-n)_{k+l} (-x)_{i+k} (-y)_{j+l}
        / (i! j! k! l! (-N)_{i+j+k+l}) * u1^i v1^j u2^k v2^l.
    """
    m, n = idx
    x, y = point
    _check_triangle(N, m, n, "index")
    value, _ = _griffiths_term_sum(m, n, float(x), float(y), N, gparams)
    return value


def _griffiths_term_sum(m: int, n: int, x: float, y: float, N: int,
                        g: GriffithsParams) -> tuple[float, float]:
    """(sum, sum of |term|); the second entry scales the achievable accuracy."""
    total = 0.0
    abs_total = 0.0
    for i in range(m + 1):
        u1i = g.u1**i
        for j in range(m - i + 1):
            pm = _pochhammer(-m, i + j)
            c_ij = pm * u1i * g.v1**j / (factorial(i) * factorial(j))
            if c_ij == 0.0:
                continue
            for k in range(n + 1):
                for l in range(n - k + 1):
                    pn = _pochhammer(-n, k + l)
                    px = _pochhammer(-x, i + k)
                    py = _pochhammer(-y, j + l)
                    pN = _pochhammer(-N, i + j + k + l)
                    term = (c_ij * pn * px * py * g.u2**k * g.v2**l
                            / (factorial(k) * factorial(l) * pN))
                    total += term
                    abs_total += abs(term)
    return total, abs_total


def so3_weight(rot: Rotation3, N: int, point: tuple[int, int]) -> float:
    """Ground-row element w_{i,k} = R13^i R23^k R33^{N-i-k} sqrt(multinomial).

    The squares sum to 1 over the triangle and reproduce the trinomial
    weight with p = R13^2, q = R23^2.
    """
    i, k = point
    _check_triangle(N, i, k, "point")
    R = rot.R
    if R[2, 2] == 0.0:
        raise SingularRotationError("R33 = 0: weight normalisation undefined")
    return (R[0, 2] ** i * R[1, 2] ** k * R[2, 2] ** (N - i - k)
            * sqrt(multinomial(N, i, k)))


def orthonormal_eval(idx: tuple[int, int], point: tuple[int, int], N: int) -> float:
    """Orthonormal product-form polynomial at p = 1/2, q = 1/4.

    The normalisation sqrt(multinomial(N; i, j) p~^i q~^j (1-p-q)^{-i-j})
    with p~ = p(1-p-q)/(1-p), q~ = q/(1-p) reduces at these parameters to
    sqrt(multinomial(N; i, j) 2^j).
    """
    i, j = idx
    _check_triangle(N, i, j, "index")
    params = TratnikParams(N=N, p=0.5, q=0.25)
    return sqrt(multinomial(N, i, j) * 2.0**j) * tratnik_eval(idx, point, params)


def _rotation_gparams(R: np.ndarray, floor: float = 1e-12) -> GriffithsParams:
    small = min(abs(R[0, 2]), abs(R[1, 2]), abs(R[2, 0]), abs(R[2, 1]),
                abs(R[2, 2]))
    if small < floor:
        raise SingularRotationError(
            "parametrisation divides by R13, R23, R31, R32, R33; "
            f"smallest magnitude {small:.2e}")
    return GriffithsParams(
        u1=1 - R[0, 0] * R[2, 2] / (R[0, 2] * R[2, 0]),
        v1=1 - R[1, 0] * R[2, 2] / (R[1, 2] * R[2, 0]),
        u2=1 - R[0, 1] * R[2, 2] / (R[0, 2] * R[2, 1]),
        v2=1 - R[1, 1] * R[2, 2] / (R[1, 2] * R[2, 1]),
        p=R[0, 2] ** 2, q=R[1, 2] ** 2)


def _falling_table(N: int) -> np.ndarray:
    """F[d, x] = (-x)_d for d = 0..N and integer x = 0..N."""
    xs = np.arange(N + 1, dtype=float)
    F = np.empty((N + 1, N + 1))
    F[0] = 1.0
    for d in range(1, N + 1):
        F[d] = F[d - 1] * (-xs + d - 1)
    return F


def rotation_polynomials(rot: Rotation3, N: int) -> tuple[np.ndarray, float]:
    """Orthonormal family from a rotation, tabulated over the triangle.

    Returns (P, condition): P[a, b] = P_{m,n}(x, y) for index a = (m, n) and
    point b = (x, y) in `triangle(N)` order, built as the quadruple sum with
    the rotation parametrisation times the prefactor
    sqrt(multinomial) (R31/R33)^m (R32/R33)^n.  `condition` estimates how
    much cancellation the worst table entry suffered (1 = none); residual
    checks against the table are meaningless below condition * eps.

    The quadruple sum is evaluated with the point dependence vectorised over
    the whole triangle (matches griffiths_eval term for term).
    """
    R = rot.R
    g = _rotation_gparams(R)
    tri = triangle(N)
    D = len(tri)
    pts = np.array(tri)
    F = _falling_table(N)
    px = F[:, pts[:, 0]]     # px[d, b] = (-x_b)_d
    py = F[:, pts[:, 1]]
    pochN = np.cumprod(np.concatenate(([1.0], -N + np.arange(N, dtype=float))))
    P = np.empty((D, D))
    cond = 1.0
    for a, (m, n) in enumerate(tri):
        pref = (sqrt(multinomial(N, m, n))
                * (R[2, 0] / R[2, 2]) ** m * (R[2, 1] / R[2, 2]) ** n)
        acc = np.zeros(D)
        abs_acc = np.zeros(D)
        for i in range(m + 1):
            for j in range(m - i + 1):
                c_ij = (_pochhammer(-m, i + j) * g.u1**i * g.v1**j
                        / (factorial(i) * factorial(j)))
                if c_ij == 0.0:
                    continue
                for k in range(n + 1):
                    for l in range(n - k + 1):
                        coef = (c_ij * _pochhammer(-n, k + l)
                                * g.u2**k * g.v2**l
                                / (factorial(k) * factorial(l)
                                   * pochN[i + j + k + l]))
                        term = coef * px[i + k] * py[j + l]
                        acc += term
                        abs_acc += np.abs(term)
        P[a] = pref * acc
        cond = max(cond, float(
            (abs(pref) * abs_acc / np.maximum(1.0, np.abs(P[a]))).max()))
    return P, cond


@dataclass(frozen=True)
class SevenTermReport:
    N: int
    max_residual: float
    build_condition: float
    tol: float = 1e-8

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def verify_seven_term(rot: Rotation3, N: int, tol: float = 1e-8) -> SevenTermReport:
    """Check both seven-term recurrences on the rotation family.

    For every degree index (m, n) and point (x, y) the sum

        x P_{m,n} = [R11^2 m + R12^2 n + R13^2 (N-m-n)] P_{m,n}
                    + R11 R12 [sqrt(m(n+1)) P_{m-1,n+1} + sqrt(n(m+1)) P_{m+1,n-1}]
                    + R11 R13 [sqrt(m(N-m-n+1)) P_{m-1,n} + sqrt((m+1)(N-m-n)) P_{m+1,n}]
                    + R12 R13 [sqrt(n(N-m-n+1)) P_{m,n-1} + sqrt((n+1)(N-m-n)) P_{m,n+1}]

    (and its second-row twin with y on the left) is tested; out-of-triangle
    indices are exact zeros.  Residuals are measured relative to the largest
    term in each instance, since table entries legitimately span many orders
    of magnitude.
    """
    if N > SEVEN_TERM_MAX_N:
        raise ValueError(f"N capped at {SEVEN_TERM_MAX_N}, got {N}")
    R = rot.R
    P, cond = rotation_polynomials(rot, N)
    tri = triangle(N)
    pos = {mn: a for a, mn in enumerate(tri)}

    def row(m: int, n: int) -> np.ndarray:
        a = pos.get((m, n))
        return P[a] if a is not None else 0.0

    pts = np.array(tri)
    max_rel = 0.0
    for (m, n) in tri:
        base = row(m, n)
        for r, lhs_coord in ((0, pts[:, 0]), (1, pts[:, 1])):
            a, b, c = R[r, 0], R[r, 1], R[r, 2]
            terms = [
                (a * a * m + b * b * n + c * c * (N - m - n)) * base,
                a * b * sqrt(m * (n + 1)) * row(m - 1, n + 1),
                a * b * sqrt(n * (m + 1)) * row(m + 1, n - 1),
                a * c * sqrt(m * (N - m - n + 1)) * row(m - 1, n),
                a * c * sqrt((m + 1) * (N - m - n)) * row(m + 1, n),
                b * c * sqrt(n * (N - m - n + 1)) * row(m, n - 1),
                b * c * sqrt((n + 1) * (N - m - n)) * row(m, n + 1),
            ]
            lhs = lhs_coord * base
            rhs = sum(terms)
            scale = np.maximum(1.0, np.abs(lhs))
            for tval in terms:
                scale = np.maximum(scale, np.abs(tval))
            max_rel = max(max_rel, float((np.abs(lhs - rhs) / scale).max()))
    return SevenTermReport(N=N, max_residual=max_rel, build_condition=cond,
                           tol=tol)


@dataclass(frozen=True)
class GeneratingFunctionReport:
    N: int
    idx: tuple[int, int]
    s: float
    t: float
    lhs: float
    rhs: float
    residual: float
    tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.residual < self.tol


def generating_function_check(params: TratnikParams, idx: tuple[int, int],
                              s: float, t: float,
                              tol: float = 1e-9) -> GeneratingFunctionReport:
    """Compare sum_{x,y} multinomial(N;x,y) T_{i,j}(x,y) s^x t^y against

        (1+s+t)^{N-i-j} (1 + (p-1)/p s + t)^i (1 + (p+q-1)/q t)^j,

    residual relative to max(1, |lhs|, |rhs|).
    """
    i, j = idx
    N, p, q = params.N, params.p, params.q
    _check_triangle(N, i, j, "index")
    lhs = 0.0
    for (x, y) in triangle(N):
        lhs += (multinomial(N, x, y) * tratnik_eval(idx, (x, y), params)
                * s**x * t**y)
    rhs = ((1 + s + t) ** (N - i - j)
           * (1 + (p - 1) / p * s + t) ** i
           * (1 + (p + q - 1) / q * t) ** j)
    resid = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
    return GeneratingFunctionReport(N=N, idx=idx, s=s, t=t, lhs=lhs, rhs=rhs,
                                    residual=resid, tol=tol)


def tratnik_rotation() -> Rotation3:
    """Product rotation about two orthogonal axes realising p=1/2, q=1/4.

    theta = phi = pi/4 gives R13^2 = 1/2, R23^2 = R33^2 = 1/4.
    """
    th = ph = np.pi / 4
    r_yz = np.array([[1, 0, 0],
                     [0, np.cos(th), -np.sin(th)],
                     [0, np.sin(th), np.cos(th)]])
    r_xz = np.array([[np.cos(ph), 0, -np.sin(ph)],
                     [0, 1, 0],
                     [np.sin(ph), 0, np.cos(ph)]])
    return Rotation3(R=r_yz @ r_xz)


def random_rotation(rng: np.random.Generator, N: int | None = None,
                    entry_floor: float = 1e-3,
                    max_condition: float = MAX_BUILD_CONDITION) -> Rotation3:
    """Haar-ish random rotation usable by the quadruple-sum build.

    Orthogonalises a Gaussian 3x3 matrix and fixes det = +1.  Candidates
    whose parametrisation entries fall below `entry_floor` are regenerated;
    when N is given, candidates whose table build at that N would suffer
    cancellation beyond `max_condition` are regenerated as well (the
    recurrence check cannot certify anything about those).
    """
    while True:
        M = rng.standard_normal((3, 3))
        Q, upper = np.linalg.qr(M)
        Q = Q * np.sign(np.diag(upper))
        if np.linalg.det(Q) < 0:
            Q[:, [0, 1]] = Q[:, [1, 0]]
        if min(abs(Q[2, 2]), abs(Q[0, 2]), abs(Q[1, 2]),
               abs(Q[2, 0]), abs(Q[2, 1])) < entry_floor:
            continue
        rot = Rotation3(R=Q)
        if N is not None:
            _, cond = rotation_polynomials(rot, N)
            if cond > max_condition:
                continue
        return rot
