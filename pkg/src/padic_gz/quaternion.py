"""Definite quaternion algebras B_q, a maximal order R_q, norm-form enumeration,
optimal embeddings of O_1 and O_2, the form det_F, and truncated theta products.

Elements carry exact rational coordinates in the standard basis 1, i, j, k
with i^2 = a, j^2 = b, ij = -ji = k.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from .padic import FElement, PAdic, PAdicContext
from .quadratic import Setup, conjugate_label
from .rational import class_number, factorize, kronecker

F0, H, Q4 = Fraction(0), Fraction(1, 2), Fraction(1, 4)


# --- Hilbert symbols -----------------------------------------------------------


def hilbert_symbol(a: int, b: int, ell: int | None) -> int:
    """(a, b)_ell for nonzero integers; ell=None is the real place."""
    if ell is None:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _strip(a, ell)
    beta, v = _strip(b, ell)
    if ell == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        omega = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if e % 2 else 1
    sign = (-1) ** (alpha * beta * ((ell - 1) // 2))
    return sign * kronecker(u, ell) ** beta * kronecker(v, ell) ** alpha


def _strip(n: int, ell: int) -> tuple[int, int]:
    k = 0
    while n % ell == 0:
        n //= ell
        k += 1
    return k, n


# --- algebra and elements -------------------------------------------------------


@dataclass(frozen=True)
class QuaternionAlgebra:
    a: int
    b: int

    @property
    def is_definite(self) -> bool:
        return self.a < 0 and self.b < 0

    def ramified_primes(self) -> list[int]:
        """Finite primes where (a, b) is a division algebra."""
        cands = {2} | {ell for ell, _ in factorize(self.a).factors} | {
            ell for ell, _ in factorize(self.b).factors}
        return sorted(ell for ell in cands if hilbert_symbol(self.a, self.b, ell) == -1)

    @property
    def discriminant(self) -> int:
        return math.prod(self.ramified_primes())

    def mul(self, x: Sequence[Fraction], y: Sequence[Fraction]) -> tuple[Fraction, ...]:
        a, b = self.a, self.b
        x0, x1, x2, x3 = x
        y0, y1, y2, y3 = y
        return (
            x0 * y0 + a * x1 * y1 + b * x2 * y2 - a * b * x3 * y3,
            x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2,
            x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        )

    def element(self, *coords) -> "Quaternion":
        return Quaternion(self, tuple(Fraction(c) for c in coords))


@dataclass(frozen=True)
class Quaternion:
    alg: QuaternionAlgebra
    coords: tuple[Fraction, Fraction, Fraction, Fraction]

    def __mul__(self, other: "Quaternion | int | Fraction") -> "Quaternion":
        if isinstance(other, Quaternion):
            return Quaternion(self.alg, self.alg.mul(self.coords, other.coords))
        return Quaternion(self.alg, tuple(c * other for c in self.coords))

    def __rmul__(self, other: int | Fraction) -> "Quaternion":
        return self * other

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.alg, tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.alg, tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> "Quaternion":
        return self * -1

    def conj(self) -> "Quaternion":
        c = self.coords
        return Quaternion(self.alg, (c[0], -c[1], -c[2], -c[3]))

    def trd(self) -> Fraction:
        return 2 * self.coords[0]

    def nrd(self) -> Fraction:
        x0, x1, x2, x3 = self.coords
        a, b = self.alg.a, self.alg.b
        return x0 * x0 - a * x1 * x1 - b * x2 * x2 + a * b * x3 * x3

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def __str__(self) -> str:
        names = ("", "i", "j", "k")
        parts = [f"{c}{n}" for c, n in zip(self.coords, names) if c]
        return " + ".join(parts) if parts else "0"


# --- maximal orders -------------------------------------------------------------

# Presentations and bases; each is re-certified on construction.
_ORDER_TABLE: dict[int, tuple[int, int, tuple[tuple[Fraction, ...], ...]]] = {
    2: (-1, -1, ((1, F0, F0, F0), (F0, 1, F0, F0), (F0, F0, 1, F0), (H, H, H, H))),
    3: (-1, -3, ((H, F0, H, F0), (F0, H, F0, H), (F0, F0, 1, F0), (F0, F0, F0, 1))),
    5: (-2, -5, ((H, F0, H, H), (F0, Q4, H, Q4), (F0, F0, 1, F0), (F0, F0, F0, 1))),
    11: (-1, -11, ((H, F0, H, F0), (F0, H, F0, H), (F0, F0, 1, F0), (F0, F0, F0, 1))),
}

SUPPORTED_Q = tuple(sorted(_ORDER_TABLE))


def _solve(matrix: list[list[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve matrix * x = rhs over Q (matrix square, invertible)."""
    n = len(matrix)
    m = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def _det(matrix: list[list[Fraction]]) -> Fraction:
    m = [list(row) for row in matrix]
    n, det = len(m), Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            m[r] = [v - f * w for v, w in zip(m[r], m[col])]
    return det


class OrderError(ValueError):
    pass


@dataclass(frozen=True)
class MaximalOrder:
    alg: QuaternionAlgebra
    basis: tuple[Quaternion, ...]
    gram: tuple[tuple[Fraction, ...], ...] = field(init=False)
    gram_scale: int = field(init=False)
    gram_int: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        g = tuple(tuple((x * y.conj()).trd() / 2 for y in self.basis) for x in self.basis)
        scale = math.lcm(*(c.denominator for row in g for c in row))
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "gram_scale", scale)
        object.__setattr__(self, "gram_int", tuple(tuple(int(c * scale) for c in row) for row in g))

    def element(self, c: Sequence[int]) -> Quaternion:
        out = self.alg.element(0, 0, 0, 0)
        for ci, e in zip(c, self.basis):
            if ci:
                out = out + e * ci
        return out

    def coords_of(self, x: Quaternion) -> list[Fraction]:
        cols = [[e.coords[r] for e in self.basis] for r in range(4)]
        return _solve(cols, x.coords)

    def contains(self, x: Quaternion) -> bool:
        return all(c.denominator == 1 for c in self.coords_of(x))

    def norm_form(self, c: Sequence[int]) -> Fraction:
        return Fraction(sum(self.gram_int[i][j] * c[i] * c[j]
                            for i in range(4) for j in range(4)), self.gram_scale)

    def certify(self, q: int) -> dict:
        """Recheck ramification, unit, closure and discriminant; raise OrderError on failure."""
        if not self.alg.is_definite:
            raise OrderError("algebra is not definite")
        ram = self.alg.ramified_primes()
        if ram != [q]:
            raise OrderError(f"algebra ramifies at {ram}, expected [{q}]")
        one = self.alg.element(1, 0, 0, 0)
        if not self.contains(one):
            raise OrderError("order does not contain 1")
        for x in self.basis:
            if x.nrd().denominator != 1 or x.trd().denominator != 1:
                raise OrderError(f"basis element {x} is not integral")
            for y in self.basis:
                if not self.contains(x * y):
                    raise OrderError(f"order not closed: {x} * {y}")
        det = _det([list(r) for r in self.gram])
        if det != Fraction(q * q, 16):
            raise OrderError(f"norm-form determinant {det}, expected {q}^2/16")
        return {"ramified": ram, "gramDeterminant": str(det), "closed": True}


def build_algebra_and_order(q: int) -> tuple[QuaternionAlgebra, MaximalOrder]:
    if q not in _ORDER_TABLE:
        raise OrderError(f"q = {q} is not supported (choose from {SUPPORTED_Q})")
    a, b, rows = _ORDER_TABLE[q]
    alg = QuaternionAlgebra(a, b)
    order = MaximalOrder(alg, tuple(alg.element(*r) for r in rows))
    order.certify(q)
    return alg, order


# --- enumeration ----------------------------------------------------------------


def _fp_decompose(gram: Sequence[Sequence[Fraction]]) -> list[list[float]]:
    # Q(x) = sum_i q[i][i] * (x_i + sum_{j>i} q[i][j] x_j)^2
    n = len(gram)
    q = [[float(v) for v in row] for row in gram]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def enumerate_norm(order: MaximalOrder, n: int) -> list[tuple[int, ...]]:
    """Order coordinates of all elements of reduced norm n, sorted.

    Fincke-Pohst on the outer three coordinates with float bounds; the first
    coordinate is then solved exactly from an integer quadratic.
    """
    if n < 1:
        raise ValueError("norm must be positive")
    G, M = order.gram_int, order.gram_scale
    target = n * M
    q = _fp_decompose(order.gram)
    slack = 1e-9 * n + 1e-9
    out: list[tuple[int, ...]] = []
    x = [0, 0, 0, 0]

    def solve_first():
        L = sum(G[0][j] * x[j] for j in range(1, 4))
        R = sum(G[i][j] * x[i] * x[j] for i in range(1, 4) for j in range(1, 4))
        disc = L * L - G[0][0] * (R - target)
        if disc < 0:
            return
        s = math.isqrt(disc)
        if s * s != disc:
            return
        for num in {-L + s, -L - s}:
            if num % G[0][0] == 0:
                out.append((num // G[0][0], x[1], x[2], x[3]))

    def rec(i: int, remaining: float):
        if i == 0:
            solve_first()
            return
        center = -sum(q[i][j] * x[j] for j in range(i + 1, 4))
        r = math.sqrt(max(remaining + slack, 0.0) / q[i][i])
        for xi in range(math.ceil(center - r - 1e-9), math.floor(center + r + 1e-9) + 1):
            x[i] = xi
            rec(i - 1, remaining - q[i][i] * (xi - center) ** 2)
        x[i] = 0

    rec(3, float(n))
    return sorted(out)


def norm_counts(order: MaximalOrder, max_norm: int) -> dict[int, int]:
    return {m: len(enumerate_norm(order, m)) for m in range(1, max_norm + 1)}


# --- CM embeddings, det_F, reflex ideal ------------------------------------------


class EmbeddingError(ValueError):
    pass


def _gcd_minors(u: Sequence[int], w: Sequence[int]) -> int:
    g = 0
    for i in range(4):
        for j in range(i + 1, 4):
            g = math.gcd(g, u[i] * w[j] - u[j] * w[i])
    return g


def find_cm_embedding(order: MaximalOrder, D_i: int) -> Quaternion:
    """Lexicographically first omega in the order with trace 1, norm (1 - D_i)/4,
    generating an optimally embedded copy of the maximal order of Q(sqrt D_i)."""
    if D_i >= 0 or D_i % 4 != 1:
        raise EmbeddingError("need an odd negative discriminant")
    nrm = (1 - D_i) // 4
    one = [int(c) for c in order.coords_of(order.alg.element(1, 0, 0, 0))]
    for c in enumerate_norm(order, nrm):
        w = order.element(c)
        if w.trd() != 1:
            continue
        if _gcd_minors(one, c) == 1:
            return w
    raise EmbeddingError(f"no optimal embedding of discriminant {D_i} into this order")


def embedding_index(order: MaximalOrder, omega: Quaternion) -> int:
    """[order cap Q(omega) : Z[omega]]; 1 means the embedding is optimal."""
    one = [int(c) for c in order.coords_of(order.alg.element(1, 0, 0, 0))]
    return _gcd_minors(one, [int(c) for c in order.coords_of(omega)])


@dataclass(frozen=True)
class CMEmbeddingPair:
    """Embeddings of O_1 (acting on the left) and O_2 (on the right).

    s_i = 2*omega_i - 1 is the image of sqrt(D_i).
    """

    order: MaximalOrder
    D1: int
    D2: int
    omega1: Quaternion
    omega2: Quaternion

    @property
    def s1(self) -> Quaternion:
        return self.omega1 * 2 - self.order.alg.element(1, 0, 0, 0)

    @property
    def s2(self) -> Quaternion:
        return self.omega2 * 2 - self.order.alg.element(1, 0, 0, 0)

    @property
    def D(self) -> int:
        return self.D1 * self.D2

    def act_sqrt_D(self, gamma: Quaternion) -> Quaternion:
        """sqrt(D) = sqrt(D1) sqrt(D2) acting as gamma -> s1 gamma s2."""
        return self.s1 * gamma * self.s2

    def conjugate_second(self) -> "CMEmbeddingPair":
        one = self.order.alg.element(1, 0, 0, 0)
        return CMEmbeddingPair(self.order, self.D1, self.D2, self.omega1, one - self.omega2)

    @cached_property
    def x_form(self) -> tuple[tuple[tuple[int, ...], ...], int]:
        """x(b) as a quadratic form in order coordinates: (integer matrix, scale)."""
        B = self.order.basis
        m = [[((self.s1 * B[i] * self.s2 * B[j].conj()).trd()
               + (self.s1 * B[j] * self.s2 * B[i].conj()).trd()) / 4 for j in range(4)]
             for i in range(4)]
        scale = math.lcm(*(c.denominator for row in m for c in row))
        return tuple(tuple(int(c * scale) for c in row) for row in m), scale

    def x_of_coords(self, c: Sequence[int]) -> int:
        X, scale = self.x_form
        v = sum(X[i][j] * c[i] * c[j] for i in range(4) for j in range(4))
        if v % scale:
            raise ArithmeticError("det_F is not integral")
        return v // scale

    def x_of(self, gamma: Quaternion) -> int:
        """det_F(gamma) = (x + Nm(gamma) sqrt D)/(2 sqrt D); returns x = trd(s1 gamma s2 gamma-bar)/2."""
        v = (self.s1 * gamma * self.s2 * gamma.conj()).trd() / 2
        if v.denominator != 1:
            raise ArithmeticError("det_F is not integral")
        return int(v)


def make_embedding_pair(order: MaximalOrder, D1: int, D2: int) -> CMEmbeddingPair:
    return CMEmbeddingPair(order, D1, D2, find_cm_embedding(order, D1), find_cm_embedding(order, D2))


def det_F_pair(gamma: Quaternion, emb: CMEmbeddingPair):
    """(det_F(gamma), det_F'(gamma)) as FElements (u + v sqrt D)/2.

    Recovered by polarization: Nm((1 + sqrt D) * gamma) = Tr((1 + sqrt D)^2 det_F(gamma)).
    """
    if gamma.is_zero:
        raise ValueError("det_F of zero")
    m = gamma.nrd()
    shifted = gamma + emb.act_sqrt_D(gamma)
    z = (shifted.nrd() - (1 + emb.D) * m) / (2 * emb.D)
    return FElement(m, z, emb.D), FElement(m, -z, emb.D)


class ReflexError(ArithmeticError):
    pass


def reflex_label(setup: Setup, emb: CMEmbeddingPair, max_norm: int = 16) -> tuple[int, dict]:
    """Label of the prime above q containing every (x + Nm(b) sqrt D)/2, b in the order.

    Every b of norm t <= max_norm gives x with x = c*t (mod 2q) for a single
    residue c among the two labels; anything else aborts.
    """
    q = setup.q
    labels = sorted({setup.root_q, conjugate_label(q, setup.root_q)})
    alive = set(labels)
    sample = 0
    for t in range(1, max_norm + 1):
        for c in enumerate_norm(emb.order, t):
            x = emb.x_of_coords(c)
            sample += 1
            alive &= {lab for lab in labels if (x - lab * t) % (2 * q) == 0}
    if len(alive) != 1:
        raise ReflexError(f"reflex census not unanimous: surviving labels {sorted(alive)}")
    label = alive.pop()
    return label, {"label": label, "sampleSize": sample, "maxNorm": max_norm}


# --- theta products ---------------------------------------------------------------


def require_class_number_one(D1: int, D2: int) -> None:
    for d in (D1, D2):
        h = class_number(d)
        if h != 1:
            raise ValueError(f"class number of Q(sqrt {d}) is {h}; quaternionic theta needs 1")


def theta_level(ctx: PAdicContext, emb: CMEmbeddingPair, norm: int) -> PAdic:
    """Product over b with Nm(b) = norm of -det_F(b)/det_F'(b), embedded at p1."""
    require_class_number_one(emb.D1, emb.D2)
    W = ctx.working_precision
    p = ctx.p
    s = ctx.sqrt_p1
    total = PAdic(p, 0, 1, W)
    for c in enumerate_norm(emb.order, norm):
        x = emb.x_of_coords(c)
        # nu/nu' = -(x + t s)/(x - t s) at p1
        num = PAdic.of(-(x + norm * s), p, W)
        den = PAdic.of(x - norm * s, p, W)
        total = total * num / den
    return total


def theta_truncated(ctx: PAdicContext, emb: CMEmbeddingPair, n_max: int,
                    parity: str = "even") -> list[PAdic]:
    """Level products for n = 0..n_max over norms p^(2n) (even) or p^(2n+1) (odd)."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    off = 0 if parity == "even" else 1
    return [theta_level(ctx, emb, ctx.p ** (2 * n + off)) for n in range(n_max + 1)]


def x_census(emb: CMEmbeddingPair, t: int) -> Counter:
    """How many order elements of norm t have each value of x."""
    return Counter(emb.x_of_coords(c) for c in enumerate_norm(emb.order, t))


def unit_group_order(order: MaximalOrder) -> int:
    return len(enumerate_norm(order, 1))


__all__ = [
    "CMEmbeddingPair",
    "EmbeddingError",
    "MaximalOrder",
    "OrderError",
    "Quaternion",
    "QuaternionAlgebra",
    "ReflexError",
    "SUPPORTED_Q",
    "build_algebra_and_order",
    "det_F_pair",
    "embedding_index",
    "enumerate_norm",
    "find_cm_embedding",
    "hilbert_symbol",
    "make_embedding_pair",
    "norm_counts",
    "reflex_label",
    "theta_level",
    "theta_truncated",
    "unit_group_order",
    "x_census",
]
