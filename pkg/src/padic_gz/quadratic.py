"""Quadratic fields K1, K2, F = Q(sqrt D) and the genus character of L/F.

Ideals of F never need a class group here: every ideal we meet is either a
prime power or the ideal of an element (x + t*sqrt(D))/2, so ideals are kept
as explicit factorizations over labelled primes.

A split prime above l is labelled by an odd residue c mod 2l with c^2 = D mod 4l;
the prime labelled c is the one containing (c + sqrt D)/2.  In its completion
sqrt(D) is congruent to -c mod 2l, and (x + t*sqrt D)/2 lies in it exactly when
x = c*t (mod 2l).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .rational import (
    FactoredRational,
    factorize,
    is_fundamental_discriminant,
    is_prime,
    kronecker,
    sqrt_mod_prime,
    sqrt_mod_prime_power,
    unit_count,
)


class SetupError(ValueError):
    """Raised when (D1, D2, p, q) violate a standing hypothesis."""


SPLIT, RAMIFIED, INERT = "split", "ramified", "inert"


@dataclass(frozen=True, order=True)
class FPrime:
    ell: int
    kind: str
    label: int | None
    chi: int

    @property
    def degree(self) -> int:
        return 2 if self.kind == INERT else 1

    @property
    def norm(self) -> int:
        return self.ell**self.degree

    def __str__(self) -> str:
        if self.kind == SPLIT:
            return f"P{self.ell}[{self.label}]"
        return f"P{self.ell}" + ("r" if self.kind == RAMIFIED else "i")


@dataclass(frozen=True)
class FIdeal:
    """Integral ideal of O_F as a sorted tuple of (prime, exponent) pairs."""

    factors: tuple[tuple[FPrime, int], ...] = ()

    @classmethod
    def from_dict(cls, exps: dict[FPrime, int]) -> "FIdeal":
        if any(e < 0 for e in exps.values()):
            raise ValueError("ideal is not integral")
        return cls(tuple(sorted((P, e) for P, e in exps.items() if e)))

    def __iter__(self) -> Iterator[tuple[FPrime, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def norm(self) -> int:
        return math.prod(P.norm**e for P, e in self.factors)

    def exponent(self, P: FPrime) -> int:
        for Q, e in self.factors:
            if Q == P:
                return e
        return 0

    def __mul__(self, other: "FIdeal") -> "FIdeal":
        exps = dict(self.factors)
        for P, e in other.factors:
            exps[P] = exps.get(P, 0) + e
        return FIdeal.from_dict(exps)

    def divide(self, P: FPrime, k: int = 1) -> "FIdeal":
        exps = dict(self.factors)
        exps[P] = exps.get(P, 0) - k
        return FIdeal.from_dict(exps)

    def divides(self, other: "FIdeal") -> bool:
        return all(other.exponent(P) >= e for P, e in self.factors)

    def without_primes_over(self, ell: int) -> "FIdeal":
        return FIdeal(tuple((P, e) for P, e in self.factors if P.ell != ell))

    def __str__(self) -> str:
        if not self.factors:
            return "(1)"
        return " * ".join(str(P) if e == 1 else f"{P}^{e}" for P, e in self.factors)


@dataclass(frozen=True)
class PrimePowerValue:
    """A value base**exponent; the exponent may be a half-integer."""

    base: int = 1
    exponent: Fraction = Fraction(0)

    def __post_init__(self):
        exp = Fraction(self.exponent)
        if exp < 0 or exp.denominator > 2:
            raise ValueError(f"bad exponent {exp}")
        if self.base == 1 or exp == 0:
            object.__setattr__(self, "base", 1)
            exp = Fraction(0)
        elif not is_prime(self.base):
            raise ValueError(f"{self.base} is not prime")
        object.__setattr__(self, "exponent", exp)

    @property
    def is_one(self) -> bool:
        return self.base == 1

    def to_factored(self, sign: int = 1) -> FactoredRational:
        """base**(sign*exponent) as a factored rational; needs an integral exponent."""
        if self.exponent.denominator != 1:
            raise ValueError("non-integral exponent")
        if self.is_one:
            return FactoredRational()
        return FactoredRational.from_exponents({self.base: sign * int(self.exponent)})

    def __str__(self) -> str:
        return "1" if self.is_one else f"{self.base}^{self.exponent}"


ONE = PrimePowerValue()


class NormNIdeal(Enum):
    """The four ideals of norm N = pq, indexed by which primes above p and q they contain."""

    P1Q1 = (1, 1)
    P1Q2 = (1, 2)
    P2Q1 = (2, 1)
    P2Q2 = (2, 2)

    @property
    def p_index(self) -> int:
        return self.value[0]

    @property
    def q_index(self) -> int:
        return self.value[1]

    @property
    def delta(self) -> int:
        return 1 if self.p_index == self.q_index else -1

    @property
    def conjugate(self) -> "NormNIdeal":
        return NormNIdeal((3 - self.p_index, 3 - self.q_index))


@lru_cache(maxsize=1 << 14)
def split_label(D: int, ell: int) -> int:
    """Smallest odd c in [1, 2*ell) with c^2 = D (mod 4*ell)."""
    if ell == 2:
        cands = [1, 3]
    else:
        if kronecker(D, ell) != 1:
            raise ValueError(f"{ell} does not split in Q(sqrt {D})")
        r = sqrt_mod_prime(D, ell)
        cands = [c for c in (r, r + ell, ell - r, 2 * ell - r) if c % 2]
    for c in sorted(cands):
        if (c * c - D) % (4 * ell) == 0:
            return c
    raise ValueError(f"{ell} does not split in Q(sqrt {D})")


def conjugate_label(ell: int, c: int) -> int:
    return (-c) % (2 * ell)


@dataclass(frozen=True)
class GenusPair:
    """Two coprime odd negative fundamental discriminants and the fields they define."""

    D1: int
    D2: int

    @property
    def D(self) -> int:
        return self.D1 * self.D2

    @property
    def w1(self) -> int:
        return unit_count(self.D1)

    @property
    def w2(self) -> int:
        return unit_count(self.D2)

    def chi_rational(self, ell: int) -> int:
        """chi of any prime of F above the rational prime ell."""
        if kronecker(self.D, ell) == -1:
            return 1
        if self.D1 % ell:
            return kronecker(self.D1, ell)
        return kronecker(self.D2, ell)

    def prime(self, ell: int, label: int | None = None) -> FPrime:
        return _make_prime(self.D1, self.D2, ell, label)

    def primes_above(self, ell: int) -> list[FPrime]:
        P = self.prime(ell)
        if P.kind != SPLIT:
            return [P]
        return [P, self.prime(ell, conjugate_label(ell, P.label))]


@lru_cache(maxsize=1 << 16)
def _make_prime(D1: int, D2: int, ell: int, label: int | None) -> FPrime:
    if not is_prime(ell):
        raise ValueError(f"{ell} is not prime")
    pair = GenusPair(D1, D2)
    D = D1 * D2
    k = kronecker(D, ell)
    chi = pair.chi_rational(ell)
    if k == 0:
        return FPrime(ell, RAMIFIED, None, chi)
    if k == -1:
        return FPrime(ell, INERT, None, chi)
    if label is None:
        label = split_label(D, ell)
    label %= 2 * ell
    if label % 2 == 0 or (label * label - D) % ell:
        raise ValueError(f"{label} is not a valid label above {ell}")
    return FPrime(ell, SPLIT, label, chi)


@dataclass(frozen=True)
class Setup(GenusPair):
    """GenusPair plus the primes p, q with N = pq and the labels of p1 and q1."""

    p: int
    q: int
    root_p: int
    root_q: int

    @property
    def N(self) -> int:
        return self.p * self.q

    def p_prime(self, index: int) -> FPrime:
        c = self.root_p if index == 1 else conjugate_label(self.p, self.root_p)
        return self.prime(self.p, c)

    def q_prime(self, index: int) -> FPrime:
        c = self.root_q if index == 1 else conjugate_label(self.q, self.root_q)
        return self.prime(self.q, c)

    def ideal_of(self, a: NormNIdeal) -> FIdeal:
        return FIdeal.from_dict({self.p_prime(a.p_index): 1, self.q_prime(a.q_index): 1})

    def with_root_q(self, label: int) -> "Setup":
        if label % (2 * self.q) not in (self.root_q, conjugate_label(self.q, self.root_q)):
            raise ValueError(f"{label} does not label a prime above {self.q}")
        return replace(self, root_q=label % (2 * self.q))


def make_pair(D1: int, D2: int) -> GenusPair:
    for name, d in (("D1", D1), ("D2", D2)):
        if d >= 0:
            raise SetupError(f"{name} = {d} must be negative")
        if not is_fundamental_discriminant(d):
            raise SetupError(f"{name} = {d} is not a fundamental discriminant")
        if d % 2 == 0:
            raise SetupError(f"{name} = {d} is even; only odd discriminants are supported")
    if math.gcd(D1, D2) != 1:
        raise SetupError(f"D1 = {D1} and D2 = {D2} are not coprime")
    return GenusPair(D1, D2)


def make_setup(D1: int, D2: int, p: int, q: int) -> Setup:
    pair = make_pair(D1, D2)
    for name, ell in (("p", p), ("q", q)):
        if not is_prime(ell):
            raise SetupError(f"{name} = {ell} is not prime")
    if p == q:
        raise SetupError("p and q must be distinct")
    for name, ell in (("p", p), ("q", q)):
        for dname, d in (("D1", D1), ("D2", D2)):
            if kronecker(d, ell) != -1:
                raise SetupError(
                    f"{name} = {ell} must be inert in Q(sqrt {d}) "
                    f"but kronecker({dname}, {ell}) = {kronecker(d, ell)}"
                )
    D = pair.D
    if D % 4 != 1 or kronecker(D, p) != 1 or kronecker(D, q) != 1:
        raise SetupError("p and q must split in F")
    return Setup(D1, D2, p, q, split_label(D, p), split_label(D, q))


@lru_cache(maxsize=4096)
def local_root(D: int, ell: int, label: int, k: int) -> int:
    """sqrt(D) in the completion at the prime labelled ``label``, mod ell**k."""
    return sqrt_mod_prime_power(D, ell, k, start=-label)


def factor_element(pair: GenusPair, x: int, t: int) -> FIdeal:
    """Factorization of the principal ideal ((x + t*sqrt D)/2)."""
    D = pair.D
    if (x - t * D) % 2:
        raise ValueError(f"(x, t) = ({x}, {t}) fails x = tD (mod 2)")
    norm = abs(x * x - D * t * t) // 4
    if norm == 0:
        raise ValueError("zero element")
    exps: dict[FPrime, int] = {}
    for ell, e in factorize(norm).factors:
        P = pair.prime(ell)
        if P.kind == INERT:
            if e % 2:
                raise ArithmeticError(f"odd inert exponent at {ell}")
            exps[P] = e // 2
        elif P.kind == RAMIFIED:
            exps[P] = e
        else:
            Q = pair.prime(ell, conjugate_label(ell, P.label))
            k = e + 3
            mod = ell**k
            vals = []
            for R in (P, Q):
                a = (x + t * local_root(D, ell, R.label, k)) % mod
                if a == 0:
                    raise ArithmeticError("local precision exhausted")
                v = 0
                while a % ell == 0:
                    a //= ell
                    v += 1
                vals.append(v - 1 if ell == 2 else v)
            if vals[0] + vals[1] != e or min(vals) < 0:
                raise ArithmeticError(f"inconsistent valuations above {ell}: {vals} vs {e}")
            exps[P], exps[Q] = vals
    return FIdeal.from_dict(exps)


def chi_ideal(I: FIdeal) -> int:
    return math.prod(P.chi**e for P, e in I)


def rho(I: FIdeal) -> int:
    """Number of ideals of O_L with relative norm I."""
    out = 1
    for P, e in I:
        if P.chi == 1:
            out *= e + 1
        elif e % 2:
            return 0
    return out


def f_value(pair: GenusPair, m: int | Fraction) -> PrimePowerValue:
    """The prime-power valued F-function.

    A prime ramified in F with chi = +1 multiplies the exponent by (c + 1)
    like a prime split completely in L; this is the reading consistent with rho.
    """
    m = Fraction(m)
    if m.denominator != 1 or m <= 0:
        return ONE
    special = []
    X = 1
    for ell, e in factorize(int(m)).factors:
        if kronecker(pair.D, ell) == -1:
            return ONE
        if pair.chi_rational(ell) == -1:
            if e % 2:
                special.append((ell, e))
        else:
            X *= e + 1
    if len(special) != 1:
        return ONE
    ell, e = special[0]
    return PrimePowerValue(ell, Fraction((e + 1) // 2 * X))


def square_roots_mod(D: int, modulus: int) -> list[int]:
    return [y for y in range(modulus) if (y * y - D) % modulus == 0]


def delta_x(setup: Setup, x: int) -> int:
    """delta(x) = +1 if x = +-a (mod 2N), -1 if x = +-b, with a pinned to (p1, q1)."""
    two_n = 2 * setup.N
    roots = square_roots_mod(setup.D, two_n)
    a = [y for y in roots if (y - setup.root_p) % (2 * setup.p) == 0
         and (y - setup.root_q) % (2 * setup.q) == 0]
    if len(roots) != 4 or len(a) != 1:
        raise ArithmeticError(f"unexpected square roots of D mod {two_n}: {roots}")
    a = a[0]
    if x % two_n not in roots:
        raise ValueError(f"{x} is not a square root of D mod {two_n}")
    return 1 if x % two_n in (a, (-a) % two_n) else -1


def _hits(x: int, t: int, ell: int, labels: tuple[int, int]) -> list[int]:
    return [i for i, c in enumerate(labels, start=1) if (x - c * t) % (2 * ell) == 0]


def classify_x(setup: Setup, x: int, t: int = 1) -> tuple[NormNIdeal | None, int | None]:
    """The unique norm-N ideal dividing (x + t sqrt D)/2, with its sign delta."""
    D = setup.D
    if (x - t * D) % 2:
        raise ValueError(f"(x, t) = ({x}, {t}) fails x = tD (mod 2)")
    if x * x >= D * t * t:
        raise ValueError("element is not totally positive")
    if ((D * t * t - x * x) // 4) % setup.N:
        return None, None
    p, q = setup.p, setup.q
    ph = _hits(x, t, p, (setup.root_p, conjugate_label(p, setup.root_p)))
    qh = _hits(x, t, q, (setup.root_q, conjugate_label(q, setup.root_q)))
    if len(ph) != 1 or len(qh) != 1:
        raise ValueError(f"more than one norm-N ideal divides ({x} + {t} sqrt D)/2")
    a = NormNIdeal((ph[0], qh[0]))
    return a, a.delta


def j_ideal(setup: Setup, x: int, t: int, q_index: int = 1, deprive_p: bool = False) -> FIdeal:
    """J = nu D_F q^-1 for nu = (x + t sqrt D)/(2 sqrt D); optionally with p-primes removed."""
    I = factor_element(setup, x, t)
    Q = setup.q_prime(q_index)
    if I.exponent(Q) == 0:
        raise ValueError(f"{Q} does not divide ({x} + {t} sqrt D)/2")
    J = I.divide(Q)
    return J.without_primes_over(setup.p) if deprive_p else J


def arakelov_X(setup: Setup, a: NormNIdeal, x: int, t: int = 1) -> PrimePowerValue:
    """exp of the Arakelov degree X(a, nu) for nu = (x + t sqrt D)/(2 sqrt D)."""
    alpha = factor_element(setup, x, t)
    P, Q = setup.p_prime(a.p_index), setup.q_prime(a.q_index)
    if not alpha.exponent(P) or not alpha.exponent(Q):
        return ONE
    M = alpha.divide(P).divide(Q)
    diff = [R for R, e in M if R.chi == -1 and e % 2]
    if len(diff) != 1:
        return ONE
    R = diff[0]
    ord_alpha = alpha.exponent(R)
    # ord_R(nu) = ord_R(alpha) since R does not divide D when R | N
    if R.ell in (setup.p, setup.q) and R in (P, Q):
        ord_factor = ord_alpha
    else:
        ord_factor = ord_alpha + 1
    t_r = ord_factor * rho(M.divide(R))
    return PrimePowerValue(R.ell, Fraction(t_r, 2))


class RhsMode(str, Enum):
    MODULAR4 = "modular4"
    SHIMURA4N = "shimura4N"


def admissible_x(D: int, modulus: int) -> list[int]:
    """All x with x^2 < D and x^2 = D (mod modulus)."""
    r = math.isqrt(D)
    return [x for x in range(-r, r + 1) if x * x < D and (x * x - D) % modulus == 0]


def rhs_product(pair: GenusPair, mode: RhsMode | str) -> FactoredRational:
    mode = RhsMode(mode)
    D = pair.D
    out = FactoredRational()
    if mode is RhsMode.MODULAR4:
        for x in admissible_x(D, 4):
            out = out * f_value(pair, (D - x * x) // 4).to_factored()
        return out
    if not isinstance(pair, Setup):
        raise TypeError("the Shimura product needs a full Setup")
    N = pair.N
    for x in admissible_x(D, 4 * N):
        out = out * f_value(pair, Fraction(D - x * x, 4 * N)).to_factored(delta_x(pair, x))
    return out
