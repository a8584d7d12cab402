"""Exact integer primitives: factorization, Kronecker symbols, modular square roots.

Everything here works on Python ints, so values are arbitrary precision; only
``factorize`` is restricted to |n| < 2**63.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

FACTOR_LIMIT = 1 << 63

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SIEVE_LIMIT = 1 << 16


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    sieve = bytearray([1]) * (_SIEVE_LIMIT + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(_SIEVE_LIMIT) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return tuple(i for i, flag in enumerate(sieve) if flag)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for n < 3.3e24, which covers 2**63."""
    if n < 2:
        return False
    for b in _MR_BASES:
        if n % b == 0:
            return n == b
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    # n odd composite with no small factors
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"pollard rho failed on {n}")


def _split_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split_large(r, out)
        _split_large(r, out)
        return
    d = _pollard_brent(n)
    _split_large(d, out)
    _split_large(n // d, out)


@dataclass(frozen=True)
class FactoredInteger:
    sign: int
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise ValueError("primes must be strictly increasing")
        if any(e <= 0 for _, e in self.factors):
            raise ValueError("exponents must be positive")

    @property
    def value(self) -> int:
        return self.sign * math.prod(p**e for p, e in self.factors)

    def exponent(self, p: int) -> int:
        return dict(self.factors).get(p, 0)

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __str__(self) -> str:
        return _render(self.sign, self.factors)


def _render(sign: int, factors: Iterable[tuple[int, int]]) -> str:
    parts = [str(p) if e == 1 else f"{p}^{e}" for p, e in factors]
    body = " * ".join(parts) if parts else "1"
    return ("-" if sign < 0 else "") + body


def factorize(n: int) -> FactoredInteger:
    """Prime factorization of a nonzero integer with |n| < 2**63."""
    if n == 0:
        raise ValueError("cannot factor 0")
    if abs(n) >= FACTOR_LIMIT:
        raise ValueError(f"|n| must be below 2**63, got {n}")
    return FactoredInteger(1 if n > 0 else -1, _factor_abs(abs(n)))


@lru_cache(maxsize=1 << 17)
def _factor_abs(m: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    for p in _small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        if m < _SIEVE_LIMIT * _SIEVE_LIMIT:
            out[m] = out.get(m, 0) + 1
        else:
            _split_large(m, out)
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class FactoredRational:
    """A nonzero rational number kept as a signed product of prime powers."""

    sign: int = 1
    exponents: tuple[tuple[int, int], ...] = ()

    @classmethod
    def from_exponents(cls, exps: Mapping[int, int], sign: int = 1) -> "FactoredRational":
        return cls(sign, tuple(sorted((p, e) for p, e in exps.items() if e != 0)))

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> "FactoredRational":
        value = Fraction(value)
        if value == 0:
            raise ValueError("zero has no factorization")
        exps: dict[int, int] = {}
        for p, e in factorize(value.numerator).factors:
            exps[p] = e
        for p, e in factorize(value.denominator).factors:
            exps[p] = exps.get(p, 0) - e
        return cls.from_exponents(exps, 1 if value > 0 else -1)

    @property
    def numerator(self) -> FactoredInteger:
        return FactoredInteger(self.sign, tuple((p, e) for p, e in self.exponents if e > 0))

    @property
    def denominator(self) -> FactoredInteger:
        return FactoredInteger(1, tuple((p, -e) for p, e in self.exponents if e < 0))

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator.value, self.denominator.value)

    def exponent(self, p: int) -> int:
        return dict(self.exponents).get(p, 0)

    def __mul__(self, other: "FactoredRational") -> "FactoredRational":
        exps = dict(self.exponents)
        for p, e in other.exponents:
            exps[p] = exps.get(p, 0) + e
        return FactoredRational.from_exponents(exps, self.sign * other.sign)

    def __pow__(self, k: int) -> "FactoredRational":
        return FactoredRational.from_exponents(
            {p: e * k for p, e in self.exponents}, self.sign ** (k % 2)
        )

    def inverse(self) -> "FactoredRational":
        return self ** -1

    def __str__(self) -> str:
        num = _render(self.sign, self.numerator.factors)
        den = self.denominator
        if not den.factors:
            return num
        d = _render(1, den.factors)
        return f"{num} / {d}" if len(den.factors) == 1 and den.factors[0][1] == 1 else f"{num} / ({d})"


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), extending Jacobi to even and negative n."""
    if n == 0:
        raise ValueError("kronecker symbol (a|0) is not supported")
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and a % 8 in (3, 5):
            result = -result
    # Jacobi symbol (a|n) for odd positive n
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def valuation(n: int | Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    n = Fraction(n)
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    num, den = n.numerator, n.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def sqrt_mod_prime(a: int, p: int) -> int:
    """Smallest non-negative r with r*r = a (mod p), p prime; ValueError if none."""
    a %= p
    if p == 2 or a == 0:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 1, t * t % p
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    return min(r, p - r)


def sqrt_mod_prime_power(a: int, p: int, k: int, start: int | None = None) -> int:
    """Square root of a unit ``a`` in Z_p, reduced mod p**k.

    The branch is the one congruent to ``start`` (mod p, or mod 4 when p = 2);
    by default the smallest positive such residue. For p = 2 this needs
    a = 1 (mod 8). The returned r is correct mod p**k as a p-adic digit
    string, so r*r = a mod p**k.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if a % p == 0:
        raise ValueError("a must be a p-adic unit")
    if p == 2:
        if a % 8 != 1:
            raise ValueError(f"{a} is not a 2-adic square")
        r = 1 if start is None else start % 4
        if r not in (1, 3):
            raise ValueError("2-adic branch must be 1 or 3 mod 4")
        # r*r = a mod 2**i determines r mod 2**(i-1)
        for i in range(3, k + 2):
            if (r * r - a) % (1 << (i + 1)):
                r += 1 << (i - 1)
        return r % (1 << k)
    r = sqrt_mod_prime(a, p) if start is None else start % p
    if (r * r - a) % p:
        raise ValueError(f"{start} is not a square root of {a} mod {p}")
    mod = p
    while mod < p**k:
        mod = min(mod * mod, p**k)
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r % p**k


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n).factors)


def is_fundamental_discriminant(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def class_number(d: int) -> int:
    """Class number of the imaginary quadratic order of discriminant d < 0 (reduced forms)."""
    if d >= 0 or d % 4 not in (0, 1):
        raise ValueError("need a negative discriminant")
    h = 0
    b = d % 2
    while b * b <= -d // 3:
        m = (b * b - d) // 4
        a = max(b, 1)
        while a * a <= m:
            if m % a == 0:
                c = m // a
                if math.gcd(math.gcd(a, b), c) == 1:
                    h += 1 if (b == 0 or a == b or a == c) else 2
            a += 1
        b += 2
    return h


def unit_count(d: int) -> int:
    """Number of units of the maximal order of discriminant d < 0."""
    return {-3: 6, -4: 4}.get(d, 2)


def divisors_from_factors(factors: Iterable[tuple[int, int]]) -> list[int]:
    divs = [1]
    for p, e in factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


__all__ = [
    "FactoredInteger",
    "FactoredRational",
    "class_number",
    "divisors_from_factors",
    "factorize",
    "is_fundamental_discriminant",
    "is_prime",
    "is_squarefree",
    "kronecker",
    "sqrt_mod_prime",
    "sqrt_mod_prime_power",
    "unit_count",
    "valuation",
]
