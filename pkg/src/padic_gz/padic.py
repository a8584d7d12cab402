"""Fixed-precision p-adic numbers, the Iwasawa logarithm and the embeddings of F.

Precision is absolute: a PAdic is known modulo p**prec.  It is stored as
p**val * unit with unit a p-adic unit reduced mod p**(prec - val).  A value
that is zero to the known precision has unit 0 and val == prec.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping, Union

from .quadratic import Setup, local_root
from .rational import kronecker, sqrt_mod_prime_power, valuation


class PrecisionError(ArithmeticError):
    """Raised when a computation would need more p-adic digits than are known."""


Number = Union[int, Fraction]


def _split(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


@dataclass(frozen=True)
class PAdic:
    p: int
    val: int
    unit: int
    prec: int

    @classmethod
    def of(cls, value: Number, p: int, prec: int) -> "PAdic":
        """The exact rational ``value`` rounded to absolute precision ``prec``."""
        value = Fraction(value)
        if value == 0:
            return cls.zero(p, prec)
        v = valuation(value, p)
        if v >= prec:
            return cls.zero(p, prec)
        mod = p ** (prec - v)
        _, num = _split(value.numerator, p)
        _, den = _split(value.denominator, p)
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @classmethod
    def zero(cls, p: int, prec: int) -> "PAdic":
        return cls(p, prec, 0, prec)

    @classmethod
    def _normalize(cls, p: int, rep: int, shift: int, prec: int) -> "PAdic":
        # value = rep * p**shift, known mod p**prec
        if prec <= shift:
            return cls.zero(p, prec)
        rep %= p ** (prec - shift)
        if rep == 0:
            return cls.zero(p, prec)
        v, u = _split(rep, p)
        return cls(p, shift + v, u % p ** (prec - shift - v), prec)

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def valuation(self) -> float | int:
        return math.inf if self.is_zero else self.val

    @property
    def relative_precision(self) -> int:
        return self.prec - self.val

    def residue(self, k: int | None = None) -> int:
        """Integer representative mod p**k (default: the known precision)."""
        k = self.prec if k is None else k
        if k > self.prec:
            raise PrecisionError(f"asked for {k} digits, only {self.prec} known")
        if self.is_zero:
            return 0
        if self.val < 0:
            raise ValueError("value is not a p-adic integer")
        return self.unit * self.p**self.val % self.p**k

    def digits(self) -> list[int]:
        """Base-p digits of the unit part, least significant first."""
        out, u = [], self.unit
        for _ in range(self.relative_precision if not self.is_zero else 0):
            out.append(u % self.p)
            u //= self.p
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "valuation": None if self.is_zero else self.val,
            "unitDigits": self.digits(),
            "knownPrecision": self.prec,
        }

    def _coerce(self, other: "PAdic | Number") -> "PAdic":
        if isinstance(other, PAdic):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        return PAdic.of(other, self.p, self.prec)

    def __add__(self, other: "PAdic | Number") -> "PAdic":
        other = self._coerce(other)
        prec = min(self.prec, other.prec)
        if self.is_zero:
            return PAdic._normalize(self.p, other.unit, other.val, prec)
        if other.is_zero:
            return PAdic._normalize(self.p, self.unit, self.val, prec)
        m = min(self.val, other.val)
        rep = self.unit * self.p ** (self.val - m) + other.unit * self.p ** (other.val - m)
        return PAdic._normalize(self.p, rep, m, prec)

    __radd__ = __add__

    def __neg__(self) -> "PAdic":
        if self.is_zero:
            return self
        return PAdic(self.p, self.val, -self.unit % self.p ** (self.prec - self.val), self.prec)

    def __sub__(self, other: "PAdic | Number") -> "PAdic":
        return self + -self._coerce(other)

    def __rsub__(self, other: Number) -> "PAdic":
        return self._coerce(other) - self

    def __mul__(self, other: "PAdic | Number") -> "PAdic":
        if isinstance(other, (int, Fraction)):
            # exact scalar: relative precision is unchanged
            if other == 0:
                return PAdic.zero(self.p, max(self.prec, 0))
            v = valuation(other, self.p)
            if self.is_zero:
                return PAdic.zero(self.p, self.prec + v)
            c = Fraction(other) / Fraction(self.p) ** v
            rel = self.relative_precision
            mod = self.p**rel
            u = self.unit * c.numerator * pow(c.denominator, -1, mod) % mod
            return PAdic(self.p, self.val + v, u, self.prec + v)
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            if self.is_zero and other.is_zero:
                return PAdic.zero(self.p, self.prec + other.prec)
            z, nz = (self, other) if self.is_zero else (other, self)
            return PAdic.zero(self.p, z.prec + nz.val)
        val = self.val + other.val
        rel = min(self.relative_precision, other.relative_precision)
        return PAdic._normalize(self.p, self.unit * other.unit, val, val + rel)

    __rmul__ = __mul__

    def inverse(self) -> "PAdic":
        if self.is_zero:
            raise ZeroDivisionError("p-adic zero (to known precision)")
        rel = self.relative_precision
        return PAdic(self.p, -self.val, pow(self.unit, -1, self.p**rel), rel - self.val)

    def __truediv__(self, other: "PAdic | Number") -> "PAdic":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: Number) -> "PAdic":
        return self.inverse() * other

    def __pow__(self, k: int) -> "PAdic":
        if k < 0:
            return self.inverse() ** -k
        out = PAdic(self.p, 0, 1, self.relative_precision)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def congruent(self, other: "PAdic | Number", k: int) -> bool:
        """True when self = other mod p**k; raises if either side is not known that far."""
        diff = self - self._coerce(other)
        if diff.prec < k:
            raise PrecisionError(f"congruence mod p^{k} needs {k} digits, have {diff.prec}")
        return diff.valuation >= k

    def __str__(self) -> str:
        if self.is_zero:
            return f"O({self.p}^{self.prec})"
        lead = f"{self.p}^{self.val} * " if self.val else ""
        return f"{lead}{self.unit} + O({self.p}^{self.prec})"


def hensel_sqrt(a: int, p: int, K: int) -> PAdic:
    """Square root of the p-adic unit a mod p**K on the canonical branch.

    The branch is the smallest positive residue mod p (mod 4 when p = 2).
    """
    if a % p == 0:
        raise ValueError(f"{a} is not a {p}-adic unit")
    if p == 2:
        if a % 8 != 1:
            raise ValueError(f"{a} is not a 2-adic square")
    elif kronecker(a, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    return PAdic(p, 0, sqrt_mod_prime_power(a, p, K), K)


def _ilog(n: int, p: int) -> int:
    k = 0
    while p ** (k + 1) <= n:
        k += 1
    return k


def _log_one_plus(z: int, p: int, R: int) -> int:
    """log(1 + z) mod p**R for an integer z with v_p(z) >= 1 (>= 2 when p = 2)."""
    if z == 0:
        return 0
    vz = _split(z, p)[0]
    # term n has valuation >= n*vz - floor(log_p n); stop once that reaches R
    n_max = 1
    while (n_max + 1) * vz - _ilog(n_max + 1, p) < R + 1:
        n_max += 1
    guard = _ilog(n_max, p) + 1
    mod = p ** (R + guard)
    out_mod = p**R
    total = 0
    zpow = 1
    for n in range(1, n_max + 1):
        zpow = zpow * z % mod
        k, m = _split(n, p)
        term = (zpow // p**k) * pow(m, -1, out_mod)
        total += term if n % 2 else -term
    return total % out_mod


def iwasawa_log_unit(u: int, p: int, R: int) -> int:
    """log_p(u) mod p**R for an integer unit u known mod p**R."""
    mod = p ** (R + 2)
    if p == 2:
        w = u * u % mod
        return _log_one_plus(w - 1, 2, R + 1) // 2 % 2**R
    w = pow(u, p - 1, mod)
    return _log_one_plus(w - 1, p, R) * pow(p - 1, -1, p**R) % p**R


def iwasawa_log(x: PAdic) -> PAdic:
    """Iwasawa logarithm: log_p(p) = 0, series on u**(p-1) (u**2 when p = 2)."""
    if x.is_zero:
        raise ValueError("log of zero")
    R = x.relative_precision
    return PAdic._normalize(x.p, iwasawa_log_unit(x.unit, x.p, R), 0, R)


@dataclass(frozen=True)
class FElement:
    """(u + v*sqrt(D))/2 with rational u, v."""

    u: Fraction
    v: Fraction
    D: int

    def __post_init__(self):
        object.__setattr__(self, "u", Fraction(self.u))
        object.__setattr__(self, "v", Fraction(self.v))

    @property
    def trace(self) -> Fraction:
        return self.u

    @property
    def norm(self) -> Fraction:
        return (self.u**2 - self.D * self.v**2) / 4

    @property
    def conjugate(self) -> "FElement":
        return FElement(self.u, -self.v, self.D)

    @property
    def is_integral(self) -> bool:
        return (self.u.denominator == 1 and self.v.denominator == 1
                and (self.u - self.v * self.D) % 2 == 0)

    def __mul__(self, other: "FElement | Number") -> "FElement":
        if not isinstance(other, FElement):
            return FElement(self.u * other, self.v * other, self.D)
        u = (self.u * other.u + self.D * self.v * other.v) / 2
        v = (self.u * other.v + self.v * other.u) / 2
        return FElement(u, v, self.D)

    __rmul__ = __mul__

    def __add__(self, other: "FElement") -> "FElement":
        return FElement(self.u + other.u, self.v + other.v, self.D)

    def __str__(self) -> str:
        return f"({self.u} + {self.v}*sqrt({self.D}))/2"


def headroom_for(D: int, t_max: int, p: int) -> int:
    """Digits of sqrt(D) needed beyond the target so that any (x + t sqrt D)/2
    with x**2 < D t**2 and t <= t_max keeps full relative precision."""
    bound = 4 * D * t_max * t_max
    k = 0
    while p**k <= bound:
        k += 1
    return k + 4


@dataclass(frozen=True)
class PAdicContext:
    """Shared read-only data: the prime p, the target precision and sqrt(D) at p1.

    At the prime p1 labelled root_p the image of sqrt(D) is congruent to
    -root_p mod 2p; at p2 it is the negative of that.  sqrt(D) is kept to
    prec + headroom digits so that dividing out a valuation up to headroom
    still leaves prec digits.
    """

    setup: Setup
    prec: int
    headroom: int = 8
    sqrt_p1: int = field(init=False)

    @classmethod
    def for_traces(cls, setup: Setup, prec: int, t_max: int) -> "PAdicContext":
        return cls(setup, prec, headroom_for(setup.D, t_max, setup.p))

    def __post_init__(self):
        W = self.working_precision
        s = local_root(self.setup.D, self.p, self.setup.root_p, W)
        object.__setattr__(self, "sqrt_p1", s % self.p**W)

    @property
    def p(self) -> int:
        return self.setup.p

    @property
    def working_precision(self) -> int:
        return self.prec + self.headroom

    def sqrt_at(self, which: int) -> int:
        return self.sqrt_p1 if which == 1 else -self.sqrt_p1

    def embed(self, xi: FElement, which: int = 1) -> PAdic:
        W = self.working_precision
        s = PAdic.of(self.sqrt_at(which), self.p, W)
        return (PAdic.of(xi.u, self.p, W) + s * xi.v) / 2

    def log_int(self, n: int) -> PAdic:
        """log_p of a nonzero rational integer, known to the target precision."""
        return _log_int(n, self.p, self.prec)

    def log_element(self, x: int, t: int, which: int = 1) -> PAdic:
        """log_p of (x + t*sqrt D)/2 at p_which, via the integer x + t*s.

        The factor 1/2 has log 0, so it is dropped.
        """
        W = self.working_precision
        y = (x + t * self.sqrt_at(which)) % self.p**W
        if y == 0:
            raise PrecisionError(f"({x} + {t} sqrt D)/2 vanishes to working precision")
        v, u = _split(y, self.p)
        if W - v < self.prec:
            raise PrecisionError(f"valuation {v} exceeds the headroom {self.headroom}")
        return PAdic._normalize(self.p, iwasawa_log_unit(u, self.p, self.prec), 0, self.prec)

    def log_ratio(self, x: int, t: int) -> PAdic:
        """log_p(nu/nu') at p1 for nu = (x + t sqrt D)/(2 sqrt D).

        nu/nu' = -(x + t s)/(x - t s), and log_p(-1) = 0.
        """
        return self.log_element(x, t, 1) - self.log_element(x, t, 2)


@lru_cache(maxsize=4096)
def _log_int(n: int, p: int, prec: int) -> PAdic:
    if n == 0:
        raise ValueError("log of zero")
    _, u = _split(abs(n), p)
    return PAdic._normalize(p, iwasawa_log_unit(u, p, prec), 0, prec)


def embed_F(ctx: PAdicContext, xi: FElement, which: int = 1) -> PAdic:
    return ctx.embed(xi, which)


def v_prime(ctx: PAdicContext, xi: FElement, which: int = 1) -> int:
    """v_{p_which}(xi), read off the embedding."""
    img = ctx.embed(xi, which)
    if img.is_zero:
        raise PrecisionError("element vanishes to working precision")
    return img.val


# Formal linear combinations of logarithms, used as exact eps-parts.


@dataclass(frozen=True)
class LogSum:
    """A formal sum  sum_k c_k * log_p(k)  with rational c_k.

    Keys are positive integers (log_p of that integer) or the symbols
    "pi1", "pi2" for generators of p1^h, p2^h.
    """

    terms: tuple[tuple[Any, Fraction], ...] = ()

    @classmethod
    def of(cls, key: Any, coeff: Number = 1) -> "LogSum":
        return cls._build({key: Fraction(coeff)})

    @classmethod
    def _build(cls, d: Mapping[Any, Fraction]) -> "LogSum":
        return cls(tuple(sorted(((k, c) for k, c in d.items() if c), key=lambda kc: str(kc[0]))))

    def __add__(self, other: "LogSum | int") -> "LogSum":
        if isinstance(other, int) and other == 0:
            return self
        d = dict(self.terms)
        for k, c in other.terms:
            d[k] = d.get(k, Fraction(0)) + c
        return LogSum._build(d)

    __radd__ = __add__

    def __neg__(self) -> "LogSum":
        return self * -1

    def __sub__(self, other: "LogSum") -> "LogSum":
        return self + -other

    def __mul__(self, scalar: Number) -> "LogSum":
        if isinstance(scalar, LogSum):
            raise TypeError("product of two logarithm sums is not defined")
        return LogSum._build({k: c * scalar for k, c in self.terms})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.terms)

    def evaluate(self, ctx: PAdicContext, symbols: Mapping[str, PAdic] | None = None) -> PAdic:
        total = PAdic.zero(ctx.p, ctx.prec)
        for k, c in self.terms:
            if isinstance(k, int):
                val = ctx.log_int(k)
            elif symbols and k in symbols:
                val = symbols[k]
            else:
                raise KeyError(f"no value supplied for log_p({k})")
            total = total + val * c
        return total

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*log({k})" for k, c in self.terms)


@dataclass(frozen=True)
class DualPAdic:
    """std + eps*e with e**2 = 0.  Coefficients can be ints, Fractions, PAdics or LogSums."""

    std: Any = 0
    eps: Any = field(default_factory=LogSum)

    def __add__(self, other: "DualPAdic") -> "DualPAdic":
        return DualPAdic(self.std + other.std, self.eps + other.eps)

    def __sub__(self, other: "DualPAdic") -> "DualPAdic":
        return DualPAdic(self.std - other.std, self.eps - other.eps)

    def __neg__(self) -> "DualPAdic":
        return DualPAdic(-self.std, -self.eps)

    def __mul__(self, other: "DualPAdic | Number") -> "DualPAdic":
        if not isinstance(other, DualPAdic):
            return DualPAdic(self.std * other, self.eps * other)
        return DualPAdic(self.std * other.std, other.eps * self.std + self.eps * other.std)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "DualPAdic":
        if k < 0:
            raise ValueError("negative powers are not supported")
        # (a + b e)^k = a^k + k a^(k-1) b e
        return DualPAdic(self.std**k, self.eps * (k * self.std ** (k - 1)) if k else self.eps * 0)

    def __str__(self) -> str:
        return f"{self.std} + ({self.eps})e"
