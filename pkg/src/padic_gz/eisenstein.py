"""The analytic side: nu-enumeration, Eisenstein coefficients, dual-number Hecke
eigenvalues, the function curly-F, a_nu, and the level sums behind log Theta,
log Theta_p, A and B.

nu = (x + t sqrt D)/(2 sqrt D) is stored as the pair (x, t); then
nu D_F = ((x + t sqrt D)/2) and J_nu = nu D_F q1^-1.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .padic import DualPAdic, LogSum, PAdic, PAdicContext, PrecisionError
from .quadratic import (
    FIdeal,
    FPrime,
    INERT,
    NormNIdeal,
    PrimePowerValue,
    RhsMode,
    Setup,
    chi_ideal,
    classify_x,
    factor_element,
    rho,
    rhs_product,
)
from .rational import FactoredRational


@dataclass(frozen=True)
class NuElement:
    x: int
    t: int
    norm: int
    v_p1: int
    v_p2: int
    a: NormNIdeal | None = None

    @property
    def v_p(self) -> tuple[int, int]:
        return self.v_p1, self.v_p2


def _x_range(setup: Setup, t: int) -> range:
    r = math.isqrt(setup.D * t * t)
    return range(-r, r + 1)


def q1_xs(setup: Setup, t: int) -> list[int]:
    """x with nu in (D_F^-1 q1)^+ and trace t."""
    m = 2 * setup.q
    c = setup.root_q * t % m
    r = math.isqrt(setup.D * t * t)
    start = -r + ((c + r) % m)
    return list(range(start, r + 1, m))


def enumerate_nu(setup: Setup, t: int, class_spec: str = "q1") -> list[NuElement]:
    """Totally positive nu of trace t, either in the q1 class or tagged by norm-N ideal."""
    if t < 1:
        raise ValueError("trace must be positive")
    P1, P2 = setup.p_prime(1), setup.p_prime(2)
    out = []
    if class_spec == "q1":
        for x in q1_xs(setup, t):
            I = factor_element(setup, x, t)
            out.append(NuElement(x, t, I.norm, I.exponent(P1), I.exponent(P2)))
    elif class_spec == "per-a":
        for x in _x_range(setup, t):
            if (x - t) % 2:
                continue
            a, _ = classify_x(setup, x, t)
            if a is None:
                continue
            I = factor_element(setup, x, t)
            out.append(NuElement(x, t, I.norm, I.exponent(P1), I.exponent(P2), a))
    else:
        raise ValueError(f"unknown class selector {class_spec!r}")
    return out


def eisenstein_coeff(setup: Setup, x: int, t: int) -> int:
    """rho(nu D_F): the coefficient of the weight-(1,1) Eisenstein series at nu."""
    return rho(factor_element(setup, x, t))


def ideal_divisors(I: FIdeal) -> Iterable[FIdeal]:
    items = list(I)
    def rec(k: int, acc: dict):
        if k == len(items):
            yield FIdeal.from_dict(acc)
            return
        P, e = items[k]
        for j in range(e + 1):
            yield from rec(k + 1, {**acc, P: j})
    yield from rec(0, {})


def divisor_character_sum(I: FIdeal) -> int:
    return sum(chi_ideal(d) for d in ideal_divisors(I))


# --- Hecke eigenvalues in Q_p[eps] ---------------------------------------------


@dataclass(frozen=True)
class HeckeOp:
    """T at a power of a prime of F not above p, or U at a power of pi_1 / pi_2."""

    kind: str
    n: int
    prime: FPrime | None = None
    index: int | None = None


def hecke_image(setup: Setup, op: HeckeOp) -> DualPAdic:
    n = op.n
    if n < 0:
        raise ValueError("negative exponent")
    if op.kind == "T":
        P = op.prime
        if P is None or P.ell == setup.p:
            raise ValueError("T needs a prime of F not above p")
        if P.chi == 1:
            return DualPAdic(n + 1, LogSum())
        if n % 2:
            return DualPAdic(0, LogSum.of(P.norm, n + 1))
        return DualPAdic(1, LogSum())
    if op.kind == "U":
        if op.index == 1:
            return DualPAdic((-1) ** n, LogSum.of("pi1", -n * (-1) ** n))
        if op.index == 2:
            return DualPAdic(1, LogSum.of("pi2", n))
        raise ValueError("U needs index 1 or 2")
    raise ValueError(f"unsupported operator {op.kind!r}")


# --- curly F, a_nu ---------------------------------------------------------------


def curly_f(setup: Setup, J: FIdeal) -> PrimePowerValue:
    """log curly-F(J) = 1/2 sum_{l^n || J} (n+1)(1 - chi(l^n)) rho(J/l^n) log Nm(l)."""
    exps: dict[int, int] = {}
    for P, n in J:
        if P.ell == setup.p:
            raise ValueError("curly F needs an ideal prime to p")
        if P.chi == -1 and n % 2:
            r = rho(J.divide(P, n))
            if r:
                exps[P.ell] = exps.get(P.ell, 0) + (n + 1) * r * P.degree
    if not exps:
        return PrimePowerValue()
    if len(exps) > 1:
        raise ArithmeticError(f"curly F of {J} is not a prime power")
    (ell, e), = exps.items()
    return PrimePowerValue(ell, Fraction(e))


@dataclass(frozen=True)
class NuData:
    """Everything the level sums need about one nu in the q1 class."""

    x: int
    t: int
    v_p1: int
    v_p2: int
    rho_J: int
    rho_Jt: int
    curly: PrimePowerValue

    @property
    def sign(self) -> int:
        return -1 if self.v_p1 % 2 else 1


@lru_cache(maxsize=1 << 17)
def nu_data(setup: Setup, x: int, t: int) -> NuData:
    I = factor_element(setup, x, t)
    Q1 = setup.q_prime(1)
    if not I.exponent(Q1):
        raise ValueError(f"nu = ({x}, {t}) is not in the q1 class")
    J = I.divide(Q1)
    Jt = J.without_primes_over(setup.p)
    return NuData(x, t, I.exponent(setup.p_prime(1)), I.exponent(setup.p_prime(2)),
                  rho(J), rho(Jt), curly_f(setup, Jt))


def a_nu(setup: Setup, ctx: PAdicContext, x: int, t: int) -> DualPAdic:
    """(-1)^v (rho(J~) + log F(J~) eps - rho(J~) log(nu/nu') eps)."""
    d = nu_data(setup, x, t)
    eps = PAdic.zero(ctx.p, ctx.prec)
    if not d.curly.is_one:
        eps = eps + ctx.log_int(d.curly.base) * int(d.curly.exponent)
    if d.rho_Jt:
        eps = eps - ctx.log_ratio(x, t) * d.rho_Jt
    return DualPAdic(d.sign * d.rho_Jt, eps * d.sign)


def p_stabilized_rho(setup: Setup, J: FIdeal) -> int:
    """(1 - V_p1)(1 + V_p2) applied to rho: rho(J) - rho(J/p1) + rho(J/p2) - rho(J/p1p2)."""
    P1, P2 = setup.p_prime(1), setup.p_prime(2)

    def r(I: FIdeal, drop: Sequence[FPrime]) -> int:
        for P in drop:
            if I.exponent(P) == 0:
                return 0
            I = I.divide(P)
        return rho(I)

    return r(J, []) - r(J, [P1]) + r(J, [P2]) - r(J, [P1, P2])


# --- level sums --------------------------------------------------------------------


@dataclass(frozen=True)
class LevelStats:
    """Integer sums over the q1-class nu of one trace (p-adic parts mod p^prec)."""

    t: int
    count: int
    theta: int      # sum rho(J) log(nu/nu')
    a_part: int     # sum (-1)^v rho(J~) log(nu/nu')
    b_part: int     # sum (-1)^v log F(J~)
    valuation: int  # sum rho(J) (v_p1 - v_p2)
    b_factored: FactoredRational = field(default_factory=FactoredRational)

    def __add__(self, other: "LevelStats") -> "LevelStats":
        return LevelStats(self.t, self.count + other.count, self.theta + other.theta,
                          self.a_part + other.a_part, self.b_part + other.b_part,
                          self.valuation + other.valuation,
                          self.b_factored * other.b_factored)


@lru_cache(maxsize=8)
def _context(setup: Setup, prec: int, headroom: int) -> PAdicContext:
    return PAdicContext(setup, prec, headroom)


def _chunk_stats(args) -> LevelStats:
    setup, prec, headroom, t, xs = args
    ctx = _context(setup, prec, headroom)
    mod = setup.p**prec
    theta = a_part = b_part = val = 0
    b_exps: dict[int, int] = {}
    for x in xs:
        d = nu_data(setup, x, t)
        if d.rho_J or d.rho_Jt:
            lr = ctx.log_ratio(x, t).residue()
            theta += d.rho_J * lr
            a_part += d.sign * d.rho_Jt * lr
        if not d.curly.is_one:
            e = d.sign * int(d.curly.exponent)
            b_exps[d.curly.base] = b_exps.get(d.curly.base, 0) + e
            if d.curly.base != setup.p:
                b_part += e * ctx.log_int(d.curly.base).residue()
        val += d.rho_J * (d.v_p1 - d.v_p2)
    return LevelStats(t, len(xs), theta % mod, a_part % mod, b_part % mod, val,
                      FactoredRational.from_exponents(b_exps))


def level_stats(setup: Setup, ctx: PAdicContext, t: int, workers: int = 1) -> LevelStats:
    xs = q1_xs(setup, t)
    if workers <= 1 or len(xs) < 2000:
        return _chunk_stats((setup, ctx.prec, ctx.headroom, t, xs))
    size = math.ceil(len(xs) / (4 * workers))
    chunks = [(setup, ctx.prec, ctx.headroom, t, xs[i:i + size]) for i in range(0, len(xs), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_chunk_stats, chunks))
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    mod = setup.p**ctx.prec
    return LevelStats(t, total.count, total.theta % mod, total.a_part % mod,
                      total.b_part % mod, total.valuation, total.b_factored)


def as_padic(ctx: PAdicContext, residue: int) -> PAdic:
    return PAdic._normalize(ctx.p, residue, 0, ctx.prec)


def derivative_coeff(setup: Setup, ctx: PAdicContext, t: int) -> PAdic:
    """eps-part of the trace-t coefficient: sum of (-1)^v (log F(J~) - rho(J~) log(nu/nu'))."""
    s = level_stats(setup, ctx, t)
    return as_padic(ctx, s.b_part - s.a_part)


# --- stabilization ------------------------------------------------------------------


@dataclass(frozen=True)
class SumReport:
    partial_values: tuple[PAdic, ...]
    stabilized_precision: int
    final_value: PAdic

    def to_dict(self) -> dict:
        return {
            "partialValues": [v.to_dict() for v in self.partial_values],
            "stabilizedPrecision": self.stabilized_precision,
            "finalValue": self.final_value.to_dict(),
        }


def stabilized_precision(partials: Sequence[PAdic], window: int = 3) -> int:
    """Largest k with the last ``window`` partials all congruent mod p^k (capped by known precision)."""
    tail = list(partials[-window:])
    if len(tail) < 2:
        return 0
    cap = min(v.prec for v in tail)
    k = cap
    for a, b in zip(tail, tail[1:]):
        d = (b - a).valuation
        k = min(k, cap if d == math.inf else int(d))
    return k


def make_report(partials: Sequence[PAdic]) -> SumReport:
    return SumReport(tuple(partials), stabilized_precision(partials), partials[-1])


def theta_lhs(setup: Setup, ctx: PAdicContext, n_max: int, workers: int = 1):
    """SumReports for (2/w1w2) log Theta (traces p^2n, n <= n_max) and
    (2/w1w2) log Theta_p (traces p^(2n+1), n < n_max)."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    p = setup.p
    even = [level_stats(setup, ctx, p ** (2 * n), workers) for n in range(n_max + 1)]
    odd = [level_stats(setup, ctx, p ** (2 * n + 1), workers) for n in range(n_max)]
    return (make_report([as_padic(ctx, s.theta) for s in even]),
            make_report([as_padic(ctx, s.theta) for s in odd]), even, odd)


# --- the identity ---------------------------------------------------------------------


@dataclass
class IdentityResult:
    theta: SumReport
    theta_p: SumReport
    a_report: SumReport
    a_direct: list[PAdic]
    a_direct_agrees: bool
    b_value: PAdic
    b_factored: FactoredRational
    b_levels_stable: bool
    derivative: SumReport
    rhs: FactoredRational
    rhs_log: PAdic
    b_orientation: int | None
    a_plus_b: PAdic
    a_minus_b: PAdic
    congruence_precision: int
    a_plus_b_holds: bool
    odd_derivative: list[PAdic]
    alternating: bool
    valuation_lhs: int
    valuation_rhs: int
    valuation_even_levels: list[int]
    valuation_odd_levels: list[int]
    valuation_sign: int | None
    term_counts: dict[str, int]

    @property
    def verdict(self) -> str:
        if self.b_orientation is None or self.valuation_sign is None:
            return "fail"
        if not self.a_direct_agrees or not self.b_levels_stable:
            return "fail"
        if self.congruence_precision < 4:
            return "inconclusive"
        return "pass" if self.a_plus_b_holds else "fail"


def log_factored(ctx: PAdicContext, r: FactoredRational) -> PAdic:
    total = PAdic.zero(ctx.p, ctx.prec)
    for ell, e in r.exponents:
        if ell != ctx.p:
            total = total + ctx.log_int(ell) * e
    return total


def _strip_p(r: FactoredRational, p: int) -> FactoredRational:
    return FactoredRational.from_exponents({ell: e for ell, e in r.exponents if ell != p})


def identity_check(setup: Setup, K: int = 12, n_max: int = 5, workers: int = 1) -> IdentityResult:
    p = setup.p
    ctx = PAdicContext.for_traces(setup, K, p ** (2 * n_max))
    theta, theta_p, even, odd = theta_lhs(setup, ctx, n_max, workers)

    a_parts = [theta.partial_values[0]] + [
        theta.partial_values[n] - theta_p.partial_values[n - 1] for n in range(1, n_max + 1)]
    a_report = make_report(a_parts)
    a_direct = [as_padic(ctx, s.a_part) for s in even]
    a_direct_agrees = all((u - v).is_zero for u, v in zip(a_parts, a_direct))

    b0 = even[0]
    b_value = as_padic(ctx, b0.b_part)
    b_levels_stable = all(
        s.b_part == b0.b_part and _strip_p(s.b_factored, p) == _strip_p(b0.b_factored, p)
        for s in even)
    derivative = make_report([as_padic(ctx, s.b_part - s.a_part) for s in even])

    rhs = rhs_product(setup, RhsMode.SHIMURA4N)
    rhs_log = log_factored(ctx, rhs)
    b_core, rhs_core = _strip_p(b0.b_factored, p), _strip_p(rhs, p)
    b_orientation = 1 if b_core == rhs_core else -1 if b_core == rhs_core.inverse() else None

    final_a = a_report.final_value
    a_plus_b, a_minus_b = final_a + b_value, final_a - b_value
    m = min(K, a_report.stabilized_precision)
    a_plus_b_holds = a_plus_b.valuation >= m

    # trace p^(2n+1) coefficients should be the negatives of the even ones in the limit
    odd_derivative = [as_padic(ctx, s.b_part - s.a_part) for s in odd]
    alternating = all((d + derivative.final_value).valuation >= m for d in odd_derivative[-2:])

    # valuations: sum rho(J)(v_p1 - v_p2) per level against sum delta(x) v_p F(...)
    v_even = [s.valuation for s in even]
    v_odd = [s.valuation for s in odd]
    v_lhs = v_even[0]
    v_rhs = rhs.exponent(p)
    valuation_sign = None
    if all(v == v_lhs for v in v_even) and all(v == 0 for v in v_odd):
        valuation_sign = 1 if v_lhs == v_rhs else -1 if v_lhs == -v_rhs else None

    counts = {f"trace {s.t}": s.count for s in even + odd}
    return IdentityResult(
        theta, theta_p, a_report, a_direct, a_direct_agrees, b_value, b0.b_factored,
        b_levels_stable, derivative, rhs, rhs_log, b_orientation, a_plus_b, a_minus_b, m,
        a_plus_b_holds, odd_derivative, alternating, v_lhs, v_rhs, v_even, v_odd, valuation_sign, counts)


def divisibility_violations(setup: Setup, n_max: int) -> list[tuple[int, int]]:
    """nu of trace p^n (n <= n_max) with odd v_p(Nm) or v_p1 != v_p2 that are not p^n times a trace-1 element."""
    p = setup.p
    bad = []
    for n in range(n_max + 1):
        t = p**n
        for x in q1_xs(setup, t):
            d = nu_data(setup, x, t)
            if (d.v_p1 + d.v_p2) % 2 or d.v_p1 != d.v_p2:
                if x % t or (x // t - 1) % 2:
                    bad.append((x, t))
    return bad
