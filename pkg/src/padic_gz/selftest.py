"""Property suites shared by the ``selftest`` command and the test-suite."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from .crosscheck import bijection_check, level_cross_validation, orient, prop1_check
from .eisenstein import (
    HeckeOp,
    divisibility_violations,
    hecke_image,
    nu_data,
    p_stabilized_rho,
    q1_xs,
    curly_f,
)
from .padic import PAdic, hensel_sqrt, iwasawa_log
from .quadratic import INERT, RAMIFIED, FIdeal, Setup, admissible_x, f_value, j_ideal
from .rational import factorize, is_prime, kronecker


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    cases: int
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "cases": self.cases, "detail": self.detail}


def factorize_roundtrip(limit: int = 10**4, samples: int = 1000, seed: int = 0) -> SuiteResult:
    rng = random.Random(seed)
    values = list(range(1, limit + 1)) + [rng.randrange(1, 1 << 62) for _ in range(samples)]
    bad = [n for n in values
           if factorize(n).value != n or any(not is_prime(p) for p in factorize(n).primes())]
    return SuiteResult("factorize roundtrip", not bad, len(values), f"failures: {bad[:5]}" if bad else "")


def kronecker_properties(samples: int = 1000, seed: int = 0) -> SuiteResult:
    rng = random.Random(seed)
    primes = [p for p in range(3, 500) if is_prime(p)]
    bad = 0
    for _ in range(samples):
        a, b = rng.randrange(-10**6, 10**6), rng.randrange(-10**6, 10**6)
        n = rng.choice([m for m in range(-200, 201) if m])
        m = rng.choice([m for m in range(-200, 201) if m])
        bad += kronecker(a * b, n) != kronecker(a, n) * kronecker(b, n)
        bad += kronecker(a, n * m) != kronecker(a, n) * kronecker(a, m)
        ell = rng.choice(primes)
        e = pow(a, (ell - 1) // 2, ell)
        bad += kronecker(a, ell) != (0 if e == 0 else 1 if e == 1 else -1)
    return SuiteResult("kronecker multiplicativity and Euler", bad == 0, 3 * samples)


def padic_properties(samples: int = 1000, seed: int = 0, K: int = 20) -> SuiteResult:
    rng = random.Random(seed)
    bad = 0
    for _ in range(samples):
        p = rng.choice([2, 3, 5, 7, 11, 13])
        a = rng.randrange(1, 10**9)
        b = rng.randrange(1, 10**9)
        if a % p == 0 or b % p == 0:
            a, b = a * p + 1, b * p + 1
        la, lb = iwasawa_log(PAdic.of(a, p, K)), iwasawa_log(PAdic.of(b, p, K))
        lab = iwasawa_log(PAdic.of(a * b * p ** rng.randrange(0, 4), p, K))
        rhs = la + lb
        bad += not lab.congruent(rhs, min(lab.prec, rhs.prec))
        sq = a * a
        r = hensel_sqrt(sq, p, K)
        bad += not (r * r).congruent(sq, K)
    return SuiteResult("p-adic log additivity and Hensel roots", bad == 0, 2 * samples)


def hecke_recursion(setup: Setup, n_max: int = 10, bound: int = 100) -> SuiteResult:
    bad, cases = [], 0
    for ell in range(2, bound):
        if not is_prime(ell) or ell == setup.p:
            continue
        for P in setup.primes_above(ell):
            T = lambda n: hecke_image(setup, HeckeOp("T", n, P))
            for n in range(1, n_max + 1):
                cases += 1
                if T(n + 1) != T(n) * T(1) - T(n - 1) * P.chi:
                    bad.append((str(P), n))
    return SuiteResult("Hecke recursion in dual numbers", not bad, cases, f"failures: {bad[:5]}" if bad else "")


def is_primitive(J: FIdeal) -> bool:
    """No rational prime divides J."""
    for P, e in J:
        if P.kind == INERT or (P.kind == RAMIFIED and e > 1):
            return False
    ells = [P.ell for P, _ in J]
    return len(ells) == len(set(ells))


def curly_f_square(setup: Setup, t_max: int = 64) -> SuiteResult:
    bad, cases = [], 0
    for t in range(1, t_max + 1):
        for x in q1_xs(setup, t):
            Jt = j_ideal(setup, x, t, 1, deprive_p=True)
            if not is_primitive(Jt):
                continue
            cases += 1
            lhs, F = curly_f(setup, Jt), f_value(setup, Jt.norm)
            if lhs.base != F.base or lhs.exponent != 2 * F.exponent:
                bad.append((x, t))
    return SuiteResult("curly F(J) = F(Nm J)^2", not bad, cases, f"failures: {bad[:5]}" if bad else "")


def divisibility_lemma(setup: Setup, n_max: int = 8) -> SuiteResult:
    bad = divisibility_violations(setup, n_max)
    cases = sum(len(q1_xs(setup, setup.p**n)) for n in range(n_max + 1))
    return SuiteResult("divisibility lemma", not bad, cases, f"failures: {bad[:5]}" if bad else "")


def four_term_identity(setup: Setup, t_max: int = 64) -> SuiteResult:
    bad, cases = [], 0
    for t in range(1, t_max + 1):
        for x in q1_xs(setup, t):
            cases += 1
            d = nu_data(setup, x, t)
            if d.sign * d.rho_Jt != p_stabilized_rho(setup, j_ideal(setup, x, t, 1)):
                bad.append((x, t))
    return SuiteResult("p-stabilization four-term identity", not bad, cases,
                       f"failures: {bad[:5]}" if bad else "")


def prop1_suite(setup: Setup) -> SuiteResult:
    bad = prop1_check(setup)
    return SuiteResult("Arakelov degrees against F", not bad, len(admissible_x(setup.D, 4 * setup.N)),
                       f"failures: {bad[:5]}" if bad else "")


def bijection_suite(setup: Setup, t_max: int = 64) -> SuiteResult:
    o = orient(setup)
    if o.emb is None:
        return SuiteResult("quaternion bijection", True, 0, f"skipped: {o.note}")
    bad, total = bijection_check(o.setup, o.emb, t_max)
    return SuiteResult("quaternion bijection", not bad, total, f"failures: {bad[:5]}" if bad else "")


def level_suite(setup: Setup, prec: int = 30, n_max: int = 4) -> SuiteResult:
    o = orient(setup)
    if o.emb is None:
        return SuiteResult("theta level cross-validation", True, 0, f"skipped: {o.note}")
    rows = level_cross_validation(o.setup, o.emb, prec, n_max)
    bad = [r.n for r in rows if not r.agree]
    return SuiteResult("theta level cross-validation", not bad, len(rows),
                       f"failing levels: {bad}" if bad else "")


def run_all(setup: Setup, seed: int = 0) -> list[SuiteResult]:
    o = orient(setup)
    s = o.setup
    suites: list[Callable[[], SuiteResult]] = [
        lambda: factorize_roundtrip(seed=seed),
        lambda: kronecker_properties(seed=seed),
        lambda: padic_properties(seed=seed),
        lambda: prop1_suite(s),
        lambda: hecke_recursion(s),
        lambda: curly_f_square(s),
        lambda: divisibility_lemma(s),
        lambda: four_term_identity(s),
        lambda: bijection_suite(setup),
        lambda: level_suite(setup),
    ]
    return [run() for run in suites]
