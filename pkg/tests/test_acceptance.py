"""Acceptance criteria, one test each.

Every test prints a single PASS/FAIL line (visible without -s) before asserting.
"""

import time

import pytest

from padic_gz import cli
from padic_gz.crosscheck import (
    bijection_check,
    level_cross_validation,
    prop1_check,
    valuation_from_rhs,
    valuation_from_trace_one,
)
from padic_gz.selftest import (
    curly_f_square,
    divisibility_lemma,
    four_term_identity,
    hecke_recursion,
    padic_properties,
)


def announce(capsys, number, title, ok, detail, elapsed, limit):
    ok = ok and elapsed < limit
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail} | "
              f"{elapsed:.2f} s (limit {limit} s)")
    return ok


def timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def test_criterion_1_classical_product(capsys):
    (report, _), dt = timed(lambda: cli.execute("classical-gz", cli.RunConfig()))
    res = report["results"]
    ok = report["verdict"] == "pass" and res["product"]["value"] == res["reference"]["expected"]
    assert announce(capsys, 1, "classical product for (-43, -163)", ok,
                    res["product"]["value"], dt, 1.0)


def test_criterion_2_shimura_support(capsys):
    (report, _), dt = timed(lambda: cli.execute("shimura-rhs", cli.RunConfig()))
    res = report["results"]
    support = (set(res["positivePrimes"]), set(res["negativePrimes"]))
    expected = ({2, 29, 257, 277}, {73, 137, 241})
    ok = support in (expected, expected[::-1]) and res["reference"]["exponent"] is not None
    assert announce(capsys, 2, "Shimura product support", ok,
                    f"{res['product']['value']}, e = {res['reference']['exponent']}", dt, 1.0)


def test_criterion_3_padic_identity(capsys):
    cfg = cli.RunConfig(precision=12, n_max=5, workers=1)
    (report, _), dt = timed(lambda: cli.execute("identity-check", cfg))
    cong = report["results"]["congruence"]
    ok = report["verdict"] == "pass" and cong["holds"] and cong["precision"] >= 4
    assert announce(capsys, 3, "A + B = 0 at nMax 5, K 12", ok,
                    f"stabilized precision {cong['precision']}", dt, 300.0)


def test_criterion_4_valuation(capsys, ref):
    (lhs, rhs), dt = timed(lambda: (valuation_from_trace_one(ref), valuation_from_rhs(ref)))
    assert announce(capsys, 4, "valuation bookkeeping", lhs == rhs, f"{lhs} = {rhs}", dt, 1.0)


def test_criterion_5_bijection(capsys, oriented):
    (bad, total), dt = timed(lambda: bijection_check(oriented.setup, oriented.emb, 64))
    assert announce(capsys, 5, "quaternion bijection, trace <= 64", not bad and total > 0,
                    f"{total} nu checked, {len(bad)} mismatches", dt, 30.0)


def test_criterion_6_levels(capsys, oriented):
    rows, dt = timed(lambda: level_cross_validation(oriented.setup, oriented.emb, 30, 4))
    ok = len(rows) == 5 and all(r.agree for r in rows)
    digits = min(min(r.log_theta.prec, r.scaled_sum.prec) for r in rows)
    assert announce(capsys, 6, "level-by-level cross-validation, n <= 4", ok,
                    f"agreement to {digits} digits at every level", dt, 120.0)


def test_criterion_7_prop1(capsys, ref):
    bad, dt = timed(lambda: prop1_check(ref))
    assert announce(capsys, 7, "Arakelov degree consistency", not bad, f"{len(bad)} mismatches", dt, 1.0)


@pytest.mark.parametrize("seed", [0])
def test_criterion_8_property_suites(capsys, ref, seed):
    suites, dt = timed(lambda: [
        hecke_recursion(ref, n_max=10, bound=100),
        curly_f_square(ref, t_max=64),
        divisibility_lemma(ref, n_max=8),
        padic_properties(samples=1000, seed=seed),
        four_term_identity(ref, t_max=64),
    ])
    failed = [s.name for s in suites if not s.passed]
    detail = ", ".join(f"{s.name}: {s.cases}" for s in suites) + (f"; failed {failed}" if failed else "")
    assert announce(capsys, 8, "property suites", not failed, detail, dt, 120.0)
