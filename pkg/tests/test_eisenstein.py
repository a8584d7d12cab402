import pytest

from padic_gz.crosscheck import orient
from padic_gz.eisenstein import (
    HeckeOp,
    a_nu,
    curly_f,
    divisor_character_sum,
    eisenstein_coeff,
    enumerate_nu,
    hecke_image,
    identity_check,
    ideal_divisors,
    level_stats,
    nu_data,
    q1_xs,
    stabilized_precision,
)
from padic_gz.padic import LogSum, PAdic, PAdicContext
from padic_gz.quadratic import FIdeal, SetupError, factor_element, make_setup, rho


def test_q1_enumeration(ref):
    for t in (1, 2, 3, 4):
        xs = q1_xs(ref, t)
        assert xs and all(x * x < ref.D * t * t for x in xs)
        assert all((x - ref.root_q * t) % (2 * ref.q) == 0 for x in xs)
        nus = enumerate_nu(ref, t)
        assert [n.x for n in nus] == xs
        assert all(n.norm * 4 == ref.D * t * t - n.x**2 for n in nus)


def test_per_a_enumeration(ref):
    nus = enumerate_nu(ref, 1, "per-a")
    assert nus and all(n.a is not None for n in nus)
    with pytest.raises(ValueError):
        enumerate_nu(ref, 0)


def test_rho_is_divisor_sum(ref):
    for x in q1_xs(ref, 2)[:100]:
        I = factor_element(ref, x, 2)
        assert rho(I) == divisor_character_sum(I) == eisenstein_coeff(ref, x, 2)
        assert sum(1 for _ in ideal_divisors(I)) >= 1


def test_hecke_values(ref):
    plus = next(P for ell in (5, 7, 11, 13) for P in ref.primes_above(ell) if P.chi == 1)
    minus = next(P for ell in (29, 31, 37, 41) for P in ref.primes_above(ell) if P.chi == -1)
    assert hecke_image(ref, HeckeOp("T", 3, plus)).std == 4
    odd = hecke_image(ref, HeckeOp("T", 1, minus))
    assert odd.std == 0 and odd.eps == LogSum.of(minus.norm, 2)
    assert hecke_image(ref, HeckeOp("U", 2, index=1)).std == 1
    with pytest.raises(ValueError):
        hecke_image(ref, HeckeOp("T", 1, ref.p_prime(1)))


def test_curly_f_on_example(ref):
    J = factor_element(ref, -19, 1).without_primes_over(2).without_primes_over(3)
    assert J.norm == 277
    v = curly_f(ref, J)
    assert v.base == 277 and v.exponent == 2


def test_curly_f_rejects_p(ref):
    with pytest.raises(ValueError):
        curly_f(ref, FIdeal.from_dict({ref.p_prime(1): 1}))


def test_a_nu_standard_part(ref):
    ctx = PAdicContext(ref, 12)
    for x in q1_xs(ref, 1):
        d = nu_data(ref, x, 1)
        a = a_nu(ref, ctx, x, 1)
        assert a.std == d.sign * d.rho_Jt


def test_stabilized_precision():
    p = 2
    vals = [PAdic.of(v, p, 10) for v in (5, 5 + 64, 5 + 64 + 256, 5 + 64 + 256)]
    assert stabilized_precision(vals) == 8
    same = [PAdic.of(3, p, 10)] * 3
    assert stabilized_precision(same) == 10
    assert stabilized_precision(same[:1]) == 0


def test_level_stats_count(ref):
    ctx = PAdicContext.for_traces(ref, 12, 16)
    assert level_stats(ref, ctx, 4).count == len(q1_xs(ref, 4))


def test_identity_small_setup():
    s = orient(make_setup(-43, -163, 3, 2)).setup
    r = identity_check(s, K=8, n_max=3)
    assert r.verdict == "pass"
    assert r.valuation_lhs == r.valuation_rhs


def test_identity_rejects_bad_setup():
    with pytest.raises(SetupError):
        make_setup(-43, -163, 2, 11)


def test_b_is_exact_under_doubled_precision():
    s = orient(make_setup(-43, -163, 3, 2)).setup
    lo, hi = identity_check(s, K=6, n_max=2), identity_check(s, K=12, n_max=2)
    assert lo.b_factored == hi.b_factored
    assert hi.b_value.congruent(lo.b_value, lo.b_value.prec)
