from fractions import Fraction

import pytest

from padic_gz.padic import (
    DualPAdic,
    FElement,
    LogSum,
    PAdic,
    PAdicContext,
    PrecisionError,
    embed_F,
    hensel_sqrt,
    iwasawa_log,
    v_prime,
)


def series_log(z: Fraction, p: int, k: int, terms: int = 200) -> int:
    """log(1 + z) by its rational Taylor series, reduced mod p^k."""
    total = sum(Fraction((-1) ** (n + 1)) * z**n / n for n in range(1, terms))
    mod = p**k
    return total.numerator * pow(total.denominator, -1, mod) % mod


def test_arithmetic_and_precision():
    a = PAdic.of(12, 2, 10)
    assert a.valuation == 2 and a.relative_precision == 8
    assert (a * 3).residue() == 36
    assert (a / 3 * 3).congruent(12, 10)
    b = PAdic.of(Fraction(1, 4), 2, 10)
    assert b.valuation == -2
    assert (a * b).congruent(3, 8)
    z = a - a
    assert z.is_zero and z.valuation == float("inf") or z.is_zero


def test_precision_loss_on_cancellation():
    x = PAdic.of(1, 3, 5) + PAdic.of(3**5 - 1, 3, 5)
    assert x.is_zero
    with pytest.raises((PrecisionError, ZeroDivisionError)):
        x.inverse()


def test_hensel_examples():
    r = hensel_sqrt(7009, 2, 12)
    assert r.residue() % 4 == 1 and (r * r).congruent(7009, 12)
    assert hensel_sqrt(1, 7, 10).residue() == 1
    with pytest.raises(ValueError):
        hensel_sqrt(2, 5, 5)


def test_log_examples():
    assert iwasawa_log(PAdic.of(1, 5, 10)).is_zero
    assert iwasawa_log(PAdic.of(2, 2, 10)).is_zero  # log_p(p) = 0 and log_p(-1) = 0
    # log_3(4) = log(16)/2 = log(1 + 15)/2
    expected = series_log(Fraction(15), 3, 6) * pow(2, -1, 3**6) % 3**6
    assert iwasawa_log(PAdic.of(4, 3, 10)).congruent(expected, 6)
    # 2-adic: log(5) from the series in z = 4
    assert iwasawa_log(PAdic.of(5, 2, 12)).congruent(series_log(Fraction(4), 2, 10, 400), 10)


def test_log_additivity():
    for p in (2, 3, 7):
        a, b = PAdic.of(11, p, 15), PAdic.of(26, p, 15)
        lhs, rhs = iwasawa_log(a * b), iwasawa_log(a) + iwasawa_log(b)
        assert lhs.congruent(rhs, min(lhs.prec, rhs.prec))


def test_embedding(ref):
    ctx = PAdicContext(ref, 12)
    sqrtD = FElement(Fraction(0), Fraction(2), ref.D)  # (0 + 2 sqrt D)/2
    img = embed_F(ctx, sqrtD, 1)
    assert img.valuation == 0 and (img * img).congruent(ref.D, 12)
    # (root_p + sqrt D)/2 has norm -1752 = -2^3 * 219, all of it at p1
    xi = FElement(Fraction(ref.root_p), Fraction(1), ref.D)
    assert v_prime(ctx, xi, 1) == 3 and v_prime(ctx, xi, 2) == 0
    # shifting by p keeps the element in p1 and leaves norm -1750 = -2 * 875
    xi = FElement(Fraction(ref.root_p + 2 * ref.p), Fraction(1), ref.D)
    assert v_prime(ctx, xi, 1) == 1 and v_prime(ctx, xi, 2) == 0
    assert (embed_F(ctx, xi, 1) * embed_F(ctx, xi, 2)).congruent(xi.norm, 12)


def test_felement():
    D = 7009
    a = FElement(Fraction(19), Fraction(1), D)
    assert a.norm == Fraction(361 - D, 4) and a.trace == 19 and a.is_integral
    assert (a * a.conjugate).v == 0


def test_dual_numbers(ref):
    ctx = PAdicContext(ref, 12)
    e = DualPAdic(3, LogSum.of(3))
    sq = e * e
    assert sq.std == 9 and sq.eps == LogSum.of(3, 6)
    assert (e**3).eps == LogSum.of(3, 27)
    assert (e**3).eps.evaluate(ctx).congruent(iwasawa_log(PAdic.of(3, 2, 12)) * 27, 10)
    assert (LogSum.of(5) - LogSum.of(5)) == LogSum()
    with pytest.raises(KeyError):
        LogSum.of("pi1").evaluate(ctx)
