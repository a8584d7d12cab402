from fractions import Fraction

import pytest

from padic_gz.rational import (
    FactoredRational,
    class_number,
    factorize,
    is_fundamental_discriminant,
    is_prime,
    kronecker,
    sqrt_mod_prime,
    sqrt_mod_prime_power,
    unit_count,
    valuation,
)


def test_factorize_6648():
    f = factorize(6648)
    assert dict(f.factors) == {2: 3, 3: 1, 277: 1}
    assert f.sign == 1 and f.value == 6648


def test_factorize_trivial_and_negative():
    assert factorize(1).factors == () and factorize(1).sign == 1
    f = factorize(-4)
    assert f.sign == -1 and dict(f.factors) == {2: 2}


def test_factorize_zero_rejected():
    with pytest.raises(ValueError):
        factorize(0)


def test_factorize_large_semiprime():
    p, q = 1_000_000_007, 998_244_353
    assert dict(factorize(p * q).factors) == {q: 1, p: 1}


@pytest.mark.parametrize("a,n,expected", [(-43, 3, -1), (5, 5, 0), (7009, 277, 1), (2, 5, -1), (-163, 2, -1)])
def test_kronecker_examples(a, n, expected):
    assert kronecker(a, n) == expected


def test_primality_edges():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


def test_factored_rational_algebra():
    r = FactoredRational.from_fraction(Fraction(12, 35))
    assert r.exponent(2) == 2 and r.exponent(7) == -1
    assert (r * r.inverse()).value == 1
    assert (r**2).value == Fraction(144, 1225)
    assert str(FactoredRational.from_exponents({2: 1, 277: 1, 73: -1})) == "2 * 277 / 73"


def test_valuation_and_roots():
    assert valuation(Fraction(8, 3), 2) == 3 and valuation(Fraction(8, 3), 3) == -1
    r = sqrt_mod_prime(7009, 277)
    assert r * r % 277 == 7009 % 277
    r = sqrt_mod_prime_power(7009, 2, 20)
    assert (r * r - 7009) % 2**20 == 0


def test_discriminant_helpers():
    assert is_fundamental_discriminant(-43) and not is_fundamental_discriminant(-9)
    assert class_number(-43) == class_number(-163) == 1 and class_number(-23) == 3
    assert unit_count(-3) == 6 and unit_count(-4) == 4 and unit_count(-43) == 2
