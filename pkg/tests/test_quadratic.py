from fractions import Fraction

import pytest

from padic_gz.eisenstein import q1_xs
from padic_gz.quadratic import (
    INERT,
    RAMIFIED,
    SPLIT,
    FIdeal,
    NormNIdeal,
    RhsMode,
    SetupError,
    admissible_x,
    arakelov_X,
    chi_ideal,
    classify_x,
    delta_x,
    f_value,
    factor_element,
    j_ideal,
    local_root,
    make_pair,
    make_setup,
    rho,
    rhs_product,
    split_label,
)
from padic_gz.rational import FactoredRational, is_prime, kronecker


def test_reference_setup(canonical):
    s = canonical
    assert (s.D, s.N, s.w1, s.w2) == (7009, 6, 2, 2)
    assert s.p_prime(1) != s.p_prime(2) and s.p_prime(1).kind == SPLIT


@pytest.mark.parametrize("args,needle", [
    ((-3, -9, 2, 3), "fundamental"),
    ((-43, -43, 2, 3), "coprime"),
    ((-43, -163, 2, 2), "distinct"),
    ((-43, -163, 2, 11), "inert"),
])
def test_invalid_setups(args, needle):
    with pytest.raises(SetupError, match=needle):
        make_setup(*args)


def test_kronecker_decides_p5():
    # both symbols are -1, so p = 5 is admissible
    s = make_setup(-43, -163, 5, 3)
    assert s.N == 15


def test_prime_kinds(canonical):
    s = canonical
    assert {P.kind for P in s.primes_above(43)} == {RAMIFIED}
    inert = next(ell for ell in range(3, 100) if is_prime(ell) and kronecker(s.D, ell) == -1)
    assert [P.kind for P in s.primes_above(inert)] == [INERT]
    assert [P.kind for P in s.primes_above(5)] == [SPLIT, SPLIT]
    assert len(s.primes_above(277)) == 2


def test_split_label_convention():
    for ell in (2, 3, 29, 277):
        c = split_label(7009, ell)
        assert c % 2 == 1 and (c * c - 7009) % (4 * ell) == 0


def test_local_root_matches_label():
    for ell, c in ((2, 1), (3, 5)):
        r = local_root(7009, ell, c, 10)
        assert (r * r - 7009) % ell**10 == 0
        # the label c means (c + sqrt D)/2 lies in the prime, so sqrt D = -c locally
        assert (r + c) % (4 if ell == 2 else ell) == 0


def test_chi(canonical):
    s = canonical
    assert chi_ideal(FIdeal.from_dict({})) == 1
    assert chi_ideal(FIdeal.from_dict({s.q_prime(1): 1})) == -1
    for t in (1, 2, 4):
        for x in q1_xs(s, t)[:50]:
            assert chi_ideal(j_ideal(s, x, t, 1)) == 1


def test_rho(canonical):
    s = canonical
    inert_chi = next(P for P in s.primes_above(29) if P.chi == -1)
    split_plus = next(P for ell in range(5, 200) if is_prime(ell) for P in s.primes_above(ell)
                      if P.kind == SPLIT and P.chi == 1)
    assert rho(FIdeal.from_dict({})) == 1
    assert rho(FIdeal.from_dict({inert_chi: 1})) == 0
    assert rho(FIdeal.from_dict({inert_chi: 2})) == 1
    assert rho(FIdeal.from_dict({split_plus: 3})) == 4


def test_f_value(canonical):
    s = canonical
    assert f_value(s, 277).base == 277 and f_value(s, 277).exponent == 1
    assert f_value(s, 1).is_one
    assert f_value(s, 29 * 277).is_one
    assert f_value(s, Fraction(1, 2)).is_one and f_value(s, -5).is_one


def test_factor_element_norm(canonical):
    J = factor_element(canonical, 19, 1)
    assert J.norm == (7009 - 361) // 4


def test_classify_and_j_ideal(ref):
    a, d = classify_x(ref, -19, 1)
    assert a == NormNIdeal.P1Q1 and d == 1 == delta_x(ref, 19)
    a2, d2 = classify_x(ref, 19, 1)
    assert a2 == a.conjugate and d2 == d
    assert classify_x(ref, 3, 1) == (None, None)
    assert j_ideal(ref, -19, 1).norm == 554
    assert j_ideal(ref, -19, 1, deprive_p=True).norm == 277


def test_arakelov_against_f(ref):
    for x in admissible_x(ref.D, 4 * ref.N):
        a, d = classify_x(ref, x, 1)
        lhs = f_value(ref, (ref.D - x * x) // (4 * ref.N)).to_factored(delta_x(ref, x))
        assert lhs == arakelov_X(ref, a, x, 1).to_factored(d)


def test_classical_product():
    value = rhs_product(make_pair(-43, -163), RhsMode.MODULAR4)
    assert value == FactoredRational.from_exponents({2: 19, 3: 6, 5: 3, 7: 3, 37: 1, 433: 1}) ** 2


def test_shimura_product(ref):
    value = rhs_product(ref, RhsMode.SHIMURA4N)
    assert value == FactoredRational.from_exponents({2: 1, 29: 1, 257: 1, 277: 1, 73: -1, 137: -1, 241: -1}) ** 2
