from padic_gz.crosscheck import (
    bijection_check,
    level_cross_validation,
    orient,
    prop1_check,
    valuation_from_rhs,
    valuation_from_trace_one,
)
from padic_gz.quadratic import make_setup
from padic_gz.selftest import factorize_roundtrip, kronecker_properties, padic_properties


def test_orientation(oriented, canonical):
    assert oriented.emb is not None
    assert oriented.reflex["label"] == 5 and oriented.reflex["relabelled"]
    assert oriented.setup.root_q == 5 and canonical.root_q == 1


def test_orientation_without_order():
    o = orient(make_setup(-43, -163, 2, 7))
    assert o.emb is None and o.setup.root_q == make_setup(-43, -163, 2, 7).root_q


def test_bijection_small(oriented):
    bad, total = bijection_check(oriented.setup, oriented.emb, 16)
    assert total > 0 and bad == []


def test_level_small(oriented):
    rows = level_cross_validation(oriented.setup, oriented.emb, 12, 2)
    assert [r.n for r in rows] == [0, 1, 2] and all(r.agree for r in rows)


def test_prop1_and_valuations(ref):
    assert prop1_check(ref) == []
    assert valuation_from_trace_one(ref) == valuation_from_rhs(ref) == 2


def test_cheap_suites():
    for suite in (factorize_roundtrip(limit=500, samples=50),
                  kronecker_properties(samples=100),
                  padic_properties(samples=100)):
        assert suite.passed, suite.detail
