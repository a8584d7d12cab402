"""Checks that tie the quaternion side, the nu-sums and the product formulas together."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .eisenstein import level_stats, q1_xs
from .padic import PAdic, PAdicContext, iwasawa_log
from .quadratic import (
    RhsMode,
    Setup,
    admissible_x,
    arakelov_X,
    classify_x,
    delta_x,
    f_value,
    j_ideal,
    rho,
)
from .quaternion import (
    SUPPORTED_Q,
    CMEmbeddingPair,
    build_algebra_and_order,
    make_embedding_pair,
    reflex_label,
    require_class_number_one,
    theta_level,
    x_census,
)
from .rational import class_number


@dataclass(frozen=True)
class Orientation:
    setup: Setup
    emb: CMEmbeddingPair | None
    reflex: dict | None
    note: str


def orient(setup: Setup, census_norm: int = 16) -> Orientation:
    """Relabel q1 to the reflex prime when the quaternion side is available."""
    if setup.q not in SUPPORTED_Q:
        return Orientation(setup, None, None, f"q = {setup.q} has no tabulated order; q1 left canonical")
    if class_number(setup.D1) != 1 or class_number(setup.D2) != 1:
        return Orientation(setup, None, None, "class number > 1; q1 left canonical")
    _, order = build_algebra_and_order(setup.q)
    emb = make_embedding_pair(order, setup.D1, setup.D2)
    label, info = reflex_label(setup, emb, census_norm)
    moved = label != setup.root_q
    info = {**info, "relabelled": moved, "canonicalLabel": setup.root_q}
    return Orientation(setup.with_root_q(label), emb, info,
                       "q1 relabelled to the reflex prime" if moved else "reflex prime is the canonical q1")


def bijection_check(setup: Setup, emb: CMEmbeddingPair, t_max: int = 64):
    """Compare #{b : Nm b = t, det_F(b) = nu} with (w1 w2 / 2) rho(J_nu) for all nu of trace <= t_max."""
    require_class_number_one(setup.D1, setup.D2)
    factor = setup.w1 * setup.w2 // 2
    mismatches, total = [], 0
    for t in range(1, t_max + 1):
        census = x_census(emb, t)
        xs = set(q1_xs(setup, t))
        stray = set(census) - xs
        if stray:
            mismatches.extend((x, t, census[x], None) for x in sorted(stray))
        for x in sorted(xs):
            total += 1
            expected = factor * rho(j_ideal(setup, x, t, 1))
            if census.get(x, 0) != expected:
                mismatches.append((x, t, census.get(x, 0), expected))
    return mismatches, total


@dataclass(frozen=True)
class LevelComparison:
    n: int
    log_theta: PAdic
    scaled_sum: PAdic
    agree: bool
    elements: int


def level_cross_validation(setup: Setup, emb: CMEmbeddingPair, prec: int, n_max: int):
    """log_p of the level-n quaternionic product against (w1 w2 / 2) times the level-n nu-sum."""
    p = setup.p
    ctx = PAdicContext.for_traces(setup, prec, p ** (2 * n_max))
    factor = setup.w1 * setup.w2 // 2
    out = []
    for n in range(n_max + 1):
        t = p ** (2 * n)
        prod = theta_level(ctx, emb, t)
        lt = iwasawa_log(prod)
        s = level_stats(setup, ctx, t)
        scaled = PAdic._normalize(p, s.theta * factor, 0, prec)
        k = min(lt.prec, scaled.prec)
        out.append(LevelComparison(n, lt, scaled, lt.congruent(scaled, k), s.count))
    return out


def prop1_check(setup: Setup) -> list[int]:
    """x where F((D - x^2)/4N)^delta(x) differs from prod_a X(a, nu)^delta(a)."""
    bad = []
    N = setup.N
    for x in admissible_x(setup.D, 4 * N):
        a, d = classify_x(setup, x, 1)
        lhs = f_value(setup, (setup.D - x * x) // (4 * N)).to_factored(delta_x(setup, x))
        rhs = arakelov_X(setup, a, x, 1).to_factored(d)
        if lhs != rhs:
            bad.append(x)
    return bad


def valuation_from_trace_one(setup: Setup) -> int:
    """sum over trace-1 nu in the q1 class of rho(J_nu)(v_p1 - v_p2)."""
    from .eisenstein import nu_data
    return sum(nu_data(setup, x, 1).rho_J * (nu_data(setup, x, 1).v_p1 - nu_data(setup, x, 1).v_p2)
               for x in q1_xs(setup, 1))


def valuation_from_rhs(setup: Setup) -> int:
    """sum delta(x) v_p F((D - x^2)/4N)."""
    total = 0
    for x in admissible_x(setup.D, 4 * setup.N):
        f = f_value(setup, (setup.D - x * x) // (4 * setup.N))
        if f.base == setup.p:
            total += delta_x(setup, x) * int(f.exponent)
    return total
