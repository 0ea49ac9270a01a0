from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qpadic.errors import InvalidArgument, PreconditionViolated
from qpadic.padic import INF, vp
from qpadic.qcalc import (INFINITE_RADIUS, UNIT_RADIUS, ZERO_RADIUS, LogRadius, QContext,
                          eff_bound_const, eff_bound_const_exhaustive, factorization_check,
                          gaussian_binomial_poly, hypergeometric_phi, pascal_check,
                          product_identity_check, q_binomial, q_bracket, q_factorial, q_type,
                          rad_max, rad_min, radius_from_valuations, v_q_bracket, v_q_power_minus)

from oracles import eff_bound_brute, q_binomial_sympy


def test_context_defaults(ctx):
    assert (ctx.p, ctx.q, ctx.M, ctx.N) == (3, 4, 64, 128)
    assert ctx.v_one_minus_q == 1
    assert ctx.pi_norm == LogRadius(Fraction(1, 2))
    assert ctx.pi_q_norm == ctx.pi_norm


def test_context_rejects_bad_q():
    with pytest.raises(PreconditionViolated):
        QContext(3, 2)
    with pytest.raises(InvalidArgument):
        QContext(4)
    with pytest.raises(InvalidArgument):
        QContext(3, 3)


def test_brackets(ctx):
    assert q_bracket(2, ctx) == 5
    assert q_bracket(3, ctx) == 21
    assert vp(q_bracket(3, ctx), 3) == 1
    assert q_factorial(3, ctx) == 1 * 5 * 21


def test_binomial_example(ctx):
    assert q_binomial(4, 2, ctx) == 357
    poly = gaussian_binomial_poly(4, 2)
    assert poly == [1, 1, 2, 1, 1]
    assert sum(c * 4 ** i for i, c in enumerate(poly)) == 357


@given(st.integers(0, 12), st.integers(0, 12), st.sampled_from([Fraction(4), Fraction(7, 2), Fraction(-2)]))
def test_binomial_matches_sympy(n, i, q):
    assert q_binomial(n, i, q) == q_binomial_sympy(n, i, q)


@given(st.integers(1, 15))
def test_pascal_and_product(n):
    q = Fraction(4)
    assert all(pascal_check(n, i, q) for i in range(1, n + 1))
    assert product_identity_check(n, q)
    assert q_binomial(n, 0, q) == q_binomial(n, n, q) == 1


@given(st.integers(-30, 30), st.integers(1, 200))
def test_v_q_power_minus_against_exact(n, a):
    alpha = Fraction(1 + 3 * a)
    assert v_q_power_minus(n, alpha, Fraction(4), 3) == vp(Fraction(4) ** n - alpha, 3)


@given(st.integers(1, 300))
def test_v_bracket_is_v_n(n):
    # |[n]_q| = |n| under the standing hypothesis
    assert v_q_bracket(n, 4, 3) == vp(n, 3)


def test_logradius_order_and_product():
    a, b = LogRadius(1), LogRadius(2)
    assert b < a                      # p^-2 < p^-1
    assert (a * b).r == 3
    assert rad_min(a, b) == b and rad_max(a, b) == a
    assert ZERO_RADIUS < b < UNIT_RADIUS < INFINITE_RADIUS
    assert LogRadius.from_json(a.to_json()) == a
    assert LogRadius.from_json(ZERO_RADIUS.to_json()) == ZERO_RADIUS


def test_eff_bound_examples(ctx):
    assert eff_bound_const(0, 1, ctx) == UNIT_RADIUS
    assert eff_bound_const(10, 1, ctx) == LogRadius(-2)     # 9
    assert eff_bound_const(10, 2, ctx) == LogRadius(-3)     # 9 * 3


@pytest.mark.parametrize("m", [1, 2, 3])
def test_eff_bound_against_brute_force(ctx, m):
    for n in range(m, 30):
        want = eff_bound_brute(n, m, 3, 4)
        assert eff_bound_const(n, m, ctx).r == want
        assert eff_bound_const_exhaustive(n, m, ctx).r == want


def test_radius_statistic_geometric():
    est = radius_from_valuations({n: 2 * n for n in range(200)}, 3, 199)
    assert est.certified and est.log_radius == LogRadius(-2)


def test_radius_statistic_factorial():
    # sum x^n / n! has radius |pi|
    from math import factorial
    est = radius_from_valuations({n: -vp(factorial(n), 3) for n in range(300)}, 3, 299)
    assert est.certified and est.log_radius == LogRadius(Fraction(1, 2))


def test_radius_statistic_polynomial():
    w = {n: (0 if n < 5 else INF) for n in range(100)}
    est = radius_from_valuations(w, 3, 99)
    assert est.certified and est.log_radius == INFINITE_RADIUS


def test_radius_rows_json():
    est = radius_from_valuations({n: n for n in range(40)}, 3, 39)
    js = est.to_json()
    assert js["certified"] is True
    assert {"n", "v_over_n"} == set(js["rows"][0])


def test_qtype_of_two(ctx):
    for mode in ("direct", "formula"):
        t = q_type(2, ctx, 2000, mode=mode)
        assert t.certified and t.log_radius == UNIT_RADIUS


def test_qtype_of_one_and_resonant(ctx):
    # the terms are 1/[n]_q, so the window statistic is max v(n)/n: at most
    # log_p(H)/(H/2) and tending to 0
    H = 3000
    direct = q_type(1, ctx, H)
    assert 0 < direct.window_statistic() <= Fraction(7, 1500)
    assert q_type(1, ctx, H, mode="formula").log_radius == UNIT_RADIUS
    t = q_type(Fraction(4) ** 5, ctx, 2000, mode="formula")
    assert t.certified and t.log_radius == UNIT_RADIUS
    assert 5 not in dict(q_type(Fraction(4) ** 5, ctx, 2000).rows)


@given(st.integers(1, 500))
def test_qtype_modes_agree(a):
    ctx = QContext()
    alpha = Fraction(1 + 3 * a) if a % 2 else Fraction(a + 3 * a * a + 1, 1)
    if vp(alpha, 3) != 0:
        return
    d = q_type(alpha, ctx, 600, mode="direct")
    f = q_type(alpha, ctx, 600, mode="formula")
    assert d.rows == f.rows
    assert d.window_statistic() == f.window_statistic()
    if d.certified:
        assert d.log_radius == f.log_radius


def test_phi_coefficients_and_factorization(ctx):
    c = hypergeometric_phi(2, ctx, 10)
    assert c[0] == 1
    assert [vp(x, 3) for x in c[1:]] == list(range(1, 11))
    assert factorization_check(2, ctx, 30)
    assert factorization_check(Fraction(7, 5), ctx, 20)


def test_direct_type_of_q_powers(ctx):
    # alpha = q^k excludes n = k and leaves w_n = -v(n - k), so the radius is 1
    for k in (0, 2, 5):
        t = q_type(ctx.q ** k, ctx, 500)
        assert t.certified and t.log_radius == LogRadius(0) and t.pattern == f"w_n = -v(n - {k})"
    assert not q_type(7, ctx, 500).certified
