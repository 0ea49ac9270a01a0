from fractions import Fraction

import pytest

from qpadic import linalg as la
from qpadic.errors import ClassViolation, LatticeResidual, NotInNormalForm
from qpadic.frobenius import (FrobeniusH, _ratrec, charpoly, eigenvalue_distance, frobenius_chi_check,
                              frobenius_F, frobenius_H, in_normal_form, lambda_radius_prediction,
                              lambda_series_radius, normal_form, poles_off_unit_disk,
                              reconstruct_F, reconstruct_rational, rnd, zeta_pochhammer_sums,
                              zeta_sums_group_ring, zeta_sums_numeric)
from qpadic.padic import INF, vp
from qpadic.qcalc import INFINITE_RADIUS, LogRadius, QContext
from qpadic.series import RationalFunction as RF
from qpadic.systems import QDiffSystem

Q = Fraction(4)
x = RF.x()


def pole_system(ctx, c=1):
    """A = (1 - c x)/(1 - c q x), solved by 1/(1 - c x)."""
    return QDiffSystem([[RF([1, -c], [1, -c * ctx.q])]], ctx)


def expected_H(c, P, N):
    """(1/P) sum_zeta (1 - c x)/(1 - c zeta x) = (1 - c x)/(1 - (c x)^P)."""
    out = []
    for k in range(N + 1):
        if k % P == 0:
            out.append(Fraction(c) ** k)
        elif k % P == 1:
            out.append(-Fraction(c) ** k)
        else:
            out.append(Fraction(0))
    return out


def congruent(a, b, p, prec):
    return a == b or vp(Fraction(a) - Fraction(b), p) >= prec


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("ell", [1, 2])
def test_zeta_sums_three_routes(p, ell):
    q = 1 + p
    ring = zeta_sums_group_ring(20, ell, q, p)
    for n in range(21):
        exact = zeta_pochhammer_sums(n, ell, q, p)
        assert exact == ring[n]
        assert exact == zeta_sums_numeric(n, ell, q, p)


def test_zeta_sums_examples():
    assert [zeta_pochhammer_sums(n, 1, 4, 3) for n in range(5)] == [3, -3, 12, -189, 12033]
    assert zeta_pochhammer_sums(0, 2, 4, 3) == 9
    # Sum (zeta - 1) = -p and Sum (zeta - 1)(zeta - q) = p q for odd p
    for p in (3, 5, 7):
        assert zeta_pochhammer_sums(1, 1, 1 + p, p) == -p
        assert zeta_pochhammer_sums(2, 1, 1 + p, p) == p * (1 + p)


def test_zeta_sums_modular_route():
    m = 3 ** 30
    red = zeta_sums_group_ring(25, 1, 4, 3, modulus=m)
    for n in range(26):
        assert (zeta_pochhammer_sums(n, 1, 4, 3) - red[n]) % m == 0


def test_rounding():
    assert rnd(Fraction(1, 2), 3, 4) == 41         # 2 * 41 = 82 = 1 + 81
    assert rnd(Fraction(9, 2), 3, 4) == 9 * 5      # 1/2 mod 9 is 5
    assert rnd(3 ** 5, 3, 4) == 0


def test_trivial_system(ctx):
    sys = QDiffSystem([[RF.const(1), RF.const(0)], [RF.const(0), RF.const(1)]], ctx)
    H = frobenius_H(sys, 1, N=12, eigs=[1, 1])
    assert all(m == tuple(tuple(r) for r in la.identity(2)) if k == 0 else
               all(v == 0 for r in m for v in r) for k, m in enumerate(H.coeffs))
    F = frobenius_F(sys, H)
    assert F.off_lattice_valuation == INF
    assert F.coeffs[0] == tuple(tuple(r) for r in la.identity(2))


def test_rank_one_against_closed_form(ctx):
    sys = pole_system(ctx)
    N = 36
    H = frobenius_H(sys, 1, N=N, eigs=[1])
    assert H.precision >= ctx.M
    want = expected_H(1, 3, N)
    assert all(congruent(a, b, 3, H.precision) for a, b in zip(H.entry(0, 0), want))
    F = frobenius_F(sys, H)
    assert F.off_lattice_valuation >= ctx.M - 4
    assert F.charpoly_valuation >= ctx.M
    Fr = reconstruct_F(F, 3)
    assert Fr == [[RF([1, -1], [1, -Q ** 3])]]
    assert poles_off_unit_disk(Fr, 3)


def test_rank_one_ell_two(ctx):
    sys = pole_system(ctx)
    N = 54
    H = frobenius_H(sys, 2, N=N, eigs=[1])
    want = expected_H(1, 9, N)
    assert all(congruent(a, b, 3, H.precision) for a, b in zip(H.entry(0, 0), want))
    F = frobenius_F(sys, H)
    assert len(F.coeffs) == N // 9 + 1
    assert reconstruct_F(F, 3) == [[RF([1, -1], [1, -Q ** 9])]]


def test_rank_two_diagonal(ctx):
    A = [[RF([1, -1], [1, -Q]), RF.const(0)], [RF.const(0), RF([1, -2], [1, -2 * Q])]]
    sys = QDiffSystem(A, ctx)
    N = 30
    H = frobenius_H(sys, 1, N=N, eigs=[1, 1])
    assert all(congruent(a, b, 3, H.precision) for a, b in zip(H.entry(0, 0), expected_H(1, 3, N)))
    assert all(congruent(a, b, 3, H.precision) for a, b in zip(H.entry(1, 1), expected_H(2, 3, N)))
    assert all(congruent(a, 0, 3, H.precision) for a in H.entry(0, 1) + H.entry(1, 0))
    F = frobenius_F(sys, H)
    Fr = reconstruct_F(F, 3)
    assert Fr[0][0] == RF([1, -1], [1, -64]) and Fr[1][1] == RF([1, -8], [1, -512])
    assert Fr[0][1] == RF.const(0) == Fr[1][0]
    assert poles_off_unit_disk(Fr, 3)


def test_rank_two_coupled(ctx):
    # a constant change of basis mixes the diagonal example; H conjugates the same way
    A = [[RF([1, -1], [1, -Q]), RF.const(0)], [RF.const(0), RF([1, -2], [1, -2 * Q])]]
    C = [[RF.const(1), RF.const(1)], [RF.const(0), RF.const(1)]]
    Ci = la.inverse(C)
    sys = QDiffSystem(la.mmul(la.mmul(C, A), Ci), ctx)
    H = frobenius_H(sys, 1, N=24, eigs=[1, 1])
    F = frobenius_F(sys, H)
    assert F.off_lattice_valuation >= ctx.M - 4
    assert vp(la.det([list(r) for r in H.coeffs[0]]), 3) == 0


def test_chi_power_relation(ctx):
    sys = pole_system(ctx)
    H = frobenius_H(sys, 1, N=36, eigs=[1])
    Fr = reconstruct_F(frobenius_F(sys, H), 3)
    Fsys = QDiffSystem(Fr, ctx.with_q(Q ** 3))
    res = frobenius_chi_check(sys, Fsys, 1, horizon=64)
    assert res["difference"] <= Fraction(2, 64)


def test_class_and_normal_form_errors(ctx):
    sys = QDiffSystem([[RF.const(2)]], ctx)
    with pytest.raises(NotInNormalForm):
        frobenius_H(sys, 1, N=6, eigs=[2])
    with pytest.raises(ClassViolation):
        frobenius_H(sys, 1, N=6)


def test_lattice_residual_is_reported(ctx):
    sys = pole_system(ctx)
    H = frobenius_H(sys, 1, N=12, eigs=[1])
    # damage one coefficient of H: A_[H] leaves the lattice
    bad = [list(map(list, m)) for m in H.coeffs]
    bad[1][0][0] += 1
    broken = FrobeniusH(tuple(tuple(tuple(r) for r in m) for m in bad), H.precision, H.tail_valuation, 1)
    with pytest.raises(LatticeResidual):
        frobenius_F(sys, broken)
    assert frobenius_F(sys, broken, strict=False).off_lattice_valuation < ctx.M - 4


def test_normal_form_checks(ctx):
    assert in_normal_form([1, 10], ctx, 1)
    assert not in_normal_form([1, Q], ctx, 1)         # resonant
    assert not in_normal_form([Q], ctx, 1)            # v((q-1)/(q-1)) = 0 is not > 0
    assert not in_normal_form([10], ctx, 2)


def test_normal_form_shears_q_lambda(ctx):
    sys = QDiffSystem([[RF([1, 1]), x], [RF([0, 1]), RF([Q, 1])]], ctx)
    H, new, eigs = normal_form(sys, [1, Q], 1)
    assert eigs == (1, 1)
    A0 = [[f(0) for f in r] for r in new.A]
    assert charpoly(A0) == [1, -2, 1]
    H0, same, e0 = normal_form(pole_system(ctx), [1], 1)
    assert H0 == [[RF.const(1)]] and same.A == pole_system(ctx).A
    with pytest.raises(NotInNormalForm):
        normal_form(QDiffSystem([[RF.const(2)]], ctx), [2], 1)


def test_eigenvalue_distance_examples(ctx):
    assert eigenvalue_distance(Q ** 7, ctx).r == INF
    assert eigenvalue_distance(10, ctx).r == INF       # 10 = q^a for some a in Z_3
    assert eigenvalue_distance(2, ctx) == LogRadius(0)
    assert eigenvalue_distance(Fraction(5, 7), ctx) == LogRadius(0)


def test_lambda_series(ctx):
    far = lambda_series_radius(2, ctx, 400)
    assert far.certified and far.log_radius == LogRadius(Fraction(3, 2))
    assert lambda_radius_prediction(2, ctx) == LogRadius(Fraction(3, 2))
    poly = lambda_series_radius(Q ** 7, ctx, 200)
    assert poly.log_radius == INFINITE_RADIUS
    near = lambda_series_radius(10, ctx, 600)
    # binomial-type coefficients in Z_3, units infinitely often
    assert near.window_statistic() == 0
    assert lambda_radius_prediction(10, ctx) == LogRadius(0)


def test_rational_reconstruction():
    assert _ratrec(rnd(Fraction(-5, 7), 3, 40), 3, 40) == Fraction(-5, 7)
    f = RF([1, 2], [1, -5, 3])
    ser = [rnd(c, 3, 60) for c in f.taylor(0, 30)]
    assert reconstruct_rational(ser, 3, 60) == f
    assert reconstruct_rational([rnd(Fraction(1, 2 ** k + 3), 3, 60) for k in range(30)], 3, 60) is None


def test_pole_check():
    assert poles_off_unit_disk([[RF([1], [1, -3])]], 3)
    assert not poles_off_unit_disk([[RF([1], [1, Fraction(-1, 3)])]], 3)


def test_json_report(ctx):
    sys = pole_system(ctx)
    F = frobenius_F(sys, frobenius_H(sys, 1, N=9, eigs=[1]))
    js = F.to_json()
    assert js["ell"] == 1 and len(js["F"]) == 4
    assert js["off_lattice_valuation"] is None or js["off_lattice_valuation"] >= ctx.M - 4


def test_context_for_the_pulled_back_system(ctx):
    c = ctx.with_q(Q ** 3)
    assert c.q == 64 and c.v_one_minus_q == 2
    assert isinstance(c, QContext)
