import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpadic import linalg as la
from qpadic.errors import InvalidArgument, ResonantSpectrum, SpectrumNotSplit
from qpadic.padic import vp
from qpadic.qcalc import INFINITE_RADIUS, LogRadius, q_type
from qpadic.regsing import (check_spectrum, indicial_roots, phi_det_formula, phi_matrix, q_exponent,
                            radius_of_gauge, regular_singular_solve, second_order_basis,
                            second_order_residual, shearing_normalize, spectral_data, transfer_bound,
                            triangularize)
from qpadic.series import RationalFunction as RF
from qpadic.systems import QDiffSystem, generic_radius_estimate

Q = Fraction(4)
x = RF.x()


def conjugated(eigs, seed):
    """A random constant matrix with the given eigenvalues."""
    rng = random.Random(seed)
    n = len(eigs)
    T = [[Fraction(eigs[i]) if i == j else (Fraction(rng.randint(-4, 4)) if j > i else Fraction(0))
          for j in range(n)] for i in range(n)]
    while True:
        P = [[Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        if la.det(P) != 0:
            break
    return la.mmul(la.mmul(P, T), la.inverse(P))


def test_q_exponent(ctx):
    assert q_exponent(Q ** 5, ctx) == 5
    assert q_exponent(Q ** -3, ctx) == -3
    assert q_exponent(2, ctx) is None
    assert q_exponent(Fraction(7), ctx) is None        # 7 = 1 + 2*3 but not a power of 4
    assert q_exponent(Q ** 300, ctx, bound=299) is None
    assert q_exponent(Q ** 300, ctx, bound=300) == 300


def test_spectral_classes(ctx):
    sd = spectral_data([2, 2 * Q, 5, 2 * Q ** 3], ctx)
    assert sd.classes == ((0, 1, 3), (2,))
    assert sd.shifts == (0, 1, 0, 3)
    assert sd.resonant
    assert not spectral_data([2, 5], ctx).resonant
    assert not spectral_data([3, 3], ctx).resonant


def test_check_spectrum():
    M = conjugated([2, 5], 1)
    check_spectrum(M, [2, 5])
    with pytest.raises(SpectrumNotSplit):
        check_spectrum(M, [2, 2])
    with pytest.raises(SpectrumNotSplit):
        check_spectrum(M, [2, 7])


@pytest.mark.parametrize("seed", range(4))
def test_triangularize(seed):
    eigs = [Fraction(2), Fraction(-1), Fraction(5, 2)]
    M = conjugated(eigs, seed)
    P = triangularize(M, eigs)
    T = la.mmul(la.mmul(P, M), la.inverse(P))
    assert [T[i][i] for i in range(3)] == eigs
    assert all(T[i][j] == 0 for i in range(3) for j in range(i))


def test_shearing_identity_without_resonance(ctx):
    sys = QDiffSystem([[RF([2, 1]), x], [RF.const(1), RF([5, 0, 1])]], ctx)
    # A(0) = [[2, 0], [1, 5]]
    H, new, eigs = shearing_normalize(sys, [2, 5])
    assert H == [[RF.const(1), RF.const(0)], [RF.const(0), RF.const(1)]]
    assert new.A == sys.A


def test_shearing_removes_resonance(ctx):
    sys = QDiffSystem([[RF.const(2), RF([1, 1])], [x, RF([2 * Q, 1])]], ctx)
    H, new, eigs = shearing_normalize(sys, [2, 2 * Q])
    assert eigs == (2, 2)
    A0 = [[f(0) for f in r] for r in new.A]
    check_spectrum(A0, [2, 2])
    # the gauge relation holds exactly
    Hi = la.inverse(H)
    assert la.mmul(la.mmul([[f.sigma(Q) for f in r] for r in H], sys.A), Hi) == new.A
    with pytest.raises(InvalidArgument):
        shearing_normalize(sys, [2, 2 * Q], shifts=[0, -1])


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.integers(1, 10))
def test_phi_determinant(seed, mu, m):
    rng = random.Random(seed)
    eigs = [Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4)) for _ in range(mu)]
    eb = [Fraction(rng.randint(-9, 9) or 1) for _ in range(mu)]
    A0 = conjugated(eigs, seed)
    B = conjugated(eb, seed + 1)
    assert la.det(phi_matrix(A0, B, Q ** m)) == phi_det_formula(eigs, eb, Q ** m)


def test_constant_system_gauge_is_identity(ctx):
    sys = QDiffSystem([[RF.const(2), RF.const(1)], [RF.const(0), RF.const(5)]], ctx)
    sol = regular_singular_solve(sys, 10)
    assert all(U == tuple(tuple(r) for r in la.zeros(2)) for U in sol.U[1:])
    assert radius_of_gauge(sol, 3).log_radius == INFINITE_RADIUS


@pytest.mark.parametrize("alpha", [Fraction(1), Fraction(2), Fraction(5, 7)])
def test_rank_one_closed_form(ctx, alpha):
    sys = QDiffSystem([[RF([alpha, alpha])]], ctx)
    sol = regular_singular_solve(sys, 128)
    u = Fraction(1)
    for m in range(129):
        if m:
            u /= Q ** m - 1
        assert sol.U[m][0][0] == u
    r = radius_of_gauge(sol, 3)
    # |q - 1| |pi_q| = p^-(1 + 1/2)
    assert r.certified and r.log_radius == LogRadius(Fraction(3, 2))


def test_nilpotent_perturbation(ctx):
    sys = QDiffSystem([[RF([2, 0]), RF([0, 1])], [RF([0, 0]), RF([5, 0])]], ctx)
    sol = regular_singular_solve(sys, 40)
    assert sol.residual_order > 40
    sys2 = QDiffSystem([[RF([2, 1]), RF([0, 3, 1])], [RF([0, 1], [1, 2]), RF([5, 0, 1])]], ctx)
    assert regular_singular_solve(sys2, 40).residual_order == 41


def test_resonant_spectrum_rejected(ctx):
    sys = QDiffSystem([[RF.const(1), x], [RF.const(0), RF.const(Q)]], ctx)
    with pytest.raises(ResonantSpectrum):
        regular_singular_solve(sys, 5)


def test_gauges_agree_up_to_constants(ctx):
    # U with target A(0) and V with a diagonal target differ by the eigenvector matrix
    A = [[RF([0, 1]), RF.const(1)], [RF([-10, 2]), RF([7, 0, 1])]]
    sys = QDiffSystem(A, ctx)
    A0 = [[f(0) for f in r] for r in sys.A]        # eigenvalues 2 and 5
    S = [[Fraction(1), Fraction(1)], [Fraction(2), Fraction(5)]]
    assert la.mmul(A0, S) == la.mmul(S, [[2, 0], [0, 5]])
    U = regular_singular_solve(sys, 24)
    V = regular_singular_solve(sys, 24, target=[[2, 0], [0, 5]], U0=S)
    Si = la.inverse(S)
    for m in range(25):
        assert la.mmul([list(r) for r in V.U[m]], Si) == [list(r) for r in U.U[m]]


def test_transfer_bound_rank_one_is_tight(ctx):
    sys = QDiffSystem([[RF([1, 1])]], ctx)
    g = generic_radius_estimate(sys)
    assert g.certified and g.chi == LogRadius(Fraction(3, 2))
    b = transfer_bound(g.chi, [1], ctx, g.certified, horizon=400)
    assert b.regime == 1 and b.bound == LogRadius(Fraction(3, 2))
    r = radius_of_gauge(regular_singular_solve(sys, 128), 3)
    assert r.log_radius == b.bound


def test_transfer_regimes(ctx):
    b = transfer_bound(0, [1], ctx, True, horizon=400)
    assert b.regime == 3 and b.bound == LogRadius(0)
    b = transfer_bound(Fraction(1, 6), [2], ctx, True, horizon=400)     # chi = |pi|^(1/p)
    assert b.regime == 2 and b.bound == LogRadius(Fraction(1, 6))
    assert b.sharp[1] == b.bound
    b = transfer_bound(Fraction(1, 7), [2], ctx, True, horizon=400)
    assert b.regime == 2 and b.bound == LogRadius(Fraction(1, 7))
    assert b.rough == LogRadius(Fraction(1, 2))


def test_transfer_bound_counts_types_and_det(ctx):
    b = transfer_bound(1, [3, 6], ctx, True, horizon=400)
    T = sum(q_type(Fraction(a, c), ctx, 400, mode="formula").log_radius.r for a in (3, 6) for c in (3, 6))
    assert b.type_product == LogRadius(T)
    assert b.bound == LogRadius(4 * 1 + 2 * vp(18, 3) + T)


@pytest.mark.parametrize("alpha", [Fraction(1), Fraction(2), Fraction(5), Fraction(7, 2)])
def test_bound_soundness_rank_one(ctx, alpha):
    sys = QDiffSystem([[RF([alpha, alpha])]], ctx)
    g = generic_radius_estimate(sys)
    b = transfer_bound(g.chi, [alpha], ctx, g.certified, horizon=400)
    r = radius_of_gauge(regular_singular_solve(sys, 96), 3)
    assert r.log_radius.r <= b.bound.r


def test_indicial_roots():
    assert indicial_roots(6, -8) == (4, 2)
    with pytest.raises(SpectrumNotSplit):
        indicial_roots(1, 1)


def test_second_order_constants(ctx):
    basis = second_order_basis(RF.const(2 + Q), RF.const(-2 * Q), ctx, N=10)
    assert {basis.alpha, basis.beta} == {2, Q}
    assert basis.u_alpha == (1,) + (0,) * 10 and basis.u_beta == (1,) + (0,) * 10


def test_second_order_perturbed(ctx):
    P, Qf = RF([5, 1]), RF.const(-6)        # roots 2 and 3
    basis = second_order_basis(P, Qf, ctx, N=20)
    assert (basis.alpha, basis.beta) == (3, 2)
    assert second_order_residual(P, Qf, basis.u_alpha, basis.alpha, Q, 20) == 21
    assert second_order_residual(P, Qf, basis.u_beta, basis.beta, Q, 20) == 21
    with pytest.raises(ResonantSpectrum):
        second_order_basis(RF.const(1 + Q), RF.const(-Q), ctx, N=5)
    with pytest.raises(ResonantSpectrum):
        second_order_basis(RF.const(4), RF.const(-4), ctx, N=5)
