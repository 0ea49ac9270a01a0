"""Quick invariant suites behind ``qpadic verify``.

Each suite returns a list of (check name, passed, detail) rows.  They use a
fixed seed so that repeated runs print the same report.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .errors import QPadicError
from .qcalc import QContext, eff_bound_const, eff_bound_const_exhaustive, q_type
from .series import RationalFunction, gauss_norm, leibniz_identity_check, operator_identity_check


def _rand_poly(rng, deg, lo=-9, hi=9):
    return [Fraction(rng.randint(lo, hi), rng.choice([1, 1, 2, 5])) for _ in range(deg + 1)]


def suite_leibniz(ctx):
    rng = random.Random(1)
    rows = []
    ok = all(leibniz_identity_check(_rand_poly(rng, rng.randint(0, 6)), _rand_poly(rng, rng.randint(0, 6)),
                                     rng.randint(0, 4), ctx.q) for _ in range(40))
    rows.append(("random pairs", ok, "40 pairs, n <= 4"))
    return rows


def suite_operators(ctx):
    return [(f"{w} n={n}", operator_identity_check(n, w, ctx.q), "x^0..x^12")
            for w in ("normalized", "leibniz", "sigma", "dn", "xd") for n in range(1, 4)]


def suite_twisted(ctx):
    from .twisted import from_twisted, to_twisted, twisted_mul
    from .series import p_mul, p_trim
    rng = random.Random(2)
    rows = []
    for xi in (ctx.p, 1 + ctx.p, ctx.p ** 2):
        good = True
        for _ in range(10):
            f, g = _rand_poly(rng, rng.randint(0, 8)), _rand_poly(rng, rng.randint(0, 8))
            if from_twisted(to_twisted(f, xi, ctx)) != p_trim(f):
                good = False
            n = len(f) + len(g)
            lhs = to_twisted(p_mul(f, g), xi, ctx, n)
            rhs = twisted_mul(to_twisted(f, xi, ctx, n), to_twisted(g, xi, ctx, n))
            if lhs.coeffs != rhs.coeffs:
                good = False
        rows.append((f"roundtrip and product at xi={xi}", good, "10 random pairs"))
    return rows


def suite_gauss(ctx):
    rng = random.Random(3)
    good = True
    for _ in range(30):
        f = RationalFunction(_rand_poly(rng, 3), [1] + _rand_poly(rng, 2, -3, 3)[1:])
        g = RationalFunction(_rand_poly(rng, 3), [1, Fraction(rng.randint(-5, 5))])
        xi, r = Fraction(rng.choice([0, 3, 1, 9])), Fraction(rng.choice([0, 1, -1]))
        try:
            lhs = gauss_norm(f * g, xi, r, ctx.p)
            rhs = gauss_norm(f, xi, r, ctx.p) * gauss_norm(g, xi, r, ctx.p)
        except Exception:
            continue
        good = good and lhs == rhs
    return [("multiplicativity", good, "30 random pairs")]


def suite_radius(ctx):
    from .systems import QDiffSystem, dwork_frobenius_radius, generic_radius_estimate
    sys = QDiffSystem([[RationalFunction.const(2)]], ctx)
    g = generic_radius_estimate(sys, 0, 0)
    rows = [("A=2 certified", g.certified, str(g.chi.r))]
    from .systems import dq_companion_coefficients
    b = dq_companion_coefficients(sys)
    d = dwork_frobenius_radius(b, 0, ctx)
    rows.append(("A=2 generic radius equals Dwork-Frobenius value", d == g.chi, f"{d.r} vs {g.chi.r}"))
    return rows


def suite_effbound(ctx):
    good = all(eff_bound_const(n, m, ctx) == eff_bound_const_exhaustive(n, m, ctx)
               for n in range(0, 16) for m in range(0, 4) if m <= n)
    return [("sorting equals exhaustive search", good, "n < 16, mu <= 4")]


def suite_transfer(ctx):
    from .regsing import radius_of_gauge, regular_singular_solve, transfer_bound
    from .systems import QDiffSystem, generic_radius_estimate
    sys = QDiffSystem([[RationalFunction([1, 1])]], ctx)
    sol = regular_singular_solve(sys, 64)
    r = radius_of_gauge(sol, ctx.p)
    g = generic_radius_estimate(sys)
    b = transfer_bound(g.chi, [1], ctx, g.certified, horizon=200)
    return [("A=1+x gauge radius certified", r.certified, str(r.log_radius.r)),
            ("A=1+x bound met with equality", r.log_radius == b.bound, f"{r.log_radius.r} vs {b.bound.r}")]


def suite_qtype(ctx):
    rows = []
    t = q_type(2, ctx, 400)
    rows.append(("type of 2 is 1", t.certified and t.log_radius.r == 0, str(t.log_radius.r)))
    for a in (2, 5, 10, Fraction(7, 4), 4 ** 3 + 27):
        d = q_type(a, ctx, 400, mode="direct").log_radius.r
        f = q_type(a, ctx, 400, mode="formula").log_radius.r
        rows.append((f"direct vs formula at {a}", abs(d - f) <= Fraction(1, 400), f"{d} vs {f}"))
    return rows


def suite_frobenius(ctx):
    from .frobenius import (frobenius_F, frobenius_H, zeta_pochhammer_sums, zeta_sums_group_ring)
    from .systems import QDiffSystem
    rows = []
    for p in (3, 5):
        for ell in (1, 2):
            ring = zeta_sums_group_ring(12, ell, 1 + p, p)
            good = all(zeta_pochhammer_sums(n, ell, 1 + p, p) == ring[n] for n in range(13))
            rows.append((f"zeta sums p={p} ell={ell}", good, "n <= 12"))
    sys = QDiffSystem([[RationalFunction([1, -1], [1, -ctx.q])]], ctx)
    H = frobenius_H(sys, 1, N=24, eigs=[1])
    F = frobenius_F(sys, H)
    rows.append(("rank-1 off-lattice residual", F.off_lattice_valuation >= ctx.M - 4,
                 str(F.off_lattice_valuation)))
    return rows


def suite_regsing(ctx):
    from .linalg import det
    from .regsing import phi_det_formula, phi_matrix, regular_singular_solve
    from .systems import QDiffSystem
    A0 = [[Fraction(2), Fraction(1)], [Fraction(0), Fraction(5)]]
    good = all(det(phi_matrix(A0, A0, ctx.q ** m)) == phi_det_formula([2, 5], [2, 5], ctx.q ** m)
               for m in range(1, 8))
    sys = QDiffSystem([[RationalFunction([2, 1]), RationalFunction([0, 1])],
                       [RationalFunction([0]), RationalFunction([5, 0, 1])]], ctx)
    sol = regular_singular_solve(sys, 20)
    return [("Phi determinant formula", good, "m <= 7"),
            ("gauge residual beyond N", sol.residual_order > 20, str(sol.residual_order))]


def suite_deformation(ctx):
    from .systems import q_deformation_run
    rep = q_deformation_run([[RationalFunction.const(1)]], 0, range(1, 5), 0, 24, ctx)
    return [("distance grows with k", rep.monotone, str([str(d) for d in rep.distances]))]


SUITES = {
    "leibniz": suite_leibniz,
    "operators": suite_operators,
    "twisted": suite_twisted,
    "gauss": suite_gauss,
    "radius": suite_radius,
    "effbound": suite_effbound,
    "transfer": suite_transfer,
    "qtype": suite_qtype,
    "frobenius": suite_frobenius,
    "regsing": suite_regsing,
    "deformation": suite_deformation,
}


def run_suites(names, ctx: QContext | None = None) -> dict:
    ctx = ctx or QContext()
    if "all" in names:
        names = sorted(SUITES)
    out = {}
    for name in names:
        try:
            rows = SUITES[name](ctx)
        except QPadicError as exc:
            rows = [("suite raised", False, f"{type(exc).__name__}: {exc}")]
        out[name] = [{"check": c, "passed": bool(ok), "detail": d} for c, ok, d in rows]
    return out
