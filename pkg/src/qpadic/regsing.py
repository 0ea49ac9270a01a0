"""Regular singularities at 0: shearing, the formal gauge to a constant
system, radius statistics for that gauge and the transfer lower bounds.

Convention: the gauge U returned here satisfies A(x) U(x) = U(qx) B with
B constant (B = A(0) unless a diagonal target is requested), so that
Y = U e_B solves Y(qx) = A(x) Y(x).  Its coefficients obey

    q^m U_m B - A_0 U_m = A_1 U_(m-1) + ... + A_m.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import (InvalidArgument, InvariantViolation, PreconditionViolated, ResonantSpectrum,
                     SpectrumNotSplit)
from .padic import as_fraction, rational_mod, vp
from .qcalc import LogRadius, QContext, RadiusEstimate, q_type, radius_from_valuations
from .series import RationalFunction
from .systems import QDiffSystem, gauge_apply, rf_identity, rf_matrix


# ---------------------------------------------------------------------------
# spectra


def q_exponent(ratio, ctx: QContext, bound: int = 10 ** 4):
    """Integer s with ratio = q^s, searched for |s| <= bound, or None.

    A fast exclusion uses v(ratio - 1) >= v(q - 1); candidates come from the
    p-adic logarithm ratio and are confirmed exactly.
    """
    from .padic import log_ratio
    ratio = as_fraction(ratio)
    p, q = ctx.p, ctx.q
    if ratio == 1:
        return 0
    if ratio == 0 or vp(ratio, p) != 0 or vp(ratio - 1, p) < ctx.v_one_minus_q:
        return None
    a, known = log_ratio(ratio, q, p, ctx.M)
    prec = min(ctx.M, known)
    m = p ** prec
    s = rational_mod(a, p, prec)
    for cand in (s, s - m):
        if abs(cand) <= bound and q ** cand == ratio:
            return cand
    return None


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: tuple
    classes: tuple          # tuples of indices with pairwise ratios in q^Z
    shifts: tuple           # exponent of each eigenvalue relative to its class root
    bound: int

    @property
    def resonant(self) -> bool:
        return any(len(set(self.eigenvalues[i] for i in c)) > 1 for c in self.classes)


def spectral_data(eigs, ctx: QContext, bound: int = 10 ** 4) -> SpectralData:
    eigs = tuple(as_fraction(e) for e in eigs)
    classes, shifts = [], [0] * len(eigs)
    for i, e in enumerate(eigs):
        for c in classes:
            s = q_exponent(e / eigs[c[0]], ctx, bound)
            if s is not None:
                c.append(i)
                shifts[i] = s + shifts[c[0]]
                break
        else:
            classes.append([i])
    # make every shift relative to the smallest member of its class
    for c in classes:
        lo = min(shifts[i] for i in c)
        for i in c:
            shifts[i] -= lo
    return SpectralData(eigs, tuple(tuple(c) for c in classes), tuple(shifts), bound)


def check_spectrum(M, eigs) -> None:
    """The characteristic polynomial of M must vanish on the given eigenvalues."""
    n = len(M)
    for e in set(eigs):
        sh = [[M[i][j] - (e if i == j else 0) for j in range(n)] for i in range(n)]
        if la.det(sh) != 0:
            raise SpectrumNotSplit(f"{e} is not an eigenvalue")
    prod = Fraction(1)
    for e in eigs:
        prod *= e
    if la.det(M) != prod:
        raise SpectrumNotSplit("eigenvalue multiplicities do not match det")


def _right_kernel(M):
    v = la.left_kernel(la.transpose(M))
    return v


def triangularize(M, eigs):
    """Constant P with P M P^(-1) upper triangular, diagonal in the order of eigs."""
    n = len(M)
    if n == 1:
        return [[Fraction(1)]]
    e = eigs[0]
    sh = [[M[i][j] - (e if i == j else 0) for j in range(n)] for i in range(n)]
    v = _right_kernel(sh)
    if v is None:
        raise SpectrumNotSplit(f"{e} is not an eigenvalue")
    # basis: v followed by the unit vectors that keep it invertible
    k = next(i for i in range(n) if v[i] != 0)
    cols = [v] + [[Fraction(1 if r == j else 0) for r in range(n)] for j in range(n) if j != k]
    B = la.transpose(cols)
    Bi = la.inverse(B)
    T = la.mmul(la.mmul(Bi, M), B)
    sub = [r[1:] for r in T[1:]]
    P1 = triangularize(sub, eigs[1:])
    P1full = [[Fraction(1)] + [Fraction(0)] * (n - 1)] + [[Fraction(0)] + r for r in P1]
    return la.mmul(P1full, Bi)


def shearing_normalize(sys: QDiffSystem, eigs, shifts=None, bound: int = 10 ** 4):
    """Gauge H (constant matrices and diag(I, x^(-1) I) factors) moving eigenvalue
    i of A(0) to q^(-shifts[i]) times itself.  ``shifts=None`` removes
    q-resonances by pulling every eigenvalue down to the smallest member of
    its class.  Returns (H, A_[H], new eigenvalues)."""
    A0 = [[f(0) for f in r] for r in sys.A]
    eigs = [as_fraction(e) for e in eigs]
    check_spectrum(A0, eigs)
    if shifts is None:
        shifts = list(spectral_data(eigs, sys.ctx, bound).shifts)
    shifts = list(shifts)
    if any(s < 0 for s in shifts):
        raise InvalidArgument("only downward shifts are supported")
    q = sys.q
    mu = sys.mu
    H = rf_identity(mu)
    cur = sys
    while any(shifts):
        order = sorted(range(mu), key=lambda i: (shifts[i] > 0, i))
        P = triangularize([[f(0) for f in r] for r in cur.A], [eigs[i] for i in order])
        b = sum(1 for s in shifts if s > 0)
        S = [[RationalFunction.const(0)] * mu for _ in range(mu)]
        for i in range(mu):
            S[i][i] = RationalFunction.const(1) if i < mu - b else RationalFunction([1], [0, 1])
        F = la.mmul(S, rf_matrix(P))
        cur = gauge_apply(cur, F)
        H = la.mmul(F, H)
        for i in order:
            if shifts[i] > 0:
                eigs[i] = eigs[i] / q
                shifts[i] -= 1
        if any(f.den[0] == 0 for row in cur.A for f in row):
            raise InvariantViolation("shearing produced a pole at 0")
    return H, cur, tuple(eigs)


# ---------------------------------------------------------------------------
# the formal gauge


def phi_matrix(A0, B, qm):
    """Matrix of M -> qm M B - A0 M on row-major vec(M)."""
    n = len(A0)
    I = la.identity(n)
    left = la.kron(I, la.transpose(B))      # vec(M B)
    right = la.kron(A0, I)                  # vec(A0 M)
    return la.msub(la.mscale(left, qm), right)


def phi_det_formula(eigs_a0, eigs_b, qm) -> Fraction:
    out = Fraction(1)
    for a in eigs_b:
        for b in eigs_a0:
            out *= qm * a - b
    return out


def taylor_matrices(A, N: int) -> list:
    """A_0 .. A_N from a matrix of rational functions analytic at 0."""
    mu = len(A)
    ser = [[f.taylor(0, N) for f in r] for r in A]
    return [[[ser[i][j][m] for j in range(mu)] for i in range(mu)] for m in range(N + 1)]


@dataclass(frozen=True)
class RegularSingularSolution:
    U: tuple        # U_0 .. U_N
    B: tuple        # constant target
    residual_order: int

    def entry_series(self, i: int, j: int) -> list:
        return [m[i][j] for m in self.U]


def regular_singular_solve(sys: QDiffSystem, N: int | None = None, target=None, U0=None) -> RegularSingularSolution:
    """U with A(x) U(x) = U(qx) B to order N (B = A(0) by default)."""
    N = sys.ctx.N if N is None else N
    q, p = sys.q, sys.ctx.p
    try:
        As = taylor_matrices(sys.A, N)
    except Exception as exc:
        raise PreconditionViolated("A must be analytic at 0") from exc
    A0 = As[0]
    B = [list(map(as_fraction, r)) for r in target] if target is not None else A0
    U = [U0 if U0 is not None else la.identity(sys.mu)]
    if la.mmul(A0, U[0]) != la.mmul(U[0], B):
        raise InvalidArgument("U_0 must satisfy A(0) U_0 = U_0 B")
    mu = sys.mu
    for m in range(1, N + 1):
        rhs = la.zeros(mu)
        for k in range(1, m + 1):
            rhs = la.madd(rhs, la.mmul(As[k], U[m - k]))
        Phi = phi_matrix(A0, B, q ** m)
        dphi = la.det(Phi)
        if dphi == 0 or vp(dphi, p) >= sys.ctx.M:
            raise ResonantSpectrum(f"q^{m} alpha - beta vanishes for some eigenvalues")
        vec = [[x] for r in rhs for x in r]
        sol = la.solve(Phi, vec)
        U.append([[sol[i * mu + j][0] for j in range(mu)] for i in range(mu)])
    res = gauge_residual(As, U, B, q)
    if res <= N:
        raise InvariantViolation(f"residual nonzero at order {res}")
    return RegularSingularSolution(tuple(tuple(tuple(r) for r in M) for M in U),
                                   tuple(tuple(r) for r in B), res)


def gauge_residual(As, U, B, q) -> int:
    """First order m <= N where A U - U(qx) B has a nonzero coefficient (N+1 if none)."""
    N = len(U) - 1
    mu = len(B)
    for m in range(N + 1):
        lhs = la.zeros(mu)
        for k in range(m + 1):
            if k < len(As):
                lhs = la.madd(lhs, la.mmul(As[k], U[m - k]))
        rhs = la.mscale(la.mmul(U[m], B), q ** m)
        if lhs != rhs:
            return m
    return N + 1


def radius_of_gauge(U, p: int, horizon: int | None = None) -> RadiusEstimate:
    """Radius statistic of the matrix series sum U_m x^m (max-entry norm)."""
    if isinstance(U, RegularSingularSolution):
        U = U.U
    w = {m: min(vp(x, p) for r in M for x in r) for m, M in enumerate(U)}
    return radius_from_valuations(w, p, horizon if horizon is not None else len(U) - 1)


# ---------------------------------------------------------------------------
# transfer bounds


@dataclass(frozen=True)
class TransferBounds:
    regime: int
    bound: LogRadius
    rough: LogRadius
    sharp: dict                 # ell -> LogRadius
    type_product: LogRadius
    certified: bool

    def to_json(self) -> dict:
        return {"regime": self.regime, "bound": self.bound.to_json(), "rough": self.rough.to_json(),
                "sharp": {str(k): v.to_json() for k, v in sorted(self.sharp.items())},
                "type_product": self.type_product.to_json(), "certified": self.certified}


def transfer_bound(chi, eigs, ctx: QContext, chi_certified: bool = True, horizon: int = 2000,
                   max_ell: int = 6) -> TransferBounds:
    """Lower bounds for r(U) from the generic radius chi, the spectrum of A(0)
    and |det A(0)| (the product of the eigenvalues), all as exponents.

    regime 1: chi <= |pi|          chi^(mu^2) |det|^mu prod type_q(a/b)
    regime 2: |pi| < chi < 1       chi^(mu^2) |det|^(mu/p^l) prod type_q(a/b)
    regime 3: chi = 1              prod type_q(a/b)
    """
    chi = LogRadius(chi)
    eigs = [as_fraction(e) for e in eigs]
    p = ctx.p
    mu = len(eigs)
    det = Fraction(1)
    for e in eigs:
        det *= e
    vdet = vp(det, p)
    T = Fraction(0)
    cert = chi_certified
    for a in eigs:
        for b in eigs:
            t = q_type(a / b, ctx, horizon, mode="formula")
            T += t.log_radius.r
            cert = cert and t.certified
    rpi = ctx.pi_norm.r
    rc = chi.r
    rough = mu * mu * max(rpi, rc) + mu * vdet + T
    sharp = {l: mu * mu * max(rpi / p ** l, rc) + Fraction(mu * vdet, p ** l) + T
             for l in range(0, max_ell + 1)}
    if rc >= rpi:
        regime, bound = 1, mu * mu * rc + mu * vdet + T
    elif rc > 0:
        l = 1
        while not (rpi / p ** l <= rc < rpi / p ** (l - 1)):
            l += 1
        regime, bound = 2, mu * mu * rc + Fraction(mu * vdet, p ** l) + T
    else:
        regime, bound = 3, T
    return TransferBounds(regime, LogRadius(bound), LogRadius(rough),
                          {k: LogRadius(v) for k, v in sharp.items()}, LogRadius(T), cert)


# ---------------------------------------------------------------------------
# second order equations


@dataclass(frozen=True)
class SecondOrderBasis:
    alpha: Fraction
    beta: Fraction
    u_alpha: tuple
    u_beta: tuple

    def to_json(self) -> dict:
        from .padic import rational_to_json
        return {"alpha": rational_to_json(self.alpha), "beta": rational_to_json(self.beta),
                "u_alpha": [rational_to_json(c) for c in self.u_alpha],
                "u_beta": [rational_to_json(c) for c in self.u_beta],
                "basis": ["e_alpha * u_alpha", "e_beta * u_beta"]}


def indicial_roots(P0, Q0):
    """Rational roots of T^2 - P(0) T - Q(0), or SpectrumNotSplit."""
    from math import isqrt
    P0, Q0 = as_fraction(P0), as_fraction(Q0)
    disc = P0 * P0 + 4 * Q0
    if disc < 0:
        raise SpectrumNotSplit("complex indicial roots")
    n, d = disc.numerator, disc.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn != n or rd * rd != d:
        raise SpectrumNotSplit("indicial roots are not rational")
    s = Fraction(rn, rd)
    return (P0 + s) / 2, (P0 - s) / 2


def second_order_basis(P, Q, ctx: QContext, N: int = 20, roots=None) -> SecondOrderBasis:
    """Solutions e_alpha u_alpha, e_beta u_beta of y(q^2 x) - P y(qx) - Q y = 0."""
    P, Q = RationalFunction.lift(P), RationalFunction.lift(Q)
    a, b = roots if roots is not None else indicial_roots(P(0), Q(0))
    a, b = as_fraction(a), as_fraction(b)
    if a == b:
        raise ResonantSpectrum("equal indicial roots")
    if q_exponent(a / b, ctx) is not None:
        raise ResonantSpectrum("alpha / beta lies in q^Z")
    sys = QDiffSystem([[RationalFunction.const(0), RationalFunction.const(1)], [Q, P]], ctx)
    # eigenvectors of A(0) = [[0, 1], [Q0, P0]] are (1, alpha), (1, beta)
    S = [[Fraction(1), Fraction(1)], [a, b]]
    sol = regular_singular_solve(sys, N, target=[[a, 0], [0, b]], U0=S)
    return SecondOrderBasis(a, b, tuple(sol.entry_series(0, 0)), tuple(sol.entry_series(0, 1)))


def second_order_residual(P, Q, u, root, q, N: int) -> int:
    """First order where u(q^2 x) root^2 - P u(qx) root - Q u is nonzero."""
    P, Q = RationalFunction.lift(P), RationalFunction.lift(Q)
    q, root = as_fraction(q), as_fraction(root)
    Ps, Qs = P.taylor(0, N), Q.taylor(0, N)
    u = list(u) + [Fraction(0)] * (N + 1 - len(u))
    for m in range(N + 1):
        val = u[m] * q ** (2 * m) * root ** 2
        val -= root * sum(Ps[k] * u[m - k] * q ** (m - k) for k in range(m + 1))
        val -= sum(Qs[k] * u[m - k] for k in range(m + 1))
        if val != 0:
            return m
    return N + 1
