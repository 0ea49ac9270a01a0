"""Weak Frobenius structure: averaging the formal solution Y(x, zeta x) over
p^l-th roots of unity gives a gauge H with H(qx) A(x) H(x)^(-1) = F(x^(p^l)).

Roots of unity never appear.  With P = p^l,

    sum_{zeta^P = 1} (zeta - 1)_{q,n} = P * sum_{i : P | n - i} (-1)^i binom(n,i)_q q^(i(i-1)/2)

and the averaged solution is H = (1/P) sum_n x^n G_n(x)/[n]_q! * Z_n.  The
series x^n G_n/[n]_q! satisfy S_0 = I and
S_(n+1) = (q^(-n) S_n(qx) A(x) - S_n(x)) / (q^(n+1) - 1).

The long sums run in fixed absolute p-adic precision: every intermediate
value is rounded to its class modulo p^K, with K sized from the known
precision losses so the reported results keep at least M digits.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from .errors import (ClassViolation, InvalidArgument, LatticeResidual, NotInNormalForm,
                     PreconditionViolated, TailNotDominated)
from .padic import INF, as_fraction, log_ratio, rational_mod, vp
from .qcalc import (LogRadius, QContext, RadiusEstimate, q_binomial, radius_from_valuations,
                    v_q_bracket, v_q_power_minus)
from .regsing import shearing_normalize, spectral_data, taylor_matrices
from .systems import QDiffSystem, generic_radius_estimate

# ---------------------------------------------------------------------------
# sums over roots of unity


def zeta_pochhammer_sums(n: int, ell: int, q, p: int) -> Fraction:
    """Exact sum over the p^ell-th roots of unity of (zeta - 1)(zeta - q)...(zeta - q^(n-1))."""
    if n < 0 or ell < 0:
        raise InvalidArgument("n and ell must be >= 0")
    q = as_fraction(q)
    P = p ** ell
    total = Fraction(0)
    for i in range(n + 1):
        if (n - i) % P == 0:
            total += (-1) ** i * q_binomial(n, i, q) * q ** (i * (i - 1) // 2)
    return P * total


def zeta_sums_group_ring(n_max: int, ell: int, q, p: int, modulus: int | None = None) -> list:
    """Same sums for n <= n_max by multiplying out in Z[q][T]/(T^P - 1).

    The sum over all roots of an element of the group ring is P times its
    constant coefficient.  With ``modulus`` the work is done modulo that
    integer (q must then be p-integral).
    """
    P = p ** ell
    q = as_fraction(q)
    if modulus is not None:
        qm = rational_mod(q, p, _log_p(modulus, p))
    f = [0] * P
    f[0] = 1 if modulus is not None else Fraction(1)
    out = []
    for n in range(n_max + 1):
        out.append(P * f[0] if modulus is None else (P * f[0]) % modulus)
        # multiply by (T - q^n)
        c = q ** n if modulus is None else pow(qm, n, modulus)
        g = [f[(k - 1) % P] - c * f[k] for k in range(P)]
        f = g if modulus is None else [x % modulus for x in g]
    return out


def _log_p(m: int, p: int) -> int:
    k = 0
    while m > 1:
        m //= p
        k += 1
    return k


def zeta_sums_numeric(n: int, ell: int, q, p: int, dps: int = 400) -> int:
    """Floating complex evaluation at every root, rounded (integer q only)."""
    import mpmath
    q = as_fraction(q)
    if q.denominator != 1:
        raise InvalidArgument("numeric oracle needs an integer q")
    P = p ** ell
    with mpmath.workdps(dps):
        total = mpmath.mpc(0)
        for j in range(P):
            z = mpmath.exp(2j * mpmath.pi * j / P)
            prod = mpmath.mpc(1)
            for i in range(n):
                prod *= z - int(q) ** i
            total += prod
        return int(mpmath.nint(total.real))


# ---------------------------------------------------------------------------
# fixed absolute precision helpers


def rnd(x, p: int, K: int) -> Fraction:
    """Canonical representative of x modulo p^K (absolute precision)."""
    if x == 0:
        return Fraction(0)
    v = vp(x, p)
    if v >= K:
        return Fraction(0)
    u = as_fraction(x) / Fraction(p) ** v
    return Fraction(rational_mod(u, p, K - v)) * Fraction(p) ** v


def _mser_mul(a, b, N, p, K):
    """Product of matrix power series (lists of matrices) to order N."""
    mu = len(a[0])
    out = []
    for k in range(N + 1):
        acc = [[Fraction(0)] * mu for _ in range(mu)]
        for i in range(k + 1):
            ai, bj = a[i], b[k - i]
            for r in range(mu):
                for c in range(mu):
                    s = 0
                    for t in range(mu):
                        x, y = ai[r][t], bj[t][c]
                        if x and y:
                            s += x * y
                    if s:
                        acc[r][c] += s
        out.append([[rnd(x, p, K) for x in row] for row in acc])
    return out


def _mser_inv(a, N, p, K):
    inv0 = la.inverse(a[0])
    inv0 = [[rnd(x, p, K) for x in r] for r in inv0]
    mu = len(inv0)
    out = [inv0]
    for k in range(1, N + 1):
        acc = la.zeros(mu)
        for i in range(1, k + 1):
            acc = la.madd(acc, la.mmul(a[i], out[k - i]))
        out.append([[rnd(-x, p, K) for x in r] for r in la.mmul(inv0, acc)])
    return out


# ---------------------------------------------------------------------------
# class membership and normal form


def in_normal_form(eigs, ctx: QContext, ell: int, bound: int = 10 ** 4) -> bool:
    """Non-resonant spectrum and v((lambda - 1)/(q - 1)) > ell - 1 for every eigenvalue."""
    sd = spectral_data(eigs, ctx, bound)
    if sd.resonant:
        return False
    vq = ctx.v_one_minus_q
    return all(vp(as_fraction(e) - 1, ctx.p) - vq > ell - 1 for e in eigs)


def class_check(sys: QDiffSystem, ell: int, force: bool = False, horizon: int = 64):
    """chi(A, q) > |pi_q|^(1/p^(ell-1)) from a certified generic-radius estimate."""
    g = generic_radius_estimate(sys, 0, 0, horizon)
    threshold = sys.ctx.pi_q_norm.r / sys.ctx.p ** (ell - 1)
    ok = g.chi.r < threshold
    if not g.certified and not force:
        raise ClassViolation("generic radius is not certified (use force to proceed)")
    if not ok and not force:
        raise ClassViolation("generic radius does not exceed |pi_q|^(1/p^(ell-1))")
    return g


def normal_form(sys: QDiffSystem, eigs, ell: int = 1, bound: int = 10 ** 4):
    """Shear the spectrum of A(0) into normal form.

    Each eigenvalue with v(lambda - 1) >= v(q - 1) is lambda = q^a with a in
    Z_p; it is moved to q^(a - s), s the residue of a modulo p^ell.  Other
    eigenvalues cannot be brought close enough to 1.  Returns (H, system,
    new eigenvalues).
    """
    p, q = sys.ctx.p, sys.q
    eigs = [as_fraction(e) for e in eigs]
    vq = sys.ctx.v_one_minus_q
    shifts = []
    for e in eigs:
        if vp(e - 1, p) < vq:
            raise NotInNormalForm(f"eigenvalue {e} is too far from q^Z_p")
        a, known = log_ratio(e, q, p, sys.ctx.M)
        shifts.append(rational_mod(a, p, ell) if vp(e - 1, p) - vq <= ell - 1 else 0)
    H, new_sys, new_eigs = shearing_normalize(sys, eigs, shifts, bound)
    if spectral_data(new_eigs, sys.ctx, bound).resonant:
        H2, new_sys, new_eigs = shearing_normalize(new_sys, new_eigs, None, bound)
        H = la.mmul(H2, H)
    if not in_normal_form(new_eigs, sys.ctx, ell, bound):
        raise NotInNormalForm("could not reach the normal form")
    return H, new_sys, new_eigs


# ---------------------------------------------------------------------------
# H and F


@dataclass(frozen=True)
class FrobeniusH:
    coeffs: tuple       # matrices H_0 .. H_N (p-adic representatives)
    precision: int      # absolute precision of every coefficient
    tail_valuation: object  # valuation of the last averaged term
    ell: int

    def entry(self, i: int, j: int) -> list:
        return [m[i][j] for m in self.coeffs]


def frobenius_H(sys: QDiffSystem, ell: int = 1, N: int | None = None, n_max: int | None = None,
                eigs=None, check_class: bool = True, force: bool = False) -> FrobeniusH:
    """Average of Y(x, zeta x) over zeta^(p^ell) = 1, to order N in x."""
    ctx = sys.ctx
    p, q, M = ctx.p, sys.q, ctx.M
    N = ctx.N if N is None else N
    n_max = N if n_max is None else n_max
    if eigs is not None and not in_normal_form(eigs, ctx, ell):
        raise NotInNormalForm("spectrum of A(0) is not in normal form")
    if check_class:
        class_check(sys, ell, force)
    mu = sys.mu
    loss = [0]
    for n in range(1, n_max + 1):
        loss.append(loss[-1] + v_q_bracket(n, q, p) + vp(q - 1, p))
    K = M + loss[-1] + ell + 8
    As = taylor_matrices(sys.A, N)
    As = [[[rnd(x, p, K) for x in r] for r in m] for m in As]
    Z = zeta_sums_group_ring(n_max, ell, q, p, p ** K)
    P = p ** ell
    S = [la.identity(mu)] + [la.zeros(mu) for _ in range(N)]
    H = [la.zeros(mu) for _ in range(N + 1)]
    prec = K
    tail = INF
    for n in range(n_max + 1):
        z = Fraction(Z[n])
        vz = vp(z, p)
        if z:
            for k in range(N + 1):
                H[k] = la.madd(H[k], la.mscale(S[k], z))
        prec = min(prec, K - loss[n] + (vz if vz != INF else K))
        if n == n_max:
            tail = _vp_series(S, p) + vz
        if n == n_max:
            break
        Sq = [la.mscale(S[k], q ** k) for k in range(N + 1)]
        prod = _mser_mul(Sq, As, N, p, K)
        c = Fraction(1) / q ** n
        d = q ** (n + 1) - 1
        S = [[[rnd((c * prod[k][r][s] - S[k][r][s]) / d, p, K) for s in range(mu)] for r in range(mu)]
             for k in range(N + 1)]
    H = [[[rnd(x / P, p, K) for x in r] for r in m] for m in H]
    prec -= ell
    if prec < M:
        raise TailNotDominated("working precision fell below M")
    h0 = H[0]
    if min(vp(x, p) for r in h0 for x in r) != 0 or vp(la.det(h0), p) != 0:
        raise PreconditionViolated("H(0) is not a unit matrix")
    return FrobeniusH(tuple(tuple(tuple(r) for r in m) for m in H), prec, tail, ell)


def _vp_series(S, p):
    return min((vp(x, p) for m in S for r in m for x in r), default=INF)


@dataclass(frozen=True)
class FrobeniusF:
    """F(X) to order N // p^ell together with the checks on A_[H]."""
    coeffs: tuple           # F_0, F_1, ... (matrices), F_j multiplies X^j
    off_lattice_valuation: object
    precision: int
    charpoly_valuation: object   # v(charpoly(F(0)) - charpoly(A(0)))
    ell: int

    def to_json(self) -> dict:
        from .padic import rational_to_json
        v = self.off_lattice_valuation
        return {"F": [[[rational_to_json(x) for x in r] for r in m] for m in self.coeffs],
                "ell": self.ell, "precision": self.precision,
                "off_lattice_valuation": None if v == INF else int(v),
                "charpoly_valuation": None if self.charpoly_valuation == INF else int(self.charpoly_valuation)}


def charpoly(m) -> list:
    """Coefficients c_0..c_n of det(t I - m) by Faddeev-LeVerrier."""
    n = len(m)
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    Mk = la.zeros(n)
    for k in range(1, n + 1):
        Mk = la.madd(la.mmul(m, Mk), la.mscale(la.identity(n), c[n - k + 1]))
        tr = sum(la.mmul(m, Mk)[i][i] for i in range(n))
        c[n - k] = -tr / k
    return c


def frobenius_F(sys: QDiffSystem, H: FrobeniusH, N: int | None = None, strict: bool = True) -> FrobeniusF:
    """F with F(x^(p^ell)) = H(qx) A(x) H(x)^(-1), read off the truncated gauge.

    Coefficients of x^k with p^ell not dividing k must vanish; their minimal
    valuation is reported and, under ``strict``, must reach M - 4.
    """
    ctx = sys.ctx
    p, q, M = ctx.p, sys.q, ctx.M
    N = len(H.coeffs) - 1 if N is None else min(N, len(H.coeffs) - 1)
    K = H.precision
    Hs = [[list(r) for r in m] for m in H.coeffs[:N + 1]]
    Hq = [la.mscale(Hs[k], q ** k) for k in range(N + 1)]
    As = [[[rnd(x, p, K) for x in r] for r in m] for m in taylor_matrices(sys.A, N)]
    Hi = _mser_inv(Hs, N, p, K)
    AH = _mser_mul(Hq, As, N, p, K)
    G = _mser_mul(AH, Hi, N, p, K)
    P = p ** H.ell
    off = INF
    for k in range(N + 1):
        if k % P:
            off = min(off, _vp_series([G[k]], p))
    if strict and off < M - 4:
        raise LatticeResidual(f"off-lattice coefficients have valuation {off} < {M - 4}")
    Fc = tuple(tuple(tuple(r) for r in G[k]) for k in range(0, N + 1, P))
    A0 = [[f(0) for f in r] for r in sys.A]
    cp = [a - b for a, b in zip(charpoly(Fc[0]), charpoly(A0))]
    cv = min((vp(x, p) for x in cp), default=INF)
    return FrobeniusF(Fc, off, K, cv, H.ell)


def frobenius_structure(sys: QDiffSystem, ell: int = 1, N: int | None = None, n_max: int | None = None,
                        eigs=None, force: bool = False, strict: bool = True):
    """H and F together."""
    H = frobenius_H(sys, ell, N, n_max, eigs=eigs, force=force)
    return H, frobenius_F(sys, H, strict=strict)


def frobenius_chi_check(sys: QDiffSystem, F: QDiffSystem, ell: int = 1, horizon: int = 64) -> dict:
    """Compare chi(F, q^(p^ell)) with chi(A, q)^(p^ell) from two generic-radius runs.

    ``F`` is the pulled-back system in the variable X, built over the
    context with q replaced by q^(p^ell).
    """
    P = sys.ctx.p ** ell
    ga = generic_radius_estimate(sys, 0, 0, horizon)
    gf = generic_radius_estimate(F, 0, 0, horizon)
    lhs = gf.chi.r
    rhs = ga.chi.r * P
    return {"chi_F": gf.chi, "chi_A_power": LogRadius(rhs),
            "certified": ga.certified and gf.certified, "difference": abs(lhs - rhs)
            if INF not in (lhs, rhs) and -INF not in (lhs, rhs) else Fraction(0)}


# ---------------------------------------------------------------------------
# distance of an eigenvalue to q^Z_p


def eigenvalue_distance(lam, ctx: QContext, horizon: int = 200) -> LogRadius:
    """dist(lambda, q^Z_p) as a LogRadius.

    When v(lambda - 1) >= v(q - 1) the logarithm ratio log(lambda)/log(q)
    lies in Z_p, so the distance is 0.  Otherwise every q^a is closer to 1
    than lambda is and the distance is |lambda - 1|.
    """
    lam = as_fraction(lam)
    p = ctx.p
    v = vp(lam - 1, p)
    if v == INF or v >= ctx.v_one_minus_q:
        return LogRadius(INF)
    return LogRadius(v)


def lambda_series_valuation(lam, n: int, ctx: QContext) -> object:
    """v of prod_{i<n}(lambda - q^i) / prod_{j=1..n}(q^j - 1)."""
    lam = as_fraction(lam)
    p, q = ctx.p, ctx.q
    num = Fraction(0)
    for i in range(n):
        w = v_q_power_minus(i, lam, q, p, ctx.M)
        if w == INF:
            return INF
        num += w
    den = sum(vp(q ** j - 1, p) for j in range(1, n + 1))
    return num - den


def lambda_series_radius(lam, ctx: QContext, horizon: int = 200) -> RadiusEstimate:
    """Radius of sum_n prod_{i<n}(lambda - q^i)/prod_{j<=n}(q^j - 1) x^n."""
    w = {n: lambda_series_valuation(lam, n, ctx) for n in range(horizon + 1)}
    return radius_from_valuations(w, ctx.p, horizon)


def lambda_radius_prediction(lam, ctx: QContext) -> LogRadius:
    """1 on q^Z_p, else |pi (q - 1)/(lambda - 1)|."""
    d = eigenvalue_distance(lam, ctx)
    if d.r == INF:
        return LogRadius(0)
    return LogRadius(ctx.pi_norm.r + ctx.v_one_minus_q - d.r)


# ---------------------------------------------------------------------------
# rational reconstruction of F


def _ratrec(c: Fraction, p: int, prec: int):
    """Small fraction a/b congruent to c modulo p^prec, or None."""
    m = p ** prec
    r0, r1 = m, rational_mod(c, p, prec)
    s0, s1 = 0, 1
    bound = int((m // 2) ** 0.5) if m < 2 ** 1000 else 1 << (m.bit_length() // 2 - 1)
    while r1 > bound:
        k = r0 // r1
        r0, r1 = r1, r0 - k * r1
        s0, s1 = s1, s0 - k * s1
    if s1 == 0 or abs(s1) > bound or s1 % p == 0:
        return None
    return Fraction(r1, s1)


def _pade(c: list, a: int, b: int):
    """Exact [a/b] approximant of the series c, or None."""
    from .series import RationalFunction
    if b == 0:
        return RationalFunction(list(c[:a + 1]), [1])
    rows = [[c[k - i] if k - i >= 0 else Fraction(0) for i in range(1, b + 1)] for k in range(a + 1, a + b + 1)]
    rhs = [[-c[k]] for k in range(a + 1, a + b + 1)]
    try:
        d = [Fraction(1)] + [r[0] for r in la.solve(rows, rhs)]
    except Exception:
        return None
    num = [sum(d[i] * c[k - i] for i in range(b + 1) if k - i >= 0) for k in range(a + 1)]
    return RationalFunction(num, d)


def reconstruct_rational(coeffs: list, p: int, prec: int, max_deg: int = 4):
    """Rational function whose expansion matches the p-adic coefficients.

    Coefficients are lifted to small fractions one at a time; a Pade
    approximant of low degree built from the first ones must agree with
    every given coefficient modulo p^prec.  Returns None when nothing fits.
    """
    exact = []
    for c in coeffs:
        r = _ratrec(c, p, prec) if c else Fraction(0)
        if r is None:
            break
        exact.append(r)
    L = len(exact)
    for total in range(0, 2 * max_deg + 1):
        for b in range(0, min(total, max_deg) + 1):
            a = total - b
            if a > max_deg or a + b + 2 > L:
                continue
            f = _pade(exact, a, b)
            if f is None:
                continue
            try:
                ser = f.taylor(0, len(coeffs) - 1)
            except Exception:
                continue
            if all(s == c or vp(s - c, p) >= prec for s, c in zip(ser, coeffs)):
                return f
    return None


def reconstruct_F(F: FrobeniusF, p: int, max_deg: int = 4):
    """Matrix of rational functions in X, or None when an entry fails."""
    mu = len(F.coeffs[0])
    out = []
    for i in range(mu):
        row = []
        for j in range(mu):
            f = reconstruct_rational([m[i][j] for m in F.coeffs], p, F.precision, max_deg)
            if f is None:
                return None
            row.append(f)
        out.append(row)
    return out


def poles_off_unit_disk(Fr, p: int) -> bool:
    """Every denominator root has |root| >= 1 (Newton polygon check)."""
    from .series import p_roots_valuations
    for row in Fr:
        for f in row:
            if len(f.den) > 1 and any(v > 0 for v in p_roots_valuations(f.den, p)):
                return False
    return True
