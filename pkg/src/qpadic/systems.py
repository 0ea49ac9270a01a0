"""q-difference systems Y(qx) = A(x) Y(x) with rational A.

The derived matrices G_n are defined by d_q^n Y = G_n Y.  Writing
A = N(x)/d(x) with a scalar polynomial d, they have the closed shape
G_n = P_n / D_n where D_n = x^n d(x) d(qx) ... d(q^(n-1) x) and

    P_0 = I,   P_{n+1} = (P_n(qx) N(x) - q^n d(q^n x) P_n(x)) / ((q - 1) q^n),

so all the work stays with polynomial matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .errors import (DivisionByZero, HypothesisUnverifiable, InvalidArgument, InvariantViolation,
                     NoKernelVector, NotSmallRadius, PoleOnOrbit, PreconditionViolated,
                     SingularDet, SingularGauge)
from .padic import INF, as_fraction, rational_to_json, vp
from .qcalc import (LogRadius, QContext, RadiusEstimate, eff_bound_const, q_binomial,
                    q_factorial, radius_from_valuations, rad_min)
from .series import (RationalFunction, coeff_norm, gauss_norm, p_add, p_divmod, p_eval, p_gcd,
                     p_mul, p_recenter, p_scale, p_sigma, p_sub)
from .twisted import TwistedSeries, _divided_differences


def rf_matrix(rows) -> list:
    return [[RationalFunction.lift(x) if not isinstance(x, RationalFunction) else x for x in r]
            for r in rows]


def rf_identity(n: int) -> list:
    return la.identity(n, RationalFunction.const(1))


def m_sigma(a, q, k: int = 1):
    return la.mmap(lambda f: f.sigma(q, k), a)


def m_dq(a, q):
    return la.mmap(lambda f: f.dq(q), a)


def m_eval(a, x):
    return la.mmap(lambda f: f(x), a)


def m_norm(a, xi, r, p: int):
    """Gauss norm exponent of a matrix (sup of entry norms)."""
    return min(gauss_norm(f, xi, r, p).r for row in a for f in row)


@dataclass
class QDiffSystem:
    A: list
    ctx: QContext = field(default_factory=QContext)

    def __post_init__(self):
        self.A = rf_matrix(self.A)
        n = len(self.A)
        if any(len(r) != n for r in self.A):
            raise InvalidArgument("A must be square")
        if la.det(self.A).is_zero():
            raise InvalidArgument("det A vanishes identically")

    @property
    def mu(self) -> int:
        return len(self.A)

    @property
    def q(self) -> Fraction:
        return self.ctx.q

    def G(self) -> list:
        """(A - I) / ((q - 1) x)."""
        scale = RationalFunction([0, self.q - 1])
        return la.mmap(lambda f: f / scale, la.msub(self.A, rf_identity(self.mu)))

    def to_json(self) -> dict:
        return {"p": self.ctx.p, "q": rational_to_json(self.q),
                "precision": {"padic_digits": self.ctx.M, "series_order": self.ctx.N},
                "matrix": [[f.to_json() for f in r] for r in self.A]}

    @classmethod
    def from_json(cls, d: dict, ctx: QContext | None = None) -> "QDiffSystem":
        if ctx is None:
            prec = d.get("precision", {})
            q = d.get("q")
            ctx = QContext(int(d.get("p", 3)), None if q in (None, "one_plus_p") else as_fraction(q),
                           int(prec.get("padic_digits", 64)), int(prec.get("series_order", 128)))
        return cls([[RationalFunction.from_json(f) for f in r] for r in d["matrix"]], ctx)


def common_denominator(A) -> list:
    d = [Fraction(1)]
    for row in A:
        for f in row:
            g = p_gcd(d, list(f.den))
            d = p_divmod(p_mul(d, list(f.den)), g)[0]
    return p_scale(d, 1 / d[-1])


class DerivedSequence:
    """The matrices G_n of a system, kept as P_n / D_n and extended on demand."""

    def __init__(self, sys: QDiffSystem):
        self.sys = sys
        q = sys.q
        self.q = q
        self.d = common_denominator(sys.A)
        self.N = [[p_divmod(p_mul(list(f.num), self.d), list(f.den))[0] for f in r] for r in sys.A]
        mu = sys.mu
        self.P = [[[Fraction(1)] if i == j else [] for j in range(mu)] for i in range(mu)]
        self.P = [self.P]

    def _extend(self, n: int):
        q, mu = self.q, self.sys.mu
        while len(self.P) <= n:
            k = len(self.P) - 1
            Pk = self.P[-1]
            Pq = [[p_sigma(f, q) for f in r] for r in Pk]
            dqk = p_sigma(self.d, q, k)
            nxt = []
            for i in range(mu):
                row = []
                for j in range(mu):
                    s = []
                    for t in range(mu):
                        if Pq[i][t] and self.N[t][j]:
                            s = p_add(s, p_mul(Pq[i][t], self.N[t][j]))
                    s = p_sub(s, p_scale(p_mul(dqk, Pk[i][j]), q ** k))
                    row.append(p_scale(s, 1 / ((q - 1) * q ** k)))
                nxt.append(row)
            self.P.append(nxt)

    def numerator(self, n: int):
        self._extend(n)
        return self.P[n]

    def denominator(self, n: int) -> list:
        out = [Fraction(0)] * n + [Fraction(1)]
        for i in range(n):
            out = p_mul(out, p_sigma(self.d, self.q, i))
        return out

    def G(self, n: int) -> list:
        D = self.denominator(n)
        return [[RationalFunction(f, D) for f in r] for r in self.numerator(n)]

    def normalized(self, n: int) -> list:
        c = 1 / q_factorial(n, self.q)
        return la.mmap(lambda f: f * c, self.G(n))

    def value(self, n: int, xi, normalized: bool = True) -> list:
        """G_n(xi) (divided by [n]_q! by default) as a matrix of Fractions."""
        xi = as_fraction(xi)
        D = self.denominator(n)
        Dv = p_eval(D, xi)
        c = 1 / q_factorial(n, self.q) if normalized else Fraction(1)
        if Dv != 0:
            return [[p_eval(f, xi) / Dv * c for f in r] for r in self.numerator(n)]
        try:
            return [[RationalFunction(f, D)(xi) * c for f in r] for r in self.numerator(n)]
        except DivisionByZero:
            raise PoleOnOrbit(0, f"G_{n} has a pole at {xi}") from None

    def log_norm(self, n: int, xi, r, normalized: bool = True):
        """Exponent L with |G_n(t_{xi,R})| = p^(-L) (normalized by [n]_q! by default)."""
        p = self.sys.ctx.p
        xi = as_fraction(xi)
        r = r.r if isinstance(r, LogRadius) else r
        num = min(coeff_norm(p_recenter(f, xi) if xi else f, r, p) for row in self.numerator(n) for f in row)
        if num == INF:
            return INF
        x_norm = coeff_norm([xi, Fraction(1)], r, p)
        den = n * x_norm
        for i in range(n):
            di = p_sigma(self.d, self.q, i)
            den += coeff_norm(p_recenter(di, xi) if xi else di, r, p)
        out = num - den
        if normalized:
            out -= vp(q_factorial(n, self.q), p)
        return out


def derived_sequence(sys: QDiffSystem, n_max: int) -> DerivedSequence:
    seq = DerivedSequence(sys)
    seq._extend(n_max)
    return seq


def derived_sequence_recursive(sys: QDiffSystem, n_max: int) -> list:
    """G_{n+1} = G_n(qx) G + d_q(G_n), straight from the definition (oracle route)."""
    q = sys.q
    G = sys.G()
    out = [rf_identity(sys.mu)]
    for _ in range(n_max):
        Gn = out[-1]
        out.append(la.madd(la.mmul(m_sigma(Gn, q), G), m_dq(Gn, q)))
    return out


# ---------------------------------------------------------------------------
# formal solutions


@dataclass(frozen=True)
class FormalSolution:
    """Y(xi, x) = sum_n G_n(xi)/[n]_q! (x - xi)_{q,n}, entrywise twisted series."""
    center: Fraction
    coeffs: tuple          # coeffs[n] is the mu x mu matrix G_n(xi)/[n]_q!
    radius: RadiusEstimate
    q: Fraction

    def entry(self, i: int, j: int) -> TwistedSeries:
        return TwistedSeries(tuple(c[i][j] for c in self.coeffs), self.center, self.q)

    def to_json(self) -> dict:
        return {"center": rational_to_json(self.center),
                "coeffs": [[[rational_to_json(x) for x in r] for r in c] for c in self.coeffs],
                "radius": self.radius.to_json()}


def orbit_values(sys: QDiffSystem, xi, n: int) -> list:
    """Y(xi, q^k xi) = A(q^(k-1) xi) ... A(xi) for k <= n, checking the orbit."""
    q, p = sys.q, sys.ctx.p
    xi = as_fraction(xi)
    Y = la.identity(sys.mu)
    out = [Y]
    for k in range(n):
        pt = xi * q ** k
        try:
            Ak = m_eval(sys.A, pt)
        except DivisionByZero:
            raise PoleOnOrbit(k) from None
        dk = la.det(Ak)
        if dk == 0 or vp(dk, p) >= sys.ctx.M:
            raise SingularDet(k)
        Y = la.mmul(Ak, Y)
        out.append(Y)
    return out


def formal_solution(sys: QDiffSystem, xi, N: int | None = None, route: str = "orbit") -> FormalSolution:
    """Twisted coefficients of the formal solution at xi (xi != 0).

    ``orbit`` takes q-divided differences of the orbit values A(q^(k-1) xi)...A(xi);
    ``derived`` evaluates the closed-form G_n at xi.
    """
    xi = as_fraction(xi)
    N = sys.ctx.N if N is None else N
    p, q, mu = sys.ctx.p, sys.q, sys.mu
    if xi == 0:
        raise InvalidArgument("the formal solution is built at a nonzero center")
    vals = orbit_values(sys, xi, N)
    if route == "orbit":
        coeffs = [[[Fraction(0)] * mu for _ in range(mu)] for _ in range(N + 1)]
        for i in range(mu):
            for j in range(mu):
                dd = _divided_differences([v[i][j] for v in vals], xi, q)
                for n in range(N + 1):
                    coeffs[n][i][j] = dd[n]
    elif route == "derived":
        seq = derived_sequence(sys, N)
        coeffs = [seq.value(n, xi) for n in range(N + 1)]
    else:
        raise InvalidArgument(f"unknown route {route!r}")
    w = {n: min(vp(x, p) for r in c for x in r) for n, c in enumerate(coeffs)}
    est = radius_from_valuations(w, p, N)
    return FormalSolution(xi, tuple(tuple(tuple(r) for r in c) for c in coeffs), est, q)


def solvability_check(sys: QDiffSystem, xi, N: int | None = None) -> str:
    """'obstructed' when the orbit meets a pole of A or a zero of det A,
    'fundamental' when the coefficient radius beats |(q-1) xi|, else 'formal_only'."""
    try:
        sol = formal_solution(sys, xi, N)
    except (PoleOnOrbit, SingularDet):
        return "obstructed"
    b = vp((sys.q - 1) * as_fraction(xi), sys.ctx.p)
    return "fundamental" if sol.radius.log_radius.r < b else "formal_only"


# ---------------------------------------------------------------------------
# gauge transformations


def gauge_apply(sys: QDiffSystem, F) -> QDiffSystem:
    """A_[F] = F(qx) A(x) F(x)^(-1)."""
    F = rf_matrix(F)
    if la.det(F).is_zero():
        raise SingularGauge("gauge matrix is singular")
    Fi = la.inverse(F)
    return QDiffSystem(la.mmul(la.mmul(m_sigma(F, sys.q), sys.A), Fi), sys.ctx)


def dq_gauge_form(sys: QDiffSystem, F) -> list:
    """G_[F] = F(qx) G F^(-1) + d_q(F) F^(-1)."""
    F = rf_matrix(F)
    if la.det(F).is_zero():
        raise SingularGauge("gauge matrix is singular")
    Fi = la.inverse(F)
    q = sys.q
    return la.madd(la.mmul(la.mmul(m_sigma(F, q), sys.G()), Fi), la.mmul(m_dq(F, q), Fi))


def companion_from_equation(a, ctx: QContext | None = None) -> QDiffSystem:
    """Companion matrix of y(q^mu x) = a_(mu-1) y(q^(mu-1) x) + ... + a_0 y(x)."""
    ctx = ctx or QContext()
    a = [RationalFunction.lift(c) for c in a]
    mu = len(a)
    zero, one = RationalFunction.const(0), RationalFunction.const(1)
    A = [[one if j == i + 1 else zero for j in range(mu)] for i in range(mu - 1)]
    A.append(list(a))
    return QDiffSystem(A, ctx)


def cyclic_dq_gauge(mu: int, ctx: QContext) -> list:
    """Lower triangular H~ with entries x^(-i) (-1)^(i+j) / (q-1)^i binom(i,j)_(1/q) q^(-j(j-1)/2)."""
    q = ctx.q
    out = []
    for i in range(mu):
        row = []
        for j in range(mu):
            if j > i:
                row.append(RationalFunction.const(0))
                continue
            c = Fraction((-1) ** (i + j)) / (q - 1) ** i * q_binomial(i, j, 1 / q) * q ** (-(j * (j - 1) // 2))
            row.append(RationalFunction([c], [0] * i + [1]))
        out.append(row)
    return out


def dq_companion_coefficients(sys: QDiffSystem) -> list:
    """b_0 .. b_(mu-1) of the d_q-companion form obtained from a companion system by H~."""
    H = cyclic_dq_gauge(sys.mu, sys.ctx)
    Gt = dq_gauge_form(sys, H)
    mu = sys.mu
    for i in range(mu - 1):
        for j in range(mu):
            want = RationalFunction.const(1 if j == i + 1 else 0)
            if Gt[i][j] != want:
                raise InvariantViolation("gauged system is not in d_q-companion shape")
    return list(Gt[-1])


def iterate_system(sys: QDiffSystem, n0: int) -> QDiffSystem:
    """A(q^(n0-1) x) ... A(x), a system for q^n0."""
    if n0 < 1:
        raise InvalidArgument("n0 must be >= 1")
    out = sys.A
    for k in range(1, n0):
        out = la.mmul(m_sigma(sys.A, sys.q, k), out)
    return QDiffSystem(out, sys.ctx.with_q(sys.q ** n0, strict=False))


# ---------------------------------------------------------------------------
# generic radius


@dataclass(frozen=True)
class GenericRadius:
    chi: LogRadius
    certified: bool
    lower_bound: LogRadius
    estimate: RadiusEstimate

    def to_json(self) -> dict:
        out = self.estimate.to_json()
        out["log_radius"] = self.chi.to_json()
        out["certified"] = self.certified
        out["lower_bound"] = self.lower_bound.to_json()
        return out


def generic_radius_estimate(sys: QDiffSystem, xi=0, r=0, n_max: int = 64, cap: int = 512,
                            seq: DerivedSequence | None = None) -> GenericRadius:
    """inf(R, liminf |G_n(t_{xi,R})/[n]_q!|^(-1/n)) and the a-priori lower bound
    R |pi_q| / sup(1, |G_1(t)|)."""
    p = sys.ctx.p
    xi = as_fraction(xi)
    r = r.r if isinstance(r, LogRadius) else as_fraction(r)
    seq = seq or DerivedSequence(sys)
    H = n_max
    while True:
        w = {n: seq.log_norm(n, xi, r) for n in range(H + 1)}
        est = radius_from_valuations(w, p, H)
        if est.certified or H * 2 > cap:
            break
        H *= 2
    chi = rad_min(LogRadius(r), est.log_radius)
    g1 = seq.log_norm(1, xi, r)
    lower = LogRadius(r) * sys.ctx.pi_q_norm / LogRadius(min(0, g1))
    return GenericRadius(chi, est.certified, lower, est)


def dwork_frobenius_radius(b, r, ctx: QContext) -> LogRadius:
    """|pi| / sup_i |b_i(t_{0,R})|^(1/(mu-i)) when some |b_i(t)| > R^(i-mu)."""
    if not ctx.v_one_minus_q * (ctx.p - 1) > 1:
        raise PreconditionViolated("needs |1 - q| < |pi|")
    r = r.r if isinstance(r, LogRadius) else as_fraction(r)
    mu = len(b)
    L = [gauss_norm(RationalFunction.lift(bi), 0, r, ctx.p).r for bi in b]
    if not any(Li != INF and Li + r * (mu - i) < 0 for i, Li in enumerate(L)):
        raise NotSmallRadius("no coefficient exceeds R^(i-mu)")
    worst = max(-Li / (mu - i) for i, Li in enumerate(L) if Li != INF)
    return ctx.pi_norm * LogRadius(worst)


# ---------------------------------------------------------------------------
# effective bounds


def check_solution(sys: QDiffSystem, Y) -> None:
    Y = rf_matrix(Y)
    lhs = m_sigma(Y, sys.q)
    rhs = la.mmul(sys.A, Y)
    if lhs != rhs:
        raise HypothesisUnverifiable("supplied matrix does not solve the system")
    if la.det(Y).is_zero():
        raise HypothesisUnverifiable("supplied solution is not invertible")


def effective_bound_check(sys: QDiffSystem, solution, xi, r, n_max: int) -> list:
    """Per-n comparison of |G_n/[n]_q!| against {n, mu-1} sup_i |G_i| rho^i / rho^n.

    Norms are Gauss norms at (xi, rho) of the exact rational G_n; the caller
    supplies a solution matrix so the standing hypothesis can be checked.
    Returns rows (n, lhs, rhs, slack) as exponents; raises on a violation.
    """
    if solution is None:
        raise HypothesisUnverifiable("a solution matrix is required")
    check_solution(sys, solution)
    xi = as_fraction(xi)
    r = r.r if isinstance(r, LogRadius) else as_fraction(r)
    seq = DerivedSequence(sys)
    mu = sys.mu
    base = min(seq.log_norm(i, xi, r, normalized=False) + i * r for i in range(mu))
    rows = []
    for n in range(n_max + 1):
        lhs = seq.log_norm(n, xi, r)
        if n >= 1 and mu - 1 > n:
            continue
        rhs = eff_bound_const(n, mu - 1, sys.ctx).r + base - n * r
        slack = lhs - rhs
        if slack < 0:
            raise InvariantViolation(f"effective bound fails at n={n}")
        rows.append((n, lhs, rhs, slack))
    return rows


# ---------------------------------------------------------------------------
# singularities


def clear_trivial_singularities(sys: QDiffSystem, P) -> tuple:
    """Scalar gauge P(x) I: returns (gauge, A_[P I] = P(qx)/P(x) A)."""
    P = RationalFunction.lift(P if isinstance(P, RationalFunction) else RationalFunction(P))
    if P(0) == 0:
        raise InvalidArgument("P(0) must be nonzero")
    F = la.mscale(rf_identity(sys.mu), P)
    return F, gauge_apply(sys, F)


def apparent_singularity_step(Y, zeta, n: int, ctx: QContext) -> tuple:
    """Bordered gauge H removing one zero of det Y at q^n zeta.

    B is a left kernel vector of Y(q^n zeta) scaled so that its largest
    coordinate (p-adically) is 1 at position iota.  Row iota of H is
    B_j / (x - q^n zeta); the other rows are those of the identity.
    Returns (H, H_inverse, iota).
    """
    Y = rf_matrix(Y)
    mu = len(Y)
    pt = as_fraction(zeta) * ctx.q ** n
    B = la.left_kernel(m_eval(Y, pt))
    if B is None:
        raise NoKernelVector("Y is invertible at q^n zeta")
    iota = min(range(mu), key=lambda j: (vp(B[j], ctx.p), j))
    B = [b / B[iota] for b in B]
    lin = RationalFunction([-pt, 1])
    H = rf_identity(mu)
    Hi = rf_identity(mu)
    H[iota] = [RationalFunction.const(b) / lin for b in B]
    Hi[iota] = [RationalFunction.const(-b) if j != iota else lin for j, b in enumerate(B)]
    if la.mmul(H, Hi) != rf_identity(mu):
        raise InvariantViolation("bordered inverse does not match")
    before = _order_at(la.det(Y), pt)
    after = _order_at(la.det(la.mmul(H, Y)), pt)
    if after != before - 1:
        raise InvariantViolation("det order did not drop by one")
    return H, Hi, iota


def _order_at(f: RationalFunction, pt) -> int:
    num = p_recenter(list(f.num), pt)
    den = p_recenter(list(f.den), pt)
    lo = next(i for i, c in enumerate(num) if c)
    ld = next(i for i, c in enumerate(den) if c)
    return lo - ld


# ---------------------------------------------------------------------------
# q-deformation of a differential system


def differential_sequence(G, n_max: int) -> list:
    """G_{n+1} = G_n' + G_n G for dY/dx = G Y."""
    G = rf_matrix(G)
    out = [rf_identity(len(G))]
    for _ in range(n_max):
        Gn = out[-1]
        out.append(la.madd(la.mmap(lambda f: f.derivative(), Gn), la.mmul(Gn, G)))
    return out


def q_sequence(G, q, n_max: int) -> list:
    """G_{n+1} = G_n(qx) G + d_q G_n for d_q Y = G Y."""
    G = rf_matrix(G)
    q = as_fraction(q)
    out = [rf_identity(len(G))]
    for _ in range(n_max):
        Gn = out[-1]
        out.append(la.madd(la.mmul(m_sigma(Gn, q), G), m_dq(Gn, q)))
    return out


@dataclass(frozen=True)
class DeformationReport:
    ks: tuple
    distances: tuple     # exponents of ||Y - Y^(k)||_xi(R), INF when equal
    monotone: bool

    def to_json(self) -> dict:
        return {"rows": [{"k": k, "distance": LogRadius(d).to_json()} for k, d in zip(self.ks, self.distances)],
                "monotone": self.monotone}


def q_deformation_run(G, xi, ks, r, N: int, ctx: QContext | None = None, step: int = 1) -> DeformationReport:
    """Distance between the solution of dY/dx = G Y at xi and the solutions of
    d_{q_k} Y = G Y (q_k = 1 + p^k), both written in powers of (x - xi).

    The twisted q_k-expansion is converted to ordinary Taylor coefficients
    with the elementary symmetric functions of 0, 1 - q_k, ...; the distance
    is min_n v(difference_n) + n r over n <= N.  ``monotone`` records that
    the exponent grows by at least ``step`` per k until it reaches M.
    """
    from .twisted import twisted_to_taylor
    ctx = ctx or QContext()
    p = ctx.p
    xi = as_fraction(xi)
    r = r.r if isinstance(r, LogRadius) else as_fraction(r)
    G = rf_matrix(G)
    mu = len(G)
    if min(gauss_norm(f, xi, 0, p).r for row in G for f in row) < 0:
        raise PreconditionViolated("need ||G||_xi(1) <= 1")
    diff = differential_sequence(G, N)
    fact = Fraction(1)
    Y = []
    for n in range(N + 1):
        if n:
            fact *= n
        Y.append(m_eval(diff[n], xi) if n == 0 else la.mscale(m_eval(diff[n], xi), 1 / fact))
    dists = []
    for k in ks:
        qk = Fraction(1 + p ** k)
        seq = q_sequence(G, qk, N)
        tw = [la.mscale(m_eval(seq[n], xi), 1 / q_factorial(n, qk)) for n in range(N + 1)]
        best = INF
        for i in range(mu):
            for j in range(mu):
                t = twisted_to_taylor(TwistedSeries(tuple(c[i][j] for c in tw), xi, qk))
                for n in range(N + 1):
                    v = vp(Y[n][i][j] - t[n], p)
                    if v != INF:
                        best = min(best, v + n * r)
        dists.append(best)
    mono = True
    for a, b in zip(dists, dists[1:]):
        if a >= ctx.M:
            break
        if not b - a >= step:
            mono = False
    return DeformationReport(tuple(ks), tuple(dists), mono)
