"""q-combinatorics, radii in valuation space, q-types and the 1Phi1 series."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations

from .errors import InvalidArgument, PreconditionViolated, ResonantAlpha
from .padic import INF, _vint, as_fraction, is_prime, log_ratio, rational_mod, vp


class LogRadius:
    """A radius (or norm) ``p^(-r)`` stored through the exact exponent ``r``.

    Comparisons are between radii, so ``a < b`` means ``a.r > b.r``.  The
    sentinels ``ZERO_RADIUS`` (r = +inf) and ``INFINITE_RADIUS`` (r = -inf)
    cover the degenerate cases.  Products of radii add exponents.
    """
    __slots__ = ("r",)

    def __init__(self, r):
        if isinstance(r, LogRadius):
            r = r.r
        if r in (INF, -INF):
            self.r = r
        else:
            self.r = as_fraction(r)

    def _other(self, other):
        return other if isinstance(other, LogRadius) else LogRadius(other)

    def __eq__(self, other):
        if not isinstance(other, LogRadius):
            return NotImplemented
        return self.r == other.r

    def __hash__(self):
        return hash(self.r)

    def __lt__(self, other):
        return self.r > self._other(other).r

    def __le__(self, other):
        return self.r >= self._other(other).r

    def __gt__(self, other):
        return self.r < self._other(other).r

    def __ge__(self, other):
        return self.r <= self._other(other).r

    def __mul__(self, other):
        return LogRadius(_add(self.r, self._other(other).r))

    def __truediv__(self, other):
        return LogRadius(_add(self.r, -self._other(other).r))

    def __pow__(self, e):
        e = as_fraction(e)
        if e == 0:
            return LogRadius(0)
        if self.r in (INF, -INF):
            return LogRadius(self.r if e > 0 else -self.r)
        return LogRadius(self.r * e)

    def is_zero(self) -> bool:
        return self.r == INF

    def is_infinite(self) -> bool:
        return self.r == -INF

    def value(self, p: int) -> float:
        """Floating display value of the radius (never used in decisions)."""
        if self.r == INF:
            return 0.0
        if self.r == -INF:
            return math.inf
        return float(p) ** float(-self.r)

    def to_json(self):
        if self.r == INF:
            return {"sentinel": "zero"}
        if self.r == -INF:
            return {"sentinel": "infinity"}
        return {"num": str(self.r.numerator), "den": str(self.r.denominator)}

    @classmethod
    def from_json(cls, d):
        if "sentinel" in d:
            return ZERO_RADIUS if d["sentinel"] == "zero" else INFINITE_RADIUS
        return cls(Fraction(int(d["num"]), int(d["den"])))

    def __repr__(self):
        return f"LogRadius({self.r})"


def _add(a, b):
    if a in (INF, -INF) and b in (INF, -INF) and a != b:
        raise InvalidArgument("undefined product 0 * infinity of radii")
    return a + b


ZERO_RADIUS = LogRadius(INF)
INFINITE_RADIUS = LogRadius(-INF)
UNIT_RADIUS = LogRadius(0)


def rad_min(*xs) -> LogRadius:
    """Smallest radius (largest exponent)."""
    return min(LogRadius(x) for x in xs)


def rad_max(*xs) -> LogRadius:
    return max(LogRadius(x) for x in xs)


@dataclass(frozen=True)
class QContext:
    """The prime, the deformation parameter q and the precision policy.

    By default q = 1 + p.  ``strict`` enforces v(1 - q) > 1/(p - 1), the
    standing hypothesis under which |[n]_q| = |n| and |pi_q| = |pi|.
    """
    p: int = 3
    q: Fraction = None
    padic_digits: int = 64
    series_order: int = 128
    strict: bool = True

    def __post_init__(self):
        if not is_prime(self.p):
            raise InvalidArgument(f"{self.p} is not prime")
        q = Fraction(1 + self.p) if self.q is None else as_fraction(self.q)
        object.__setattr__(self, "q", q)
        if q == 0 or vp(q, self.p) != 0:
            raise InvalidArgument("q must be a p-adic unit")
        if q in (1, -1):
            raise InvalidArgument("q must not be a root of unity")
        if self.padic_digits < 8 or self.series_order < 4:
            raise InvalidArgument("precision floor is M >= 8 and N >= 4")
        if self.strict and not self.v_one_minus_q * (self.p - 1) > 1:
            raise PreconditionViolated("need v(1 - q) > 1/(p - 1)")

    @property
    def M(self) -> int:
        return self.padic_digits

    @property
    def N(self) -> int:
        return self.series_order

    @property
    def v_one_minus_q(self):
        return vp(1 - self.q, self.p)

    @property
    def kappa(self) -> int:
        k = 1
        while not vp(1 - self.q ** k, self.p) * (self.p - 1) > 1:
            k += 1
            if k > 10 ** 4:
                raise PreconditionViolated("no kappa found below 10^4")
        return k

    @property
    def pi_norm(self) -> LogRadius:
        return LogRadius(Fraction(1, self.p - 1))

    @property
    def pi_q_norm(self) -> LogRadius:
        k = self.kappa
        if k == 1:
            return LogRadius(Fraction(vp(q_bracket(self.p, self.q), self.p), self.p - 1))
        inner = Fraction(1, self.p - 1)
        return LogRadius((vp(q_bracket(k, self.q), self.p) + inner) / k)

    def with_q(self, q, strict: bool = False) -> "QContext":
        return replace(self, q=as_fraction(q), strict=strict)

    def power(self, n: int) -> "QContext":
        """Context for q^n (used for iterated systems and Frobenius)."""
        return self.with_q(self.q ** n, strict=self.strict)


def _qof(q):
    return q.q if isinstance(q, QContext) else as_fraction(q)


def q_bracket(n: int, q) -> Fraction:
    q = _qof(q)
    if n < 0:
        raise InvalidArgument("n must be >= 0")
    if q == 1:
        return Fraction(n)
    return (q ** n - 1) / (q - 1)


def q_factorial(n: int, q) -> Fraction:
    q = _qof(q)
    out = Fraction(1)
    for k in range(1, n + 1):
        out *= q_bracket(k, q)
    return out


def q_binomial(n: int, i: int, q) -> Fraction:
    q = _qof(q)
    if i < 0 or i > n or n < 0:
        return Fraction(0)
    i = min(i, n - i)
    num = Fraction(1)
    for k in range(i):
        num *= q_bracket(n - k, q)
    return num / q_factorial(i, q)


def q_pochhammer_ratio(y, m: int, q) -> Fraction:
    """prod_{i<m} (y - q^i), the twisted falling power (y - 1)_{q,m}."""
    q = _qof(q)
    out = Fraction(1)
    for i in range(m):
        out *= as_fraction(y) - q ** i
    return out


def gaussian_binomial_poly(n: int, i: int) -> list:
    """Integer coefficients (in q) of the Gaussian binomial, by the Pascal rule."""
    if i < 0 or i > n:
        return [0]
    table = {(0, 0): [1]}
    for m in range(1, n + 1):
        for j in range(0, min(m, i) + 1):
            a = table.get((m - 1, j - 1), [0]) if j >= 1 else [0]
            b = table.get((m - 1, j), [0]) if j <= m - 1 else [0]
            out = [0] * max(len(a), len(b) + j)
            for k, c in enumerate(a):
                out[k] += c
            for k, c in enumerate(b):
                out[k + j] += c
            while len(out) > 1 and out[-1] == 0:
                out.pop()
            table[(m, j)] = out
    return table[(n, i)]


def pascal_check(n: int, i: int, q) -> bool:
    if not n >= i >= 1:
        raise InvalidArgument("need n >= i >= 1")
    q = _qof(q)
    lhs = q_binomial(n, i, q)
    first = q_binomial(n - 1, i - 1, q) + q_binomial(n - 1, i, q) * q ** i
    second = q_binomial(n - 1, i - 1, q) * q ** (n - i) + q_binomial(n - 1, i, q)
    return lhs == first == second


def product_identity_check(n: int, q) -> bool:
    """(1-x)(1-qx)...(1-q^{n-1}x) against the signed Gaussian-binomial sum."""
    q = _qof(q)
    prod = [Fraction(1)]
    for k in range(n):
        c = -(q ** k)
        nxt = prod + [Fraction(0)]
        for j, a in enumerate(prod):
            nxt[j + 1] += c * a
        prod = nxt
    rhs = [(-1) ** i * q_binomial(n, i, q) * q ** (i * (i - 1) // 2) for i in range(n + 1)]
    return prod == rhs


def v_q_power_minus(n: int, alpha, q, p: int, digits: int = 64):
    """v(q^n - alpha) for p-adic units, modular fast path with exact fallback."""
    q = _qof(q)
    alpha = as_fraction(alpha)
    m = p ** digits
    qm = rational_mod(q, p, digits)
    am = rational_mod(alpha, p, digits)
    t = (pow(qm, n, m) - am) % m if n >= 0 else (pow(qm, n, m) - am) % m
    if t:
        return _vint(t, p)
    return vp(q ** n - alpha, p)


def v_q_bracket(n: int, q, p: int):
    """v([n]_q) computed without forming q^n exactly."""
    q = _qof(q)
    if n == 0:
        return INF
    return v_q_power_minus(n, 1, q, p) - vp(q - 1, p)


def eff_bound_const(n: int, mu_minus_1: int, ctx: QContext) -> LogRadius:
    """Norm of the effective-bound constant {n, mu-1}: the largest value of
    1/|[l_1]_q ... [l_m]_q| over distinct 1 <= l_i <= n, found by sorting."""
    if n < 0 or mu_minus_1 < 0:
        raise InvalidArgument("n and mu-1 must be >= 0")
    if n == 0 or mu_minus_1 == 0:
        return LogRadius(0)
    if mu_minus_1 > n:
        raise InvalidArgument("no strictly increasing tuple of that length below n")
    vals = sorted((v_q_bracket(lam, ctx.q, ctx.p) for lam in range(1, n + 1)), reverse=True)
    return LogRadius(-sum(vals[:mu_minus_1]))


def eff_bound_const_exhaustive(n: int, mu_minus_1: int, ctx: QContext) -> LogRadius:
    """Brute-force version of :func:`eff_bound_const` over all tuples."""
    if n == 0 or mu_minus_1 == 0:
        return LogRadius(0)
    best = None
    for tup in combinations(range(1, n + 1), mu_minus_1):
        prod = Fraction(1)
        for lam in tup:
            prod *= q_bracket(lam, ctx.q)
        v = vp(prod, ctx.p)
        best = v if best is None or v > best else best
    return LogRadius(-best)


# ---------------------------------------------------------------------------
# horizon statistics

@dataclass(frozen=True)
class RadiusEstimate:
    """Radius of convergence read from coefficient valuations up to a horizon.

    ``log_radius`` is exact when ``certified``; otherwise it is the window
    statistic -min w_n/n over the last half of the horizon.
    """
    log_radius: LogRadius
    certified: bool
    horizon: int
    rows: tuple = field(default=(), repr=False)
    pattern: str = ""

    def window_statistic(self):
        """-min w_n/n over the window (H/2, H] of the stored rows (None when empty)."""
        vals = [x for n, x in self.rows if self.horizon // 2 < n <= self.horizon]
        return -min(vals) if vals else None

    def to_json(self, with_rows: bool = True) -> dict:
        out = {"log_radius": self.log_radius.to_json(), "certified": self.certified}
        if with_rows:
            out["rows"] = [{"n": n, "v_over_n": {"num": str(x.numerator), "den": str(x.denominator)}}
                           for n, x in self.rows]
        return out


def _legendre(n: int, p: int) -> int:
    s, pk = 0, p
    while pk <= n:
        s += n // pk
        pk *= p
    return s


def detect_pattern(w: dict, p: int, lo: int, hi: int, weights=(0, -1, 1, -2, 2, -3, 3, -4, 4)):
    """Look for w_n = a*n + b*v(n!) + periodic(n) on lo < n <= hi.

    Returns (limit of w_n/n, description) or None.  The periodic part must
    repeat with a period at most a quarter of the window.
    """
    ns = list(range(lo + 1, hi + 1))
    if any(w.get(n) is None or w[n] == INF for n in ns):
        return None
    L = len(ns)
    if L < 8:
        return None
    fac = {n: _legendre(n, p) for n in range(lo, hi + 1)}
    for b in weights:
        d = {n: w[n] - b * fac[n] for n in ns}
        delta = [d[ns[k]] - d[ns[k - 1]] for k in range(1, L)]
        for P in range(1, len(delta) // 4 + 1):
            if all(delta[k] == delta[k - P] for k in range(P, len(delta))):
                a = Fraction(sum(delta[:P]), P)
                limit = a + Fraction(b, p - 1)
                desc = f"w_n = {a}*n + {b}*v(n!) + periodic(period {P})"
                return limit, desc
    return None


def radius_from_valuations(w, p: int, horizon: int | None = None) -> RadiusEstimate:
    """Log radius of sum c_n x^n from w_n = v(c_n) (INF or None for zero/excluded).

    ``w`` is a dict or a list indexed by n.  The radius is p^(liminf w_n/n),
    so the log radius is -liminf w_n/n.
    """
    if not isinstance(w, dict):
        w = {n: x for n, x in enumerate(w)}
    H = horizon if horizon is not None else max(w)
    lo = H // 2
    rows = tuple((n, Fraction(w[n]) / n) for n in sorted(w)
                 if 1 <= n <= H and w[n] is not None and w[n] != INF)
    window = [(n, w[n]) for n in range(lo + 1, H + 1) if w.get(n) is not None]
    finite = [(n, x) for n, x in window if x != INF]
    if window and not finite:
        return RadiusEstimate(INFINITE_RADIUS, True, H, rows, "eventually zero")
    if not finite:
        return RadiusEstimate(INFINITE_RADIUS, False, H, rows, "no data")
    est = -min(Fraction(x) / n for n, x in finite)
    found = detect_pattern(w, p, lo, H)
    if found is not None:
        limit, desc = found
        return RadiusEstimate(LogRadius(-limit), True, H, rows, desc)
    return RadiusEstimate(LogRadius(est), False, H, rows, "window statistic")


# ---------------------------------------------------------------------------
# q-type

def q_type(alpha, ctx: QContext, horizon: int = 2000, mode: str = "direct",
           int_bound: int = 10 ** 4) -> RadiusEstimate:
    """q-type of a unit alpha: radius of sum (q-1) x^n / (alpha - q^n),
    indices with alpha = q^n left out.

    ``direct`` reads v(alpha - q^n) term by term.  ``formula`` returns 1 when
    |(alpha-1)/(q-1)| > 1 and otherwise the classical type of
    log(alpha)/log(q), i.e. the radius of sum x^n / (n - a).
    """
    alpha = as_fraction(alpha)
    p, q = ctx.p, ctx.q
    if alpha == 0 or vp(alpha, p) != 0:
        raise InvalidArgument("alpha must be a unit")
    vq = ctx.v_one_minus_q
    K = ctx.M
    if mode == "direct":
        w = {}
        for n in range(0, horizon + 1):
            v = v_q_power_minus(n, alpha, q, p, K)
            w[n] = None if v >= K else vq - v
        est = radius_from_valuations(w, p, horizon)
        # an excluded index k means alpha = q^k to working precision; then
        # w_n = -v(n - k), which is o(n), and the radius is exactly 1
        hits = [n for n, x in w.items() if x is None]
        if not est.certified and len(hits) == 1:
            k = hits[0]
            if all(x == -_vint(n - k, p) for n, x in w.items() if n != k):
                return RadiusEstimate(UNIT_RADIUS, True, horizon, est.rows, f"w_n = -v(n - {k})")
        return est
    if mode != "formula":
        raise InvalidArgument(f"unknown mode {mode!r}")
    if vp(alpha - 1, p) < vq:
        # here v(alpha - q^n) = v(alpha - 1) for every n
        wn = vq - vp(alpha - 1, p)
        rows = tuple((n, Fraction(wn, n)) for n in range(1, horizon + 1))
        return RadiusEstimate(UNIT_RADIUS, True, horizon, rows, "|(alpha-1)/(q-1)| > 1")
    a, known = log_ratio(alpha, q, p, K)
    prec = min(K, known)
    m = p ** prec
    a_int = rational_mod(a, p, prec)
    w = {}
    for n in range(0, horizon + 1):
        t = (n - a_int) % m
        w[n] = None if t == 0 else -_vint(t, p)
    est = radius_from_valuations(w, p, horizon)
    if a_int <= int_bound or m - a_int <= int_bound:
        return RadiusEstimate(UNIT_RADIUS, True, horizon, est.rows, "exponent is an integer")
    return est


# ---------------------------------------------------------------------------
# the series 1Phi1 and its factorization

def _trunc_mul(a, b, N):
    out = [Fraction(0)] * (N + 1)
    for i, x in enumerate(a[:N + 1]):
        if x:
            for j, y in enumerate(b[:N + 1 - i]):
                out[i + j] += x * y
    return out


def hypergeometric_phi(alpha, ctx: QContext, N: int | None = None) -> list:
    """Coefficients (1-q)^n / ((1-q alpha)...(1-q^n alpha)) for n <= N."""
    alpha, q, p = as_fraction(alpha), ctx.q, ctx.p
    N = ctx.N if N is None else N
    out = [Fraction(1)]
    c = Fraction(1)
    for n in range(1, N + 1):
        f = 1 - q ** n * alpha
        if f == 0 or vp(f, p) >= ctx.M:
            raise ResonantAlpha(f"1 - q^{n} alpha vanishes to precision")
        c = c * (1 - q) / f
        out.append(c)
    return out


def e_q_series(ctx: QContext, N: int) -> list:
    return [1 / q_factorial(n, ctx.q) for n in range(N + 1)]


def E_q_series(ctx: QContext, N: int) -> list:
    q = ctx.q
    return [q ** (n * (n - 1) // 2) / q_factorial(n, q) for n in range(N + 1)]


def g_alpha_series(alpha, ctx: QContext, N: int) -> list:
    alpha, q = as_fraction(alpha), ctx.q
    out = []
    for n in range(N + 1):
        f = 1 - q ** n * alpha
        if f == 0:
            raise ResonantAlpha(f"1 - q^{n} alpha vanishes")
        out.append(q ** (n * (n + 1) // 2) * (-1) ** n / q_factorial(n, q) * (1 - q) / f)
    return out


def factorization_check(alpha, ctx: QContext, N: int = 30) -> bool:
    """Phi = (1-alpha)/(1-q) * e_q * g_alpha coefficientwise up to order N."""
    alpha, q = as_fraction(alpha), ctx.q
    phi = hypergeometric_phi(alpha, ctx, N)
    prod = _trunc_mul(e_q_series(ctx, N), g_alpha_series(alpha, ctx, N), N)
    lead = (1 - alpha) / (1 - q)
    return all(phi[n] == lead * prod[n] for n in range(N + 1))


def phi_radius(alpha, ctx: QContext, horizon: int = 2000) -> RadiusEstimate:
    """Radius statistic of the 1Phi1 series from its coefficient valuations."""
    alpha, q, p = as_fraction(alpha), ctx.q, ctx.p
    vq = ctx.v_one_minus_q
    w = {0: 0}
    acc = 0
    inv = rational_mod(alpha, p, ctx.M) if vp(alpha, p) == 0 else None
    for n in range(1, horizon + 1):
        if inv is not None:
            v = v_q_power_minus(n, Fraction(1) / alpha, q, p, ctx.M)
        else:
            v = vp(1 - q ** n * alpha, p)
        if v >= ctx.M:
            raise ResonantAlpha(f"1 - q^{n} alpha vanishes to precision")
        acc += vq - v
        w[n] = acc
    return radius_from_valuations(w, p, horizon)


def phi_radius_prediction(alpha, ctx: QContext, horizon: int = 2000) -> RadiusEstimate:
    """The closed-form claim |pi| * type_q(alpha) for the 1Phi1 radius."""
    t = q_type(alpha, ctx, horizon, mode="formula")
    return RadiusEstimate(ctx.pi_norm * t.log_radius, t.certified, horizon, t.rows,
                          "|pi| * type_q(alpha)")
