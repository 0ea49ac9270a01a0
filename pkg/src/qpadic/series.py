"""Polynomials, rational functions and truncated series over Q, with the
q-dilation sigma_q, the q-derivative d_q and Gauss norms.

Polynomials are plain lists of Fractions, lowest degree first.  A series
or polynomial "centered at xi" lists its coefficients in powers of (x - xi).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import DivisionByZero, InvalidArgument, PreconditionViolated
from .padic import INF, as_fraction, rational_from_json, rational_to_json, vp
from .qcalc import LogRadius, QContext, q_binomial, q_bracket, q_factorial

# ---------------------------------------------------------------------------
# polynomial helpers


def p_trim(a):
    a = [as_fraction(c) for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def p_deg(a) -> int:
    a = p_trim(a)
    return len(a) - 1 if a else -1


def p_add(a, b):
    n = max(len(a), len(b))
    return p_trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def p_neg(a):
    return [-c for c in a]


def p_sub(a, b):
    return p_add(a, p_neg(b))


def p_scale(a, c):
    c = as_fraction(c)
    return p_trim([x * c for x in a])


def p_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return p_trim(out)


def p_pow(a, n: int):
    out = [Fraction(1)]
    for _ in range(n):
        out = p_mul(out, a)
    return out


def p_shift(a, k: int):
    """Multiply by x^k."""
    return p_trim([Fraction(0)] * k + list(a)) if a else []


def p_divmod(a, b):
    a, b = p_trim(a), p_trim(b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    quo = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    rem = list(a)
    lead = b[-1]
    while len(rem) >= len(b):
        k = len(rem) - len(b)
        c = rem[-1] / lead
        quo[k] = c
        for i, y in enumerate(b):
            rem[i + k] -= c * y
        rem.pop()
        rem = p_trim(rem)
    return p_trim(quo), rem


def p_gcd(a, b):
    a, b = p_trim(a), p_trim(b)
    while b:
        a, b = b, p_divmod(a, b)[1]
    if not a:
        return []
    return p_scale(a, 1 / a[-1])


def p_eval(a, x):
    x = as_fraction(x)
    out = Fraction(0)
    for c in reversed(a):
        out = out * x + c
    return out


def p_compose_affine(a, s, t):
    """Coefficients of a(s*y + t) in y."""
    s, t = as_fraction(s), as_fraction(t)
    out = []
    lin = [t, s]
    for c in reversed(a):
        out = p_add(p_mul(out, lin), [c])
    return out


def p_recenter(a, xi):
    """Coefficients of a in powers of (x - xi)."""
    return p_compose_affine(a, 1, xi)


def p_uncenter(a, xi):
    """Inverse of :func:`p_recenter`."""
    return p_compose_affine(a, 1, -as_fraction(xi))


def p_sigma(a, q, k: int = 1):
    """a(q^k x)."""
    qk = as_fraction(q) ** k
    return p_trim([c * qk ** i for i, c in enumerate(a)])


def p_dq(a, q):
    """(a(qx) - a(x)) / ((q-1) x), coefficientwise [n]_q a_n x^(n-1)."""
    q = as_fraction(q)
    return p_trim([c * q_bracket(n, q) for n, c in enumerate(a)][1:])


def p_deriv(a):
    return p_trim([c * n for n, c in enumerate(a)][1:])


def p_roots_valuations(a, p: int):
    """Valuations of the roots of a (with multiplicity) from its Newton polygon."""
    a = p_trim(a)
    pts = [(i, vp(c, p)) for i, c in enumerate(a) if c != 0]
    if not pts:
        raise InvalidArgument("zero polynomial has no Newton polygon")
    out = []
    # lower convex hull
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    if pts[0][0] > 0:
        out += [INF] * pts[0][0]
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1) / (x2 - x1)
        out += [-slope] * (x2 - x1)
    return out


# ---------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """num/den with gcd removed and a monic denominator."""
    __slots__ = ("num", "den")

    def __init__(self, num, den=(1,)):
        num, den = p_trim(num), p_trim(den)
        if not den:
            raise DivisionByZero("zero denominator")
        g = p_gcd(num, den) if num else [Fraction(1)]
        if len(g) > 1:
            num = p_divmod(num, g)[0]
            den = p_divmod(den, g)[0]
        if not num:
            den = [Fraction(1)]
        lead = den[-1]
        self.num = tuple(c / lead for c in num)
        self.den = tuple(c / lead for c in den)

    @classmethod
    def const(cls, c):
        return cls([as_fraction(c)])

    @classmethod
    def x(cls):
        return cls([0, 1])

    @classmethod
    def lift(cls, v):
        if isinstance(v, RationalFunction):
            return v
        return cls.const(v)

    def is_zero(self) -> bool:
        return not self.num

    def is_poly(self) -> bool:
        return len(self.den) == 1

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = RationalFunction.lift(other)
            except InvalidArgument:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = RationalFunction.lift(other)
        if self.den == o.den:
            return RationalFunction(p_add(self.num, o.num), self.den)
        return RationalFunction(p_add(p_mul(self.num, o.den), p_mul(o.num, self.den)),
                                p_mul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(p_neg(self.num), self.den)

    def __sub__(self, other):
        return self + (-RationalFunction.lift(other))

    def __rsub__(self, other):
        return RationalFunction.lift(other) - self

    def __mul__(self, other):
        o = RationalFunction.lift(other)
        return RationalFunction(p_mul(self.num, o.num), p_mul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of the zero function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        return self * RationalFunction.lift(other).inverse()

    def __rtruediv__(self, other):
        return RationalFunction.lift(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(p_pow(self.num, n), p_pow(self.den, n))

    def __call__(self, x):
        d = p_eval(self.den, x)
        if d == 0:
            raise DivisionByZero(f"pole at {x}")
        return p_eval(self.num, x) / d

    def sigma(self, q, k: int = 1):
        return RationalFunction(p_sigma(self.num, q, k), p_sigma(self.den, q, k))

    def dq(self, q):
        q = as_fraction(q)
        return (self.sigma(q) - self) / RationalFunction([0, q - 1])

    def derivative(self):
        return RationalFunction(p_sub(p_mul(p_deriv(self.num), self.den),
                                      p_mul(self.num, p_deriv(self.den))),
                                p_mul(self.den, self.den))

    def order_at_zero(self) -> int:
        """x-adic order (INF for zero)."""
        if self.is_zero():
            return INF
        lo = next(i for i, c in enumerate(self.num) if c)
        ld = next(i for i, c in enumerate(self.den) if c)
        return lo - ld

    def taylor(self, xi, N: int) -> list:
        """Coefficients in (x - xi) up to order N; requires no pole at xi."""
        num = p_recenter(self.num, xi)
        den = p_recenter(self.den, xi)
        if not den or den[0] == 0:
            raise DivisionByZero(f"pole at {xi}")
        return series_div(num, den, N)

    def gauss_norm(self, xi, r) -> LogRadius:
        return gauss_norm(self, xi, r)

    def to_json(self) -> dict:
        return {"num": [rational_to_json(c) for c in self.num],
                "den": [rational_to_json(c) for c in self.den]}

    @classmethod
    def from_json(cls, d):
        if isinstance(d, dict) and "den" in d and isinstance(d["den"], list):
            return cls([rational_from_json(c) for c in d["num"]],
                       [rational_from_json(c) for c in d["den"]])
        return cls.const(rational_from_json(d))

    def __repr__(self):
        if self.is_poly():
            return f"RF({list(map(str, self.num))})"
        return f"RF({list(map(str, self.num))} / {list(map(str, self.den))})"


def series_div(num, den, N: int) -> list:
    """Power-series quotient num/den to order N (den[0] != 0)."""
    out = []
    num = list(num) + [Fraction(0)] * (N + 1)
    d0 = den[0]
    for n in range(N + 1):
        s = num[n] - sum(den[k] * out[n - k] for k in range(1, min(n, len(den) - 1) + 1))
        out.append(s / d0)
    return out


# ---------------------------------------------------------------------------
# truncated series


@dataclass(frozen=True)
class TruncSeries:
    """sum_{n} coeffs[n] (x - center)^(n + low_order) + O((x - center)^(low_order + N + 1)).

    At a nonzero center the q-operators treat the tracked coefficients as a
    polynomial; results are exact for polynomial inputs.
    """
    coeffs: tuple
    center: Fraction = Fraction(0)
    low_order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))
        object.__setattr__(self, "center", as_fraction(self.center))

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_rational(cls, f: RationalFunction, center, N: int) -> "TruncSeries":
        return cls(tuple(f.taylor(center, N)), center)

    def _same(self, o: "TruncSeries"):
        if o.center != self.center or o.low_order != self.low_order:
            raise InvalidArgument("series with different centers or offsets")

    def __add__(self, o: "TruncSeries"):
        self._same(o)
        n = min(len(self.coeffs), len(o.coeffs))
        return TruncSeries(tuple(a + b for a, b in zip(self.coeffs[:n], o.coeffs[:n])),
                           self.center, self.low_order)

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, c):
        c = as_fraction(c)
        return TruncSeries(tuple(x * c for x in self.coeffs), self.center, self.low_order)

    def __mul__(self, o: "TruncSeries"):
        if o.center != self.center:
            raise InvalidArgument("series with different centers")
        N = min(self.N, o.N)
        out = [Fraction(0)] * (N + 1)
        for i, x in enumerate(self.coeffs[:N + 1]):
            if x:
                for j, y in enumerate(o.coeffs[:N + 1 - i]):
                    out[i + j] += x * y
        return TruncSeries(tuple(out), self.center, self.low_order + o.low_order)

    def sigma(self, q):
        q = as_fraction(q)
        if self.center == 0:
            return TruncSeries(tuple(c * q ** (n + self.low_order) for n, c in enumerate(self.coeffs)),
                               0, self.low_order)
        if self.low_order:
            raise InvalidArgument("Laurent offsets are only supported at center 0")
        # (qx - xi) = q (x - xi) + (q - 1) xi
        out = p_compose_affine(list(self.coeffs), q, (q - 1) * self.center)
        out = (out + [Fraction(0)] * len(self.coeffs))[:len(self.coeffs)]
        return TruncSeries(tuple(out), self.center, 0)

    def dq(self, q):
        q = as_fraction(q)
        if self.center == 0:
            if self.low_order:
                lo = self.low_order
                return TruncSeries(tuple(c * q_bracket_signed(n + lo, q) for n, c in enumerate(self.coeffs)),
                                   0, lo - 1)
            out = [c * q_bracket(n, q) for n, c in enumerate(self.coeffs)][1:]
            return TruncSeries(tuple(out) or (Fraction(0),), 0, 0)
        poly = p_uncenter(list(self.coeffs), self.center)
        out = p_recenter(p_dq(poly, q), self.center)
        out = (out + [Fraction(0)] * len(self.coeffs))[:len(self.coeffs) - 1]
        return TruncSeries(tuple(out) or (Fraction(0),), self.center, 0)

    def gauss_norm(self, r, tail=None):
        return gauss_norm(self, self.center, r, tail=tail)

    def to_json(self) -> dict:
        return {"center": rational_to_json(self.center), "low_order": self.low_order,
                "coeffs": [rational_to_json(c) for c in self.coeffs]}


def q_bracket_signed(n: int, q) -> Fraction:
    """(q^n - 1)/(q - 1) for any integer n."""
    q = as_fraction(q)
    return (q ** n - 1) / (q - 1)


# ---------------------------------------------------------------------------
# operators on polynomials (center 0)


def sigma_q_apply(f, q, k: int = 1):
    q = q.q if isinstance(q, QContext) else as_fraction(q)
    if isinstance(f, RationalFunction):
        return f.sigma(q, k)
    if isinstance(f, TruncSeries):
        for _ in range(k):
            f = f.sigma(q)
        return f
    return p_sigma(f, q, k)


def dq_apply(f, q):
    q = q.q if isinstance(q, QContext) else as_fraction(q)
    if isinstance(f, (RationalFunction, TruncSeries)):
        return f.dq(q)
    return p_dq(f, q)


def dq_iter_normalized(f, k: int, q):
    """d_q^k f / [k]_q!, computed by iterating d_q and dividing once."""
    q = q.q if isinstance(q, QContext) else as_fraction(q)
    for _ in range(k):
        f = dq_apply(f, q)
    c = 1 / q_factorial(k, q)
    if isinstance(f, RationalFunction):
        return f * c
    if isinstance(f, TruncSeries):
        return f.scale(c)
    return p_scale(f, c)


def mono(i: int):
    return [Fraction(0)] * i + [Fraction(1)]


def leibniz_identity_check(f, g, n: int, q) -> bool:
    """d^n(fg) = sum_j binom(n,j)_q d^(n-j)(f)(q^j x) d^j(g) on polynomials."""
    q = as_fraction(q)

    def d(h, k):
        for _ in range(k):
            h = p_dq(h, q)
        return h
    lhs = d(p_mul(f, g), n)
    rhs = []
    for j in range(n + 1):
        term = p_mul(p_sigma(d(f, n - j), q, j), d(g, j))
        rhs = p_add(rhs, p_scale(term, q_binomial(n, j, q)))
    return lhs == p_trim(rhs)



def _diter(h, q, k):
    for _ in range(k):
        h = p_dq(h, q)
    return h


def operator_identity_check(n: int, which: str, q, basis_max: int = 12) -> bool:
    """Check one of the operator identities on x^0 .. x^basis_max.

    ``which`` is one of
      "normalized": d^n/[n]! x^i = binom(i,n)_q x^(i-n)  (zero if i < n)
      "leibniz":    twisted Leibniz rule on monomial pairs
      "sigma":      sigma^n = sum_j binom(n,j)_q (q-1)^j q^(j(j-1)/2) x^j d^j
                            = sum_j prod_{i<j}(q^n - q^i) x^j d^j/[j]!
      "dn":         d^n = prod_{i<n}(sigma - q^i) / ((q-1)^n q^(n(n-1)/2) x^n)
                        = (-1)^n/((q-1)^n x^n) sum_j (-1)^j binom(n,j)_{1/q} q^(-j(j-1)/2) sigma^j
      "xd":         (x d)^n = (q-1)^(-n) sum_j (-1)^(n-j) binom(n,j) sigma^j
    """
    q = as_fraction(q)
    basis = [mono(i) for i in range(basis_max + 1)]
    if which == "normalized":
        for i in range(basis_max + 1):
            lhs = dq_iter_normalized(basis[i], n, q)
            rhs = p_scale(mono(i - n), q_binomial(i, n, q)) if i >= n else []
            if lhs != rhs:
                return False
        return True
    if which == "leibniz":
        return all(leibniz_identity_check(basis[i], basis[j], n, q)
                   for i in range(basis_max + 1) for j in range(basis_max + 1 - i))
    for f in basis:
        if which == "sigma":
            lhs = p_sigma(f, q, n)
            r1, r2 = [], []
            for j in range(n + 1):
                dj = p_shift(_diter(f, q, j), j)
                r1 = p_add(r1, p_scale(dj, q_binomial(n, j, q) * (q - 1) ** j * q ** (j * (j - 1) // 2)))
                c = Fraction(1)
                for i in range(j):
                    c *= q ** n - q ** i
                r2 = p_add(r2, p_scale(dj, c / q_factorial(j, q)))
            if not lhs == r1 == r2:
                return False
        elif which == "dn":
            lhs = p_shift(_diter(f, q, n), n)
            scale = (q - 1) ** n
            prod = list(f)
            for i in range(n):
                prod = p_sub(p_sigma(prod, q), p_scale(prod, q ** i))
            r1 = p_scale(prod, 1 / (scale * q ** (n * (n - 1) // 2)))
            r2 = []
            for j in range(n + 1):
                c = (-1) ** j * q_binomial(n, j, 1 / q) * q ** (-(j * (j - 1) // 2))
                r2 = p_add(r2, p_scale(p_sigma(f, q, j), c))
            r2 = p_scale(r2, Fraction((-1) ** n) / scale)
            if not lhs == r1 == r2:
                return False
        elif which == "xd":
            lhs = list(f)
            for _ in range(n):
                lhs = p_shift(p_dq(lhs, q), 1)
            rhs = []
            for j in range(n + 1):
                rhs = p_add(rhs, p_scale(p_sigma(f, q, j), (-1) ** (n - j) * comb(n, j)))
            rhs = p_scale(rhs, 1 / (q - 1) ** n)
            if lhs != rhs:
                return False
        else:
            raise InvalidArgument(f"unknown identity {which!r}")
    return True


# ---------------------------------------------------------------------------
# Gauss norms


@dataclass(frozen=True)
class TruncatedNorm:
    """Gauss norm of a truncated series, flagged when the tail could dominate."""
    value: LogRadius
    truncation_dominated: bool


def _lr(r):
    return r.r if isinstance(r, LogRadius) else (r if r in (INF, -INF) else as_fraction(r))


def coeff_norm(coeffs, r, p: int, offset: int = 0):
    """min_n v(c_n) + (n + offset) r as an exponent; INF for the zero sequence."""
    best = INF
    for n, c in enumerate(coeffs):
        v = vp(c, p)
        if v == INF:
            continue
        k = n + offset
        val = v if k == 0 else v + k * r
        if val < best:
            best = val
    return best


def gauss_norm(f, xi, r, p: int | None = None, tail=None):
    """Gauss norm of f on the disk around xi with log radius r.

    Returns the LogRadius of ``sup |f_n| R^n`` (the value ``|f(t_{xi,R})|``
    at a generic point).  Rational functions use num/den.  For truncated
    series the result is a :class:`TruncatedNorm`; ``tail`` is a lower bound
    for v(f_n) + n r over untracked n, and when missing the result is flagged
    whenever the minimum sits in the last quarter of the tracked range.
    """
    r = _lr(r)
    xi = as_fraction(xi)
    if p is None:
        raise InvalidArgument("prime p is required")
    if isinstance(f, RationalFunction):
        num = coeff_norm(p_recenter(list(f.num), xi), r, p)
        den = coeff_norm(p_recenter(list(f.den), xi), r, p)
        if num == INF:
            return LogRadius(INF)
        return LogRadius(num - den)
    if isinstance(f, TruncSeries):
        if f.center != xi:
            raise InvalidArgument("norm center must equal the series center")
        vals = []
        for n, c in enumerate(f.coeffs):
            v = vp(c, p)
            k = n + f.low_order
            vals.append(INF if v == INF else (v if k == 0 else v + k * r))
        best = min(vals)
        if tail is not None:
            dominated = not _lr(tail) > best
        else:
            last = len(vals) - max(len(vals) // 4, 1)
            dominated = best != INF and vals.index(best) >= last
        return TruncatedNorm(LogRadius(best), dominated)
    num = coeff_norm(p_recenter(list(f), xi), r, p)
    return LogRadius(num)


def norm_limit(f, xi, radii, p: int, stable: int = 3):
    """Limit of ||f||_xi(R) along a user-supplied increasing radius sequence.

    Returns (last value, converged flag).  The flag is set when the last
    ``stable`` values agree; a strictly growing tail reports divergence.
    """
    vals = [gauss_norm(f, xi, r, p) for r in radii]
    if not vals:
        raise InvalidArgument("empty radius sequence")
    conv = len(vals) >= stable and len(set(v.r for v in vals[-stable:])) == 1
    return vals[-1], conv


def gauss_norm_dq_bound_check(f, xi, r, k: int, ctx: QContext) -> bool:
    """||d^k f/[k]!||_xi(R) <= R^-k ||f||_xi(R) and the twisted reconstruction
    ||f||_xi(R) = sup_n |(d^n f/[n]!)(xi)| R^n, for polynomials f (center 0)."""
    from .twisted import to_twisted
    p, q = ctx.p, ctx.q
    r = _lr(r)
    xi = as_fraction(xi)
    v_disc = vp((1 - q) * xi, p)
    if not v_disc >= r:
        raise PreconditionViolated("need |(1-q) xi| <= R")
    fn = gauss_norm(f, xi, r, p)
    dk = gauss_norm(dq_iter_normalized(f, k, q), xi, r, p)
    ok_bound = dk.r >= fn.r - k * r
    tw = to_twisted(f, xi, ctx)
    rec = coeff_norm(tw.coeffs, r, p)
    return ok_bound and LogRadius(rec) == fn


def deformation_derivative_compare(f, g, eps, ctx: QContext) -> bool:
    """If ||f - g||_xi(1) <= eps then ||df/dx - d_q g||_xi(1) <= eps.

    ``f`` is a polynomial (center 0 list), ``g`` a TwistedSeries; both are
    compared after resummation at the center of ``g``.
    """
    from .twisted import from_twisted
    p, q = ctx.p, ctx.q
    eps = _lr(eps)
    xi = g.center
    gpoly = from_twisted(g, ctx)
    if coeff_norm(p_recenter(f, xi), 0, p) < 0 or coeff_norm(p_recenter(gpoly, xi), 0, p) < 0:
        raise PreconditionViolated("inputs must be bounded by 1 on the unit disk")
    if not ctx.v_one_minus_q >= eps:
        raise PreconditionViolated("need |1 - q| <= eps")
    before = coeff_norm(p_recenter(p_sub(f, gpoly), xi), 0, p)
    if not before >= eps:
        raise PreconditionViolated("hypothesis ||f - g|| <= eps fails")
    after = coeff_norm(p_recenter(p_sub(p_deriv(f), p_dq(gpoly, q)), xi), 0, p)
    return after >= eps
