"""Twisted Taylor expansions in the basis (x - xi)_{q,n} = (x - xi)(x - q xi)...(x - q^(n-1) xi),
their products, convergence criteria and q-disk geometry."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConvergenceViolation, DivisionByZero, InvalidArgument, NotAQDisk
from .padic import as_fraction, rational_to_json, vp
from .qcalc import LogRadius, QContext, RadiusEstimate, q_binomial, radius_from_valuations
from .series import (RationalFunction, dq_iter_normalized, p_add, p_eval, p_mul,
                     p_scale, p_trim)


@dataclass(frozen=True)
class TwistedSeries:
    """sum_n coeffs[n] (x - center)_{q,n}, truncated after len(coeffs) terms."""
    coeffs: tuple
    center: Fraction
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(as_fraction(c) for c in self.coeffs))
        object.__setattr__(self, "center", as_fraction(self.center))
        object.__setattr__(self, "q", as_fraction(self.q))

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1

    def dq(self) -> "TwistedSeries":
        """d_q (x - xi)_{q,n} = [n]_q (x - xi)_{q,n-1}."""
        q = self.q
        out = [c * (q ** n - 1) / (q - 1) for n, c in enumerate(self.coeffs)][1:]
        return TwistedSeries(tuple(out) or (Fraction(0),), self.center, q)

    def value_on_orbit(self, i: int) -> Fraction:
        """f(q^i xi) = sum_{n<=i} prod_{j<n}(q^i - q^j) xi^n f_n (exact, finite)."""
        q, xi = self.q, self.center
        total = Fraction(0)
        c = Fraction(1)
        for n in range(min(i, self.N) + 1):
            total += c * xi ** n * self.coeffs[n]
            c *= q ** i - q ** n
        return total

    def to_json(self) -> dict:
        return {"basis": "twisted", "center": rational_to_json(self.center), "low_order": 0,
                "coeffs": [rational_to_json(c) for c in self.coeffs]}


def _qof(ctx):
    return ctx.q if isinstance(ctx, QContext) else as_fraction(ctx)


def twisted_basis_poly(n: int, xi, q) -> list:
    """(x - xi)_{q,n} as a center-0 polynomial."""
    out = [Fraction(1)]
    for i in range(n):
        out = p_mul(out, [-as_fraction(xi) * as_fraction(q) ** i, Fraction(1)])
    return out


def to_twisted(f, xi, ctx, N: int | None = None) -> TwistedSeries:
    """Coefficients a_n = (d_q^n f / [n]_q!)(xi).

    ``f`` is a polynomial (center-0 list) or a RationalFunction; rational
    functions need ``N``.  At xi != 0 the coefficients are the q-divided
    differences of f on xi, q xi, q^2 xi, ... (Newton interpolation).
    """
    q = _qof(ctx)
    xi = as_fraction(xi)
    if isinstance(f, RationalFunction):
        if N is None:
            if f.is_poly():
                return to_twisted(list(f.num), xi, ctx)
            raise InvalidArgument("order N is required for rational functions")
        if xi == 0:
            return TwistedSeries(tuple(f.taylor(0, N)), xi, q)
        vals = []
        for i in range(N + 1):
            try:
                vals.append(f(xi * q ** i))
            except DivisionByZero:
                raise DivisionByZero(f"pole at q^{i} xi") from None
        return TwistedSeries(tuple(_divided_differences(vals, xi, q)), xi, q)
    f = p_trim(f)
    deg = len(f) - 1
    n_max = max(deg, 0) if N is None else N
    coeffs = []
    for n in range(n_max + 1):
        coeffs.append(p_eval(dq_iter_normalized(f, n, q), xi) if n <= deg else Fraction(0))
    return TwistedSeries(tuple(coeffs), xi, q)


def _divided_differences(vals, xi, q):
    nodes = [xi * q ** i for i in range(len(vals))]
    table = list(vals)
    out = [table[0]]
    for k in range(1, len(vals)):
        table = [(table[i + 1] - table[i]) / (nodes[i + k] - nodes[i]) for i in range(len(table) - 1)]
        out.append(table[0])
    return out


def from_twisted(g: TwistedSeries, ctx=None, rho=None) -> list:
    """Resum to a center-0 polynomial.  ``rho`` (the coefficient radius of the
    full series) is checked against |(q-1) xi| when given."""
    if rho is not None and ctx is not None:
        cls = convergence_classify(rho, g.center, ctx)
        if cls != "analytic_on_disk":
            raise ConvergenceViolation(f"twisted series does not converge ({cls})")
    out = []
    for n, c in enumerate(g.coeffs):
        if c:
            out = p_add(out, p_scale(twisted_basis_poly(n, g.center, g.q), c))
    return out


def elementary_symmetric_table(q, n_max: int):
    """e[n][j] = e_j(0, 1-q, ..., 1-q^(n-1)) for n <= n_max."""
    q = as_fraction(q)
    table = [[Fraction(1)]]
    for n in range(n_max):
        prev = table[-1]
        a = 1 - q ** n
        row = [(prev[j] if j < len(prev) else 0) + (a * prev[j - 1] if j >= 1 else 0)
               for j in range(len(prev) + 1)]
        table.append(row)
    return table


def twisted_to_taylor(g: TwistedSeries) -> list:
    """Coefficients alpha_k in powers of (x - xi), using
    (x - xi)_{q,n} = sum_k xi^(n-k) e_{n-k}(0, 1-q, ..., 1-q^(n-1)) (x - xi)^k."""
    e = elementary_symmetric_table(g.q, g.N)
    xi = g.center
    out = [Fraction(0)] * (g.N + 1)
    for n, a in enumerate(g.coeffs):
        if a:
            for k in range(n + 1):
                out[k] += a * xi ** (n - k) * e[n][n - k]
    return out


def falling(y, m: int, q) -> Fraction:
    """(y - 1)_m in the product notation prod_{i<m}(y - q^i), used as (q^k - 1)_m."""
    out = Fraction(1)
    for i in range(m):
        out *= y - q ** i
    return out


def twisted_mul(f: TwistedSeries, g: TwistedSeries) -> TwistedSeries:
    """h_n = sum_j sum_{h=j}^n binom(h,j)_q f_h (q^(n-j) - 1)_(h-j) xi^(h-j) g_(n-j)."""
    if f.center != g.center or f.q != g.q:
        raise InvalidArgument("twisted series with different centers or q")
    q, xi = f.q, f.center
    N = min(f.N, g.N)
    out = []
    for n in range(N + 1):
        s = Fraction(0)
        for j in range(n + 1):
            gj = g.coeffs[n - j]
            if not gj:
                continue
            qn = q ** (n - j)
            for h in range(j, n + 1):
                fh = f.coeffs[h]
                if fh:
                    s += q_binomial(h, j, q) * fh * falling(qn, h - j, q) * xi ** (h - j) * gj
        out.append(s)
    return TwistedSeries(tuple(out), xi, q)


def basis_product(l: int, k: int, xi, q) -> TwistedSeries:
    """(x - xi)_l (x - xi)_k = sum_n binom(l, n-k)_q (q^k - 1)_(l+k-n) xi^(l+k-n) (x - xi)_n."""
    q, xi = as_fraction(q), as_fraction(xi)
    coeffs = [q_binomial(l, n - k, q) * falling(q ** k, l + k - n, q) * xi ** (l + k - n)
              if n >= k else Fraction(0) for n in range(l + k + 1)]
    return TwistedSeries(tuple(coeffs), xi, q)


def twisted_radius(g, p: int, horizon: int | None = None) -> RadiusEstimate:
    """Coefficient radius liminf |a_n|^(-1/n) of a TwistedSeries or of a
    valuation rule ``n -> v(a_n)``."""
    if isinstance(g, TwistedSeries):
        w = {n: vp(c, p) for n, c in enumerate(g.coeffs)}
        return radius_from_valuations(w, p, horizon if horizon is not None else g.N)
    if horizon is None:
        raise InvalidArgument("horizon needed for a valuation rule")
    return radius_from_valuations({n: g(n) for n in range(horizon + 1)}, p, horizon)


def convergence_classify(rho, xi, ctx: QContext) -> str:
    """Twisted series with coefficient radius rho converge on the disk iff
    rho > |(q - 1) xi|; equality diverges."""
    r = rho.r if isinstance(rho, LogRadius) else as_fraction(rho)
    b = vp((ctx.q - 1) * as_fraction(xi), ctx.p)
    if r < b:
        return "analytic_on_disk"
    if r > b:
        return "divergent"
    return "boundary"


@dataclass(frozen=True)
class QDiskSpec:
    xi: Fraction
    rho: LogRadius
    n0: int
    rho_tilde: LogRadius

    def to_json(self) -> dict:
        return {"xi": rational_to_json(self.xi), "rho": self.rho.to_json(), "n0": self.n0,
                "rho_tilde": self.rho_tilde.to_json()}


def _pi_q_norm(ctx: QContext, n: int) -> Fraction:
    c = ctx.with_q(ctx.q ** n, strict=False)
    return c.pi_q_norm.r


def qdisk_parameters(rho, xi, ctx: QContext, n_cap: int = 10 ** 4) -> QDiskSpec:
    """Number of components n0 and their radius for the q-disk of a twisted
    series at xi with coefficient radius rho."""
    xi = as_fraction(xi)
    if xi == 0:
        raise InvalidArgument("xi must be nonzero")
    rho = LogRadius(rho)
    p, q = ctx.p, ctx.q
    base = vp(q - 1, p) + vp(xi, p) + ctx.pi_q_norm.r
    s = rho.r - base           # exponent of rho / |(q-1) xi pi_q|
    if not s < 0:
        raise NotAQDisk("rho / |(q-1) xi pi_q| must exceed 1")
    for n0 in range(1, n_cap + 1):
        if n0 * s + _pi_q_norm(ctx, n0) < 0:
            tilde = n0 * s + vp(q ** n0 - 1, p) + vp(xi, p) + _pi_q_norm(ctx, n0)
            return QDiskSpec(xi, rho, n0, LogRadius(tilde))
    raise NotAQDisk(f"no component count found below {n_cap}")


def qdisk_components(f: RationalFunction, xi, n0: int, ctx: QContext, N: int) -> tuple:
    """Expansions of f in the q^n0-twisted bases at xi, q xi, ..., q^(n0-1) xi."""
    qt = ctx.q ** n0
    xi = as_fraction(xi)
    return tuple(to_twisted(f, xi * ctx.q ** i, qt, N) for i in range(n0))
