"""Exact p-adic scalars and valuation bookkeeping.

Two layers live here.  Most of the library computes with exact rationals
(``fractions.Fraction``) and reads off p-adic valuations with :func:`vp`;
rationals embed in Q_p, so this loses nothing.  :class:`PadicScalar` is the
truncated base-p expansion with tracked absolute precision, used for
serialization and for the precision rules of scalar arithmetic.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import DivisionByZero, InvalidArgument, PrecisionExhausted

INF = math.inf

Rational = Union[int, Fraction]


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, dict) and "num" in x:
        return Fraction(int(x["num"]), int(x["den"]))
    raise InvalidArgument(f"not an exact rational: {x!r}")


def _vint(n: int, p: int) -> int:
    n = abs(n)
    k = 0
    # strip big powers first so huge valuations stay cheap
    pk, step = p, 1
    while n % pk == 0:
        n //= pk
        k += step
        pk, step = pk * pk, step * 2
    while step > 1:
        pk = p ** (step // 2)
        step //= 2
        while n % pk == 0:
            n //= pk
            k += step
    return k


def vp(x, p: int):
    """Exact p-adic valuation of a rational; ``INF`` for zero."""
    if isinstance(x, int):
        return INF if x == 0 else _vint(x, p)
    x = as_fraction(x)
    if x == 0:
        return INF
    return _vint(x.numerator, p) - _vint(x.denominator, p)


def unit_part(x, p: int) -> Fraction:
    x = as_fraction(x)
    return x / Fraction(p) ** vp(x, p)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def rational_mod(x, p: int, k: int) -> int:
    """Residue in [0, p^k) of a p-integral rational."""
    x = as_fraction(x)
    m = p ** k
    if x.denominator % p == 0:
        raise InvalidArgument("rational is not p-integral")
    return x.numerator * pow(x.denominator, -1, m) % m


def rational_to_json(x) -> dict:
    x = as_fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def rational_from_json(d) -> Fraction:
    if isinstance(d, (int, str)):
        return Fraction(d)
    return Fraction(int(d["num"]), int(d["den"]))


@dataclass(frozen=True)
class Valuation:
    """A valuation read from a finite-precision value.

    ``exact`` is False when the value was indistinguishable from zero; then
    ``value`` is only a lower bound.
    """
    value: object
    exact: bool = True

    def __le__(self, other):
        return self.value <= _val(other)

    def __lt__(self, other):
        return self.value < _val(other)

    def __ge__(self, other):
        return self.value >= _val(other)

    def __gt__(self, other):
        return self.value > _val(other)


def _val(x):
    return x.value if isinstance(x, Valuation) else x


@dataclass(frozen=True)
class PrecisionPolicy:
    padic_digits: int = 64
    series_order: int = 128

    def __post_init__(self):
        if self.padic_digits < 8 or self.series_order < 4:
            raise InvalidArgument("precision floor is M >= 8 and N >= 4")

    @classmethod
    def from_env(cls, default: "PrecisionPolicy | None" = None) -> "PrecisionPolicy":
        """Read ``QPADIC_PRECISION`` given as ``M,N`` (either part optional)."""
        base = default or cls()
        raw = os.environ.get("QPADIC_PRECISION", "").strip()
        if not raw:
            return base
        parts = [s.strip() for s in raw.split(",")]
        try:
            m = int(parts[0]) if parts[0] else base.padic_digits
            n = int(parts[1]) if len(parts) > 1 and parts[1] else base.series_order
        except ValueError as exc:
            raise InvalidArgument(f"bad QPADIC_PRECISION value {raw!r}") from exc
        return cls(m, n)


@dataclass(frozen=True)
class PadicScalar:
    """Element of Q_p known modulo p^prec.

    The value is ``p**unit_order * sum(d_i p^i)`` with ``len(digits) ==
    prec - unit_order`` and ``digits[0] != 0`` unless the value is zero to
    precision, in which case ``digits`` is empty and ``unit_order == prec``.
    """
    p: int
    unit_order: int
    digits: tuple
    prec: int

    @classmethod
    def from_rational(cls, x, p: int, prec: int = 64) -> "PadicScalar":
        x = as_fraction(x)
        v = vp(x, p)
        if v == INF or v >= prec:
            return cls(p, prec, (), prec)
        n = prec - v
        u = unit_part(x, p)
        r = rational_mod(u, p, n)
        digits = []
        for _ in range(n):
            r, d = divmod(r, p)
            digits.append(d)
        return cls(p, v, tuple(digits), prec)

    @classmethod
    def zero(cls, p: int, prec: int = 64) -> "PadicScalar":
        return cls(p, prec, (), prec)

    def is_zero(self) -> bool:
        return not self.digits

    @property
    def relative_precision(self) -> int:
        return len(self.digits)

    def unit_int(self) -> int:
        return sum(d * self.p ** i for i, d in enumerate(self.digits))

    def to_rational(self) -> Fraction:
        """Canonical representative ``p^unit_order * (integer in [0, p^rel))``."""
        return Fraction(self.p) ** self.unit_order * self.unit_int()

    def valuation(self) -> Valuation:
        if self.is_zero():
            return Valuation(self.prec, exact=False)
        return Valuation(self.unit_order, exact=True)

    def _check(self, other):
        if not isinstance(other, PadicScalar):
            other = PadicScalar.from_rational(other, self.p, self.prec)
        if other.p != self.p:
            raise InvalidArgument("mixing different primes")
        return other

    def _lift(self, x: Fraction, prec: int) -> "PadicScalar":
        return PadicScalar.from_rational(x, self.p, prec)

    def __add__(self, other):
        other = self._check(other)
        prec = min(self.prec, other.prec)
        return self._lift(self.to_rational() + other.to_rational(), prec)

    __radd__ = __add__

    def __neg__(self):
        return self._lift(-self.to_rational(), self.prec)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        prec = min(self.prec + other.unit_order, other.prec + self.unit_order)
        return self._lift(self.to_rational() * other.to_rational(), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise DivisionByZero("divisor is zero to working precision")
        k = other.unit_order
        if self.is_zero():
            prec = self.prec - k
        else:
            prec = min(self.prec - k, other.prec - 2 * k + self.unit_order)
        val = self.unit_order - k
        if not self.is_zero() and prec - val < 1:
            raise PrecisionExhausted("quotient has no significant digit left")
        return self._lift(self.to_rational() / other.to_rational(), prec)

    def __rtruediv__(self, other):
        return self._check(other) / self

    def congruent(self, x, upto: int | None = None) -> bool:
        """True when ``x`` agrees with self modulo p^upto (default: prec)."""
        upto = self.prec if upto is None else upto
        return vp(as_fraction(x) - self.to_rational(), self.p) >= upto

    def to_json(self) -> dict:
        return {"p": self.p, "unit_order": self.unit_order, "digits": list(self.digits)}

    @classmethod
    def from_json(cls, d: dict) -> "PadicScalar":
        p = int(d["p"])
        digits = tuple(int(x) for x in d["digits"])
        if any(not 0 <= x < p for x in digits):
            raise InvalidArgument("digit out of range")
        if digits and digits[0] == 0:
            raise InvalidArgument("leading digit must be nonzero")
        uo = int(d["unit_order"])
        return cls(p, uo, digits, uo + len(digits))


def scalar_arith(a: PadicScalar, b: PadicScalar, op: str) -> PadicScalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise InvalidArgument(f"unknown operation {op!r}")


def valuation(a) -> Valuation:
    if isinstance(a, PadicScalar):
        return a.valuation()
    raise InvalidArgument("expected a PadicScalar")


def padic_log(x, p: int, prec: int) -> Fraction:
    """Truncated p-adic logarithm of x with v(x-1) > 1/(p-1), exact mod p^prec."""
    x = as_fraction(x)
    u = x - 1
    vu = vp(u, p)
    if vu == INF:
        return Fraction(0)
    if not vu * (p - 1) > 1:
        raise InvalidArgument("logarithm series needs v(x-1) > 1/(p-1)")
    # terms past kmax have valuation >= k*v(u) - log_p(k) > prec
    kmax = 1
    while kmax * vu - math.log(kmax, p) < prec + 1:
        kmax += 1
    total = Fraction(0)
    power = Fraction(1)
    for k in range(1, kmax + 1):
        power *= u
        total += (-1) ** (k + 1) * power / k
    return total


def log_ratio(alpha, q, p: int, prec: int):
    """(log alpha / log q) as a p-adic number known mod p^prec.

    Returns ``(value, known_prec)`` with ``value`` a Fraction representative.
    """
    la = padic_log(alpha, p, prec + 8)
    lq = padic_log(q, p, prec + 8)
    if lq == 0:
        raise InvalidArgument("log q vanishes")
    known = prec + 8 - vp(lq, p)
    val = la / lq
    return val, known


def zp_representative(x: Fraction, p: int, prec: int) -> int:
    """Integer in [0, p^prec) congruent to a p-integral rational."""
    return rational_mod(x, p, prec)
