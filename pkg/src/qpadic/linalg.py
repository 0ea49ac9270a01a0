"""Small dense matrices over an exact field (Fractions or RationalFunctions)."""
from __future__ import annotations

from fractions import Fraction

from .errors import DivisionByZero, InvalidArgument


def _zero_like(x):
    return x * 0


def _is_zero(x) -> bool:
    if hasattr(x, "is_zero"):
        return x.is_zero()
    return x == 0


def identity(n: int, one=Fraction(1)):
    zero = one * 0
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(n: int, m: int | None = None, zero=Fraction(0)):
    m = n if m is None else m
    return [[zero for _ in range(m)] for _ in range(n)]


def shape(a):
    return len(a), len(a[0]) if a else 0


def madd(a, b):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def msub(a, b):
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def mscale(a, c):
    return [[x * c for x in r] for r in a]


def mmap(f, a):
    return [[f(x) for x in r] for r in a]


def mmul(a, b):
    n, k = shape(a)
    k2, m = shape(b)
    if k != k2:
        raise InvalidArgument("shape mismatch")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            s = None
            for t in range(k):
                x = a[i][t]
                if _is_zero(x) or _is_zero(b[t][j]):
                    continue
                term = x * b[t][j]
                s = term if s is None else s + term
            row.append(s if s is not None else _zero_like(a[i][0]))
        out.append(row)
    return out


def transpose(a):
    return [list(r) for r in zip(*a)]


def det(a):
    """Determinant by Gaussian elimination over a field."""
    n = len(a)
    m = [list(r) for r in a]
    sign = 1
    result = None
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(m[r][c])), None)
        if piv is None:
            return _zero_like(a[0][0])
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        result = m[c][c] if result is None else result * m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            if _is_zero(m[r][c]):
                continue
            f = m[r][c] * inv
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    if result is None:
        return Fraction(1)
    return result if sign > 0 else -result


def det_cofactor(a):
    """Laplace expansion; an independent route used as an oracle."""
    n = len(a)
    if n == 1:
        return a[0][0]
    total = None
    for j in range(n):
        if _is_zero(a[0][j]):
            continue
        minor = [r[:j] + r[j + 1:] for r in a[1:]]
        term = a[0][j] * det_cofactor(minor)
        term = term if j % 2 == 0 else -term
        total = term if total is None else total + term
    return total if total is not None else _zero_like(a[0][0])


def inverse(a):
    n = len(a)
    one = a[0][0] * 0 + 1
    m = [list(r) + identity(n, one)[i] for i, r in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(m[r][c])), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for r in range(n):
            if r != c and not _is_zero(m[r][c]):
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [r[n:] for r in m]


def solve(a, b):
    """Solve a X = b for square a."""
    return mmul(inverse(a), b)


def left_kernel(a):
    """A nonzero row vector B with B a = 0, or None."""
    at = transpose(a)
    n = len(at[0])
    m = [list(r) for r in at]
    rows = len(m)
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, rows) if not _is_zero(m[i][c])), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and not _is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(n) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    vec = [Fraction(0)] * n
    vec[fc] = Fraction(1)
    for i, c in enumerate(pivots):
        vec[c] = -m[i][fc]
    return vec


def kron(a, b):
    out = []
    for r in a:
        for s in b:
            out.append([x * y for x in r for y in s])
    return out
