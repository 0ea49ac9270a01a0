# coding: utf-8

# # Twisted Taylor expansions
#
# A polynomial can be written in powers of x, or around a point xi in the
# "twisted" basis (x - xi)(x - q xi)...(x - q^(n-1) xi).  The twisted
# coefficients are the normalized q-derivatives d_q^n f / [n]_q! at xi, so the
# basis plays the role (x - xi)^n plays for ordinary Taylor series.

# In[1]:

from fractions import Fraction

from qpadic.qcalc import QContext, LogRadius
from qpadic.series import p_mul, gauss_norm
from qpadic.twisted import to_twisted, from_twisted, twisted_mul, twisted_to_taylor, qdisk_parameters

ctx = QContext()          # p = 3, q = 4
print(ctx.p, ctx.q)


# The square (x - xi)^2 only needs two basis elements; the middle one picks up
# the factor (q - 1) xi from the second root q xi.

# In[2]:

xi = Fraction(3)
f = p_mul([-xi, 1], [-xi, 1])
g = to_twisted(f, xi, ctx)
print(g.coeffs)           # (0, (q-1) xi, 1) = (0, 9, 1)


# Going back is exact, and products in the twisted basis match products of
# polynomials.

# In[3]:

print(from_twisted(g) == f)
h = to_twisted([1, 2, 5], xi, ctx, 6)
print(twisted_mul(to_twisted(f, xi, ctx, 6), h).coeffs == to_twisted(p_mul(f, [1, 2, 5]), xi, ctx, 6).coeffs)


# Re-expanding in ordinary powers of (x - xi) recovers the usual Taylor
# coefficients.

# In[4]:

print(twisted_to_taylor(g))   # (x - 3)^2 -> [0, 0, 1]


# Gauss norms: |f|_xi(R) is read off either basis once |(q-1) xi| <= R.

# In[5]:

for r in (0, 1, 2):
    print(r, gauss_norm(f, xi, r, ctx.p))


# How many q-disk components does a disk around 1 of log radius 7/5 need?

# In[6]:

d = qdisk_parameters(LogRadius(Fraction(7, 5)), 1, ctx)
print(d.n0, d.rho_tilde)
