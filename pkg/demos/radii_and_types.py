# coding: utf-8

# # Radii of convergence in valuation space
#
# Radii are kept as exact exponents: a LogRadius r stands for the radius
# p^-r.  Estimates read the valuations v(c_n) of the coefficients up to a
# horizon H, look for an exact pattern, and otherwise report the window
# statistic over (H/2, H].

# In[1]:

from fractions import Fraction

from qpadic.qcalc import QContext, q_type, phi_radius, phi_radius_prediction
from qpadic.series import RationalFunction as RF
from qpadic.systems import QDiffSystem, generic_radius_estimate, dwork_frobenius_radius, dq_companion_coefficients

ctx = QContext()


# The rank one system y(qx) = 2 y(x).  Its generic radius is |q - 1| |pi_q|,
# log radius 1 + 1/2 at p = 3.  The Dwork-Frobenius route gives the same number.

# In[2]:

sys = QDiffSystem([[RF.const(2)]], ctx)
g = generic_radius_estimate(sys)
print(g.chi, g.certified)
print(dwork_frobenius_radius(dq_companion_coefficients(sys), 0, ctx))


# q-types.  The direct mode reads v(alpha - q^n); the formula mode goes
# through log(alpha)/log(q).

# In[3]:

for a in (2, 7, 10, 16, Fraction(7, 4)):
    d = q_type(a, ctx, 2000)
    f = q_type(a, ctx, 2000, mode="formula")
    print(a, d.log_radius, f.log_radius, d.certified, d.pattern)


# The basic hypergeometric series at alpha = 2: its coefficients have
# valuation exactly n, so the measured radius is 3 (log radius -1), while
# |pi| type_q(2) is 3^(-1/2).  The acceptance suite records this mismatch.

# In[4]:

m = phi_radius(2, ctx, 400)
print(m.log_radius, m.certified, phi_radius_prediction(2, ctx, 400).log_radius)
