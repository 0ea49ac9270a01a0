# coding: utf-8

# # Regular singular gauges and Frobenius structures

# In[1]:

from fractions import Fraction

from qpadic.qcalc import QContext
from qpadic.series import RationalFunction as RF
from qpadic.systems import QDiffSystem, generic_radius_estimate, q_deformation_run
from qpadic.regsing import regular_singular_solve, radius_of_gauge, transfer_bound
from qpadic.frobenius import frobenius_H, frobenius_F, reconstruct_F

ctx = QContext()
q = ctx.q


# A(x) = 1 + x.  The gauge U with A(x) U(x) = U(qx) A(0) has coefficients
# 1/((q-1)(q^2-1)...(q^m-1)); its radius meets the transfer bound exactly.

# In[2]:

sys = QDiffSystem([[RF([1, 1])]], ctx)
sol = regular_singular_solve(sys, 64)
print(sol.U[:4])
r = radius_of_gauge(sol, ctx.p)
g = generic_radius_estimate(sys)
b = transfer_bound(g.chi, [1], ctx, g.certified, horizon=400)
print(r.log_radius, b.regime, b.bound)


# Frobenius pull-back of A = (1 - x)/(1 - qx), solved by 1/(1 - x).
# Averaging over cube roots of unity gives H, and A_[H] only has powers of
# x^3; rebuilt as a rational function it is (1 - X)/(1 - q^3 X).

# In[3]:

sys = QDiffSystem([[RF([1, -1], [1, -q])]], ctx)
H = frobenius_H(sys, 1, N=36, eigs=[1])
F = frobenius_F(sys, H)
print(F.off_lattice_valuation, F.charpoly_valuation)
print(reconstruct_F(F, ctx.p))


# q-deformation of dY/dx = Y: with q_k = 1 + 3^k the distance to the
# exponential shrinks by a factor 3 per step.

# In[4]:

for xi in (0, 3):
    rep = q_deformation_run([[RF.const(1)]], xi, range(1, 7), 1, 40, ctx)
    print(xi, [str(d) for d in rep.distances], rep.monotone)
