"""Exact computations for p-adic q-difference equations with |q| = 1.

Modules: ``padic`` (valuations and p-adic scalars), ``qcalc`` (q-analogues,
log-radii, q-types), ``series`` (polynomials, rational functions, Gauss
norms), ``twisted`` (twisted Taylor expansions), ``systems`` (q-difference
systems and generic radii), ``regsing`` (regular singular normalization and
transfer bounds), ``frobenius`` (weak Frobenius structure) and ``cli``.
"""
from .errors import QPadicError
from .qcalc import LogRadius, QContext
from .series import RationalFunction
from .systems import QDiffSystem

__all__ = ["LogRadius", "QContext", "QDiffSystem", "QPadicError", "RationalFunction"]
__version__ = "0.1.0"
