"""
Norms on d(w,1) with infinite tails
===================================

Sequences are an exact head plus an analytic tail rule.  Norms come back as
enclosures: a value and an error bound.
"""

from fractions import Fraction

import numpy as np

from lorentzapprox.norms import (decreasing_rearrangement, lorentz_norm, marcinkiewicz_norm,
                                 variation_sequence)
from lorentzapprox.seq import Seq
from lorentzapprox.tails import PowerTail
from lorentzapprox.weights import Weight

w = Weight.harmonic()

# %%
# A finite vector: the norm is exact
x = Seq([3, -1, Fraction(1, 2)])
r = decreasing_rearrangement(x)
print("x* =", r.values, "from positions", r.permutation)
print("|x| =", lorentz_norm(x, w).value)

# %%
# A tail 1/n^2 from n = 1: sum 1/n^3 = zeta(3), to 1e-10
u = Seq([], PowerTail(1, 2, start=1))
b = lorentz_norm(u, w, tol=1e-10)
print(f"|u| = {float(b.value):.12f} +- {b.error:.1e}")

# %%
# The dual norm, sup of prefix-sum ratios
print("|(1, 1)|_* =", marcinkiewicz_norm(Seq([1, 1]), w).value)

# %%
# Total variation of the tail, z(j) = sum_{l >= j} |y(l) - y(l+1)|
y = Seq([-1], PowerTail(1, 1, start=2))
z = variation_sequence(y)
print("z(2..6) =", [float(v) for v in z.entries(6)[1:]])
print("1/j     =", (1 / np.arange(2, 7)).tolist())
