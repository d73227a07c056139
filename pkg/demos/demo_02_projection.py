"""
Metric projection onto a line
=============================

P(x) onto span[y] is an interval of coefficients.  The exact solver walks the
breakpoints of a convex piecewise linear function; certificates explain the
answer.
"""

from fractions import Fraction

from lorentzapprox.presets import get
from lorentzapprox.projection import (dual_certificate, freud_check, projection_interval,
                                      residual_norm, strong_unicity_estimate)
from lorentzapprox.seq import Seq
from lorentzapprox.weights import Weight

w = Weight.harmonic()
x, y = Seq([3, 1]), Seq([1, -2])

# %%
# A flat minimum: every c in [-1/2, 2/3] is a best approximation
P = projection_interval(x, y, w)
print(f"P = [{P.lo}, {P.hi}], dist = {P.dist.value}")
for c in (Fraction(-1), P.lo, 0, P.hi, Fraction(1)):
    print(f"  |x - ({c}) y| = {residual_norm(x, y, c, w).value}")

# %%
# The supporting functional at the optimum annihilates y
cert = P.certificate
print("f(x - c y) =", cert.value, " f(y) =", cert.f_y)

# %%
# Away from the interval there is a descent direction instead
print(dual_certificate(x, y, 2, w))

# %%
# Certified mode: the same answer from float enclosures
Q = projection_interval(x, y, w, tol=1e-9, mode="certified")
print("certified outer interval", Q.outer)

# %%
# A strongly unique case and the Lipschitz bound it gives
pr = get("example1")
r = strong_unicity_estimate(pr.x, pr.y, pr.w)
ok, lhs, rhs = freud_check(pr.x, pr.x + Seq([Fraction(1, 10 ** 4), 0]), pr.y, pr.w, r)
print(f"r = {float(r):.5f}; shift {lhs:.2e} <= bound {rhs:.2e}: {ok}")
