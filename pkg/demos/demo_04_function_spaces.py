"""
Function spaces on finite grids
===============================

Rearrangement-invariant norms of step functions, best approximation from
monotone classes, property (S) on shrinking bumps and a projection that is
not continuous.
"""

import numpy as np

from lorentzapprox.fspace import (ConstraintClass, FNormSpec, GridFunction, GridSpace, fnorm,
                                  metric_projection_set, minimizing_sequence_probe,
                                  property_s_probe, two_point)

g = GridSpace.uniform(8, 1.0)
f = GridFunction(g, [0.0, 1.0, 0.5, 1.5, 1.0, 2.0, 1.5, 0.5])

# %%
# A few norms of the same function
for spec in (FNormSpec.l1(), FNormSpec.lambda_phi("log1p"), FNormSpec.gamma(2, "one"),
             FNormSpec.bounded_integral()):
    print(f"{spec.variant:17s} {fnorm(f, spec):.6f}")

# %%
# Nearest increasing functions under Gamma_{2,1}, by enumeration and by a
# minimizing sequence
spec, C = FNormSpec.gamma(2, "one"), ConstraintClass("increasing")
P = metric_projection_set(f, C, spec)
pr = minimizing_sequence_probe(f, C, spec)
print("dist", P.dist, "minimizers", [m.tolist() for m in P.minimizers])
print("probe history", np.round(pr.history, 6).tolist())

# %%
# Property (S): the remainder shrinks like the bump measure
for rep in property_s_probe(FNormSpec.lambda_phi("log1p"), 1.0, (64, 512, 4096)):
    print(f"cells {rep.cells:5d}  last |r| {abs(rep.r[-1]):.2e}  C {rep.fitted_C:.4f}")

# %%
# Two points: the reverse deviation stays at 2 however small the perturbation
rep = two_point(6)
print("reverse", rep.reverse.tolist(), "forward", rep.forward.tolist())
