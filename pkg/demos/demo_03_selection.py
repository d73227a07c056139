"""
Chebyshev lines and continuous selections
=========================================

The four bundled examples: one strongly unique line and three lines that are
not Chebyshev.  Whether the projection has a continuous selection depends on
whether the transported sequence is eventually monotone.
"""

from lorentzapprox.cli import example_row
from lorentzapprox.norms import lorentz_norm
from lorentzapprox.presets import get
from lorentzapprox.selection import (admits_continuous_selection, build_witnesses,
                                     oscillation_subsequence, verify_separation)

for name in ("example1", "example2", "example3", "example4"):
    row = example_row(name)
    print(f"{name}: {row['chebyshev']:14s} selection {row['selection']:4s} {row['result']}")

# %%
# Example 3 oscillates, so witnesses x^k -> z and w^k -> z project to
# opposite sides and no selection can be continuous at z
pr = get("example3")
print(admits_continuous_selection(pr.y, pr.cert).reason)
y1 = pr.cert.transport(pr.y)
n_k = oscillation_subsequence(y1, 7)
pack = build_witnesses(pr.y, pr.cert, n_k, 3)
for k, u in enumerate(pack.x, start=1):
    print(f"  |x^{k} - z| = {float(lorentz_norm(u - pack.z, pr.w).value):.5f}")
rep = verify_separation(pack, pr.w, 1e-7)
print("I1 =", rep.I1, "I2 =", rep.I2, "separated:", rep.separated)
