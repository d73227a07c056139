"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with the numbers
behind the verdict and then asserts it.  Run as a script to get only the
summary lines:  python3 tests/test_acceptance.py
"""

import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lorentzapprox.fspace import (ConstraintClass, FNormSpec, GridFunction, GridSpace,
                                  metric_projection_set, minimizing_sequence_probe,
                                  property_s_probe, two_point)
from lorentzapprox.fuzz import run_suite
from lorentzapprox.norms import lorentz_norm, tail_variation, variation_sequence
from lorentzapprox.presets import get
from lorentzapprox.projection import (freud_check, projection_interval, residual_norm,
                                      strong_unicity_estimate)
from lorentzapprox.selection import (admits_continuous_selection, build_witnesses,
                                     oscillation_subsequence, verify_chebyshev_certificate,
                                     verify_separation)
from lorentzapprox.seq import Seq
from lorentzapprox.weights import Weight

from oracles import projection_oracle, random_rational


def criterion_1():
    t0 = time.perf_counter()
    pr = get("example2")
    ch = verify_chebyshev_certificate(pr.y, pr.cert, pr.w, tol=1e-9)
    sel = admits_continuous_selection(pr.y, pr.cert)
    y1 = pr.cert.transport(pr.y)
    z = variation_sequence(y1)
    # z(j) = 1/j on j = 2..1e5, from the library and from a truncated direct sum
    N = 10 ** 5
    js = np.arange(2, N + 1)
    zl = np.array([float(v) for v in z.entries(N)])[1:]
    err_lib = float(np.max(np.abs(zl - 1.0 / js)))
    yv = np.array([float(v) for v in y1.entries(N + 1)])
    direct = np.cumsum(np.abs(np.diff(yv))[::-1])[::-1][1:] + abs(yv[-1])
    err_direct = float(np.max(np.abs(direct - 1.0 / js)))
    err_bound = max(abs(float(tail_variation(y1, j).value) - 1 / j) + tail_variation(y1, j).error
                    for j in (2, 3, 10, 1000, N))
    vals = [residual_norm(z, y1, a, pr.w, 1e-7) for a in (-1, -0.5, 0, 0.5, 1)]
    mids = [float(b.value) for b in vals]
    spread = max(mids) - min(mids)
    widths = max(b.error for b in vals)
    secs = time.perf_counter() - t0
    ok = (ch.verdict == "certified-non-Chebyshev" and sel.verdict == "yes"
          and max(err_lib, err_direct, err_bound) <= 1e-10
          and spread + 2 * widths <= 1e-6 and secs < 10)
    return ok, (f"{ch.verdict}, selection {sel.verdict}; |z(j) - 1/j| <= "
                f"{max(err_lib, err_direct, err_bound):.1e}; residual spread {spread:.1e} "
                f"(enclosure {widths:.1e}); {secs:.2f} s")


def criterion_2():
    pr = get("example3")
    sel = admits_continuous_selection(pr.y, pr.cert)
    y1 = pr.cert.transport(pr.y)
    K = 4
    n_k = oscillation_subsequence(y1, 2 * K + 1)
    pack = build_witnesses(pr.y, pr.cert, n_k, K)
    dist, bound = [], []
    for k in range(K):
        n = pack.x_index[k]
        d = lorentz_norm(pack.x[k] - pack.z, pr.w, 1e-12)
        dist.append(float(d.value) - d.error)
        bound.append(2 * float(pr.w(n)) * abs(float(y1.entry(n) - y1.entry(n + 1))))
    within = [a <= b for a, b in zip(dist, bound)]
    monotone = all(a > b for a, b in zip(dist, dist[1:]))
    sep = verify_separation(pack, pr.w, 1e-7)
    ok = sel.verdict == "no" and all(within) and monotone and sep.separated
    pairs = ", ".join(f"{a:.4g}<={b:.4g}:{'y' if c else 'n'}" for a, b, c in zip(dist, bound, within))
    return ok, (f"selection {sel.verdict}; |x^k - z| vs bound [{pairs}]; decreasing {monotone}; "
                f"separated {sep.separated} (I1 max {sep.I1[1]:.9f}, I2 min {sep.I2[0]:.9f})")


def criterion_3():
    pr = get("example4")
    sel = admits_continuous_selection(pr.y, pr.cert)
    ch = verify_chebyshev_certificate(pr.y, pr.cert, pr.w, tol=1e-9)
    ok = sel.verdict == "yes" and sel.n_o is not None
    return ok, f"selection {sel.verdict}: {sel.reason}; certificate {ch.verdict}"


def criterion_4():
    pr = get("example1")
    x, y, w = pr.x, pr.y, pr.w
    r = strong_unicity_estimate(x, y, w)
    rng = np.random.default_rng(2024)
    worst, held = 0.0, 0
    for _ in range(20):
        d = Seq([Fraction(int(v), 1000) for v in rng.integers(-1000, 1001, size=3)])
        nd = float(lorentz_norm(d, w).value)
        scale = Fraction(rng.uniform(1e-6, 1e-3) / max(nd, 1e-300)).limit_denominator(10 ** 12)
        d = d.scale(scale)
        assert float(lorentz_norm(d, w).value) <= 1e-3
        good, lhs, rhs = freud_check(x, x + d, y, w, r)
        held += good
        worst = max(worst, lhs / rhs if rhs else 0.0)
    ok = r > 0 and held == 20
    return ok, f"r = {float(r):.6g}; Freud bound held {held}/20, max lhs/rhs {worst:.3f}"


def criterion_5():
    H = Weight.harmonic()
    rng = np.random.default_rng(20240)
    cases = []
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        xs, ys = random_rational(rng, n), random_rational(rng, n)
        if all(v == 0 for v in ys):
            ys[int(rng.integers(n))] = Fraction(1)
        cases.append((xs, ys))
    t0 = time.perf_counter()
    sols = [projection_interval(Seq(xs), Seq(ys), H) for xs, ys in cases]
    secs = time.perf_counter() - t0
    bad, worst = 0, 0.0
    for (xs, ys), P in zip(cases, sols):
        lo, hi, m = projection_oracle(xs, ys)
        e = max(abs(float(P.lo) - lo), abs(float(P.hi) - hi), abs(float(P.dist.value) - m))
        worst = max(worst, e)
        bad += e > 1e-9
    ok = bad == 0 and secs < 60
    return ok, f"{bad} disagreements in 1000, max error {worst:.1e}; solver {secs:.2f} s"


def criterion_6():
    rep = two_point(50)
    rev_ok = bool(np.all(rep.reverse == 2.0))
    fwd_ok = bool(np.all(rep.forward == 0.0))
    ok = rev_ok and fwd_ok
    return ok, (f"reverse in [{rep.reverse.min()}, {rep.reverse.max()}], forward max "
                f"{rep.forward.max()} over n = 1..50")


def criterion_7():
    cells = [2 ** k for k in range(6, 13)]
    parts = []
    ok = True
    for name, spec, p in (("lambda_phi(log1p), p=1", FNormSpec.lambda_phi("log1p"), 1.0),
                          ("gamma(p=2, w=1), p=2", FNormSpec.gamma(2, "one"), 2.0)):
        reps = property_s_probe(spec, p, cells)
        dec = all(r.decreasing for r in reps)
        Cs = [r.fitted_C for r in reps]
        stable = (max(Cs) - min(Cs)) <= 0.05 * max(Cs)
        bounded = all(np.all(np.abs(r.r) <= r.fitted_C * r.h * (1 + 1e-9)) for r in reps)
        ok = ok and dec and stable and bounded
        parts.append(f"{name}: decreasing {dec}, C in [{min(Cs):.4f}, {max(Cs):.4f}]")
    return ok, "; ".join(parts)


def criterion_8():
    t0 = time.perf_counter()
    res = run_suite(10_000, seed=0, max_len=8)
    failed = [r.name for r in res if not r.ok]
    total = sum(r.passed for r in res)
    return not failed, (f"{len(res)} properties, {total} checks, failures {failed or 'none'}; "
                        f"{time.perf_counter() - t0:.1f} s")


def criterion_9():
    rng = np.random.default_rng(909)
    g = GridSpace.uniform(8, 1.0)
    specs = [FNormSpec.lambda_phi("log1p"), FNormSpec.gamma(2, "one"), FNormSpec.lambda_pw(2, "one"),
             FNormSpec.gamma(1, "sqrt")]
    worst, bad = 0.0, 0
    for i in range(200):
        x = GridFunction(g, rng.integers(-4, 5, size=8) / 2)
        C = ConstraintClass("increasing" if i % 2 == 0 else "decreasing")
        spec = specs[i % len(specs)]
        pr = minimizing_sequence_probe(x, C, spec)
        P = metric_projection_set(x, C, spec, method="brute")
        e = abs(pr.dist - P.dist)
        worst = max(worst, e)
        bad += (not pr.converged) or e > 1e-8
    return bad == 0, f"{bad} mismatches in 200, max |probe - brute| {worst:.1e}"


CRITERIA = {
    1: ("Example 2 reproduction", criterion_1),
    2: ("Example 3 reproduction", criterion_2),
    3: ("Example 4 reproduction", criterion_3),
    4: ("Example 1 strong unicity and Freud", criterion_4),
    5: ("exact projection vs oracle", criterion_5),
    6: ("two-point continuity counterexample", criterion_6),
    7: ("property (S) probes", criterion_7),
    8: ("norm-axiom and rearrangement suites", criterion_8),
    9: ("monotone projection probe vs brute force", criterion_9),
}


def _line(k):
    title, fn = CRITERIA[k]
    ok, detail = fn()
    return ok, f"criterion {k}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, line = _line(k)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(k) for k in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
