"""Hypothesis property tests for the invariants of both laboratories."""

from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from lorentzapprox.fspace import (FNormSpec, GridFunction, GridSpace, Interval, fnorm,
                                  hausdorff_distance, maximal_function, rearrangement,
                                  truncation, vee, wedge)
from lorentzapprox.norms import lorentz_norm, marcinkiewicz_norm, variation_sequence
from lorentzapprox.perm import SignedPermutation
from lorentzapprox.projection import (DualCertificate, dual_certificate, projection_interval,
                                      residual_norm)
from lorentzapprox.seq import Seq
from lorentzapprox.weights import Weight

H = Weight.harmonic()
SET = settings(max_examples=80, deadline=None)

frac = st.fractions(min_value=-6, max_value=6, max_denominator=8)
vec = st.lists(frac, min_size=1, max_size=6)
nonzero_vec = vec.filter(lambda v: any(v))


def _pad(u, v):
    n = max(len(u), len(v))
    return u + [Fraction(0)] * (n - len(u)), v + [Fraction(0)] * (n - len(v))


def N(v):
    return lorentz_norm(Seq(v), H).value


# -- d(w,1) norm ---------------------------------------------------------------------

@SET
@given(vec, vec, frac)
def test_lorentz_norm_axioms(u, v, c):
    u, v = _pad(u, v)
    assert N(u) >= 0 and (N(u) == 0) == (not any(u))
    assert N([c * t for t in u]) == abs(c) * N(u)
    assert N([a + b for a, b in zip(u, v)]) <= N(u) + N(v)


@SET
@given(vec, st.data())
def test_lorentz_norm_lattice(u, data):
    shrink = data.draw(st.lists(st.fractions(0, 1, max_denominator=5), min_size=len(u), max_size=len(u)))
    assert N([s * t for s, t in zip(shrink, u)]) <= N(u)


@SET
@given(vec, st.data())
def test_signed_permutation_is_isometry(u, data):
    n = len(u)
    table = data.draw(st.permutations(list(range(1, n + 1))))
    signs = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n))
    T = SignedPermutation.from_table(table, signs)
    x = Seq(u)
    assert lorentz_norm(T.apply(x), H).value == N(u)
    assert T.unapply(T.apply(x)).entries(n) == x.entries(n)


@SET
@given(vec, vec)
def test_duality_bound(u, f):
    u, f = _pad(u, f)
    pair = sum((a * b for a, b in zip(u, f)), Fraction(0))
    dual = marcinkiewicz_norm(Seq(f), H).value
    assert abs(pair) <= dual * N(u)


# -- projection onto span[y] ------------------------------------------------------------

@SET
@given(vec, nonzero_vec, frac, frac)
def test_residual_is_convex_in_the_coefficient(x, y, a, b):
    x, y = _pad(x, y)
    X, Y = Seq(x), Seq(y)
    r = lambda c: residual_norm(X, Y, c, H).value
    assert 2 * r((a + b) / 2) <= r(a) + r(b)


@SET
@given(vec, nonzero_vec, st.lists(frac, min_size=1, max_size=5))
def test_projection_is_optimal_and_certified(x, y, samples):
    x, y = _pad(x, y)
    X, Y = Seq(x), Seq(y)
    P = projection_interval(X, Y, H)
    d = P.dist.value
    assert residual_norm(X, Y, P.lo, H).value == d == residual_norm(X, Y, P.hi, H).value
    assert residual_norm(X, Y, (P.lo + P.hi) / 2, H).value == d
    for a in samples:
        r = residual_norm(X, Y, a, H).value
        assert r >= d
        if a < P.lo or a > P.hi:
            assert r > d
    c = P.certificate
    assert isinstance(c, DualCertificate)
    assert c.value == d and c.f_y == 0
    assert c.apply(X - Y.scale(P.lo), H) == d
    assert sum(lam for lam, _ in c.components) == 1
    for _, f in c.components:
        assert f.dual_norm(H).value <= 1


@SET
@given(vec, nonzero_vec, frac)
def test_certificate_or_refutation(x, y, a):
    x, y = _pad(x, y)
    X, Y = Seq(x), Seq(y)
    P = projection_interval(X, Y, H)
    c = dual_certificate(X, Y, a, H)
    assert isinstance(c, DualCertificate) == (P.lo <= a <= P.hi)


@SET
@given(nonzero_vec)
def test_variation_sequence_necessary_conditions(y):
    Y = Seq(y)
    z = variation_sequence(Y)
    n = len(y)
    for j in range(1, n + 1):
        assert z[j] >= abs(Y[j])
        assert z[j] - z[j + 1] == abs(Y[j] - Y[j + 1])


@SET
@given(st.lists(frac, min_size=1, max_size=5).filter(any), st.lists(frac, min_size=5, max_size=5))
def test_aligned_line_gives_flat_projection(tail, coeffs):
    # choose y(1) so that w annihilates y; then z +- a y stays nonnegative and
    # nonincreasing for |a| <= 1 and the residual is flat there
    y1 = -sum((t * H(j) for j, t in enumerate(tail, start=2)), Fraction(0))
    Y = Seq([y1] + tail)
    z = variation_sequence(Y)
    base = lorentz_norm(z, H).value
    for c in coeffs:
        a = max(min(c / 6, Fraction(1)), Fraction(-1))
        assert residual_norm(z, Y, a, H).value == base
    P = projection_interval(z, Y, H)
    assert P.lo <= -1 and P.hi >= 1


# -- grid function spaces -------------------------------------------------------------

cells = st.integers(1, 7)
real = st.floats(-5, 5, allow_nan=False, width=32)


@st.composite
def grid_pair(draw):
    n = draw(cells)
    mu = draw(st.lists(st.floats(0.0625, 2.0, width=32), min_size=n, max_size=n))
    G = GridSpace(mu)
    f = GridFunction(G, draw(st.lists(real, min_size=n, max_size=n)))
    g = GridFunction(G, draw(st.lists(real, min_size=n, max_size=n)))
    return G, f, g


SPECS = [FNormSpec.l1(), FNormSpec.bounded_integral(), FNormSpec.lambda_phi("log1p"),
         FNormSpec.lambda_pw(2.0, "one"), FNormSpec.gamma(1.0, "one"), FNormSpec.gamma(2.0, "sqrt"),
         FNormSpec.w1_discrete()]


@SET
@given(grid_pair(), st.sampled_from(SPECS))
def test_fnorm_axioms(fg, spec):
    _, f, g = fg
    nf = fnorm(f, spec)
    assert nf >= 0
    assert (nf == 0) == (not np.any(f.values))
    assert abs(fnorm(-f, spec) - nf) <= 1e-12 * (1 + nf)
    assert fnorm(f + g, spec) <= nf + fnorm(g, spec) + 1e-9 * (1 + nf)


@SET
@given(grid_pair(), st.sampled_from(SPECS[2:]), st.data())
def test_fnorm_lattice(fg, spec, data):
    G, f, _ = fg
    s = np.array(data.draw(st.lists(st.floats(0, 1), min_size=G.n, max_size=G.n)))
    assert fnorm(GridFunction(G, s * f.values), spec) <= fnorm(f, spec) + 1e-9


@SET
@given(grid_pair())
def test_maximal_function_dominates(fg):
    _, f, _ = fg
    edges, xs = rearrangement(f)
    t, xss = maximal_function(f)
    assert np.all(np.diff(xs) <= 0)
    assert np.all(xss >= xs - 1e-12)
    assert np.all(np.diff(xss) <= 1e-12)
    assert abs(np.dot(xs, np.diff(edges)) - np.dot(np.abs(f.values), f.grid.mu)) <= 1e-9


@SET
@given(st.lists(st.tuples(real, real, st.floats(0, 5, width=32)), min_size=1, max_size=8))
def test_truncation_properties(rows):
    c1, c2, f = (np.array(v, float) for v in zip(*rows))
    t = truncation(c1, f)
    assert np.all(np.abs(t) <= f)
    assert np.array_equal(truncation(t, f), t)
    assert np.all(np.abs(truncation(c1, f) - truncation(c2, f)) <= np.abs(c1 - c2) + 1e-12)


@SET
@given(st.lists(st.tuples(real, real), min_size=1, max_size=8))
def test_lattice_combinators_keep_monotone(rows):
    a, b = (np.sort(np.array(v, float)) for v in zip(*rows))
    for c in (vee(a, b), wedge(a, b)):
        assert np.all(np.diff(c) >= 0)


ivl = st.tuples(st.floats(-5, 5), st.floats(0, 3)).map(lambda t: Interval(t[0], t[0] + t[1]))


@SET
@given(st.lists(ivl, min_size=1, max_size=3), st.lists(ivl, min_size=1, max_size=3),
       st.lists(ivl, min_size=1, max_size=3))
def test_hausdorff_is_a_metric_on_interval_unions(A, B, C):
    dAB, dBA = hausdorff_distance(A, B), hausdorff_distance(B, A)
    assert dAB == dBA >= 0
    assert hausdorff_distance(A, A) == 0
    assert hausdorff_distance(A, C) <= dAB + hausdorff_distance(B, C) + 1e-12
