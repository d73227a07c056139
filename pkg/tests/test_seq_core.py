from fractions import Fraction

import mpmath
import numpy as np
import pytest

from lorentzapprox.errors import (InfiniteVariation, ToleranceUnreachable,
                                  UnrearrangeableTail)
from lorentzapprox.norms import (decreasing_rearrangement, lorentz_norm, marcinkiewicz_norm,
                                 tail_variation, variation_sequence, weighted_series,
                                 weighted_tail_sum)
from lorentzapprox.seq import Seq
from lorentzapprox.tails import (LinearTail, PowerTail, SwappedPairTail, TailRule,
                                 tail_from_json)
from lorentzapprox.weights import Weight

H = Weight.harmonic()


# -- weights -------------------------------------------------------------------

def test_harmonic_weight_exact_and_divergent():
    assert H(1) == 1 and H(4) == Fraction(1, 4)
    assert H.exact and H.divergent
    W = H.partial_sums(4)
    assert np.allclose(W, [1, 1.5, 11 / 6, 25 / 12])


def test_power_weight_partial_sums_match_mpmath():
    w = Weight.power(0.5)
    W = w.partial_sums(50)
    with mpmath.workdps(30):
        ref = [float(mpmath.fsum(mpmath.mpf(j) ** -0.5 for j in range(1, n + 1)))
               for n in (1, 10, 50)]
    assert np.allclose(W[[0, 9, 49]], ref, rtol=1e-14)


def test_weight_must_decrease_strictly():
    with pytest.raises(ValueError):
        Weight.from_table([1, 1, 1])
    with pytest.raises(ValueError):
        Weight.from_table([1, Fraction(1, 2)], tail="power:0.1")  # 3^-0.1 > 1/2
    w = Weight.from_table([3, 2, 1], "power:2")
    assert float(w(4)) < 1


def test_weight_json_roundtrip():
    w = Weight.from_table([3, 2, 1], "power:2")
    w2 = Weight.from_json(w.to_json())
    assert [w2(n) for n in range(1, 8)] == [w(n) for n in range(1, 8)]


# -- tails ---------------------------------------------------------------------

def test_power_tail_exact_values_and_regime():
    t = PowerTail(1, 2, start=2)
    assert t.exact(3) == Fraction(1, 9)
    assert t.regime == 1
    assert PowerTail(-1, 2).regime == -1


def test_swapped_pair_tail_values_and_signs():
    t = SwappedPairTail()
    assert t.exact(2) == Fraction(1, 9) and t.exact(3) == Fraction(1, 4)
    assert t.regime is None
    s = t.diff_sign(np.array([2, 3, 4, 5]))
    vals = [t.exact(n) for n in range(2, 7)]
    ref = [np.sign(float(vals[i] - vals[i + 1])) for i in range(4)]
    assert list(s) == ref


def test_swapped_pair_variation_sum_against_mpmath():
    # split by parity of l: each piece is a smooth series in k
    t = SwappedPairTail()
    with mpmath.workdps(30):
        even = lambda k: abs(1 / (2 * k) ** 2 - 1 / (2 * k + 1) ** 2)        # l = 2k
        odd = lambda k: abs(1 / (2 * k + 3) ** 2 - 1 / (2 * k) ** 2)         # l = 2k + 1
        for m in (2, 3, 10, 51):
            ke, ko = (m + 1) // 2, m // 2
            ref = mpmath.nsum(even, [max(ke, 1), mpmath.inf]) + mpmath.nsum(odd, [max(ko, 1), mpmath.inf])
            got = float(t.variation_sum(np.array([m]))[0])
            assert abs(got - float(ref)) <= 1e-13 * float(ref) + 1e-16


def test_tail_json_roundtrip():
    for t in (PowerTail(Fraction(3, 2), 3, start=4), SwappedPairTail()):
        t2 = tail_from_json(t.to_json())
        assert [t2.exact(n) for n in range(5, 12)] == [t.exact(n) for n in range(5, 12)]


def test_linear_tail_combines():
    a, b = PowerTail(1, 2), PowerTail(1, 3)
    t = LinearTail([(2, a), (-1, b)])
    n = np.arange(5, 9)
    assert np.allclose(t(n), 2 * n ** -2.0 - n ** -3.0)


# -- sequences -----------------------------------------------------------------

def test_seq_json_roundtrip_and_entries():
    x = Seq([Fraction(1, 3), -2], PowerTail(1, 2, start=3))
    y = Seq.from_json(x.to_json())
    assert y.entries(6) == x.entries(6)
    assert x[4] == Fraction(1, 16)


def test_seq_combine_and_extend():
    x = Seq([1, 2], PowerTail(1, 2, start=3))
    y = Seq([3], PowerTail(1, 2, start=2))
    s = x.combine(2, y, -1)
    for n in range(1, 10):
        assert s[n] == 2 * x[n] - y[n]
    e = x.extend(6)
    assert e.H == 6 and e.entries(8) == x.entries(8)


def test_seq_rejects_gap_between_head_and_tail():
    with pytest.raises(ValueError):
        Seq([1], PowerTail(1, 2, start=5))


# -- rearrangement -------------------------------------------------------------

def test_rearrangement_simple():
    r = decreasing_rearrangement(Seq([3, -1, 2, 0, 0]), 3)
    assert r.values == (3, 2, 1) and r.permutation == (1, 3, 2)


def test_rearrangement_fixed_point():
    x = Seq([5, 4, 2, 1])
    r = decreasing_rearrangement(x)
    assert list(r.values) == [5, 4, 2, 1] and r.permutation == (1, 2, 3, 4)


def test_rearrangement_head_plus_tail():
    x = Seq([1], PowerTail(1, 2, start=2))
    r = decreasing_rearrangement(x, 4)
    assert r.values == (1, Fraction(1, 4), Fraction(1, 9), Fraction(1, 16))


def test_rearrangement_ties_by_index():
    r = decreasing_rearrangement(Seq([1, -2, 2, 1]))
    assert r.permutation == (2, 3, 1, 4)


def test_rearrangement_rejects_nonmonotone_tail():
    class Wild(TailRule):
        start = 2

        def __call__(self, n):
            return np.cos(np.asarray(n, float)) / np.asarray(n, float) ** 2

    with pytest.raises(UnrearrangeableTail):
        decreasing_rearrangement(Seq([1], Wild()), 4)


# -- the two norms -------------------------------------------------------------

def test_lorentz_norm_unit_and_exact():
    assert lorentz_norm(Seq([1]), H) == (Fraction(1), 0.0)
    assert lorentz_norm(Seq([3, 1]), H).value == Fraction(7, 2)


def test_lorentz_norm_zeta3():
    b = lorentz_norm(Seq([], PowerTail(1, 2, start=1)), H, tol=1e-8)
    assert b.error <= 1e-8
    with mpmath.workdps(30):
        z3 = float(mpmath.zeta(3))
    assert abs(float(b.value) - z3) <= b.error + 1e-15


@pytest.mark.parametrize("s,alpha", [(2, 0.5), (1.5, 1), (3, 0.25)])
def test_lorentz_norm_power_tails_against_mpmath(s, alpha):
    x = Seq([Fraction(1, 2), -3], PowerTail(Fraction(-2), s, start=3))
    w = Weight.power(alpha)
    b = lorentz_norm(x, w, tol=1e-10)
    with mpmath.workdps(30):
        vals = [mpmath.mpf(1) / 2, mpmath.mpf(3)] + [2 * mpmath.mpf(n) ** -s for n in range(3, 12)]
        head = sorted(vals, reverse=True)
        ref = mpmath.fsum(v * mpmath.mpf(i) ** -alpha for i, v in enumerate(head, start=1))
        # closed form; nsum's default extrapolation is off by ~1e-6 on these
        ref += 2 * mpmath.zeta(s + alpha, 12)
    assert abs(float(b.value) - float(ref)) <= b.error + 1e-14
    assert b.error <= 1e-10


def test_lorentz_norm_tolerance_unreachable():
    # n^-0.5 against w = n^-0.2 sums like n^-0.7, which diverges
    x = Seq([], PowerTail(1, 0.5, start=1))
    with pytest.raises(ToleranceUnreachable):
        lorentz_norm(x, Weight.power(0.2), tol=1e-6)


def test_marcinkiewicz_examples():
    assert marcinkiewicz_norm(Seq([1]), H).value == 1
    assert marcinkiewicz_norm(Seq([H(n) for n in range(1, 7)]), H).value == 1
    assert marcinkiewicz_norm(Seq([1, 1]), H).value == Fraction(4, 3)


def test_marcinkiewicz_with_tail_against_brute_force():
    x = Seq([2], PowerTail(1, 1, start=2))
    b = marcinkiewicz_norm(x, H, tol=1e-6)
    a = np.concatenate([[2.0], 1.0 / np.arange(2, 200001)])
    ref = float(np.max(np.cumsum(a) / np.cumsum(1.0 / np.arange(1, a.size + 1))))
    assert abs(float(b.value) - ref) <= b.error + 1e-9


# -- tail sums and variation ---------------------------------------------------

def test_weighted_tail_sum_matches_hurwitz():
    b = weighted_tail_sum(PowerTail(1, 2), H, 10)
    with mpmath.workdps(30):
        ref = float(mpmath.zeta(3, 11))
    assert abs(float(b.value) - ref) <= b.error + 1e-18


def test_tail_variation_telescopes_example2():
    y = Seq([Fraction(-1)], PowerTail(1, 1, start=2))
    for j in (2, 3, 10, 100):
        b = tail_variation(y, j)
        assert abs(float(b.value) - 1 / j) <= b.error + 1e-15


def test_tail_variation_constant_and_finite_support():
    assert float(tail_variation(Seq([2, 2, 2]), 1).value) == 2.0  # drop to 0 at the end
    y = Seq([0, 0, Fraction(3, 4)])
    assert tail_variation(y, 3).value == Fraction(3, 4)
    assert tail_variation(Seq([0, 0, 0]), 1).value == 0


def test_variation_sequence_head_identity():
    y = Seq([Fraction(1, 2), -1, 3, Fraction(1, 3)])
    z = variation_sequence(y)
    for j in range(1, 5):
        assert z[j] - z[j + 1] == abs(y[j] - y[j + 1])


def test_variation_of_divergent_rule_raises():
    class Saw(TailRule):
        start = 2
        trend = "alternating"

        def __call__(self, n):
            n = np.asarray(n, float)
            return np.where(n % 2 == 0, 1 / n, 0.0)

    with pytest.raises((InfiniteVariation, ToleranceUnreachable)):
        tail_variation(Seq([1], Saw()), 1)


def test_weighted_series_alignment_example2():
    with mpmath.workdps(40):
        y1 = Fraction(mpmath.nstr(1 - mpmath.zeta(2), 38))
    y = Seq([y1], PowerTail(1, 1, start=2), 1e-35)
    b = weighted_series(y, H, 1e-12)
    assert abs(float(b.value)) <= b.error + 1e-12
