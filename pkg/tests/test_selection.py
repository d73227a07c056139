from fractions import Fraction

import numpy as np
import pytest

from lorentzapprox.errors import MalformedCertificate
from lorentzapprox.norms import lorentz_norm, tail_variation, variation_sequence
from lorentzapprox.perm import SignedPermutation
from lorentzapprox.presets import get
from lorentzapprox.projection import projection_interval, residual_norm
from lorentzapprox.selection import (SelectionCertificate, admits_continuous_selection,
                                     build_witnesses, eventual_monotonicity,
                                     oscillation_subsequence, perturb, search_certificate,
                                     verify_chebyshev_certificate, verify_separation)
from lorentzapprox.seq import Seq
from lorentzapprox.tails import PowerTail
from lorentzapprox.weights import Weight

H = Weight.harmonic()


@pytest.fixture(scope="module")
def ex3_pack():
    pr = get("example3")
    y1 = pr.cert.transport(pr.y)
    n_k = oscillation_subsequence(y1, 7)
    return pr, build_witnesses(pr.y, pr.cert, n_k, 3, pr.w)


# -- Chebyshev certificates -------------------------------------------------------

@pytest.mark.parametrize("weight", ["harmonic", "w1"])
def test_example2_certified_non_chebyshev(weight):
    pr = get("example2", weight)
    rep = verify_chebyshev_certificate(pr.y, pr.cert, pr.w, tol=1e-9)
    assert rep.verdict == "certified-non-Chebyshev"
    assert abs(float(rep.alignment.value)) <= 1e-9
    assert admits_continuous_selection(pr.y, pr.cert).verdict == "yes"


def test_finite_aligned_line_is_certified():
    y = Seq([1, -2])           # 1 - 2 * 1/2 = 0
    rep = verify_chebyshev_certificate(y, SelectionCertificate(), H)
    assert rep.verdict == "certified-non-Chebyshev"
    # and the flat projection of z confirms it
    P = projection_interval(rep.z, y, H)
    assert P.lo <= -1 and P.hi >= 1


def test_unaligned_line_is_refuted():
    rep = verify_chebyshev_certificate(Seq([1]), SelectionCertificate(), H)
    assert rep.verdict == "refuted"


def test_malformed_permutation_rejected():
    with pytest.raises(MalformedCertificate):
        SignedPermutation.from_table([1, 1, 3])
    with pytest.raises(MalformedCertificate):
        SignedPermutation.from_table([2, 1], signs=[1, 0])


def test_certificate_json_roundtrip():
    c = SelectionCertificate(SignedPermutation.from_table([2, 1, 3], [1, -1, 1]), n_o=4)
    d = SelectionCertificate.from_json(c.to_json())
    assert d.to_json() == c.to_json()


def test_search_certificate_finite():
    cert = search_certificate(Seq([1, -2]), H)
    assert cert is not None
    assert verify_chebyshev_certificate(Seq([1, -2]), cert, H).verdict == "certified-non-Chebyshev"
    # y = (2, 1): every signed pairing 2 w(r1) +- w(r2) stays away from 0
    assert search_certificate(Seq([3, 1]), H) is None
    pr = get("example1")
    assert search_certificate(pr.y, pr.w) is None


# -- selection verdicts -----------------------------------------------------------

@pytest.mark.parametrize("name,verdict", [("example2", "yes"), ("example3", "no"), ("example4", "yes")])
def test_selection_verdicts(name, verdict):
    pr = get(name)
    assert admits_continuous_selection(pr.y, pr.cert).verdict == verdict


def test_example4_monotone_after_swap():
    pr = get("example4")
    y1 = pr.cert.transport(pr.y)
    trend, n_o = eventual_monotonicity(y1)
    assert trend == "decreasing" and n_o == 2
    vals = y1.entries(40)
    assert all(vals[i] >= vals[i + 1] for i in range(n_o - 1, 39))


def test_chebyshev_shortcut():
    rep = admits_continuous_selection(Seq([1, 1]), chebyshev=True)
    assert rep.verdict == "yes" and rep.scope == "all"


# -- oscillation ------------------------------------------------------------------

def test_oscillation_example3():
    pr = get("example3")
    y1 = pr.cert.transport(pr.y)
    assert oscillation_subsequence(y1, 9) == list(range(2, 11))


def test_oscillation_alternating_head():
    y = Seq([Fraction(1 if n % 2 else 0, n * n) for n in range(1, 11)])
    assert oscillation_subsequence(y, 8) == list(range(1, 9))


def test_oscillation_none_for_monotone():
    assert oscillation_subsequence(Seq([3, 2, 1], PowerTail(1, 2, start=4)), 3) is None
    with pytest.raises(ValueError):
        oscillation_subsequence(Seq([1, 0]), 1)


# -- variation sequence z ---------------------------------------------------------

def test_z_identities_example2():
    pr = get("example2")
    y1 = pr.cert.transport(pr.y)
    z = variation_sequence(y1)
    for j in range(2, 30):
        assert float(tail_variation(y1, j).value) == pytest.approx(1 / j, abs=1e-15)
    for j in range(1, 30):
        assert abs(float(z.entry(j))) >= abs(float(y1.entry(j))) - 1e-15


@pytest.mark.parametrize("name", ["example2", "example4"])
def test_flat_residual_on_minus_one_to_one(name):
    pr = get(name)
    y1 = pr.cert.transport(pr.y)
    z = variation_sequence(y1)
    vals = [residual_norm(z, y1, a, pr.w, 1e-7) for a in (-1, -0.5, 0, 0.5, 1)]
    mid = float(vals[2].value)
    for b in vals:
        assert abs(float(b.value) - mid) <= b.error + vals[2].error + 2e-7


# -- witnesses --------------------------------------------------------------------

def test_witness_pack_structure(ex3_pack):
    pr, pack = ex3_pack
    assert len(pack.x) == len(pack.w) == 3
    assert pack.x_index == [pack.n_k[1], pack.n_k[3], pack.n_k[5]]
    assert pack.w_index == [pack.n_k[2], pack.n_k[4], pack.n_k[6]]
    for seqs, idx in ((pack.x, pack.x_index), (pack.w, pack.w_index)):
        for u, n in zip(seqs, idx):
            d = u - pack.z
            diff = [j for j in range(1, n + 5) if d.entry(j) != 0]
            assert diff == [n]
            spike = 2 * abs(pack.y1.entry(n) - pack.y1.entry(n + 1))
            assert -float(d.entry(n)) == pytest.approx(float(spike), rel=1e-14)


def test_witness_distances_vanish(ex3_pack):
    pr, pack = ex3_pack
    # one changed coordinate: the norm is the spike times w(1)
    dist = [float(lorentz_norm(u - pack.z, pr.w).value) for u in pack.x]
    spikes = [float(a) for a, _ in pack.spikes]
    assert dist == pytest.approx([s * float(pr.w(1)) for s in spikes], rel=1e-12)
    assert all(a > b for a, b in zip(dist, dist[1:]))


def test_witness_sides_alternate(ex3_pack):
    _, pack = ex3_pack
    assert set(pack.x_side) == {-1} and set(pack.w_side) == {1}


def test_degenerate_perturbation_is_identity():
    y = Seq([1, 1, 0])
    z = variation_sequence(y)
    u, spike, side = perturb(z, y, 1)
    assert spike == 0 and side == 0 and u.entries(4) == z.entries(4)


def test_degenerate_pack_is_not_separated():
    y = Seq([1, 1, Fraction(-9, 2)])        # 1 + 1/2 - 3/2 = 0
    cert = SelectionCertificate()
    assert verify_chebyshev_certificate(y, cert, H).verdict == "certified-non-Chebyshev"
    pack = build_witnesses(y, cert, [1, 1, 1], 1)
    assert pack.x[0].entries(4) == pack.z.entries(4)
    assert not verify_separation(pack, H, 1e-7)


def test_example3_separation(ex3_pack):
    pr, pack = ex3_pack
    rep = verify_separation(pack, pr.w, 1e-7)
    assert rep.separated
    assert rep.I1[1] < -1 + 1e-7 and rep.I2[0] > 1 - 1e-7


def test_example2_pack_not_separated():
    # 1/n tails make the enclosures converge slowly; a coarse tol already decides
    pr = get("example2")
    pack = build_witnesses(pr.y, pr.cert, [1, 2, 3], 1)
    assert pack.x_side == pack.w_side == [-1]
    assert not verify_separation(pack, pr.w, 1e-3)


# -- isometry transport -----------------------------------------------------------

def test_isometry_preserves_norm_and_projection():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n = int(rng.integers(2, 7))
        table = [int(v) + 1 for v in rng.permutation(n)]
        signs = [int(v) for v in rng.choice([-1, 1], size=n)]
        T = SignedPermutation.from_table(table, signs)
        u = Seq([Fraction(int(v), 4) for v in rng.integers(-8, 9, size=n)])
        y = Seq([Fraction(int(v), 3) for v in rng.integers(-6, 7, size=n)])
        if all(v == 0 for v in y.head):
            y = Seq([1] + [0] * (n - 1))
        assert lorentz_norm(T.apply(u), H).value == lorentz_norm(u, H).value
        assert T.unapply(T.apply(u)).entries(n) == u.entries(n)
        P = projection_interval(u, y, H)
        Q = projection_interval(T.apply(u), T.apply(y), H)
        assert (P.lo, P.hi, P.dist.value) == (Q.lo, Q.hi, Q.dist.value)


def test_pair_swap_transport_roundtrip():
    T = SignedPermutation.pair_swap()
    assert list(T.forward(np.arange(1, 8))) == [1, 3, 2, 5, 4, 7, 6]
    pr = get("example3")
    y1 = T.apply(pr.y)
    for n in range(2, 20):
        assert y1.entry(n) == pr.y.entry(int(T.forward(np.array([n]))[0]))
