"""Chebyshev and continuous-selection criteria for lines in d(w,1).

A line span[y] fails to be Chebyshev exactly when some signed rearrangement
y1(j) = sigma(j) y(p(j)) is annihilated by w, has summable first differences,
and has its tail-variation sequence z in d(w,1).  Given such a certificate,
the line admits a continuous metric selection iff y1 is eventually monotone;
an alternating pattern of first differences yields explicit witness
sequences whose projections stay on opposite sides of [-1, 1].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (Inconclusive, InfiniteVariation, LorentzApproxError,
                     ToleranceUnreachable)
from .norms import lorentz_norm, tail_variation, variation_sequence, weighted_series
from .perm import SignedPermutation
from .projection import projection_interval
from .seq import Bound, Seq
from .weights import Weight


@dataclass
class SelectionCertificate:
    """(M, p, sigma, n_o) data; M is the range of p, here always all of N."""
    perm: SignedPermutation = field(default_factory=SignedPermutation.identity)
    n_o: int | None = None
    M: str = "N"
    z: Seq | None = None

    def transport(self, y: Seq) -> Seq:
        return self.perm.apply(y)

    def to_json(self) -> dict:
        return {"M": self.M, "perm": self.perm.to_json(), "n_o": self.n_o}

    @classmethod
    def from_json(cls, d: dict) -> "SelectionCertificate":
        return cls(SignedPermutation.from_json(d.get("perm", {})), d.get("n_o"), d.get("M", "N"))


@dataclass
class ChebyshevReport:
    verdict: str                 # certified-non-Chebyshev | refuted | inconclusive
    alignment: Bound | None = None
    variation: Bound | None = None
    z_norm: Bound | None = None
    reason: str = ""
    z: Seq | None = None

    def to_json(self) -> dict:
        b = lambda t: None if t is None else [float(t.value), t.error]
        return {"verdict": self.verdict, "alignment": b(self.alignment),
                "variation": b(self.variation), "z_norm": b(self.z_norm), "reason": self.reason}


def verify_chebyshev_certificate(y: Seq, cert: SelectionCertificate, w: Weight,
                                 tol: float = 1e-9) -> ChebyshevReport:
    """Check alignment, summable variation and z in d(w,1) for y1 = T^{-1} y."""
    probe = max(y.H, cert.perm.finite_range, 16) * 2
    cert.perm.check_injective(probe)
    y1 = cert.transport(y)
    A = weighted_series(y1, w, tol / 4)
    if abs(float(A.value)) - A.error > tol:
        return ChebyshevReport("refuted", A, reason="sum w(j) y1(j) is not zero")
    try:
        z = variation_sequence(y1)
        V = tail_variation(y1, 1)
        zn = lorentz_norm(z, w, max(tol, 1e-9))
    except (InfiniteVariation, ToleranceUnreachable, ValueError) as exc:
        return ChebyshevReport("inconclusive", A, reason=str(exc))
    if abs(float(A.value)) + A.error <= tol:
        cert.z = z
        return ChebyshevReport("certified-non-Chebyshev", A, V, zn, z=z)
    return ChebyshevReport("inconclusive", A, V, zn, reason="alignment not resolved at tol", z=z)


# -- monotonicity and oscillation ----------------------------------------------

def _sgn(t) -> int:
    return (t > 0) - (t < 0)


def _head_diff_signs(y: Seq, upto: int) -> list[int]:
    """Signs of y(n) - y(n+1) for n = 1..upto, exact where the entries are."""
    vals = y.entries(upto + 1)
    return [_sgn(vals[i] - vals[i + 1]) for i in range(upto)]


def eventual_monotonicity(y: Seq) -> tuple[str, int | None]:
    """('decreasing'|'increasing'|'alternating'|'unknown', n_o).

    ``n_o`` is the first index from which every difference y(n) - y(n+1)
    has the eventual sign (or is zero).
    """
    if y.tail is None:
        signs = _head_diff_signs(y, y.H + 1)
        n1, n2 = _threshold(signs, 1), _threshold(signs, -1)
        return ("decreasing", n1) if n1 <= n2 else ("increasing", n2)
    rule = y.tail
    trend = rule.trend
    start = max(y.H + 1, rule.start)
    if trend in ("decreasing", "increasing"):
        s = 1 if trend == "decreasing" else -1
        signs = _head_diff_signs(y, start - 1)
        return trend, _threshold(signs, s)
    if trend == "alternating":
        return "alternating", None
    return "unknown", None


def _threshold(signs: list[int], s: int) -> int:
    n_o = len(signs) + 1
    for i in range(len(signs) - 1, -1, -1):
        if signs[i] in (0, s):
            n_o = i + 1
        else:
            break
    return n_o


def oscillation_subsequence(y: Seq, count: int, search: int = 4096) -> list[int] | None:
    """First ``count`` indices n with y(n) != y(n+1) whose next nonzero
    difference has the opposite sign, or None if none exist.

    Head differences are exact; beyond the head the tail's symbolic
    difference-sign rule is used.
    """
    if count < 2:
        raise ValueError("count must be at least 2")
    if y.tail is not None and y.tail.diff_sign(np.array([y.tail.start])) is None:
        raise Inconclusive("tail has no difference-sign rule")
    L = max(y.H + 2, count + 2)
    out: list[int] = []
    while True:
        signs = _diff_signs(y, L)
        out = []
        for i, s in enumerate(signs[:-1]):
            if s == 0:
                continue
            nxt = next((t for t in signs[i + 1:] if t != 0), 0)
            if nxt == -s:
                out.append(i + 1)
                if len(out) == count:
                    return out
        if y.tail is None or y.tail.trend in ("decreasing", "increasing") or L >= search:
            return out if len(out) >= count else None
        L *= 2


def _diff_signs(y: Seq, L: int) -> list[int]:
    H = y.H if y.tail is None else max(y.H, y.tail.start - 1)
    head = _head_diff_signs(y, min(H, L))
    if L <= H:
        return head
    if y.tail is None:
        return head + [0] * (L - H)
    n = np.arange(H + 1, L + 1)
    return head + [int(v) for v in y.tail.diff_sign(n)]


@dataclass
class SelectionReport:
    verdict: str                 # yes | no | unknown
    reason: str = ""
    n_o: int | None = None
    oscillation: list | None = None
    scope: str = "supplied certificate"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason, "n_o": self.n_o,
                "oscillation": self.oscillation, "scope": self.scope}


def admits_continuous_selection(y: Seq, cert: SelectionCertificate | None = None,
                                chebyshev: bool | None = None) -> SelectionReport:
    """'yes' if Chebyshev or y1 eventually monotone, 'no' if y1 oscillates.

    A 'no' from one certificate is conclusive.  A 'yes' covers the supplied
    certificate; for a line that is not Chebyshev it is a full answer only
    when that certificate is the one built from the supporting functional.
    """
    if chebyshev:
        return SelectionReport("yes", "Chebyshev subspace", scope="all")
    cert = cert or SelectionCertificate()
    y1 = cert.transport(y)
    trend, n_o = eventual_monotonicity(y1)
    if trend in ("decreasing", "increasing"):
        cert.n_o = n_o
        return SelectionReport("yes", f"y1 eventually {trend} from n_o = {n_o}", n_o)
    if trend == "alternating":
        osc = oscillation_subsequence(y1, 8)
        return SelectionReport("no", "first differences of y1 alternate in sign", None, osc)
    return SelectionReport("unknown", "no symbolic difference-sign rule on the tail")


# -- witnesses -----------------------------------------------------------------

@dataclass
class WitnessPack:
    z: Seq
    y1: Seq
    n_k: list
    x: list                      # x^k = z with coordinate n_{2k} lowered
    w: list                      # w^k = z with coordinate n_{2k+1} lowered
    x_index: list
    w_index: list
    x_side: list                 # -1: P below -1 expected; +1: above 1; 0: degenerate
    w_side: list
    spikes: list = field(default_factory=list)
    I1: tuple | None = None
    I2: tuple | None = None

    def to_json(self) -> dict:
        return {"n_k": self.n_k, "x_index": self.x_index, "w_index": self.w_index,
                "x_side": self.x_side, "w_side": self.w_side,
                "spikes": [[float(a), float(b)] for a, b in self.spikes],
                "I1": self.I1, "I2": self.I2}


def perturb(z: Seq, y1: Seq, n: int):
    """z with z(n) replaced by z(n) - 2|y1(n) - y1(n+1)|; returns (seq, delta, side)."""
    d = y1.entry(n) - y1.entry(n + 1)
    spike = 2 * abs(d)
    zn = z.extend(n)
    return zn.with_entry(n, zn.entry(n) - spike), spike, -_sgn(d)


def build_witnesses(y: Seq, cert: SelectionCertificate, n_k: list, K: int,
                    w: Weight | None = None) -> WitnessPack:
    if len(n_k) < 2 * K + 1:
        raise ValueError(f"need {2 * K + 1} oscillation indices for K = {K}")
    y1 = cert.transport(y)
    z = cert.z if cert.z is not None else variation_sequence(y1)
    if w is not None:
        lorentz_norm(z, w, 1e-6)   # raises if z is not certified in d(w,1)
    xs, ws, xi, wi, xsd, wsd, spikes = [], [], [], [], [], [], []
    for k in range(1, K + 1):
        a, b = n_k[2 * k - 1], n_k[2 * k]
        xa, da, sa = perturb(z, y1, a)
        wb, db, sb = perturb(z, y1, b)
        xs.append(xa); ws.append(wb)
        xi.append(a); wi.append(b)
        xsd.append(sa); wsd.append(sb)
        spikes.append((da, db))
    return WitnessPack(z, y1, list(n_k), xs, ws, xi, wi, xsd, wsd, spikes)


@dataclass
class SeparationReport:
    separated: bool
    x_intervals: list
    w_intervals: list
    I1: tuple
    I2: tuple
    reason: str = ""

    def __bool__(self) -> bool:
        return self.separated

    def to_json(self) -> dict:
        return {"separated": self.separated, "x_intervals": self.x_intervals,
                "w_intervals": self.w_intervals, "I1": self.I1, "I2": self.I2,
                "reason": self.reason}


def verify_separation(pack: WitnessPack, w: Weight, tol: float = 1e-7) -> SeparationReport:
    """Solve P for every witness and test that the two families stay apart.

    Coefficients are those of the transported line span[y1]; the isometry
    carries them unchanged back to span[y].  x^k must satisfy
    P(x^k) < -1 + tol, w^k must satisfy P(w^k) > 1 - tol.
    """
    xi, wi = [], []
    loose = wrong = False
    for u in pack.x:
        P = projection_interval(u, pack.y1, w, tol)
        lo, hi = P.outer
        xi.append((lo, hi))
        if hi >= -1 + tol:
            # computed edge on the wrong side decides; otherwise only the margin is missing
            wrong |= float(P.hi) >= -1 + tol
            loose |= float(P.hi) < -1 + tol
    for u in pack.w:
        P = projection_interval(u, pack.y1, w, tol)
        lo, hi = P.outer
        wi.append((lo, hi))
        if lo <= 1 - tol:
            wrong |= float(P.lo) <= 1 - tol
            loose |= float(P.lo) > 1 - tol
    I1 = (min(a for a, _ in xi), max(b for _, b in xi))
    I2 = (min(a for a, _ in wi), max(b for _, b in wi))
    pack.I1, pack.I2 = I1, I2
    ok = bool(I1[1] < -1 + tol and I2[0] > 1 - tol)
    if not ok and loose and not wrong:
        raise Inconclusive("enclosures too wide at this tol; tighten tol")
    reason = "I1 below -1, I2 above 1" if ok else "projection intervals overlap"
    return SeparationReport(ok, xi, wi, I1, I2, reason)


# -- finite certificate search -------------------------------------------------

def search_certificate(y: Seq, w: Weight, max_support: int = 8, extra_ranks: int = 0):
    """Look for ranks r_i and signs s_i with sum_i s_i w(r_i) y(i) = 0.

    Only finitely supported y with at most ``max_support`` nonzero entries;
    ranks range over 1..(support + extra_ranks).  Returns a
    SelectionCertificate or None.  Not finding one does not prove the line
    is Chebyshev.
    """
    if y.tail is not None:
        raise ValueError("certificate search needs finite support")
    supp = [i for i in range(1, y.H + 1) if y.entry(i) != 0]
    s = len(supp)
    if s == 0 or s > max_support:
        raise ValueError(f"support size {s} outside 1..{max_support}")
    R = s + extra_ranks
    wv = np.array([float(w(r)) for r in range(1, R + 1)])
    yv = np.array([float(y.entry(i)) for i in supp])
    signs = np.array(list(itertools.product((1, -1), repeat=s - 1)), dtype=float).reshape(-1, s - 1)
    signs = np.hstack([np.ones((len(signs), 1)), signs])
    scale = float(np.abs(yv).sum() * wv[0])
    for ranks in itertools.permutations(range(1, R + 1), s):
        vals = wv[np.array(ranks) - 1] * yv
        hits = np.nonzero(np.abs(signs @ vals) <= 1e-9 * scale)[0]
        for h in hits:
            sg = [int(t) for t in signs[h]]
            total = sum((Fraction(sg[i]) * w(ranks[i]) * y.entry(supp[i]) for i in range(s)),
                        Fraction(0)) if w.exact and y.is_exact else float(signs[h] @ vals)
            if total == 0 or (not isinstance(total, Fraction) and abs(total) <= 1e-12 * scale):
                return _certificate_from_ranks(supp, ranks, sg, y.H)
    return None


def _certificate_from_ranks(supp, ranks, signs, H) -> SelectionCertificate:
    L = max(H, max(ranks))
    table = [0] * L
    sig = [1] * L
    for i, r in zip(supp, ranks):
        table[r - 1] = i
    for i, sg in zip(supp, signs):
        sig[ranks[supp.index(i)] - 1] = sg
    rest = iter(i for i in range(1, L + 1) if i not in supp)
    for j in range(L):
        if table[j] == 0:
            table[j] = next(rest)
    return SelectionCertificate(SignedPermutation.from_table(table, sig))
