"""Metric projection onto a line span[y] in d(w,1).

The objective c -> ||x - c y||_{w,1} is convex and piecewise linear.  For
finitely supported data the minimiser set is found exactly by evaluating the
objective at every breakpoint.  With infinite tails the objective is
bracketed between a lower bound coming from an explicit norming functional
and an upper bound from the tail enclosure; the minimiser set is returned as
a certified outer interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (CertificateNotUnique, DegenerateSubspace, NotStronglyUnique,
                     ToleranceUnreachable)
from .norms import (MAX_TRUNC, envelope_tail_norm, error_norm, lorentz_norm, marcinkiewicz_norm,
                    weight_ratio, weighted_tail_sum)
from .seq import Bound, Seq
from .tails import LinearTail
from .weights import Weight

_EPS = float(np.finfo(float).eps)


# -- dual functionals ----------------------------------------------------------

@dataclass(frozen=True)
class DualFunctional:
    """f(j) = sign(j) * w(rank(j)); sign 0 marks coordinates where f vanishes."""
    signs: tuple
    ranks: tuple

    def coefficients(self, w: Weight) -> list:
        return [s * w(r) if s else 0 for s, r in zip(self.signs, self.ranks)]

    def apply(self, u, w: Weight):
        vals = u.entries(len(self.signs)) if isinstance(u, Seq) else list(u)
        return sum((c * v for c, v in zip(self.coefficients(w), vals)), Fraction(0))

    @property
    def is_extreme(self) -> bool:
        used = sorted(r for s, r in zip(self.signs, self.ranks) if s)
        return used == list(range(1, len(used) + 1))

    def dual_norm(self, w: Weight) -> Bound:
        return marcinkiewicz_norm(Seq(self.coefficients(w)), w)

    def to_json(self) -> dict:
        return {"signs": list(self.signs), "ranks": list(self.ranks)}


@dataclass(frozen=True)
class DualCertificate:
    """Convex combination of extreme supporting functionals with f(y) = 0."""
    components: tuple            # ((lambda, DualFunctional), ...)
    value: object                # f(x - a y)
    f_y: object                  # f(y)
    unique: bool = True          # no ties in the rearrangement
    a: object = None

    @property
    def extreme(self) -> bool:
        return len(self.components) == 1

    def apply(self, u, w: Weight):
        return sum((lam * f.apply(u, w) for lam, f in self.components), Fraction(0))

    def to_json(self) -> dict:
        return {"components": [[str(l), f.to_json()] for l, f in self.components],
                "value": str(self.value), "f_y": str(self.f_y), "unique": self.unique}


@dataclass(frozen=True)
class Refutation:
    """No supporting functional of x - a y annihilates y.

    ``direction`` is +1 when increasing a lowers the residual, -1 otherwise;
    ``slope`` is the one-sided derivative in that direction (negative).
    """
    a: object
    f_y_min: object
    f_y_max: object
    direction: int
    slope: object

    def to_json(self) -> dict:
        return {"refuted": True, "a": str(self.a), "f_y_min": str(self.f_y_min),
                "f_y_max": str(self.f_y_max), "direction": self.direction}


def _supporting_range(v: list, yv: list, w: Weight, ranking=None, tol=0):
    """Extreme supporting functionals of v giving min and max of f(y)."""
    n = len(v)
    supp = [j for j in range(n) if abs(v[j]) > tol]
    zeros = [j for j in range(n) if abs(v[j]) <= tol]
    if ranking is not None:
        order = [j - 1 for j in ranking if abs(v[j - 1]) > tol]
        if sorted(order) != sorted(supp):
            raise ValueError("ranking must list every support index exactly once")
        groups = [[j] for j in order]
    else:
        order = sorted(supp, key=lambda j: (-abs(v[j]), j))
        groups = []
        for j in order:
            if groups and abs(abs(v[groups[-1][0]]) - abs(v[j])) <= tol:
                groups[-1].append(j)
            else:
                groups.append([j])
    unique = all(len(g) == 1 for g in groups) and not (zeros and any(yv[j] for j in zeros))
    sg = lambda t: (t > 0) - (t < 0)
    signs_hi, signs_lo = [0] * n, [0] * n
    ranks_hi, ranks_lo = [0] * n, [0] * n
    r = 1
    for g in groups:
        block = list(range(r, r + len(g)))
        key = [sg(v[j]) * yv[j] for j in g]
        desc = sorted(range(len(g)), key=lambda i: (-key[i], g[i]))
        asc = sorted(range(len(g)), key=lambda i: (key[i], g[i]))
        for pos, i in enumerate(desc):
            signs_hi[g[i]], ranks_hi[g[i]] = sg(v[g[i]]), block[pos]
        for pos, i in enumerate(asc):
            signs_lo[g[i]], ranks_lo[g[i]] = sg(v[g[i]]), block[pos]
        r += len(g)
    zs = sorted(zeros, key=lambda j: (-abs(yv[j]), j))
    for pos, j in enumerate(zs):
        s = sg(yv[j]) or 1
        signs_hi[j], ranks_hi[j] = s, r + pos
        signs_lo[j], ranks_lo[j] = -s, r + pos
    f_hi = DualFunctional(tuple(signs_hi), tuple(ranks_hi))
    f_lo = DualFunctional(tuple(signs_lo), tuple(ranks_lo))
    return f_lo, f_hi, unique


def dual_certificate(x: Seq, y: Seq, a, w: Weight, ranking=None, strict: bool = False,
                     tol: float | None = None):
    """Supporting functional f of x - a y with f(y) = 0, or a Refutation.

    ``a`` is optimal iff such f exists.  Ties in |x - a y| make the extreme
    supporting functional non-unique; by default the lower index gets the
    smaller rank and the certificate is flagged ``unique=False``, while
    ``strict=True`` raises instead.  Tails are ignored: pass truncations.
    """
    n = max(x.H, y.H)
    xv, yv = x.entries(n), y.entries(n)
    a = a if isinstance(a, (Fraction, int)) else float(a)
    v = [p - a * q for p, q in zip(xv, yv)]
    exact = all(isinstance(t, (Fraction, int)) for t in v + yv) and w.exact
    if tol is None:
        tol = 0 if exact else 1e-12 * max(1.0, max((abs(float(t)) for t in v), default=1.0))
    f_lo, f_hi, unique = _supporting_range(v, yv, w, ranking, tol)
    if strict and not unique and ranking is None:
        raise CertificateNotUnique("ties in the rearrangement: supply a ranking")
    lo, hi = f_lo.apply(yv, w), f_hi.apply(yv, w)
    vs = Seq(v)
    ftol = 0 if exact else 1e3 * tol
    if lo <= ftol and hi >= -ftol:
        if abs(hi) <= ftol:
            comps = ((Fraction(1), f_hi),)
        elif abs(lo) <= ftol:
            comps = ((Fraction(1), f_lo),)
        else:
            lam = hi / (hi - lo)
            comps = ((1 - lam, f_hi), (lam, f_lo))
        cert = DualCertificate(comps, 0, 0, unique, a)
        val = cert.apply(vs, w)
        fy = cert.apply(Seq(yv), w)
        return DualCertificate(comps, val, fy, unique, a)
    if hi < 0:
        return Refutation(a, lo, hi, -1, hi)
    return Refutation(a, lo, hi, 1, -lo)


# -- the projection interval ---------------------------------------------------

@dataclass
class ProjectionInterval:
    """P_Y(x) = [lo, hi] * y.

    In certified mode ``lo`` and ``hi`` are the computed edges of the flat
    minimising set and [lo - lo_err, hi + hi_err] is certified to contain
    P_Y(x).
    """
    lo: object
    hi: object
    dist: Bound
    attained_at: list = field(default_factory=list)
    certificate: object = None
    lo_err: float = 0.0
    hi_err: float = 0.0
    mode: str = "exact"
    truncation: int = 0

    @property
    def outer(self) -> tuple[float, float]:
        return float(self.lo) - self.lo_err, float(self.hi) + self.hi_err

    @property
    def width(self) -> float:
        return float(self.hi) - float(self.lo)

    @property
    def singleton(self) -> bool:
        return self.mode == "exact" and self.lo == self.hi

    def to_json(self) -> dict:
        num = lambda t: str(t) if isinstance(t, Fraction) else float(t)
        return {"lo": num(self.lo), "hi": num(self.hi), "dist": num(self.dist.value),
                "err": self.dist.error, "lo_err": self.lo_err, "hi_err": self.hi_err,
                "mode": self.mode, "outer": list(self.outer),
                "certificate": None if self.certificate is None else self.certificate.to_json()}


def residual_norm(x: Seq, y: Seq, a, w: Weight, tol: float = 1e-12) -> Bound:
    """||x - a y||_{w,1}."""
    return lorentz_norm(x.combine(1, y, -_num(a)), w, tol)


def _num(a):
    return a if isinstance(a, (Fraction, int)) else float(a)


def _is_zero(y: Seq) -> bool:
    if any(v != 0 for v in y.head):
        return False
    return y.tail is None or (isinstance(y.tail, LinearTail) and not y.tail.terms)


def projection_interval(x: Seq, y: Seq, w: Weight, tol: float = 1e-9,
                        mode: str = "auto", certificate: bool = True) -> ProjectionInterval:
    if _is_zero(y):
        raise DegenerateSubspace("y = 0 spans no line")
    if mode == "auto":
        mode = "exact" if x.tail is None and y.tail is None else "certified"
    if mode == "exact":
        if x.tail is not None or y.tail is not None:
            raise ValueError("exact mode needs finitely supported x and y")
        return _exact_interval(x, y, w, certificate)
    if mode != "certified":
        raise ValueError(f"unknown mode {mode!r}")
    return _certified_interval(x, y, w, tol)


# exact mode

def _phi(xs, ys, ws, c):
    vals = sorted((abs(p - c * q) for p, q in zip(xs, ys)), reverse=True)
    return sum((v * u for v, u in zip(vals, ws)), Fraction(0))


def breakpoints(xs, ys) -> list:
    """All c where the ordering of |x_i - c y_i| or a sign can change."""
    pts = set()
    n = len(xs)
    for i in range(n):
        if ys[i] != 0:
            pts.add(xs[i] / ys[i])
        for j in range(i + 1, n):
            d = ys[i] - ys[j]
            if d != 0:
                pts.add((xs[i] - xs[j]) / d)
            s = ys[i] + ys[j]
            if s != 0:
                pts.add((xs[i] + xs[j]) / s)
    return sorted(pts)


def _exact_interval(x: Seq, y: Seq, w: Weight, certificate: bool) -> ProjectionInterval:
    n = max(x.H, y.H)
    xs, ys = x.entries(n), y.entries(n)
    exact = all(isinstance(t, (Fraction, int)) for t in xs + ys) and w.exact
    if exact:
        xs, ys = [Fraction(t) for t in xs], [Fraction(t) for t in ys]
        ws = [w(k) for k in range(1, n + 1)]
    else:
        xs, ys = [float(t) for t in xs], [float(t) for t in ys]
        ws = [float(w(k)) for k in range(1, n + 1)]
    pts = breakpoints(xs, ys)
    f = lambda c: _phi(xs, ys, ws, c)
    # convex over the sorted breakpoints: binary search for a minimiser
    lo_i, hi_i = 0, len(pts) - 1
    while hi_i - lo_i > 2:
        m1 = lo_i + (hi_i - lo_i) // 3
        m2 = hi_i - (hi_i - lo_i) // 3
        if f(pts[m1]) <= f(pts[m2]):
            hi_i = m2
        else:
            lo_i = m1
    k = min(range(lo_i, hi_i + 1), key=lambda i: (f(pts[i]), i))
    m = f(pts[k])
    same = (lambda t: t == m) if exact else (lambda t: t <= m + 1e-12 * (1 + abs(m)))
    i = k
    while i > 0 and same(f(pts[i - 1])):
        i -= 1
    j = k
    while j < len(pts) - 1 and same(f(pts[j + 1])):
        j += 1
    lo, hi = pts[i], pts[j]
    err = 0.0 if exact else 8 * _EPS * n * (1 + abs(float(m)))
    cert = None
    if certificate:
        cert = dual_certificate(Seq(xs), Seq(ys), lo, w)
    mid = (lo + hi) / 2
    return ProjectionInterval(lo, hi, Bound(m, err), [lo, mid, hi], cert, 0.0, 0.0,
                              "exact", n)


def exact_objective(x: Seq, y: Seq, w: Weight):
    """The residual c -> ||x - c y|| as a callable with its breakpoint list."""
    n = max(x.H, y.H)
    xs, ys = x.entries(n), y.entries(n)
    ws = [w(k) for k in range(1, n + 1)]
    return (lambda c: _phi(xs, ys, ws, c)), breakpoints(xs, ys)


# certified mode

@dataclass
class _Parts:
    phi: float
    rnd: float
    herr: float
    T: float
    Terr: float
    regime: int | None
    upper_head: float       # big + displaced part of the upper bound
    rho: float
    env: float


class CertifiedObjective:
    """Two-sided bounds for phi(c) = ||x - c y||_{w,1} at truncation N."""

    def __init__(self, x: Seq, y: Seq, w: Weight, N: int, tol: float):
        self.x, self.y, self.w, self.N = x, y, w, N
        self.X, self.Y = x.floats(N), y.floats(N)
        self.wN = w.values(N)
        zero = Bound(0.0, 0.0)
        self.Tx = weighted_tail_sum(x.tail, w, N, tol / 64) if x.tail is not None else zero
        self.Ty = weighted_tail_sum(y.tail, w, N, tol / 64) if y.tail is not None else zero
        self.xn = float(x.tail(np.array([N + 1]))[0]) if x.tail is not None else 0.0
        self.yn = float(y.tail(np.array([N + 1]))[0]) if y.tail is not None else 0.0
        self.normY = float(np.sum(np.sort(np.abs(self.Y))[::-1] * self.wN))
        self.EX = error_norm(x.float_errs(N), w)
        self.EY = error_norm(y.float_errs(N), w)

    def tail_rule(self, c):
        terms = []
        if self.x.tail is not None:
            terms.append((1, self.x.tail))
        if self.y.tail is not None and c != 0:
            terms.append((-c, self.y.tail))
        return LinearTail(terms) if terms else None

    def parts(self, c: float) -> _Parts:
        N, wN = self.N, self.wN
        a = np.sort(np.abs(self.X - c * self.Y))[::-1]
        prods = a * wN
        phi = math.fsum(prods)
        # product rounding, rounding of X - c Y, and errors already in X and Y
        rnd = (2 * _EPS * float(prods.sum()) + _EPS * (phi + abs(c) * self.normY)
               + self.EX + abs(c) * self.EY + 1e-300)
        herr = 0.0
        T = self.Tx.value - c * self.Ty.value
        Terr = self.Tx.error + abs(c) * self.Ty.error
        rule = self.tail_rule(c)
        reg = 1 if rule is None else rule.regime
        if reg is not None:
            t_next = abs(self.xn - c * self.yn)
            nb = int(np.searchsorted(-a, -t_next, side="right"))
            k = N - nb
            rho = weight_ratio(self.w, N, k)
            upper_head = math.fsum(prods[:nb]) + (float(a[nb:].sum()) * float(wN[nb]) if k else 0.0)
            env = 0.0
        else:
            rho, upper_head = math.inf, phi
            C = (self.x.tail.envelope[0] if self.x.tail is not None else 0.0) + \
                (abs(c) * self.y.tail.envelope[0] if self.y.tail is not None else 0.0)
            s = min(r.envelope[1] for r in (self.x.tail, self.y.tail) if r is not None)
            env = envelope_tail_norm(C, s, N, self.w)
        return _Parts(phi, rnd, herr, T, Terr, reg, upper_head, rho, env)

    def lower(self, c: float, p: _Parts | None = None) -> float:
        p = p or self.parts(c)
        return p.phi + max(abs(p.T) - p.Terr, 0.0) - p.rnd - p.herr

    def upper(self, c: float, p: _Parts | None = None) -> float:
        p = p or self.parts(c)
        if p.regime is not None:
            return p.upper_head + p.rho * (abs(p.T) + p.Terr) + p.rnd + p.herr
        return p.phi + p.env + p.rnd + p.herr

    def model(self, c: float) -> float:
        p = self.parts(c)
        return p.phi + abs(p.T)

    def increase(self, c1: float, c2: float) -> float:
        """Certified lower bound of phi(c2) - phi(c1)."""
        p1, p2 = self.parts(c1), self.parts(c2)
        if p1.regime is not None and math.isfinite(p1.rho):
            d = c2 - c1
            return (p2.phi - p1.upper_head - p1.regime * d * self.Ty.value
                    - abs(d) * self.Ty.error - (p1.rho - 1) * (abs(p1.T) + p1.Terr)
                    - p1.rnd - p2.rnd - p1.herr - p2.herr)
        return self.lower(c2, p2) - self.upper(c1, p1)


def _golden(f, a: float, b: float, xtol: float, maxit: int = 200):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    it = 0
    while b - a > xtol and it < maxit:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
        it += 1
    return (c, fc) if fc <= fd else (d, fd)


def _level_edge(f, inside: float, outside: float, level: float, xtol: float) -> float:
    """Bisect for the boundary of {f <= level} between an inside and an outside point."""
    while abs(outside - inside) > xtol:
        mid = 0.5 * (inside + outside)
        if f(mid) <= level:
            inside = mid
        else:
            outside = mid
    return inside


def _snap(c: float) -> list[float]:
    out = [c]
    for den in (1, 2, 3, 4, 6, 8):
        r = round(c * den) / den
        if r != c and abs(r - c) < 1e-9:
            out.append(r)
    return out


def _certified_interval(x: Seq, y: Seq, w: Weight, tol: float) -> ProjectionInterval:
    nx = lorentz_norm(x, w, 1e-6)
    ny = lorentz_norm(y, w, 1e-6)
    if ny.lo <= 0:
        raise DegenerateSubspace("||y|| is not certified positive")
    B = 2 * nx.hi / ny.lo * (1 + 1e-12) + 1e-300
    starts = [r.start - 1 for r in (x.tail, y.tail) if r is not None]
    N = max([x.H, y.H, 64] + starts)
    while True:
        obj = CertifiedObjective(x, y, w, N, tol)
        xtol = tol / 16
        c_star, m = _golden(obj.model, -B, B, xtol)
        gap = obj.upper(c_star) - obj.lower(c_star)
        if gap <= tol / 4 or N >= MAX_TRUNC:
            break
        N = min(4 * N, MAX_TRUNC)
    if gap > tol:
        raise ToleranceUnreachable(f"objective enclosure {gap:.3g} exceeds tol {tol:g}")
    noise = 16 * obj.parts(c_star).rnd + 4 * _EPS * abs(m)
    level = m + noise
    ell = _level_edge(obj.model, c_star, -B, level, xtol)
    h = _level_edge(obj.model, c_star, B, level, xtol)
    hi_out = _outer_edge(obj, h, +1, tol, B)
    lo_out = _outer_edge(obj, ell, -1, tol, B)
    lip = obj.normY + abs(obj.Ty.value) + obj.Ty.error
    d_lo = obj.lower(c_star) - lip * xtol
    d_hi = obj.upper(c_star)
    dist = Bound(0.5 * (d_lo + d_hi), 0.5 * (d_hi - d_lo))
    lo, hi = ell, h
    return ProjectionInterval(lo, hi, dist, [c_star, ell, 0.5 * (ell + h), h], None,
                              max(lo - lo_out, 0.0), max(hi_out - hi, 0.0), "certified", N)


def _outer_edge(obj: CertifiedObjective, edge: float, side: int, tol: float, B: float) -> float:
    """Point beyond ``edge`` (on ``side``) certified to lie outside P_Y(x)."""
    best = side * B
    for c1 in _snap(edge):
        step = tol / 8
        while step <= 2 * B:
            c2 = c1 + side * step
            if obj.increase(c1, c2) > 0:
                cand = c2
                best = min(best, cand) if side > 0 else max(best, cand)
                break
            step *= 2
    return best


# -- strong unicity ----------------------------------------------------------

def strong_unicity_estimate(x: Seq, y: Seq, w: Weight, samples=None):
    """r with ||x - a y|| >= dist + r |a - a0| ||y|| for all a.

    For a convex piecewise linear objective the sharpest r comes from the two
    one-sided slopes at a0, read off the neighbouring breakpoints.  Extra
    ``samples`` only tighten (lower) the returned value.
    """
    P = projection_interval(x, y, w, mode="exact", certificate=False)
    if P.lo != P.hi:
        raise NotStronglyUnique(f"P_Y(x) = [{P.lo}, {P.hi}] is not a single point")
    a0 = P.lo
    f, pts = exact_objective(x, y, w)
    m = f(a0)
    ny = lorentz_norm(y, w).value
    right = [p for p in pts if p > a0]
    left = [p for p in pts if p < a0]
    b_r = right[0] if right else a0 + 1
    b_l = left[-1] if left else a0 - 1
    slopes = [(f(b_r) - m) / (b_r - a0), (f(b_l) - m) / (a0 - b_l)]
    for a in samples or ():
        a = _num(a)
        if a != a0:
            slopes.append((f(a) - m) / abs(a - a0))
    return min(slopes) / ny


def freud_check(x: Seq, x_new: Seq, y: Seq, w: Weight, r) -> tuple[bool, float, float]:
    """Lipschitz stability ||y_n - y_0|| <= 2 ||x_n - x|| / r.

    Returns (holds, lhs, rhs) with lhs the largest distance from a point of
    P_Y(x_new) to the best approximation of x.
    """
    P0 = projection_interval(x, y, w, mode="exact", certificate=False)
    P1 = projection_interval(x_new, y, w, mode="exact", certificate=False)
    ny = float(lorentz_norm(y, w).value)
    a0 = P0.lo
    lhs = max(abs(float(P1.lo - a0)), abs(float(P1.hi - a0))) * ny
    rhs = 2 * float(lorentz_norm(x_new - x, w).value) / float(r)
    return lhs <= rhs * (1 + 1e-12), lhs, rhs
