"""Decreasing rearrangements and the d(w,1), d*(w,1) norms.

Finitely supported exact data give exact rational answers.  Sequences with
an analytic tail get a certified enclosure: the first N entries are sorted
explicitly and the tail is either summed in closed form (when it is
monotone and sits below the truncated part) or bounded by its envelope.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np
import scipy.special as sp

from .errors import InfiniteVariation, ToleranceUnreachable, UnrearrangeableTail
from .seq import Bound, Seq
from .tails import TailRule, VariationTail
from .weights import Weight

_EPS = float(np.finfo(float).eps)
MAX_TRUNC = 2 ** 22


class Rearranged(NamedTuple):
    values: tuple            # x*(1) >= x*(2) >= ... on the first N slots
    permutation: tuple       # original 1-based index of each slot


def decreasing_rearrangement(x: Seq, N: int | None = None) -> Rearranged:
    """Nonincreasing |x| values on the first N slots; ties keep index order."""
    if x.tail is not None:
        if x.tail.regime is None:
            raise UnrearrangeableTail("tail rule is not known to be monotone")
        if N is None or N < x.H:
            raise ValueError("a truncation N >= head length is required with a tail")
        # the tail is monotone; extend until it sits below everything kept
        M = max(N, x.H)
        while True:
            vals = [abs(v) for v in x.entries(M)]
            t_next = abs(x.tail.value(M + 1))
            if t_next <= min(v for v in vals[:N]) or M >= MAX_TRUNC:
                break
            M *= 2
    else:
        M = x.H if N is None else max(N, x.H)
        vals = [abs(v) for v in x.entries(M)]
    order = sorted(range(M), key=lambda i: (-vals[i], i))
    n = M if N is None else N
    order = order[:n]
    return Rearranged(tuple(vals[i] for i in order), tuple(i + 1 for i in order))


# -- tail sums ---------------------------------------------------------------

def weighted_tail_sum(rule: TailRule, w: Weight, N: int, target: float = 1e-13) -> Bound:
    """sum_{n > N} w(n) t(n) with a certified error."""
    key = (id(w), N)
    cached = rule._cache.get(key) if hasattr(rule, "_cache") else None
    if cached is not None and (cached.error <= target or cached[1] == math.inf):
        return cached
    closed = rule.weighted_sum(N, w)
    if closed is not None:
        out = Bound(*closed)
    else:
        out = _numeric_tail_sum(rule, w, N, target)
    if hasattr(rule, "_cache"):
        rule._cache[key] = out
    return out


def _numeric_tail_sum(rule: TailRule, w: Weight, N: int, target: float) -> Bound:
    C, s = rule.envelope
    K, a = w.decay
    q = s + a
    if q <= 1:
        return Bound(0.0, math.inf)
    total, mass = [], 0.0
    M, chunk = N, 1 << 14
    while True:
        n = np.arange(M + 1, M + chunk + 1)
        wn = w.at(n)
        terms = rule(n) * wn
        total.append(math.fsum(terms))
        mass += float(np.abs(terms).sum()) + float(np.sum(rule.abs_err(n) * wn)) / _EPS
        M += chunk
        rem = C * K * M ** (1 - q) / (q - 1)
        if rem <= target or M >= MAX_TRUNC * 2:
            break
        chunk = min(2 * chunk, 1 << 20)
    return Bound(math.fsum(total), rem + 2 * _EPS * mass + 1e-300)


def envelope_tail_norm(C: float, s: float, N: int, w: Weight) -> float:
    """Upper bound of ||u||_{w,1} for any u supported on n > N with |u(n)| <= C n^-s."""
    if C == 0:
        return 0.0
    K, a = w.decay
    q = s + a
    if q <= 1:
        return math.inf
    J = max(4 * N, 4096)
    j = np.arange(1, J + 1)
    head = float(np.sum(C * (N + j).astype(float) ** -s * w.at(j)))
    return head * (1 + 4 * _EPS) + C * K * J ** (1 - q) / (q - 1)


def weight_ratio(w: Weight, N: int, k: int) -> float:
    """sup_{n > N} w(n-k)/w(n)."""
    if k == 0:
        return 1.0
    if N + 1 - k <= len(w.table):
        return math.inf
    return ((N + 1) / (N + 1 - k)) ** float(w.alpha) * (1 + 4 * _EPS)


# -- the d(w,1) norm ---------------------------------------------------------

def error_norm(errs: np.ndarray, w: Weight) -> float:
    """Bound on sum_j errs(j) w(rank(j)) over every ranking (rearrangement inequality)."""
    if not len(errs):
        return 0.0
    e = np.sort(errs)[::-1]
    return float(np.sum(e * w.values(len(e)))) * (1 + 4 * _EPS)


def enclosure(vals: np.ndarray, t_next: float, T_abs: Bound, regime: int | None,
              w: Weight, N: int, env: tuple[float, float] | None = None,
              err_norm: float = 0.0) -> tuple[float, float]:
    """[lower, upper] for ||v||_{w,1} from |v(1..N)| and tail data.

    ``T_abs`` encloses sum_{n>N} w(n)|v(n)| (meaningful only if ``regime``
    is set); ``env`` is the envelope of the tail used otherwise;
    ``err_norm`` bounds the effect of errors in ``vals``.
    """
    a = np.sort(np.abs(vals))[::-1]
    wN = w.values(N)
    prods = a * wN
    phi = math.fsum(prods)
    rnd = 2 * _EPS * float(np.abs(prods).sum()) + 1e-300
    herr = err_norm
    if regime is not None:
        lower = phi + max(T_abs.value - T_abs.error, 0.0)
        big = a[a >= t_next]
        k = N - len(big)
        rho = weight_ratio(w, N, k)
        upper = (math.fsum(big * wN[:len(big)])
                 + (float(a[len(big):].sum()) * float(wN[len(big)]) if k else 0.0)
                 + rho * (T_abs.value + T_abs.error))
    else:
        lower = phi
        C, s = env if env is not None else (0.0, 1.0)
        upper = phi + envelope_tail_norm(C, s, N, w)
    return lower - rnd - herr, upper + rnd + herr


def lorentz_norm(x: Seq, w: Weight, tol: float = 1e-12) -> Bound:
    """||x||_{w,1} = sum x*(n) w(n) with certified error <= tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if x.tail is None:
        vals = sorted((abs(v) for v in x.head), reverse=True)
        if x.is_exact and w.exact:
            return Bound(sum((v * w(i) for i, v in enumerate(vals, start=1)), Fraction(0)), 0.0)
        lo, hi = enclosure(np.array([float(v) for v in vals]), 0.0, Bound(0.0), 1, w,
                           len(vals), err_norm=error_norm(x.float_errs(x.H), w))
        return Bound(0.5 * (lo + hi), 0.5 * (hi - lo))
    N = max(x.H, x.tail.start - 1, 16)
    tail = x.tail
    if tail.envelope[0] > 0 and tail.envelope[1] + w.decay[1] <= 1:
        raise ToleranceUnreachable("tail envelope is not summable against the weight")
    while True:
        lo, hi = _tail_norm_bounds(x, w, N, tol)
        if hi - lo <= 2 * tol:
            return Bound(0.5 * (lo + hi), 0.5 * (hi - lo))
        if N >= MAX_TRUNC:
            raise ToleranceUnreachable(
                f"norm enclosure width {hi - lo:.3g} at truncation {N} exceeds tol {tol:g}")
        N = min(2 * N, MAX_TRUNC)


def _tail_norm_bounds(x: Seq, w: Weight, N: int, tol: float) -> tuple[float, float]:
    tail = x.tail
    vals = x.floats(N)
    reg = tail.regime
    if reg is not None:
        T = weighted_tail_sum(tail, w, N, tol / 8)
        T_abs = Bound(abs(T.value), T.error)
        t_next = abs(float(tail(np.array([N + 1]))[0]))
    else:
        T_abs, t_next = Bound(0.0, 0.0), 0.0
    return enclosure(vals, t_next, T_abs, reg, w, N, tail.envelope,
                     error_norm(x.float_errs(N), w))


# -- the d*(w,1) norm --------------------------------------------------------

def marcinkiewicz_norm(x: Seq, w: Weight, tol: float = 1e-12) -> Bound:
    """sup_n (x*(1) + ... + x*(n)) / W(n) with certified error."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if x.tail is None:
        vals = sorted((abs(v) for v in x.head), reverse=True)
        if not vals:
            return Bound(Fraction(0), 0.0)
        if x.is_exact and w.exact:
            best, S, W = Fraction(0), Fraction(0), Fraction(0)
            for i, v in enumerate(vals, start=1):
                S += v
                W += w(i)
                best = max(best, S / W)
            return Bound(best, 0.0)
        a = np.array([float(v) for v in vals])
        Wn = w.partial_sums(len(a))
        r = np.cumsum(a) / Wn
        n = np.arange(1, len(a) + 1)
        err = x.head_err * float(np.max(n / Wn)) + 4 * _EPS * float(r.max()) * len(a)
        return Bound(float(r.max()), err)
    C, s = x.tail.envelope
    N = max(x.H, x.tail.start - 1, 16)
    while True:
        a = np.sort(np.abs(x.floats(N)))[::-1]
        S = np.cumsum(a)
        Wn = w.partial_sums(N)
        n = np.arange(1, N + 1)
        lower = float(np.max(S / Wn))
        e = C * (N + 1) ** -s
        if s > 1:
            Tl1 = C * float(sp.zeta(s, N + 1))
        else:
            Tl1 = math.inf
        upper = float(np.max((S + np.minimum(n * e, Tl1)) / Wn))
        beyond = (S[-1] + Tl1) / (Wn[-1] + float(w(N + 1)))
        if s >= float(w.alpha) and N >= len(w.table):
            # C j^-s / w(j) is nonincreasing past N, so each further ratio is a
            # mediant of S_N/W_N and terms no larger than the first one
            rho = e / float(w(N + 1))
            beyond = min(beyond, max(float(S[-1] / Wn[-1]), rho))
        upper = max(upper, beyond)
        herr = x.head_err * float(np.max(n / Wn))
        upper += herr + 8 * _EPS * upper * math.log2(N)
        if upper - lower <= 2 * tol:
            return Bound(0.5 * (lower + upper), 0.5 * (upper - lower))
        if N >= MAX_TRUNC or not math.isfinite(upper):
            raise ToleranceUnreachable(
                f"Marcinkiewicz enclosure width {upper - lower:.3g} at truncation {N}")
        N = min(2 * N, MAX_TRUNC)


# -- total variation ---------------------------------------------------------

def _tail_variation_at(rule: TailRule, m: int, target: float = 1e-14) -> Bound:
    """sum_{l >= m} |t(l) - t(l+1)| for m >= rule.start."""
    ex = rule.exact_variation_sum(m)
    if ex is not None:
        return Bound(ex, 0.0)
    pr = rule.precise_variation_sum(m)
    if pr is not None:
        return Bound(*pr)
    vs = rule.variation_sum(np.array([m]))
    if vs is not None:
        v = float(vs[0])
        return Bound(v, float(rule.variation_err(m, v)))
    if rule.variation is None or rule.variation[1] <= 1:
        raise InfiniteVariation("tail variation is not certified summable")
    cv, sv = rule.variation
    parts, M, chunk = [], m, 1 << 14
    while True:
        n = np.arange(M, M + chunk + 1)
        parts.append(math.fsum(np.abs(np.diff(rule(n)))))
        M += chunk
        rem = cv * (M - 1) ** (1 - sv) / (sv - 1)
        if rem <= target or M >= MAX_TRUNC:
            break
        chunk = min(2 * chunk, 1 << 20)
    total = math.fsum(parts)
    return Bound(total, rem + 4 * _EPS * total * math.log2(M))


def tail_variation(y: Seq, j: int) -> Bound:
    """z(j) = sum_{l >= j} |y(l+1) - y(l)|."""
    if j < 1:
        raise IndexError("indices start at 1")
    if y.tail is None:
        H = y.H
        if j > H:
            return Bound(Fraction(0), 0.0)
        tot = sum((abs(y.entry(l) - y.entry(l + 1)) for l in range(j, H + 1)), Fraction(0))
        return Bound(tot, 2 * (H - j + 1) * y.head_err)
    start = max(y.H + 1, y.tail.start)
    if j >= start:
        return _tail_variation_at(y.tail, j)
    rest = _tail_variation_at(y.tail, start)
    head = sum((abs(y.entry(l) - y.entry(l + 1)) for l in range(j, start)), Fraction(0))
    n_head = start - j
    err = rest.error + 2 * n_head * y.head_err + 4 * _EPS * n_head * abs(float(head))
    if isinstance(head, Fraction) and isinstance(rest.value, Fraction) and err == 0:
        return Bound(head + rest.value, 0.0)
    return Bound(float(head) + float(rest.value), err)


def variation_sequence(y: Seq) -> Seq:
    """z = (z(1), z(2), ...) as a Seq sharing the structure of y."""
    if y.tail is None:
        H = y.H
        z, acc = [], Fraction(0)
        for l in range(H, 0, -1):
            acc = acc + abs(y.entry(l) - y.entry(l + 1))
            z.append(acc)
        return Seq(z[::-1], None, 2 * H * y.head_err)
    H = max(y.H, y.tail.start - 1)
    y = y.extend(H)
    rest = _tail_variation_at(y.tail, H + 1)
    acc, z = rest.value, []
    exact = isinstance(acc, Fraction)
    for l in range(H, 0, -1):
        d = abs(y.entry(l) - y.entry(l + 1))
        if exact and isinstance(d, Fraction):
            acc = acc + d
        else:
            exact = False
            acc = float(acc) + float(d)
        z.append(acc)
    err = rest.error + 2 * H * y.head_err + (0 if exact else 4 * _EPS * H * float(acc))
    try:
        tail = VariationTail(y.tail)
    except ValueError as exc:
        raise InfiniteVariation(str(exc)) from exc
    return Seq(z[::-1], tail, err)


def weighted_series(x: Seq, w: Weight, tol: float = 1e-13) -> Bound:
    """sum_n w(n) x(n) (signed) with certified error."""
    head = [x.entry(n) * w(n) for n in range(1, x.H + 1)]
    if all(isinstance(v, Fraction) for v in head) and x.head_err == 0 and x.tail is None:
        return Bound(sum(head, Fraction(0)), 0.0)
    hv = math.fsum(float(v) for v in head)
    err = x.head_err * float(w.partial_sum(x.H)) + 2 * _EPS * sum(abs(float(v)) for v in head)
    if x.tail is None:
        return Bound(hv, err)
    T = weighted_tail_sum(x.tail, w, x.H, tol)
    return Bound(hv + T.value, err + T.error)
