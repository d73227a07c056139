"""Independent reference computations used by the tests.

Nothing here imports the package: the oracles work from the definitions
with numpy floats for coarse searches and mpmath for refinement.
"""

from fractions import Fraction

import mpmath
import numpy as np


def lorentz_float(v, w):
    """sum x*(n) w(n) for a finite vector with a float weight array."""
    a = np.sort(np.abs(np.asarray(v, float)))[::-1]
    return float(a @ np.asarray(w, float)[:a.size])


def projection_oracle(xs, ys, grid=4001, dps=40):
    """Minimiser interval [lo, hi] and min value of c -> sum_n |x - c y|*(n) / n.

    A dense float grid finds the bracket; mpmath golden section pins the
    minimum value and bisection on the sublevel set {f <= m + thr} pins the
    two edges.  Returns floats.
    """
    xs = [Fraction(t) for t in xs]
    ys = [Fraction(t) for t in ys]
    n = len(xs)
    wf = 1.0 / np.arange(1, n + 1)
    X, Y = np.array([float(t) for t in xs]), np.array([float(t) for t in ys])
    B = 2 * lorentz_float(X, wf) / lorentz_float(Y, wf) + 1.0
    cs = np.linspace(-B, B, grid)
    vals = np.sort(np.abs(X[None, :] - cs[:, None] * Y[None, :]), axis=1)[:, ::-1] @ wf
    i = int(np.argmin(vals))
    h = cs[1] - cs[0]
    with mpmath.workdps(dps):
        mx = [mpmath.mpf(t.numerator) / t.denominator for t in xs]
        my = [mpmath.mpf(t.numerator) / t.denominator for t in ys]
        mw = [mpmath.mpf(1) / k for k in range(1, n + 1)]

        def f(c):
            a = sorted((abs(p - c * q) for p, q in zip(mx, my)), reverse=True)
            return mpmath.fsum(u * v for u, v in zip(a, mw))

        a, b = mpmath.mpf(cs[i]) - h, mpmath.mpf(cs[i]) + h
        g = (mpmath.sqrt(5) - 1) / 2
        xtol = mpmath.mpf(10) ** (-(dps - 8))
        c1, c2 = b - g * (b - a), a + g * (b - a)
        f1, f2 = f(c1), f(c2)
        while b - a > xtol:
            if f1 <= f2:
                b, c2, f2 = c2, c1, f1
                c1 = b - g * (b - a)
                f1 = f(c1)
            else:
                a, c1, f1 = c1, c2, f2
                c2 = a + g * (b - a)
                f2 = f(c2)
        cstar = c1 if f1 <= f2 else c2
        m = min(f1, f2)
        thr = mpmath.mpf(10) ** (-(dps - 15))

        def edge(out):
            inside = cstar
            while f(out) <= m + thr:
                out = inside + 2 * (out - inside)
            while abs(out - inside) > xtol:
                mid = (inside + out) / 2
                if f(mid) <= m + thr:
                    inside = mid
                else:
                    out = mid
            return inside

        lo, hi = edge(cstar - h), edge(cstar + h)
        return float(lo), float(hi), float(m)


def random_rational(rng, size, num=9, den=9, zero_p=0.2):
    out = []
    for _ in range(size):
        if rng.random() < zero_p:
            out.append(Fraction(0))
        else:
            out.append(Fraction(int(rng.integers(-num, num + 1)), int(rng.integers(1, den + 1))))
    return out


# -- grid functions: everything from the distribution function ---------------

def distribution(values, mu):
    a, m = np.abs(np.asarray(values, float)), np.asarray(mu, float)
    return lambda s: float(m[a > s].sum())


def decreasing_rearrangement_at(values, mu, t):
    """x*(t) = inf{s >= 0 : d(s) <= t}; the infimum is attained at 0 or a value."""
    d = distribution(values, mu)
    cands = sorted({0.0} | {float(abs(v)) for v in values})
    return next(s for s in cands if d(s) <= t)


def primitive_of_rearrangement(values, mu, t):
    """int_0^t x* = int_0^inf min(d(s), t) ds (layer cake)."""
    from scipy.integrate import quad
    d = distribution(values, mu)
    top = float(np.max(np.abs(values))) if len(values) else 0.0
    if top == 0:
        return 0.0
    pts = sorted({float(abs(v)) for v in values if 0 < abs(v) < top})
    val, _ = quad(lambda s: min(d(s), t), 0, top, points=pts or None, epsabs=1e-13, limit=200)
    return val


def lorentz_quad(values, mu, dens, p=1.0, maximal=False):
    """(int_0^mu(T) g(t)^p dens(t) dt)^(1/p) with g = x* or x** by quadrature."""
    from scipy.integrate import quad
    total = float(np.sum(mu))
    d = distribution(values, mu)
    # x* jumps where t crosses d(|v|)
    knots = sorted({d(abs(float(v))) for v in values} | {total})
    if maximal:
        g = lambda t: primitive_of_rearrangement(values, mu, t) / t
    else:
        g = lambda t: decreasing_rearrangement_at(values, mu, t)
    out = 0.0
    lo = 0.0
    for hi in knots:
        if hi > lo:
            v, _ = quad(lambda t: g(t) ** p * dens(t), lo, hi, epsabs=1e-13, epsrel=1e-11, limit=200)
            out += v
        lo = hi
    assert abs(lo - total) < 1e-12
    return out ** (1 / p)
