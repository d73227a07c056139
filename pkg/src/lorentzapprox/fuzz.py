"""Randomised norm-axiom and rearrangement checks.

Each property draws its own cases from a seeded generator and reports how
many passed, plus the first failing case. Float comparisons carry the
certified error of the enclosures and a relative slack of 1e-12.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .fspace.grid import GridFunction, GridSpace
from .fspace.norms import FNormSpec, fnorm, maximal_function, rearrangement
from .norms import decreasing_rearrangement, lorentz_norm, marcinkiewicz_norm
from .seq import Seq
from .weights import Weight

_REL = 1e-12


@dataclass
class PropertyResult:
    name: str
    passed: int = 0
    failed: int = 0
    example: dict | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def record(self, good: bool, case: dict):
        if good:
            self.passed += 1
        else:
            self.failed += 1
            if self.example is None:
                self.example = case

    def to_json(self) -> dict:
        return {"property": self.name, "passed": self.passed, "failed": self.failed,
                "ok": self.ok, "example": self.example}


_WEIGHTS = (Weight.harmonic(), Weight.power(0.5), Weight.from_table([3, 2, 1], "power:2"))


def _vec(rng, n=None):
    n = n or int(rng.integers(1, 12))
    v = rng.normal(size=n) * 10.0 ** rng.integers(-3, 3)
    v[rng.random(n) < 0.2] = 0.0
    return v


def _le(a, b, slack=0.0):
    return float(a) <= float(b) + slack + _REL * (abs(float(a)) + abs(float(b)))


def _norm(v, w):
    return lorentz_norm(Seq(v.tolist()), w)


def sequence_suite(rng, cases: int) -> list[PropertyResult]:
    sym = PropertyResult("d(w,1) symmetry")
    lat = PropertyResult("d(w,1) lattice monotonicity")
    tri = PropertyResult("d(w,1) triangle inequality")
    dual = PropertyResult("duality bound |<f,x>| <= |f|_* |x|")
    for _ in range(cases):
        w = _WEIGHTS[int(rng.integers(len(_WEIGHTS)))]
        x = _vec(rng)
        n = x.size
        nx = _norm(x, w)
        perm = rng.permutation(n)
        for other in (_norm(-x, w), _norm(x[perm], w)):
            sym.record(abs(float(other.value) - float(nx.value))
                       <= nx.error + other.error + _REL * abs(float(nx.value)), {"x": x.tolist()})
        bigger = np.sign(x) * (np.abs(x) + rng.random(n) * np.abs(x).max())
        nb = _norm(bigger, w)
        lat.record(_le(nx.lo, nb.hi), {"x": x.tolist(), "y": bigger.tolist()})
        y = _vec(rng, n)
        ny, ns = _norm(y, w), _norm(x + y, w)
        tri.record(_le(ns.lo, nx.hi + ny.hi), {"x": x.tolist(), "y": y.tolist()})
        f = _vec(rng, n)
        nf = marcinkiewicz_norm(Seq(f.tolist()), w)
        lhs = abs(float(np.dot(f, x)))
        dual.record(_le(lhs, nf.hi * nx.hi), {"f": f.tolist(), "x": x.tolist()})
    return [sym, lat, tri, dual]


def _grid(rng, n):
    return GridSpace(rng.uniform(0.1, 1.0, n))


_SPECS = (FNormSpec.bounded_integral(), FNormSpec.sigma_weighted(), FNormSpec.l1(),
          FNormSpec.lambda_phi("log1p"), FNormSpec.lambda_phi("sqrt"),
          FNormSpec.lambda_pw(2, "one"), FNormSpec.gamma(1, "log1p"), FNormSpec.gamma(2, "one"),
          FNormSpec.w1_discrete())
_LATTICE = ("lambda_phi", "lambda_pw", "gamma", "w1_discrete", "l1", "bounded_integral",
            "sigma_weighted")


def function_suite(rng, cases: int) -> list[PropertyResult]:
    zero = PropertyResult("F-norm: |f| = 0 iff f = 0")
    sym = PropertyResult("F-norm symmetry |f| = |-f|")
    tri = PropertyResult("F-norm triangle inequality")
    lat = PropertyResult("F-norm lattice monotonicity")
    mx = PropertyResult("x** >= x* and x** nonincreasing")
    gl = PropertyResult("gamma >= lambda for the same (p, w)")
    for _ in range(cases):
        n = int(rng.integers(1, 10))
        g = _grid(rng, n)
        spec = _SPECS[int(rng.integers(len(_SPECS)))]
        f = GridFunction(g, _vec(rng, n))
        h = GridFunction(g, _vec(rng, n))
        nf = fnorm(f, spec)
        zero.record((nf == 0) == bool(np.all(f.values == 0)) and fnorm(g.const(0.0), spec) == 0,
                    {"f": f.values.tolist(), "spec": spec.variant})
        sym.record(abs(fnorm(-f, spec) - nf) <= _REL * (1 + nf), {"f": f.values.tolist()})
        tri.record(_le(fnorm(f + h, spec), nf + fnorm(h, spec), 1e-13),
                   {"f": f.values.tolist(), "g": h.values.tolist(), "spec": spec.variant})
        if spec.variant in _LATTICE:
            big = GridFunction(g, np.sign(f.values) * (np.abs(f.values) + rng.random(n)))
            lat.record(_le(nf, fnorm(big, spec), 1e-13), {"f": f.values.tolist()})
        edges, xs = rearrangement(f)
        t, xss = maximal_function(f)
        good = bool(np.all(xss >= xs * (1 - _REL) - 1e-300)
                    and np.all(np.diff(xss) <= _REL * xss[:-1] + 1e-300))
        mx.record(good, {"f": f.values.tolist(), "mu": g.mu.tolist()})
        p = float(rng.choice([1.0, 2.0, 3.0]))
        wname = str(rng.choice(["one", "log1p"]))
        gam = fnorm(f, FNormSpec.gamma(p, wname))
        lam = fnorm(f, FNormSpec.lambda_pw(p, wname))
        gl.record(_le(lam, gam, 1e-13), {"f": f.values.tolist(), "p": p, "w": wname})
    return [zero, sym, tri, lat, mx, gl]


def rearrangement_exhaustive(rng, max_len: int = 8, trials: int = 5) -> list[PropertyResult]:
    """Against every permutation: x* is sorted |x| and sum x* w is the largest pairing."""
    sort = PropertyResult("rearrangement equals sorted |x|")
    hl = PropertyResult("sum x* w maximal over all orderings")
    w = Weight.harmonic()
    for n in range(1, max_len + 1):
        P = np.array(list(itertools.permutations(range(n))))
        wv = w.values(n)
        for _ in range(trials):
            x = rng.integers(-5, 6, size=n).astype(float)
            r = decreasing_rearrangement(Seq([int(v) for v in x]))
            vals = np.array([float(v) for v in r.values])
            sort.record(np.array_equal(vals, np.sort(np.abs(x))[::-1])
                        and sorted(r.permutation) == list(range(1, n + 1)),
                        {"x": x.tolist()})
            best = float(np.max(np.abs(x)[P] @ wv))
            nx = lorentz_norm(Seq([int(v) for v in x]), w)
            hl.record(abs(float(nx.value) - best) <= 1e-12 * (1 + best), {"x": x.tolist()})
    return [sort, hl]


def run_suite(cases: int = 10_000, seed: int = 0, max_len: int = 8) -> list[PropertyResult]:
    """All properties; ``cases`` random draws per randomised suite."""
    rng = np.random.default_rng(seed)
    return (sequence_suite(rng, cases) + function_suite(rng, cases)
            + rearrangement_exhaustive(rng, max_len))
