"""F-norms and rearrangement-invariant norms of grid functions.

A grid function is a step function, so its decreasing rearrangement x* is a
step function on [0, mu(T)] with the cell measures as step lengths, and
x**(t) = (1/t) * int_0^t x* is (a*t + b)/t on every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import GridMismatch
from ..weights import Weight
from .grid import GridFunction, GridSpace

_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)

VARIANTS = ("bounded_integral", "sigma_weighted", "direct_sum", "lambda_phi",
            "lambda_pw", "gamma", "w1_discrete", "l1")


# -- rearrangements -----------------------------------------------------
def rearrangement(f: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """(edges, x*) with x* constant on (edges[k], edges[k+1]]."""
    a = np.abs(f.values)
    order = np.argsort(-a, kind="stable")
    edges = np.concatenate([[0.0], np.cumsum(f.grid.mu[order])])
    return edges, a[order]


def maximal_function(f: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    """x** sampled at the right endpoints of the rearranged cells."""
    edges, xs = rearrangement(f)
    S = np.cumsum(xs * np.diff(edges))
    return edges[1:], S / edges[1:]


# -- densities on the half line -----------------------------------------
_NAMED = {
    "one": (lambda t: np.ones_like(t), lambda t: t),
    "sqrt": (lambda t: 0.5 / np.sqrt(t), np.sqrt),
    "log1p": (lambda t: 1.0 / (1.0 + t), np.log1p),
}


class Density:
    """Nonnegative nonincreasing density on (0, inf) and its primitive.

    Either a named rule ('one', 'sqrt' for d/dt sqrt t, 'log1p' for d/dt log(1+t))
    or a step table: ``values[k]`` on (knots[k-1], knots[k]], the last value
    continuing to infinity.
    """

    def __init__(self, name: str | None = None, knots=None, values=None):
        self.name = name
        if name is not None:
            if name not in _NAMED:
                raise ValueError(f"unknown density {name!r}; choose from {sorted(_NAMED)}")
            self._f, self._F = _NAMED[name]
            self.knots = np.empty(0)
            self.values = None
            return
        v = np.asarray(values, dtype=float)
        k = np.asarray(knots, dtype=float)
        if v.ndim != 1 or v.size == 0 or k.shape != v.shape:
            raise ValueError("knots and values must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(v)) and np.all(v >= 0)):
            raise ValueError("density samples must be finite and nonnegative")
        if np.any(np.diff(v) > 0):
            raise ValueError("density samples must be nonincreasing")
        if k[0] <= 0 or np.any(np.diff(k) <= 0):
            raise ValueError("knots must be positive and strictly increasing")
        self.knots, self.values = k, v
        self._prim = np.concatenate([[0.0], np.cumsum(v * np.diff(np.concatenate([[0.0], k])))])

    @classmethod
    def uniform_table(cls, values: Sequence[float], length: float = 1.0) -> "Density":
        v = np.asarray(values, dtype=float)
        return cls(knots=np.linspace(0, length, v.size + 1)[1:], values=v)

    @classmethod
    def sampled(cls, g: Callable, n: int, length: float = 1.0) -> "Density":
        """Table of g at the right endpoints of n equal cells."""
        k = np.linspace(0, length, n + 1)[1:]
        return cls(knots=k, values=g(k))

    @classmethod
    def from_json(cls, d) -> "Density":
        if isinstance(d, str):
            return cls(d)
        if "knots" in d:
            return cls(knots=d["knots"], values=d["values"])
        return cls.uniform_table(d["values"], d.get("length", 1.0))

    def to_json(self):
        if self.name is not None:
            return self.name
        return {"knots": self.knots.tolist(), "values": self.values.tolist()}

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.name is not None:
            return self._f(t)
        i = np.minimum(np.searchsorted(self.knots, t, side="left"), self.knots.size - 1)
        return self.values[i]

    def primitive(self, t):
        """int_0^t of the density."""
        t = np.asarray(t, dtype=float)
        if self.name is not None:
            return self._F(t)
        k = np.concatenate([[0.0], self.knots])
        i = np.clip(np.searchsorted(k, t, side="right") - 1, 0, self.knots.size)
        last = np.minimum(i, self.knots.size - 1)
        return self._prim[i] + self.values[last] * (t - k[i])

    def pieces(self, a: float, b: float) -> np.ndarray:
        """Breakpoints of [a, b] at which the density may jump."""
        inner = self.knots[(self.knots > a) & (self.knots < b)]
        return np.concatenate([[a], inner, [b]])

    def constant_on(self, a: float, b: float) -> bool:
        return self.name == "one" or (self.name is None and self.pieces(a, b).size == 2)


# -- specs ----------------------------------------------------------------
@dataclass
class FNormSpec:
    """Which F-norm to evaluate and its parameters.

    bounded_integral  int |f|/(1+|f|) dmu
    sigma_weighted    sum_n 2^-n int_{T_n} |f|/(1+|f|) dmu, T_n the union of
                      the first n blocks (T_n = T once the blocks run out)
    direct_sum        sum_n 2^-n |f_n|_n / (1 + |f_n|_n), one part per block
    lambda_phi        int x* dphi for a concave phi with phi(0+) = 0
    lambda_pw         (int x*^p w)^(1/p)
    gamma             (int x**^p w)^(1/p)
    w1_discrete       sum x*(i) w(i) over the cell values (counting measure)
    l1                int |f| dmu
    """
    variant: str
    p: float = 1.0
    density: Density | None = None
    weight: Weight | None = None
    parts: list = field(default_factory=list)
    grid: GridSpace | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if self.variant in ("lambda_phi", "lambda_pw", "gamma") and self.density is None:
            raise ValueError(f"{self.variant} needs a density")
        if self.variant == "gamma":
            # D_p on a grid: W(t) = int_0^t w is finite and positive for t > 0
            if not float(self.density.primitive(1e-12)) > 0:
                raise ValueError("gamma weight vanishes near 0")
        if self.variant == "direct_sum" and not self.parts:
            raise ValueError("direct_sum needs one part per block")

    # -- constructors ---------------------------------------------------
    @classmethod
    def bounded_integral(cls, grid=None):
        return cls("bounded_integral", grid=grid)

    @classmethod
    def sigma_weighted(cls, grid=None):
        return cls("sigma_weighted", grid=grid)

    @classmethod
    def direct_sum(cls, parts, grid=None):
        return cls("direct_sum", parts=list(parts), grid=grid)

    @classmethod
    def lambda_phi(cls, phi="log1p", grid=None):
        return cls("lambda_phi", density=phi if isinstance(phi, Density) else Density.from_json(phi),
                   grid=grid)

    @classmethod
    def lambda_pw(cls, p=1.0, w="one", grid=None):
        return cls("lambda_pw", p=float(p), density=w if isinstance(w, Density) else Density.from_json(w),
                   grid=grid)

    @classmethod
    def gamma(cls, p=1.0, w="one", grid=None):
        return cls("gamma", p=float(p), density=w if isinstance(w, Density) else Density.from_json(w),
                   grid=grid)

    @classmethod
    def w1_discrete(cls, weight: Weight | None = None, grid=None):
        return cls("w1_discrete", weight=weight or Weight.harmonic(), grid=grid)

    @classmethod
    def l1(cls, grid=None):
        return cls("l1", grid=grid)

    @classmethod
    def from_json(cls, d: dict, grid: GridSpace | None = None) -> "FNormSpec":
        v = d["variant"]
        if v == "direct_sum":
            return cls.direct_sum([cls.from_json(q) for q in d["parts"]], grid)
        if v == "lambda_phi":
            return cls.lambda_phi(d.get("phi", "log1p"), grid)
        if v in ("lambda_pw", "gamma"):
            return getattr(cls, v)(d.get("p", 1.0), d.get("w", "one"), grid)
        if v == "w1_discrete":
            w = Weight.from_name(d["weight"]) if "weight" in d else None
            return cls.w1_discrete(w, grid)
        return cls(v, grid=grid)

    def to_json(self) -> dict:
        d = {"variant": self.variant}
        if self.variant == "direct_sum":
            d["parts"] = [q.to_json() for q in self.parts]
        if self.variant == "lambda_phi":
            d["phi"] = self.density.to_json()
        if self.variant in ("lambda_pw", "gamma"):
            d["p"] = self.p
            d["w"] = self.density.to_json()
        if self.variant == "w1_discrete":
            d["weight"] = self.weight.name
        return d

    @property
    def homogeneous(self) -> bool:
        return self.variant in ("lambda_phi", "lambda_pw", "gamma", "w1_discrete", "l1")

    @property
    def separable(self) -> bool:
        """Sum over cells of a function of |f| on that cell."""
        return self.variant in ("bounded_integral", "sigma_weighted", "l1")

    def cell_weights(self, grid: GridSpace) -> np.ndarray:
        """Per-cell factor in front of g(|f|) for separable variants."""
        if self.variant == "sigma_weighted":
            # cell in block j is counted by every T_n with n >= j
            fac = np.empty(grid.n)
            for j, b in enumerate(grid.blocks, start=1):
                fac[b] = 2.0 ** (1 - j)
            return fac * grid.mu
        return grid.mu.copy()

    def cell_cost(self, a: np.ndarray) -> np.ndarray:
        """g(|f|) for separable variants."""
        a = np.abs(a)
        if self.variant == "l1":
            return a
        return a / (1.0 + a)


# -- evaluation -----------------------------------------------------------
def _gamma_pieces(u0, u1, a, b, p: float, w: Density) -> np.ndarray:
    """int_{u0}^{u1} (a + b/t)^p w(t) dt on pieces where w has no jump."""
    out = np.zeros(u0.size)
    flat = b == 0
    out[flat] = a[flat] ** p * (w.primitive(u1[flat]) - w.primitive(u0[flat]))
    rest = ~flat
    if not rest.any():
        return out
    r0, r1, ra, rb = u0[rest], u1[rest], a[rest], b[rest]
    if w.name in (None, "one") and p in (1.0, 2.0):
        c = w(0.5 * (r0 + r1))
        lg = np.log(r1 / r0)
        if p == 1.0:
            val = ra * (r1 - r0) + rb * lg
        else:
            val = ra ** 2 * (r1 - r0) + 2 * ra * rb * lg + rb ** 2 * (r1 - r0) / (r0 * r1)
        out[rest] = c * val
        return out
    # b/t varies fast near 0: panels with ratio <= 2 keep Gauss-Legendre accurate
    m = np.maximum(1, np.ceil(np.log2(r1 / r0))).astype(int)
    idx = np.repeat(np.arange(r0.size), m)
    j = np.arange(idx.size) - np.repeat(np.cumsum(m) - m, m)
    ratio = r1[idx] / r0[idx]
    v0 = r0[idx] * ratio ** (j / m[idx])
    v1 = r0[idx] * ratio ** ((j + 1) / m[idx])
    h = 0.5 * (v1 - v0)[:, None]
    t = h * _GL_X + 0.5 * (v0 + v1)[:, None]
    A, B = ra[idx][:, None], rb[idx][:, None]
    out[rest] = np.bincount(idx, np.sum(h * _GL_W * (A + B / t) ** p * w(t), axis=1),
                            minlength=r0.size)
    return out


def _gamma_integral(edges: np.ndarray, xs: np.ndarray, p: float, w: Density) -> float:
    """int_0^T x**(t)^p w(t) dt with x** = a + b/t on each rearranged cell."""
    S = np.concatenate([[0.0], np.cumsum(xs * np.diff(edges))])
    if S[-1] == 0:
        return 0.0
    # split cells where the density may jump
    inner = w.knots[(w.knots > 0) & (w.knots < edges[-1])]
    u = np.union1d(edges, inner)
    u0, u1 = u[:-1], u[1:]
    k = np.searchsorted(edges, u0, side="right") - 1
    a = xs[k]
    b = np.maximum(S[k] - a * edges[k], 0.0)
    b[u0 == 0] = 0.0
    return float(np.sum(_gamma_pieces(u0, u1, a, b, p, w)))


def fnorm(f: GridFunction, spec: FNormSpec) -> float:
    """Value of the F-norm ``spec`` at ``f``."""
    if spec.grid is not None and f.grid != spec.grid:
        raise GridMismatch("function and norm live on different grids")
    v = spec.variant
    if spec.separable:
        return float(np.sum(spec.cell_weights(f.grid) * spec.cell_cost(f.values)))
    if v == "direct_sum":
        if len(spec.parts) != len(f.grid.blocks):
            raise GridMismatch(f"{len(spec.parts)} parts for {len(f.grid.blocks)} blocks")
        out = 0.0
        for n, part in enumerate(spec.parts, start=1):
            d = fnorm(f.block(n - 1), part)
            out += 2.0 ** (-n) * d / (1.0 + d)
        return out
    if v == "w1_discrete":
        xs = np.sort(np.abs(f.values))[::-1]
        return float(np.dot(xs, spec.weight.values(xs.size)))
    edges, xs = rearrangement(f)
    if v == "lambda_phi":
        return float(np.dot(xs, np.diff(spec.density.primitive(edges))))
    if v == "lambda_pw":
        return float(np.dot(xs ** spec.p, np.diff(spec.density.primitive(edges)))) ** (1 / spec.p)
    if v == "gamma":
        return _gamma_integral(edges, xs, spec.p, spec.density) ** (1 / spec.p)
    raise AssertionError(v)


def fnorm_power(f: GridFunction, spec: FNormSpec, p: float = 1.0) -> float:
    return fnorm(f, spec) ** p


def fnorm_rows(V: np.ndarray, grid: GridSpace, spec: FNormSpec) -> np.ndarray:
    """fnorm of every row of V (functions on ``grid``); same values as a loop."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    v = spec.variant
    if spec.separable:
        return spec.cell_cost(V) @ spec.cell_weights(grid)
    if v == "w1_discrete":
        xs = -np.sort(-np.abs(V), axis=1)
        return xs @ spec.weight.values(grid.n)
    if v not in ("lambda_phi", "lambda_pw", "gamma") or (v == "gamma" and spec.density.knots.size):
        return np.array([fnorm(GridFunction(grid, r), spec) for r in V])
    A = np.abs(V)
    order = np.argsort(-A, axis=1, kind="stable")
    xs = np.take_along_axis(A, order, axis=1)
    edges = np.concatenate([np.zeros((V.shape[0], 1)), np.cumsum(grid.mu[order], axis=1)], axis=1)
    if v == "lambda_phi":
        return np.sum(xs * np.diff(spec.density.primitive(edges), axis=1), axis=1)
    if v == "lambda_pw":
        return np.sum(xs ** spec.p * np.diff(spec.density.primitive(edges), axis=1), axis=1) ** (1 / spec.p)
    m, n = xs.shape
    S = np.concatenate([np.zeros((m, 1)), np.cumsum(xs * np.diff(edges, axis=1), axis=1)], axis=1)
    u0, u1 = edges[:, :-1], edges[:, 1:]
    b = np.maximum(S[:, :-1] - xs * u0, 0.0)
    b[:, 0] = 0.0
    vals = _gamma_pieces(u0.ravel(), u1.ravel(), xs.ravel(), b.ravel(), spec.p, spec.density)
    return vals.reshape(m, n).sum(axis=1) ** (1 / spec.p)
