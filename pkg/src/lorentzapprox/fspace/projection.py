"""Best approximation from structured classes of grid functions.

Classes are finite or level-quantized: monotone, convex (in the cell index),
explicit finite sets, and blockwise products of these. The brute-force
solver enumerates the class; the probe reaches the same minimum by descent
followed by branch and bound, which only needs the lattice property of the
norm (a residual restricted to fewer cells is never larger).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ..errors import EmptyClass, GridMismatch
from .grid import GridFunction, GridSpace
from .norms import FNormSpec, fnorm, fnorm_rows

KINDS = ("increasing", "decreasing", "convex", "finite", "blockwise")
MAX_ENUM = 400_000
MAX_LEVELS = 200


@dataclass
class ConstraintClass:
    """A class C of grid functions.

    ``levels`` quantizes the values of members (None: chosen from the data);
    ``members`` lists a finite class; ``parts`` gives one class per block.
    """
    kind: str
    levels: np.ndarray | None = None
    members: list = field(default_factory=list)
    parts: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown class {self.kind!r}")
        if self.levels is not None:
            self.levels = np.unique(np.asarray(self.levels, dtype=float))
        if self.kind == "finite":
            self.members = [np.asarray(m.values if isinstance(m, GridFunction) else m, dtype=float)
                            for m in self.members]
            if not self.members:
                raise EmptyClass("finite class with no members")
        if self.kind == "blockwise" and not self.parts:
            raise EmptyClass("blockwise class with no parts")

    @classmethod
    def from_json(cls, d: dict) -> "ConstraintClass":
        return cls(d["kind"], d.get("levels"), d.get("members", []),
                   [cls.from_json(q) for q in d.get("parts", [])])

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        if self.levels is not None:
            d["levels"] = self.levels.tolist()
        if self.members:
            d["members"] = [m.tolist() for m in self.members]
        if self.parts:
            d["parts"] = [q.to_json() for q in self.parts]
        return d

    def contains(self, c, grid: GridSpace | None = None, tol: float = 1e-12) -> bool:
        c = np.asarray(c.values if isinstance(c, GridFunction) else c, dtype=float)
        if self.levels is not None and self.kind != "finite":
            if np.min(np.abs(c[:, None] - self.levels[None, :]), axis=1).max() > tol:
                return False
        if self.kind == "increasing":
            return bool(np.all(np.diff(c) >= -tol))
        if self.kind == "decreasing":
            return bool(np.all(np.diff(c) <= tol))
        if self.kind == "convex":
            return bool(np.all(np.diff(c, 2) >= -tol))
        if self.kind == "finite":
            return any(m.shape == c.shape and np.allclose(m, c, rtol=0, atol=tol) for m in self.members)
        if grid is None or len(grid.blocks) != len(self.parts):
            raise GridMismatch("blockwise class needs a grid with one block per part")
        return all(p.contains(c[b], None, tol) for p, b in zip(self.parts, grid.blocks))


# -- combinators ---------------------------------------------------------------
def vee(c1, c2) -> np.ndarray:
    return np.maximum(np.asarray(c1, float), np.asarray(c2, float))


def wedge(c1, c2) -> np.ndarray:
    return np.minimum(np.asarray(c1, float), np.asarray(c2, float))


def truncation(c, f) -> np.ndarray:
    """sgn(c) * min(|c|, f) cellwise, for f >= 0."""
    c, f = np.asarray(c, float), np.asarray(f, float)
    if np.any(f < 0):
        raise ValueError("truncation level must be nonnegative")
    return np.sign(c) * np.minimum(np.abs(c), f)


def combine_finite(C1: ConstraintClass, C2: ConstraintClass, op: Callable) -> ConstraintClass:
    """{op(c1, c2): c1 in C1, c2 in C2} for finite classes."""
    out = []
    for a, b in itertools.product(C1.members, C2.members):
        v = op(a, b)
        if not any(np.array_equal(v, m) for m in out):
            out.append(v)
    return ConstraintClass("finite", members=out)


def truncated_class(C: ConstraintClass, f) -> ConstraintClass:
    """P_f(C) for a finite class."""
    return combine_finite(C, ConstraintClass("finite", members=[np.asarray(f, float)]),
                          truncation)


# -- levels --------------------------------------------------------------------
def level_grid(values, step: float | None = None, pad: int = 0) -> np.ndarray:
    """Uniform grid of levels containing every entry of ``values``."""
    v = np.unique(np.asarray(values, dtype=float))
    if v.size == 1:
        return v + step * np.arange(-pad, pad + 1) if step else v
    if step is None:
        fr = [Fraction(x).limit_denominator(10 ** 6) for x in v - v[0]]
        if any(abs(float(q) - (x - v[0])) > 1e-9 for q, x in zip(fr, v)):
            raise ValueError("cell values are not commensurable; pass a level step")
        g = Fraction(0)
        for q in fr:
            g = Fraction(np.gcd(g.numerator * q.denominator, q.numerator * g.denominator),
                         g.denominator * q.denominator)
        step = float(g)
    n = int(round((v[-1] - v[0]) / step))
    if abs(v[0] + n * step - v[-1]) > 1e-9 * max(1.0, abs(v[-1])):
        raise ValueError("level step does not divide the value range")
    if n + 1 + 2 * pad > MAX_LEVELS:
        raise ValueError(f"{n + 1 + 2 * pad} levels; pass a coarser step")
    out = v[0] + step * np.arange(-pad, n + pad + 1)
    # rounding in v[0] + k*step: put the data values back exactly
    out[np.rint((v - v[0]) / step).astype(int) + pad] = v
    return out


def _levels_for(C: ConstraintClass, f: GridFunction, levels) -> np.ndarray:
    if levels is not None:
        return np.unique(np.asarray(levels, dtype=float))
    if C.levels is not None:
        return C.levels
    return level_grid(f.values)


# -- enumeration ---------------------------------------------------------------
def _count(kind: str, n: int, L: int) -> int:
    if kind in ("increasing", "decreasing"):
        return comb(n + L - 1, n)
    return L ** n


def _convex_paths(n: int, lev: np.ndarray, tol: float = 1e-12):
    L = lev.size
    if n == 1:
        for i in range(L):
            yield (i,)
        return

    def rec(path):
        if len(path) == n:
            yield tuple(path)
            return
        lo = 2 * lev[path[-1]] - lev[path[-2]] - tol
        for j in range(L):
            if lev[j] >= lo:
                path.append(j)
                yield from rec(path)
                path.pop()

    for i, j in itertools.product(range(L), repeat=2):
        yield from rec([i, j])


def enumerate_class(C: ConstraintClass, n: int, levels: np.ndarray):
    """Every member of the quantized class on n cells (not blockwise)."""
    if C.kind == "finite":
        for m in C.members:
            if m.size != n:
                raise GridMismatch(f"class member with {m.size} cells on a grid of {n}")
            yield m
        return
    L = levels.size
    if C.kind != "convex" and _count(C.kind, n, L) > MAX_ENUM:
        raise ValueError(f"class too large to enumerate ({n} cells, {L} levels)")
    if C.kind == "increasing":
        for idx in itertools.combinations_with_replacement(range(L), n):
            yield levels[list(idx)]
    elif C.kind == "decreasing":
        for idx in itertools.combinations_with_replacement(range(L - 1, -1, -1), n):
            yield levels[list(idx)]
    elif C.kind == "convex":
        for k, idx in enumerate(_convex_paths(n, levels)):
            if k > MAX_ENUM:
                raise ValueError("class too large to enumerate")
            yield levels[list(idx)]
    else:
        raise ValueError(f"cannot enumerate a {C.kind} class directly")


# -- projection sets -----------------------------------------------------------
@dataclass
class ProjectionSet:
    minimizers: list
    dist: float
    method: str
    levels: np.ndarray | None = None

    def functions(self, grid: GridSpace) -> list[GridFunction]:
        return [GridFunction(grid, m) for m in self.minimizers]

    def to_json(self) -> dict:
        return {"dist": self.dist, "method": self.method,
                "minimizers": [m.tolist() for m in self.minimizers]}


def _close(a: float, b: float) -> bool:
    if not (np.isfinite(a) and np.isfinite(b)):
        return a == b
    return abs(a - b) <= 1e-12 * (1.0 + abs(b))


def _brute(f: GridFunction, C: ConstraintClass, spec: FNormSpec, lev) -> ProjectionSet:
    best, mins = np.inf, []
    members = [np.asarray(c, dtype=float) for c in enumerate_class(C, f.grid.n, lev)]
    dists = fnorm_rows(f.values - np.array(members), f.grid, spec) if members else []
    for c, d in zip(members, dists):
        d = float(d)
        if d < best and not _close(d, best):
            best, mins = d, [np.array(c)]
        elif _close(d, best):
            mins.append(np.array(c))
            best = min(best, d)
    if not mins:
        raise EmptyClass("no member of the class fits the grid and level set")
    return ProjectionSet(mins, float(best), "brute", lev)


def _dp_monotone(f: GridFunction, C: ConstraintClass, spec: FNormSpec, lev,
                 cap: int = 10_000) -> ProjectionSet:
    """Exact minimum over the quantized monotone class for separable norms."""
    lv = lev if C.kind == "increasing" else lev[::-1]
    cost = spec.cell_weights(f.grid)[:, None] * spec.cell_cost(f.values[:, None] - lv[None, :])
    n, L = cost.shape
    # dp[i, l]: best cost of cells 0..i with cell i at level index l (in order)
    dp = np.empty((n, L))
    dp[0] = cost[0]
    for i in range(1, n):
        dp[i] = cost[i] + np.minimum.accumulate(dp[i - 1])
    best = float(dp[-1].min())
    tol = 1e-12 * (1.0 + best)
    mins: list = []

    def back(i, l_max, rest, path):
        # path holds level indices of cells n-1, n-2, ..., i+1
        for l in range(l_max + 1):
            if len(mins) >= cap:
                return
            if abs(dp[i, l] + rest - best) <= tol:
                if i == 0:
                    mins.append(lv[(path + [l])[::-1]])
                else:
                    back(i - 1, l, rest + cost[i, l], path + [l])

    for l in range(L):
        if abs(dp[-1, l] - best) <= tol:
            if n == 1:
                mins.append(lv[[l]])
            else:
                back(n - 2, l, cost[-1, l], [l])
    return ProjectionSet([np.asarray(m) for m in mins], best, "dp", lev)


def _blockwise(f: GridFunction, C: ConstraintClass, spec: FNormSpec, levels,
               method: str) -> ProjectionSet:
    if spec.variant != "direct_sum" or len(spec.parts) != len(C.parts):
        raise ValueError("blockwise classes pair with a direct_sum norm, one part per block")
    if len(f.grid.blocks) != len(C.parts):
        raise GridMismatch("grid blocks and class parts differ in number")
    sub = [metric_projection_set(f.block(k), C.parts[k], spec.parts[k], levels, method)
           for k in range(len(C.parts))]
    dist = sum(2.0 ** -(k + 1) * s.dist / (1.0 + s.dist) for k, s in enumerate(sub))
    mins = []
    for combo in itertools.product(*(s.minimizers for s in sub)):
        c = np.empty(f.grid.n)
        for b, v in zip(f.grid.blocks, combo):
            c[b] = v
        mins.append(c)
        if len(mins) >= 10_000:
            break
    return ProjectionSet(mins, float(dist), "blockwise", None)


def metric_projection_set(f: GridFunction, C: ConstraintClass, spec: FNormSpec,
                          levels=None, method: str = "auto") -> ProjectionSet:
    """All best approximations to f from the quantized class C.

    ``method``: 'brute' enumerates the class; 'dp' (separable norms, monotone
    classes) runs a dynamic program over levels; 'auto' picks dp when it
    applies. Blockwise classes are solved block by block unless
    ``method='joint'``, which enumerates the product class.
    """
    if spec.grid is not None and spec.grid != f.grid:
        raise GridMismatch("function and norm live on different grids")
    if C.kind == "blockwise":
        if method == "joint":
            return _joint(f, C, spec, levels)
        return _blockwise(f, C, spec, levels, method)
    lev = None if C.kind == "finite" else _levels_for(C, f, levels)
    if lev is not None and lev.size == 0:
        raise EmptyClass("empty level set")
    use_dp = (spec.separable and C.kind in ("increasing", "decreasing")
              and method in ("auto", "dp"))
    if method == "dp" and not use_dp:
        raise ValueError("the dp path needs a separable norm and a monotone class")
    if use_dp:
        return _dp_monotone(f, C, spec, lev)
    return _brute(f, C, spec, lev)


def _joint(f: GridFunction, C: ConstraintClass, spec: FNormSpec, levels) -> ProjectionSet:
    blocks = f.grid.blocks
    per = []
    for k, b in enumerate(blocks):
        fb = f.block(k)
        Ck = C.parts[k]
        lev = None if Ck.kind == "finite" else _levels_for(Ck, fb, levels)
        per.append(list(enumerate_class(Ck, b.size, lev)))
    if np.prod([len(p) for p in per], dtype=float) > MAX_ENUM:
        raise ValueError("product class too large to enumerate")
    best, mins = np.inf, []
    for combo in itertools.product(*per):
        c = np.empty(f.grid.n)
        for b, v in zip(blocks, combo):
            c[b] = v
        d = fnorm(GridFunction(f.grid, f.values - c), spec)
        if d < best and not _close(d, best):
            best, mins = d, [c]
        elif _close(d, best):
            mins.append(c)
            best = min(best, d)
    return ProjectionSet(mins, float(best), "joint", None)


# -- minimizing sequences ------------------------------------------------------
@dataclass
class ProbeResult:
    c_star: np.ndarray
    dist: float
    converged: bool
    history: list
    gaps: list
    nodes: int

    def to_json(self) -> dict:
        return {"c_star": self.c_star.tolist(), "dist": self.dist, "converged": self.converged,
                "history": self.history, "gaps": self.gaps, "nodes": self.nodes}


def _feasible_start(x: np.ndarray, kind: str, lev: np.ndarray) -> np.ndarray:
    snap = lev[np.abs(x[:, None] - lev[None, :]).argmin(axis=1)]
    if kind == "increasing":
        return np.maximum.accumulate(snap)
    if kind == "decreasing":
        return np.minimum.accumulate(snap)
    return np.full_like(x, lev[np.abs(lev - x.mean()).argmin()])


def _descend(c, lev, norm, history, C):
    """Greedy moves of one cell or one run of equal cells by one level."""
    pos = {v: i for i, v in enumerate(lev)}
    cur = norm(c)
    while True:
        best, best_c = cur, None
        runs = []
        i = 0
        while i < c.size:
            j = i
            while j + 1 < c.size and c[j + 1] == c[i]:
                j += 1
            runs.append((i, j))
            runs.extend((k, k) for k in range(i, j + 1) if i != j)
            i = j + 1
        for a, b in runs:
            li = pos[c[a]]
            for step in (-1, 1):
                if not 0 <= li + step < lev.size:
                    continue
                t = c.copy()
                t[a:b + 1] = lev[li + step]
                if C.contains(t):
                    v = norm(t)
                    if v < best - 1e-15:
                        best, best_c = v, t
        if best_c is None:
            return c, cur
        c, cur = best_c, best
        history.append((cur, c.copy()))


def minimizing_sequence_probe(x: GridFunction, C: ConstraintClass, spec: FNormSpec,
                              budget: int = 200_000, levels=None) -> ProbeResult:
    """Build c_1, c_2, ... in C with |x - c_n| decreasing to dist(x, C).

    The sequence is the run of improving incumbents: greedy descent first,
    then branch and bound over the quantized class. When the search finishes
    within ``budget`` nodes the last incumbent is a best approximation;
    otherwise ``converged`` is False.
    """
    if C.kind == "blockwise":
        raise ValueError("probe blockwise classes one block at a time")
    grid = x.grid
    xv = x.values

    def norm(c):
        return fnorm(GridFunction(grid, xv - c), spec)

    history: list = []
    if C.kind == "finite":
        for m in C.members:
            v = norm(m)
            if not history or v < history[-1][0]:
                history.append((v, m.copy()))
        c_star, dist, nodes, done = history[-1][1], history[-1][0], len(C.members), True
    else:
        lev = _levels_for(C, x, levels)
        c = _feasible_start(xv, C.kind, lev)
        history.append((norm(c), c.copy()))
        c, inc = _descend(c, lev, norm, history, C)
        state = {"inc": inc, "c": c, "nodes": 0}
        done = _branch_and_bound(xv, C.kind, lev, norm,
                                 lambda r: fnorm(GridFunction(grid, r), spec),
                                 state, history, budget)
        c_star, dist, nodes = state["c"], state["inc"], state["nodes"]
    gaps = [fnorm(GridFunction(grid, h[1] - c_star), spec) for h in history]
    return ProbeResult(np.asarray(c_star), float(dist), bool(done),
                       [float(h[0]) for h in history], gaps, nodes)


def _branch_and_bound(xv, kind, lev, norm, rnorm, state, history, budget) -> bool:
    n = xv.size
    partial = np.zeros(n)

    def bound(i):
        # residual on cells < i only: a lower bound for every completion
        r = np.zeros(n)
        r[:i] = xv[:i] - partial[:i]
        return rnorm(r)

    def children(i):
        order = np.argsort(np.abs(lev - xv[i]), kind="stable")
        for j in order:
            v = lev[j]
            if i >= 1:
                if kind == "increasing" and v < partial[i - 1]:
                    continue
                if kind == "decreasing" and v > partial[i - 1]:
                    continue
                if kind == "convex" and i >= 2 and v < 2 * partial[i - 1] - partial[i - 2] - 1e-12:
                    continue
            yield v

    def rec(i) -> bool:
        for v in children(i):
            state["nodes"] += 1
            if state["nodes"] > budget:
                return False
            partial[i] = v
            if i == n - 1:
                d = norm(partial.copy())
                if d < state["inc"] - 1e-15:
                    state["inc"], state["c"] = d, partial.copy()
                    history.append((d, partial.copy()))
                continue
            if bound(i + 1) >= state["inc"] - 1e-15:
                continue
            if not rec(i + 1):
                return False
        return True

    return rec(0)


# -- Hausdorff distance --------------------------------------------------------
class Interval(NamedTuple):
    lo: float
    hi: float


def _components(S) -> list[tuple[float, float]]:
    out = []
    for s in S:
        if isinstance(s, Interval):
            if s.lo > s.hi:
                raise ValueError("interval with lo > hi")
            out.append((float(s.lo), float(s.hi)))
        else:
            v = float(np.asarray(s).reshape(-1)[0]) if np.ndim(s) else float(s)
            out.append((v, v))
    out.sort()
    merged = [list(out[0])]
    for a, b in out[1:]:
        if a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [tuple(m) for m in merged]


def _dist_to(v: float, comps) -> float:
    return min(0.0 if a <= v <= b else min(abs(v - a), abs(v - b)) for a, b in comps)


def _one_sided_real(A, B) -> float:
    best = 0.0
    for lo, hi in A:
        cand = [lo, hi]
        for (_, g0), (g1, _) in zip(B[:-1], B[1:]):
            m = 0.5 * (g0 + g1)
            if lo <= m <= hi:
                cand.append(m)
        best = max(best, max(_dist_to(c, B) for c in cand))
    return best


def one_sided(A, B, metric: Callable | None = None) -> float:
    """sup over a in A of dist(a, B)."""
    A, B = list(A), list(B)
    if not A or not B:
        raise ValueError("Hausdorff distance of an empty set")
    if any(isinstance(s, Interval) for s in A + B) or (
            metric is None and all(np.ndim(s) == 0 or np.size(s) == 1 for s in A + B)):
        return _one_sided_real(_components(A), _components(B))
    metric = metric or (lambda a, b: float(np.linalg.norm(np.asarray(a) - np.asarray(b))))
    return max(min(metric(a, b) for b in B) for a in A)


def hausdorff_distance(A, B, metric: Callable | None = None) -> float:
    """max of the two one-sided deviations between A and B.

    Sets are iterables of points or of ``Interval`` components (on the line).
    """
    return max(one_sided(A, B, metric), one_sided(B, A, metric))
