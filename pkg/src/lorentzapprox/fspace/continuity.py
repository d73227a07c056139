"""Property (S) residuals and continuity of metric projections on grids."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ..errors import Inconclusive
from .grid import GridFunction, GridSpace
from .norms import FNormSpec, fnorm
from .projection import ConstraintClass, metric_projection_set, one_sided


# -- property (S) ------------------------------------------------------------------
def property_s_residual(f: GridFunction, c: GridFunction, c_seq: Sequence[GridFunction],
                        spec: FNormSpec, p_exp: float = 1.0) -> np.ndarray:
    """r_n = |f - c_n|^p - |f - c|^p - |c_n - c|^p for each c_n."""
    base = fnorm(f - c, spec) ** p_exp
    return np.array([fnorm(f - cn, spec) ** p_exp - base - fnorm(cn - c, spec) ** p_exp
                     for cn in c_seq])


@dataclass
class BumpFamily:
    """f = chi_[0,1], c = 0, c_n = chi_[1, 1+h_n] with h_n = 2^-n on [0, length]."""
    cells: int
    length: float = 2.0
    grid: GridSpace = field(init=False)
    h: np.ndarray = field(init=False)

    def __post_init__(self):
        self.grid = GridSpace.uniform(self.cells, self.length)
        width = self.length / self.cells
        # bumps cover whole cells: h from 1/2 down to one cell
        k = np.arange(1, int(np.log2(1.0 / width)) + 1)
        self.h = 2.0 ** -k

    @property
    def f(self) -> GridFunction:
        return self._chi(0.0, 1.0)

    @property
    def c(self) -> GridFunction:
        return self.grid.const(0.0)

    def bumps(self) -> list[GridFunction]:
        return [self._chi(1.0, 1.0 + h) for h in self.h]

    def _chi(self, a, b) -> GridFunction:
        e = self.grid.edges
        tol = 1e-12 * self.length
        return GridFunction(self.grid, ((e[:-1] >= a - tol) & (e[1:] <= b + tol)).astype(float))


@dataclass
class PropertySReport:
    cells: int
    h: np.ndarray
    r: np.ndarray

    @property
    def decreasing(self) -> bool:
        a = np.abs(self.r)
        return bool(np.all(np.diff(a) <= 1e-12 * (1 + a[:-1])))

    @property
    def fitted_C(self) -> float:
        return float(np.max(np.abs(self.r) / self.h))

    def to_json(self) -> dict:
        return {"cells": self.cells, "h": self.h.tolist(), "r": self.r.tolist(),
                "decreasing": self.decreasing, "C": self.fitted_C}


def property_s_probe(spec: FNormSpec, p_exp: float, cells: Sequence[int] = (64, 256, 1024, 4096),
                     length: float = 2.0) -> list[PropertySReport]:
    """Shrinking-bump residuals on a family of refining grids."""
    out = []
    for n in cells:
        fam = BumpFamily(n, length)
        r = property_s_residual(fam.f, fam.c, fam.bumps(), spec, p_exp)
        out.append(PropertySReport(n, fam.h, r))
    return out


def kadec_klee_probe(f: GridFunction, c: GridFunction, c_seq: Sequence[GridFunction],
                     spec: FNormSpec) -> dict:
    """Along c_n -> c cellwise: |f - c_n| - |f - c| next to |c_n - c|."""
    gap = np.array([abs(fnorm(f - cn, spec) - fnorm(f - c, spec)) for cn in c_seq])
    dist = np.array([fnorm(cn - c, spec) for cn in c_seq])
    cell = np.array([np.max(np.abs((cn - c).values)) for cn in c_seq])
    return {"norm_gap": gap, "distance": dist, "cellwise": cell}


# -- continuity of projections -------------------------------------------------
@dataclass
class ContinuityReport:
    forward: np.ndarray          # sup over P(f_n) of dist to P(f)
    reverse: np.ndarray          # sup over P(f) of dist to P(f_n)
    d_H: np.ndarray
    perturbation: np.ndarray     # |f_n - f|
    eps: np.ndarray
    ball_ok: np.ndarray          # per eps: P(f_n) meets every B(c, eps) from some n on
    delta: np.ndarray            # per eps: largest admissible delta seen
    verdict: str

    def rows(self) -> list[dict]:
        return [{"n": i + 1, "perturbation": float(p), "forward": float(a),
                 "reverse": float(b), "d_H": float(d)}
                for i, (p, a, b, d) in enumerate(zip(self.perturbation, self.forward,
                                                     self.reverse, self.d_H))]

    def to_json(self) -> dict:
        return {"rows": self.rows(), "eps": self.eps.tolist(),
                "ball_ok": self.ball_ok.tolist(), "delta": self.delta.tolist(),
                "verdict": self.verdict}


def _ball_check(reverse: np.ndarray, pert: np.ndarray, eps: float) -> tuple[bool, float]:
    bad = reverse > eps
    ok = not bad[-1]
    delta = float(np.min(pert[bad])) if bad.any() else np.inf
    return bool(ok), delta


def _vanishing(s: np.ndarray, floor: float = 1e-12) -> bool:
    """Finite-sample evidence for s_n -> 0: nonincreasing and at least halved."""
    if np.all(s <= floor):
        return True
    return bool(np.all(np.diff(s) <= floor) and s[-1] <= max(floor, 0.5 * s[0]))


def continuity_experiment(f, f_seq: Sequence, C=None, spec: FNormSpec | None = None,
                          eps_grid: Sequence[float] = (1.0, 0.5, 0.1, 0.01),
                          project: Callable | None = None, metric: Callable | None = None,
                          levels=None, size: Callable | None = None) -> ContinuityReport:
    """Track P(f_n) against P(f) as f_n -> f.

    ``project`` maps a point to its projection set (points or Intervals); by
    default it is ``metric_projection_set`` on (C, spec). ``metric`` measures
    distances between set elements, by default the norm of ``spec``; ``size``
    maps f_n to |f_n - f| for the report.
    """
    if project is None:
        if C is None or spec is None:
            raise ValueError("pass a class and a norm, or a projection map")

        def project(g):
            P = metric_projection_set(g, C, spec, levels)
            return P.minimizers

        if metric is None and isinstance(f, GridFunction):
            grid = f.grid

            def metric(a, b):
                return fnorm(GridFunction(grid, np.asarray(a) - np.asarray(b)), spec)

    def gap(g):
        if size is not None:
            return float(size(g))
        if isinstance(f, GridFunction):
            return fnorm(g - f, spec) if spec is not None else float(np.max(np.abs((g - f).values)))
        return float(np.max(np.abs(np.asarray(g, float) - np.asarray(f, float))))

    try:
        P0 = project(f)
        sets = [project(g) for g in f_seq]
    except Inconclusive:
        return ContinuityReport(*(np.empty(0),) * 5, np.empty(0, bool), np.empty(0), "inconclusive")
    fwd = np.array([one_sided(Pn, P0, metric) for Pn in sets])
    rev = np.array([one_sided(P0, Pn, metric) for Pn in sets])
    pert = np.array([gap(g) for g in f_seq])
    eps = np.asarray(eps_grid, dtype=float)
    checks = [_ball_check(rev, pert, e) for e in eps]
    ball_ok = np.array([c[0] for c in checks])
    delta = np.array([c[1] for c in checks])
    dH = np.maximum(fwd, rev)
    if _vanishing(dH):
        verdict = "continuous"
    elif _vanishing(fwd):
        verdict = "upper-semicontinuous"
    else:
        verdict = "discontinuous"
    return ContinuityReport(fwd, rev, dH, pert, eps, ball_ok, delta, verdict)


def two_point(n_max: int = 10) -> ContinuityReport:
    """C = {-1, 1} in R, f = 0, f_n = 1/n."""
    grid = GridSpace([1.0])
    C = ConstraintClass("finite", members=[[-1.0], [1.0]])
    f = grid.const(0.0)
    f_seq = [grid.const(1.0 / n) for n in range(1, n_max + 1)]
    return continuity_experiment(f, f_seq, C, FNormSpec.l1())
