"""Finite measure spaces: cells with positive measures, optional blocks."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import GridMismatch


class GridSpace:
    """Cells 0..n-1 with measures ``mu``; ``blocks`` partitions the cells.

    Blocks are given as a list of index lists, or as a list of block sizes
    for consecutive runs. Without blocks the whole grid is one block.
    """

    def __init__(self, mu: Sequence[float], blocks=None, left: float = 0.0):
        mu = np.asarray(mu, dtype=float)
        if mu.ndim != 1 or mu.size == 0:
            raise ValueError("need a nonempty 1-d array of cell measures")
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
            raise ValueError("cell measures must be positive and finite")
        self.mu = mu
        self.mu.setflags(write=False)
        self.left = float(left)
        self.blocks = self._parse_blocks(blocks)

    def _parse_blocks(self, blocks) -> tuple[np.ndarray, ...]:
        n = self.mu.size
        if blocks is None:
            return (np.arange(n),)
        blocks = list(blocks)
        if blocks and all(np.isscalar(b) for b in blocks):
            sizes = [int(b) for b in blocks]
            if any(s <= 0 for s in sizes) or sum(sizes) != n:
                raise ValueError(f"block sizes {sizes} do not add up to {n} cells")
            cuts = np.cumsum([0] + sizes)
            return tuple(np.arange(a, b) for a, b in zip(cuts[:-1], cuts[1:]))
        out = tuple(np.asarray(sorted(b), dtype=int) for b in blocks)
        flat = np.concatenate(out) if out else np.empty(0, int)
        if np.any(np.array([b.size for b in out]) == 0):
            raise ValueError("empty block")
        if sorted(flat.tolist()) != list(range(n)):
            raise ValueError("blocks must be disjoint and cover every cell")
        return out

    # -- constructors ---------------------------------------------------
    @classmethod
    def uniform(cls, n: int, length: float = 1.0, blocks=None, left: float = 0.0) -> "GridSpace":
        return cls(np.full(n, length / n), blocks, left)

    @classmethod
    def from_json(cls, d: dict) -> "GridSpace":
        if "mu" in d:
            return cls(d["mu"], d.get("blocks"), d.get("left", 0.0))
        return cls.uniform(int(d["cells"]), float(d.get("length", 1.0)),
                           d.get("blocks"), d.get("left", 0.0))

    def to_json(self) -> dict:
        d = {"mu": self.mu.tolist(), "left": self.left}
        if len(self.blocks) > 1:
            d["blocks"] = [b.tolist() for b in self.blocks]
        return d

    # -- geometry -------------------------------------------------------
    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def total(self) -> float:
        return float(self.mu.sum())

    @property
    def edges(self) -> np.ndarray:
        """Cell boundaries when the cells are laid end to end from ``left``."""
        return self.left + np.concatenate([[0.0], np.cumsum(self.mu)])

    @property
    def mesh(self) -> float:
        return float(self.mu.max())

    def sub(self, k: int) -> "GridSpace":
        """Block k as a grid of its own."""
        return GridSpace(self.mu[self.blocks[k]])

    def indicator(self, a: float, b: float) -> "GridFunction":
        """chi_[a,b] sampled at cell midpoints."""
        e = self.edges
        mid = 0.5 * (e[:-1] + e[1:])
        return GridFunction(self, ((mid >= a) & (mid <= b)).astype(float))

    def const(self, c: float) -> "GridFunction":
        return GridFunction(self, np.full(self.n, float(c)))

    def function(self, g) -> "GridFunction":
        """g evaluated at cell midpoints."""
        e = self.edges
        return GridFunction(self, np.asarray(g(0.5 * (e[:-1] + e[1:])), dtype=float))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, GridSpace) or other.n != self.n:
            return False
        return (np.array_equal(self.mu, other.mu) and len(self.blocks) == len(other.blocks)
                and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks)))

    def __hash__(self):
        return hash((self.n, self.mu.tobytes()))

    def __repr__(self) -> str:
        return f"GridSpace(n={self.n}, total={self.total:g}, blocks={len(self.blocks)})"


class GridFunction:
    """One finite real value per cell of a GridSpace."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: GridSpace, values):
        v = np.array(values, dtype=float).reshape(-1)
        if v.size != grid.n:
            raise GridMismatch(f"{v.size} values for a grid of {grid.n} cells")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid functions take finite values")
        self.grid = grid
        self.values = v

    def _other(self, g) -> np.ndarray:
        if isinstance(g, GridFunction):
            if g.grid != self.grid:
                raise GridMismatch("functions live on different grids")
            return g.values
        return np.asarray(g, dtype=float)

    def __add__(self, g):
        return GridFunction(self.grid, self.values + self._other(g))

    __radd__ = __add__

    def __sub__(self, g):
        return GridFunction(self.grid, self.values - self._other(g))

    def __rsub__(self, g):
        return GridFunction(self.grid, self._other(g) - self.values)

    def __mul__(self, a):
        return GridFunction(self.grid, self.values * self._other(a))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def __abs__(self):
        return GridFunction(self.grid, np.abs(self.values))

    def block(self, k: int) -> "GridFunction":
        return GridFunction(self.grid.sub(k), self.values[self.grid.blocks[k]])

    def allclose(self, g, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.values, self._other(g), rtol=0, atol=atol))

    def to_json(self) -> list:
        return self.values.tolist()

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"GridFunction({np.array2string(self.values, precision=4, threshold=12)})"
