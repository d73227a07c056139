"""Strictly decreasing weights w(1) > w(2) > ... for Lorentz sequence spaces.

Every weight is a finite table followed by a power law ``K * n**(-alpha)``.
That covers the harmonic weight, the power weights ``n**(-alpha)`` and user
tables extended by a named rule, and gives closed-form tail sums through the
Hurwitz zeta function.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np

Number = Fraction | float


def _as_number(v) -> Number:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, Rational):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    return float(v)


class Weight:
    """Weight sequence ``w`` with partial sums ``W(n) = w(1) + ... + w(n)``.

    ``table`` gives w(1..L) explicitly; for n > L, ``w(n) = scale * n**-alpha``.
    """

    def __init__(self, table: Sequence = (), alpha: float = 1.0,
                 scale: Number = 1, name: str | None = None):
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        self.table = tuple(_as_number(v) for v in table)
        self.alpha = Fraction(alpha) if isinstance(alpha, (int, Fraction)) else float(alpha)
        if isinstance(self.alpha, float) and self.alpha.is_integer():
            self.alpha = Fraction(int(self.alpha))
        self.scale = _as_number(scale)
        self.name = name or f"table{len(self.table)}+power:{float(self.alpha):g}"
        self._cache = np.empty(0)
        self._check()

    # -- constructors -------------------------------------------------
    @classmethod
    def harmonic(cls) -> "Weight":
        return cls((), 1, 1, name="harmonic")

    @classmethod
    def power(cls, alpha: float) -> "Weight":
        return cls((), alpha, 1, name=f"power:{alpha:g}")

    @classmethod
    def from_table(cls, values: Sequence, tail: str = "harmonic") -> "Weight":
        """Table w(1..L) continued by ``tail`` ('harmonic' or 'power:<alpha>')."""
        alpha = 1 if tail == "harmonic" else float(tail.split(":", 1)[1])
        return cls(values, alpha, 1, name=f"table{len(values)}+{tail}")

    @classmethod
    def from_name(cls, name: str) -> "Weight":
        if name == "harmonic":
            return cls.harmonic()
        if name.startswith("power:"):
            return cls.power(float(name.split(":", 1)[1]))
        raise ValueError(f"unknown weight {name!r}")

    # -- evaluation ---------------------------------------------------
    @property
    def exact(self) -> bool:
        return (all(isinstance(v, Fraction) for v in self.table)
                and isinstance(self.scale, Fraction)
                and isinstance(self.alpha, Fraction) and self.alpha.denominator == 1)

    def __call__(self, n: int) -> Number:
        if n < 1:
            raise IndexError("weights are indexed from 1")
        if n <= len(self.table):
            return self.table[n - 1]
        if self.exact:
            return self.scale / Fraction(n) ** int(self.alpha)
        return float(self.scale) * float(n) ** -float(self.alpha)

    def exact_values(self, n: int) -> list[Fraction]:
        if not self.exact:
            raise ValueError(f"weight {self.name} has no exact values")
        return [self(k) for k in range(1, n + 1)]

    def values(self, n: int) -> np.ndarray:
        """Float array of w(1..n)."""
        if len(self._cache) < n:
            m = max(n, 2 * len(self._cache), 64)
            self._cache = self.at(np.arange(1, m + 1))
        return self._cache[:n]

    def at(self, n: np.ndarray) -> np.ndarray:
        """Vectorised w(n) for an integer array of indices."""
        n = np.asarray(n)
        out = float(self.scale) * n.astype(float) ** -float(self.alpha)
        L = len(self.table)
        if L:
            head = n <= L
            if head.any():
                tab = np.array([float(v) for v in self.table])
                out[head] = tab[n[head] - 1]
        return out

    def partial_sum(self, n: int) -> Number:
        if n <= 0:
            return Fraction(0)
        if self.exact:
            return sum(self.exact_values(n), Fraction(0))
        return float(np.sum(self.values(n)))

    def partial_sums(self, n: int) -> np.ndarray:
        return np.cumsum(self.values(n))

    @property
    def decay(self) -> tuple[float, float]:
        """(K, alpha) with w(n) <= K n**-alpha for every n >= 1."""
        a = float(self.alpha)
        K = float(self.scale)
        for i, v in enumerate(self.table, start=1):
            K = max(K, float(v) * i ** a)
        return K, a

    @property
    def divergent(self) -> bool:
        return float(self.alpha) <= 1

    def to_json(self) -> dict:
        return {"name": self.name, "table": [str(v) for v in self.table],
                "alpha": float(self.alpha), "scale": str(self.scale)}

    @classmethod
    def from_json(cls, d: dict) -> "Weight":
        if "table" not in d:
            return cls.from_name(d["name"])
        return cls([Fraction(v) for v in d["table"]], d.get("alpha", 1.0),
                   Fraction(d.get("scale", "1")), name=d.get("name"))

    def _check(self) -> None:
        probe = [self(n) for n in range(1, len(self.table) + 3)]
        if probe[0] <= 0:
            raise ValueError("weights must be positive")
        for a, b in zip(probe, probe[1:]):
            if not a > b:
                raise ValueError(f"weight {self.name} is not strictly decreasing")

    def __repr__(self) -> str:
        return f"Weight({self.name})"
