"""Analytic tail rules for sequences with infinite support.

A rule describes t(n) for n >= ``start`` together with the facts needed to
certify norms and selection criteria: a power envelope ``|t(n)| <= C n**-s``,
monotonicity, the sign pattern of first differences and, when known, closed
forms for the total variation and for weighted tail sums.
"""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import zeta

if TYPE_CHECKING:
    from .weights import Weight

_EPS = np.finfo(float).eps


class TailRule:
    """Base class.  Subclasses set the attributes below in ``__init__``."""

    start: int = 1
    envelope: tuple[float, float] = (0.0, 1.0)
    monotone: bool = False
    sign: int | None = None
    trend: str | None = None            # 'decreasing' | 'increasing' | 'alternating'
    variation: tuple[float, float] | None = None
    majorizes: tuple["TailRule", ...] = ()

    def __call__(self, n) -> np.ndarray:
        raise NotImplementedError

    def exact(self, n: int):
        """Exact value at ``n`` or None when only floats are available."""
        return None

    def value(self, n: int):
        return self.precise(n)[0]

    def precise(self, n: int):
        """(value, absolute error) at a single index, as accurate as available."""
        v = self.exact(n)
        if v is not None:
            return v, 0.0
        arr = np.array([n])
        return float(self(arr)[0]), float(self.abs_err(arr)[0])

    @property
    def regime(self) -> int | None:
        """+1 if t >= 0 and nonincreasing, -1 if t <= 0 and nondecreasing."""
        if self.monotone and self.sign in (1, -1):
            return self.sign
        return None

    def diff_sign(self, n) -> np.ndarray | None:
        """Sign of t(n) - t(n+1), or None when no symbolic rule is known."""
        if self.trend == "decreasing":
            return np.ones(np.shape(n), dtype=int)
        if self.trend == "increasing":
            return -np.ones(np.shape(n), dtype=int)
        return None

    def variation_sum(self, n) -> np.ndarray | None:
        """Closed form of sum_{l >= n} |t(l+1) - t(l)|, if available."""
        if self.regime is not None:
            return np.abs(self(n))
        return None

    def exact_variation_sum(self, n: int):
        if self.regime is not None:
            v = self.exact(n)
            return abs(v) if v is not None else None
        return None

    def abs_err(self, n) -> np.ndarray:
        """Bound on |t(n) - fl(t(n))| for the float evaluation ``self(n)``."""
        return 4 * _EPS * np.abs(self(n))

    def variation_err(self, n, value):
        """Absolute rounding error of ``variation_sum(n)``."""
        return 4 * _EPS * np.abs(value)

    def precise_variation_sum(self, m: int):
        """(value, err) of the variation from m on, accurate to a few ulps, or None."""
        return None

    def weighted_sum(self, N: int, weight: "Weight"):
        """Closed form (value, error) of sum_{n > N} w(n) t(n), if available."""
        return None

    def to_json(self) -> dict:
        raise NotImplementedError


class PowerTail(TailRule):
    """t(n) = c * n**-s."""

    def __init__(self, c=1, s: float = 2.0, start: int = 1):
        if not s > 0:
            raise ValueError("power tails need s > 0")
        self.c = Fraction(c) if isinstance(c, (int, str, Fraction)) else float(c)
        self.s = s
        self.start = start
        self.envelope = (abs(float(self.c)), float(s))
        self.monotone = True
        self.sign = 0 if self.c == 0 else (1 if self.c > 0 else -1)
        self.trend = "decreasing" if self.c >= 0 else "increasing"
        self.variation = (abs(float(self.c)) * float(s), float(s) + 1)
        self._cache: dict = {}

    @property
    def regime(self) -> int | None:
        return 1 if self.sign == 0 else self.sign

    def __call__(self, n) -> np.ndarray:
        return float(self.c) * np.asarray(n, dtype=float) ** -float(self.s)

    def exact(self, n: int):
        if isinstance(self.c, Fraction) and float(self.s).is_integer():
            return self.c / Fraction(n) ** int(self.s)
        return None

    def weighted_sum(self, N: int, weight: "Weight"):
        if N < len(weight.table) or N + 1 < self.start:
            return None
        q = float(self.s) + float(weight.alpha)
        if q <= 1:
            return None
        val = float(self.c) * float(weight.scale) * float(zeta(q, N + 1))
        return val, 8 * _EPS * abs(val)

    def to_json(self) -> dict:
        return {"family": "power",
                "params": {"c": str(self.c), "s": self.s, "start": self.start}}

    def __repr__(self) -> str:
        return f"PowerTail({self.c}, {self.s}, start={self.start})"


class SwappedPairTail(TailRule):
    """t(2k) = 1/(2k+1)**2, t(2k+1) = 1/(2k)**2 for k >= 1.

    Neighbouring terms of 1/n**2 exchanged in pairs, so first differences
    alternate in sign: t(2k) < t(2k+1) > t(2k+2).
    """

    def __init__(self):
        self.start = 2
        self.envelope = (4.0, 2.0)          # t(n) <= 1/(n-1)**2 <= 4/n**2
        self.monotone = False
        self.sign = 1
        self.trend = "alternating"
        self.variation = (36.0, 3.0)        # |t(n) - t(n+1)| <= 36 / n**3
        self._cache: dict = {}

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n)
        m = np.where(n % 2 == 0, n + 1, n - 1).astype(float)
        return 1.0 / m ** 2

    def exact(self, n: int):
        m = n + 1 if n % 2 == 0 else n - 1
        return Fraction(1, m * m)

    def diff_sign(self, n) -> np.ndarray:
        return np.where(np.asarray(n) % 2 == 0, -1, 1)

    def variation_sum(self, n) -> np.ndarray:
        n = np.asarray(n)
        K = (n // 2).astype(float)
        z_even = 0.5 * zeta(2, K) - 0.25 * zeta(2, K + 0.5) - 0.25 * zeta(2, K + 1.5)
        # odd n = 2K+1: drop the first term |t(2K) - t(2K+1)|
        z_odd = z_even - (1.0 / (2 * K) ** 2 - 1.0 / (2 * K + 1) ** 2)
        return np.where(n % 2 == 0, z_even, z_odd)

    def exact_variation_sum(self, n: int):
        return None

    def abs_err(self, n) -> np.ndarray:
        return 2 * _EPS * np.abs(self(n))

    def variation_err(self, n, value):
        # the zeta combination cancels down from O(1/n) to O(1/n**2)
        return 64 * _EPS * (np.abs(value) + 4.0 / np.maximum(np.asarray(n) - 2, 1))

    def precise_variation_sum(self, m: int):
        import mpmath
        with mpmath.workdps(40):
            K = mpmath.mpf(m // 2)
            z = (mpmath.zeta(2, K) / 2 - mpmath.zeta(2, K + mpmath.mpf(1) / 2) / 4
                 - mpmath.zeta(2, K + mpmath.mpf(3) / 2) / 4)
            if m % 2:
                z -= 1 / (2 * K) ** 2 - 1 / (2 * K + 1) ** 2
            v = float(z)
            return v, abs(float(z - v)) + 1e-30

    def to_json(self) -> dict:
        return {"family": "swapped_pair", "params": {}}

    def __repr__(self) -> str:
        return "SwappedPairTail()"


class VariationTail(TailRule):
    """z(n) = sum_{l >= n} |t(l+1) - t(l)| for a base rule t."""

    def __init__(self, base: TailRule):
        self.base = base
        self.start = base.start
        if base.regime is not None:
            self.envelope = base.envelope
        elif base.variation is not None and base.variation[1] > 1:
            cv, sv = base.variation
            self.envelope = (cv * (1 + 1 / (sv - 1)), sv - 1)
        else:
            raise ValueError("base tail has no certified finite variation")
        self.monotone = True
        self.sign = 1
        self.trend = "decreasing"
        self.variation = base.variation
        self.majorizes = (base,)
        self._cache: dict = {}

    def __call__(self, n) -> np.ndarray:
        v = self.base.variation_sum(n)
        if v is None:
            raise ValueError("base tail has no closed-form variation")
        return np.asarray(v, dtype=float)

    def exact(self, n: int):
        return self.base.exact_variation_sum(n)

    def abs_err(self, n) -> np.ndarray:
        return np.asarray(self.base.variation_err(n, self(n)), dtype=float)

    def precise(self, n: int):
        pr = self.base.precise_variation_sum(n)
        return pr if pr is not None else super().precise(n)

    def weighted_sum(self, N: int, weight: "Weight"):
        if isinstance(self.base, PowerTail):
            return PowerTail(abs(self.base.c), self.base.s, self.base.start).weighted_sum(N, weight)
        return None

    def to_json(self) -> dict:
        return {"family": "variation", "params": {"of": self.base.to_json()}}

    def __repr__(self) -> str:
        return f"VariationTail({self.base!r})"


class LinearTail(TailRule):
    """Finite linear combination sum_i coef_i * rule_i."""

    def __init__(self, terms):
        flat: list = []
        for coef, rule in terms:
            if isinstance(rule, LinearTail):
                flat.extend((coef * c, r) for c, r in rule.terms)
            else:
                flat.append((coef, rule))
        merged: dict[int, list] = {}
        for coef, rule in flat:
            if id(rule) in merged:
                merged[id(rule)][0] += coef
            else:
                merged[id(rule)] = [coef, rule]
        self.terms = tuple((c, r) for c, r in merged.values() if c != 0)
        self.start = max((r.start for _, r in self.terms), default=1)
        self.envelope = (sum(abs(float(c)) * r.envelope[0] for c, r in self.terms),
                         min((r.envelope[1] for _, r in self.terms), default=1.0))
        if all(r.variation is not None for _, r in self.terms):
            self.variation = (sum(abs(float(c)) * r.variation[0] for c, r in self.terms),
                              min((r.variation[1] for _, r in self.terms), default=2.0))
        else:
            self.variation = None
        reg = self._regime()
        self._reg = reg
        self.monotone = reg is not None
        self.sign = reg
        self.trend = None if reg is None else ("decreasing" if reg == 1 else "increasing")
        self._cache: dict = {}

    def _regime(self) -> int | None:
        terms = self.terms
        if not terms:
            return 1
        if len(terms) == 1:
            c, r = terms[0]
            if r.regime is None:
                return None
            return r.regime * (1 if c > 0 else -1)
        if len(terms) == 2:
            (a, r1), (b, r2) = terms
            if any(r2 is m for m in r1.majorizes) and abs(b) <= abs(a):
                return 1 if a > 0 else -1
            if any(r1 is m for m in r2.majorizes) and abs(a) <= abs(b):
                return 1 if b > 0 else -1
            if (isinstance(r1, PowerTail) and isinstance(r2, PowerTail)
                    and r1.s == r2.s):
                k = a * r1.c + b * r2.c
                return 1 if k >= 0 else -1
        return None

    @property
    def regime(self) -> int | None:
        return self._reg

    def __call__(self, n) -> np.ndarray:
        out = np.zeros(np.shape(n), dtype=float)
        for c, r in self.terms:
            out += float(c) * r(n)
        return out

    def abs_err(self, n) -> np.ndarray:
        out = np.zeros(np.shape(n), dtype=float)
        for c, r in self.terms:
            out += abs(float(c)) * (r.abs_err(n) + 2 * _EPS * np.abs(r(n)))
        return out

    def exact(self, n: int):
        total = Fraction(0)
        for c, r in self.terms:
            v = r.exact(n)
            if v is None or not isinstance(c, Fraction | int):
                return None
            total += c * v
        return total

    def weighted_sum(self, N: int, weight: "Weight"):
        val, err = 0.0, 0.0
        for c, r in self.terms:
            part = r.weighted_sum(N, weight)
            if part is None:
                return None
            val += float(c) * part[0]
            err += abs(float(c)) * part[1]
        return val, err

    def to_json(self) -> dict:
        return {"family": "linear",
                "params": {"terms": [[str(c), r.to_json()] for c, r in self.terms]}}

    def __repr__(self) -> str:
        return "LinearTail(" + ", ".join(f"{c}*{r!r}" for c, r in self.terms) + ")"


class ComposedTail(TailRule):
    """u(n) = sign(n) * t(p(n)) for a signed permutation of bounded displacement."""

    def __init__(self, base: TailRule, perm, start: int):
        d = perm.max_shift
        self.base = base
        self.perm = perm
        self.start = max(start, base.start + d, d + 1)
        C, s = base.envelope
        self.envelope = (C * (d + 1) ** s, s)
        self.monotone = False
        self.sign = None
        self.trend = None
        self.variation = None
        self._cache: dict = {}

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n)
        return self.perm.sign(n) * self.base(self.perm.forward(n))

    def abs_err(self, n) -> np.ndarray:
        return self.base.abs_err(self.perm.forward(np.asarray(n)))

    def exact(self, n: int):
        v = self.base.exact(int(self.perm.forward(np.array([n]))[0]))
        if v is None:
            return None
        return int(self.perm.sign(np.array([n]))[0]) * v

    def to_json(self) -> dict:
        return {"family": "composed", "params": {"of": self.base.to_json()}}


def tail_from_json(d: dict | None) -> TailRule | None:
    if d is None:
        return None
    fam, params = d["family"], d.get("params", {})
    if fam == "power":
        c = params.get("c", 1)
        if isinstance(c, str):
            c = Fraction(c)
        return PowerTail(c, params.get("s", 2.0), params.get("start", 1))
    if fam == "swapped_pair":
        return SwappedPairTail()
    if fam == "variation":
        return VariationTail(tail_from_json(params["of"]))
    if fam == "linear":
        return LinearTail([(Fraction(c), tail_from_json(t)) for c, t in params["terms"]])
    raise ValueError(f"unknown tail family {fam!r}")
