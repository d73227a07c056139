"""Sequences with an exact rational head and an optional analytic tail."""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .tails import LinearTail, TailRule, tail_from_json
from .weights import _as_number

_EPS = float(np.finfo(float).eps)


class Bound(NamedTuple):
    """A value with a certified absolute error."""
    value: Fraction | float
    error: float = 0.0

    @property
    def lo(self) -> float:
        return float(self.value) - self.error

    @property
    def hi(self) -> float:
        return float(self.value) + self.error

    def contains(self, v, slack: float = 0.0) -> bool:
        return self.lo - slack <= float(v) <= self.hi + slack

    def __float__(self) -> float:
        return float(self.value)


class Seq:
    """x(1..H) given exactly (``head``), x(n) = tail(n) for n > H.

    ``head_err`` bounds the absolute error of every head entry; it is zero
    for genuinely rational data and positive when a head entry was rounded,
    e.g. an infinite sum computed to finite precision.
    """

    __slots__ = ("head", "tail", "head_err")

    def __init__(self, head: Sequence = (), tail: TailRule | None = None,
                 head_err: float = 0.0):
        self.head = tuple(_as_number(v) for v in head)
        if tail is not None and tail.start > len(self.head) + 1:
            raise ValueError(f"tail starts at {tail.start}, head has only {len(self.head)} entries")
        self.tail = tail
        self.head_err = float(head_err)

    # -- construction ----------------------------------------------------
    @classmethod
    def finite(cls, values: Sequence) -> "Seq":
        return cls(values)

    @classmethod
    def from_json(cls, d: dict) -> "Seq":
        return cls([Fraction(v) if isinstance(v, str) else v for v in d["head"]],
                   tail_from_json(d.get("tail")), d.get("head_err", 0.0))

    def to_json(self) -> dict:
        d = {"head": [str(v) if isinstance(v, Fraction) else repr(v) for v in self.head],
             "tail": None if self.tail is None else self.tail.to_json()}
        if self.head_err:
            d["head_err"] = self.head_err
        return d

    # -- access ----------------------------------------------------------
    @property
    def H(self) -> int:
        return len(self.head)

    @property
    def is_finite(self) -> bool:
        return self.tail is None

    @property
    def is_exact(self) -> bool:
        return (self.tail is None and self.head_err == 0
                and all(isinstance(v, Fraction) for v in self.head))

    @property
    def support_end(self) -> int:
        """Last index with a nonzero head entry (finite sequences only)."""
        for i in range(self.H, 0, -1):
            if self.head[i - 1] != 0:
                return i
        return 0

    def entry(self, n: int):
        if n < 1:
            raise IndexError("sequences are indexed from 1")
        if n <= self.H:
            return self.head[n - 1]
        if self.tail is None:
            return Fraction(0)
        return self.tail.value(n)

    __getitem__ = entry

    def entries(self, N: int) -> list:
        return [self.entry(n) for n in range(1, N + 1)]

    def floats(self, N: int) -> np.ndarray:
        out = np.zeros(N)
        h = min(N, self.H)
        if h:
            out[:h] = [float(v) for v in self.head[:h]]
        if self.tail is not None and N > self.H:
            out[self.H:] = self.tail(np.arange(self.H + 1, N + 1))
        return out

    def float_errs(self, N: int) -> np.ndarray:
        """Per-entry bounds on |x(n) - floats(N)[n-1]|, including ``head_err``."""
        out = np.zeros(N)
        h = min(N, self.H)
        if h:
            out[:h] = self.head_err + 0.5 * _EPS * np.abs(self.floats(h))
        if self.tail is not None and N > self.H:
            out[self.H:] = self.tail.abs_err(np.arange(self.H + 1, N + 1))
        return out

    def extend(self, N: int) -> "Seq":
        """Same sequence with the head materialised up to N."""
        if N <= self.H:
            return self
        new, err = [], self.head_err
        for n in range(self.H + 1, N + 1):
            v, e = self.tail.precise(n) if self.tail is not None else (Fraction(0), 0.0)
            new.append(v)
            err = max(err, e)
        return Seq(self.head + tuple(new), self.tail, err)

    def truncate(self, N: int) -> "Seq":
        """Finite sequence x(1..N)."""
        s = self.extend(N)
        return Seq(s.head[:N], None, s.head_err)

    def with_entry(self, n: int, value) -> "Seq":
        """Copy with x(n) replaced; ``value`` is taken as exact."""
        s = self.extend(n)
        head = list(s.head)
        head[n - 1] = _as_number(value)
        return Seq(head, s.tail, s.head_err)

    # -- arithmetic ------------------------------------------------------
    def scale(self, a) -> "Seq":
        a = _as_number(a)
        tail = None if self.tail is None or a == 0 else LinearTail([(a, self.tail)])
        head = [a * v for v in self.head]
        rnd = max((_EPS * abs(float(h)) for h in head if not isinstance(h, Fraction)), default=0.0)
        return Seq(head, tail, abs(float(a)) * self.head_err + rnd)

    def __neg__(self) -> "Seq":
        return self.scale(-1)

    def __rmul__(self, a) -> "Seq":
        return self.scale(a)

    def combine(self, a, other: "Seq", b) -> "Seq":
        """a*self + b*other."""
        a, b = _as_number(a), _as_number(b)
        L = max(self.H, other.H)
        u, v = self.extend(L), other.extend(L)
        head = [a * p + b * q for p, q in zip(u.head, v.head)]
        rnd = max((_EPS * (abs(float(a * p)) + abs(float(b * q)))
                   for p, q, h in zip(u.head, v.head, head) if not isinstance(h, Fraction)),
                  default=0.0)
        terms = []
        if u.tail is not None and a != 0:
            terms.append((a, u.tail))
        if v.tail is not None and b != 0:
            terms.append((b, v.tail))
        tail = LinearTail(terms) if terms else None
        err = abs(float(a)) * u.head_err + abs(float(b)) * v.head_err + rnd
        return Seq(head, tail, err)

    def __add__(self, other: "Seq") -> "Seq":
        return self.combine(1, other, 1)

    def __sub__(self, other: "Seq") -> "Seq":
        return self.combine(1, other, -1)

    def __repr__(self) -> str:
        h = ", ".join(str(v) for v in self.head[:8])
        more = ", ..." if self.H > 8 else ""
        return f"Seq([{h}{more}], tail={self.tail!r})"
