"""Signed permutations of the positive integers with bounded displacement.

``T u (j) = sign(j) * u(p(j))`` is an isometry of d(w,1).  Two families are
supported: a finite table acting on 1..L (identity beyond), and the pair swap
``2k <-> 2k+1`` (k >= 1) which fixes 1.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import MalformedCertificate
from .tails import (ComposedTail, LinearTail, PowerTail, SwappedPairTail,
                    TailRule)


class SignedPermutation:
    def __init__(self, kind: str = "identity", table=(), signs=()):
        if kind not in ("identity", "table", "pair_swap"):
            raise ValueError(f"unknown permutation kind {kind!r}")
        self.kind = kind
        self.table = tuple(int(v) for v in table)
        self.signs = tuple(int(s) for s in signs)
        L = len(self.table)
        if kind == "table" and sorted(self.table) != list(range(1, L + 1)):
            raise MalformedCertificate("table is not a bijection of 1..L")
        if any(s not in (-1, 1) for s in self.signs):
            raise MalformedCertificate("signs must be +1 or -1")
        self._inv = [0] * L
        for i, v in enumerate(self.table, start=1):
            self._inv[v - 1] = i

    @classmethod
    def identity(cls, signs=()) -> "SignedPermutation":
        return cls("identity", (), signs)

    @classmethod
    def from_table(cls, table, signs=()) -> "SignedPermutation":
        return cls("table", table, signs)

    @classmethod
    def pair_swap(cls, signs=()) -> "SignedPermutation":
        return cls("pair_swap", (), signs)

    @property
    def max_shift(self) -> int:
        if self.kind == "pair_swap":
            return 1
        return max((abs(v - i) for i, v in enumerate(self.table, start=1)), default=0)

    @property
    def finite_range(self) -> int:
        """Past this index the map is the identity with sign +1 (0 if never)."""
        if self.kind == "pair_swap":
            return 0
        return max(len(self.table), len(self.signs))

    def forward(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        if self.kind == "pair_swap":
            return np.where(n == 1, 1, np.where(n % 2 == 0, n + 1, n - 1))
        out = n.copy()
        if self.table:
            tab = np.array(self.table, dtype=np.int64)
            m = n <= len(tab)
            out[m] = tab[n[m] - 1]
        return out

    def backward(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        if self.kind == "pair_swap":
            return self.forward(n)
        out = n.copy()
        if self._inv:
            inv = np.array(self._inv, dtype=np.int64)
            m = n <= len(inv)
            out[m] = inv[n[m] - 1]
        return out

    def sign(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.int64)
        out = np.ones(n.shape, dtype=np.int64)
        if self.signs:
            sg = np.array(self.signs, dtype=np.int64)
            m = n <= len(sg)
            out[m] = sg[n[m] - 1]
        return out

    def check_injective(self, N: int) -> None:
        img = self.forward(np.arange(1, N + 1))
        if len(np.unique(img)) != N or img.min() < 1:
            raise MalformedCertificate("permutation is not injective on the probed prefix")

    def apply(self, u):
        """y1(j) = sign(j) * u(p(j)) as a new Seq."""
        from .seq import Seq
        H = max(u.H, self.finite_range) + self.max_shift
        if u.tail is not None:
            H = max(H, u.tail.start - 1 + self.max_shift)
        head = [int(self.sign(np.array([j]))[0]) * u.entry(int(self.forward(np.array([j]))[0]))
                for j in range(1, H + 1)]
        tail = None if u.tail is None else compose_tail(u.tail, self, H + 1)
        return Seq(head, tail, u.head_err)

    def unapply(self, v):
        """Inverse of ``apply``: u(m) = sign(a(m)) * v(a(m)), a = p^{-1}."""
        from .seq import Seq
        if v.tail is not None and not self._tail_trivial:
            raise ValueError("inverse transport of infinite tails needs a trivial tail map")
        H = max(v.H, self.finite_range) + self.max_shift
        head = []
        for m in range(1, H + 1):
            a = int(self.backward(np.array([m]))[0])
            head.append(int(self.sign(np.array([a]))[0]) * v.entry(a))
        return Seq(head, v.tail, v.head_err)

    @property
    def _tail_trivial(self) -> bool:
        return self.kind != "pair_swap"

    def to_json(self) -> dict:
        return {"kind": self.kind, "table": list(self.table), "signs": list(self.signs)}

    @classmethod
    def from_json(cls, d: dict) -> "SignedPermutation":
        return cls(d.get("kind", "identity"), d.get("table", ()), d.get("signs", ()))

    def __repr__(self) -> str:
        return f"SignedPermutation({self.kind}, table={self.table}, signs={self.signs})"


def compose_tail(rule: TailRule, perm: SignedPermutation, start: int) -> TailRule:
    """Tail of n -> sign(n) * rule(p(n)) for n >= start, simplified when possible."""
    if perm.kind != "pair_swap" and start > perm.finite_range:
        return rule
    if perm.kind == "pair_swap" and start > len(perm.signs):
        if isinstance(rule, SwappedPairTail):
            return PowerTail(Fraction(1), 2, start=max(start, 2))
        if isinstance(rule, PowerTail) and rule.c == 1 and rule.s == 2:
            return SwappedPairTail()
        if isinstance(rule, LinearTail):
            return LinearTail([(c, compose_tail(r, perm, start)) for c, r in rule.terms])
    return ComposedTail(rule, perm, start)
