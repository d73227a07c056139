"""Four worked lines in d(w,1) with w(n) = 1/n.

example1: y = (1, -sqrt 2, 0, ...), a Chebyshev line with strongly unique
          best approximations.
example2: y(n) = 1/n for n >= 2, aligned so that sum w(n) y(n) = 0.
example3: neighbouring terms of 1/n**2 swapped in pairs; first differences
          alternate, so no continuous selection exists.
example4: the same values read through the pair swap, which makes the
          transported sequence monotone again.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .perm import SignedPermutation
from .selection import SelectionCertificate
from .seq import Seq
from .tails import PowerTail, SwappedPairTail
from .weights import Weight

_DPS = 40


def _rational(v) -> tuple[Fraction, float]:
    """A Fraction within 1e-35 of an mpmath value, and that error bound."""
    with mpmath.workdps(_DPS):
        return Fraction(mpmath.nstr(v, _DPS - 2, min_fixed=-50, max_fixed=50)), 1e-35


@dataclass
class Preset:
    name: str
    w: Weight
    y: Seq
    cert: SelectionCertificate | None
    x: Seq | None = None
    expected: dict = field(default_factory=dict)
    note: str = ""


def example1(weight: str = "harmonic") -> Preset:
    # -sqrt 2 stands in for any negative y(2) with y(2) != -w(i)/w(j); a 35-digit
    # rational keeps the breakpoint solver exact and is far from every 2-term ratio.
    with mpmath.workdps(_DPS):
        r, _ = _rational(-mpmath.sqrt(2))
    y = Seq([Fraction(1), r])
    x = Seq([Fraction(3), Fraction(1), Fraction(1, 2)])
    return Preset("example1", _weight(weight), y, None, x,
                  {"strongly_unique": True, "chebyshev": True, "selection": "yes"})


def example2(weight: str = "harmonic") -> Preset:
    with mpmath.workdps(_DPS):
        y1, err = _rational(1 - mpmath.zeta(2))
    y = Seq([y1], PowerTail(Fraction(1), 1, start=2), err)
    return Preset("example2", _weight(weight), y, SelectionCertificate(),
                  expected={"chebyshev": False, "selection": "yes"})


def example3(weight: str = "harmonic") -> Preset:
    with mpmath.workdps(_DPS):
        s = mpmath.nsum(lambda k: 1 / ((2 * k + 1) ** 2 * (2 * k)) + 1 / ((2 * k) ** 2 * (2 * k + 1)),
                        [1, mpmath.inf])
        y1, err = _rational(-s)
    y = Seq([y1], SwappedPairTail(), err)
    return Preset("example3", _weight(weight), y, SelectionCertificate(),
                  expected={"chebyshev": False, "selection": "no"})


def example4(weight: str = "harmonic") -> Preset:
    with mpmath.workdps(_DPS):
        y1, err = _rational(1 - mpmath.zeta(3))
    y = Seq([y1], SwappedPairTail(), err)
    cert = SelectionCertificate(SignedPermutation.pair_swap())
    return Preset("example4", _weight(weight), y, cert,
                  expected={"chebyshev": False, "selection": "yes"})


def _weight(name: str) -> Weight:
    # "w1" spells out w(1) = 1, w(n) = 1/n; as a sequence it is the harmonic weight
    if name in ("harmonic", "w1"):
        w = Weight.harmonic()
        if name == "w1":
            w = Weight([Fraction(1)], 1, 1, name="w1")
        return w
    return Weight.from_name(name)


PRESETS = {"example1": example1, "example2": example2,
           "example3": example3, "example4": example4}


def get(name: str, weight: str = "harmonic") -> Preset:
    try:
        return PRESETS[name](weight)
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
