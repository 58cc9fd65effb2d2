"""Directed-rounding real intervals.

Every operation returns an interval enclosing the exact image of its
arguments.  Rounding is done by outward nudging with math.nextafter, but only
when the float result is actually inexact: error-free transformations
(TwoSum for +/-, Dekker's TwoProduct for *) detect exact endpoint arithmetic,
so e.g. [1,2] + [3,4] is exactly [4,6].  Division always nudges outward.
Logarithms are computed with directed rounding through mpmath's backend and
nudged one extra ulp as a safety margin.

Domain violations (division by an interval containing zero, log of a
nonpositive interval, sqrt of a negative one) raise IntervalDomainError;
results are never silently widened to infinities.
"""

from __future__ import annotations

import math
from fractions import Fraction

from mpmath.libmp import from_float, mpf_log, to_float

from .errors import IntervalDomainError

_INF = math.inf
_SPLITTER = 134217729.0  # 2**27 + 1, Dekker splitting constant


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _two_sum(a: float, b: float) -> tuple:
    """s, err with s + err == a + b exactly (Knuth)."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _two_prod(a: float, b: float) -> tuple:
    """p, err with p + err == a * b exactly (Dekker/Veltkamp split)."""
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def _sum_down(a: float, b: float) -> float:
    s, err = _two_sum(a, b)
    return s if err >= 0.0 else _down(s)


def _sum_up(a: float, b: float) -> float:
    s, err = _two_sum(a, b)
    return s if err <= 0.0 else _up(s)


def _prod_down(a: float, b: float) -> float:
    p, err = _two_prod(a, b)
    return p if err >= 0.0 else _down(p)


def _prod_up(a: float, b: float) -> float:
    p, err = _two_prod(a, b)
    return p if err <= 0.0 else _up(p)


def _log_down(x: float) -> float:
    # mpmath rounds the 53-bit result toward -inf; one extra ulp of margin.
    return _down(to_float(mpf_log(from_float(x), 53, "f"), rnd="f"))


def _log_up(x: float) -> float:
    return _up(to_float(mpf_log(from_float(x), 53, "c"), rnd="c"))


def _sqrt_down(x: float) -> float:
    r = math.sqrt(x)
    p, err = _two_prod(r, r)
    # r is a valid lower bound iff r*r <= x exactly.
    if p < x or (p == x and err <= 0.0):
        return r
    return _down(r)


def _sqrt_up(x: float) -> float:
    r = math.sqrt(x)
    p, err = _two_prod(r, r)
    if p > x or (p == x and err >= 0.0):
        return r
    return _up(r)


class Interval:
    """Closed real interval [lo, hi] with outward-rounded arithmetic."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise IntervalDomainError("NaN interval endpoint")
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise IntervalDomainError(f"non-finite interval endpoint [{lo}, {hi}]")
        if lo > hi:
            raise IntervalDomainError(f"inverted interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @staticmethod
    def from_fraction(fr: Fraction) -> "Interval":
        """Tightest float interval containing an exact rational."""
        f = float(fr)
        lo, hi = f, f
        if Fraction(f) > fr:
            lo = _down(f)
        elif Fraction(f) < fr:
            hi = _up(f)
        return Interval(lo, hi)

    # ------------------------------------------------------------------
    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other):
        return (isinstance(other, Interval)
                and self.lo == other.lo and self.hi == other.hi)

    def __hash__(self):
        return hash((self.lo, self.hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def widened(self, margin: float) -> "Interval":
        return Interval(_down(self.lo - margin), _up(self.hi + margin))

    # ------------------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, Fraction):
            return Interval.from_fraction(x)
        return Interval(float(x))

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        o = Interval._coerce(other)
        return Interval(_sum_down(self.lo, o.lo), _sum_up(self.hi, o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = Interval._coerce(other)
        return Interval(_sum_down(self.lo, -o.hi), _sum_up(self.hi, -o.lo))

    def __rsub__(self, other):
        return Interval._coerce(other) - self

    def __mul__(self, other):
        o = Interval._coerce(other)
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(_prod_down(a, b) for a, b in pairs)
        hi = max(_prod_up(a, b) for a, b in pairs)
        return Interval(lo, hi)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise IntervalDomainError(f"division by {o} containing zero")
        pairs = ((self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi))
        lo = min(_down(a / b) for a, b in pairs)
        hi = max(_up(a / b) for a, b in pairs)
        return Interval(lo, hi)

    def __rtruediv__(self, other):
        return Interval._coerce(other) / self

    def sqr(self) -> "Interval":
        """Tight square (dependency-aware, unlike self * self around zero)."""
        if self.lo >= 0.0:
            return Interval(_prod_down(self.lo, self.lo), _prod_up(self.hi, self.hi))
        if self.hi <= 0.0:
            return Interval(_prod_down(self.hi, self.hi), _prod_up(self.lo, self.lo))
        m = max(-self.lo, self.hi)
        return Interval(0.0, _prod_up(m, m))

    def power(self, n: int) -> "Interval":
        """Integer power n >= 0 by squaring."""
        if n < 0 or int(n) != n:
            raise IntervalDomainError(f"power requires an integer exponent >= 0, got {n}")
        result = Interval(1.0)
        base = self
        n = int(n)
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.sqr()
        return result

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise IntervalDomainError(f"sqrt of {self} with negative part")
        return Interval(_sqrt_down(self.lo), _sqrt_up(self.hi))

    def log(self) -> "Interval":
        if self.lo <= 0.0:
            raise IntervalDomainError(f"log of {self} touching (-inf, 0]")
        return Interval(_log_down(self.lo), _log_up(self.hi))

    def max_const(self, c: float) -> "Interval":
        """max(self, c) pointwise; exact, no rounding."""
        return Interval(max(self.lo, c), max(self.hi, c))

    def split(self) -> tuple:
        """Bisect at the midpoint (the halves share the midpoint)."""
        m = self.mid
        if not (self.lo < m < self.hi):
            return (self,)
        return Interval(self.lo, m), Interval(m, self.hi)


def interval_union(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))
