from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..core import Kind, SemigroupSpec


@dataclass(frozen=True)
class Interval:
    """A real interval with rational or infinite endpoints (None means infinite)."""

    lo: Fraction | None
    hi: Fraction | None
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo is None and self.lo_closed or self.hi is None and self.hi_closed:
            raise ValueError("infinite endpoints are always open")
        if self.lo is not None:
            object.__setattr__(self, "lo", Fraction(self.lo))
        if self.hi is not None:
            object.__setattr__(self, "hi", Fraction(self.hi))

    @classmethod
    def everything(cls) -> Interval:
        return cls(None, None)

    @classmethod
    def at_least(cls, x) -> Interval:
        return cls(Fraction(x), None, True, False)

    @classmethod
    def below(cls, x) -> Interval:
        return cls(None, Fraction(x), False, False)

    def __contains__(self, x) -> bool:
        if self.lo is not None and (x < self.lo or x == self.lo and not self.lo_closed):
            return False
        if self.hi is not None and (x > self.hi or x == self.hi and not self.hi_closed):
            return False
        return True

    @property
    def is_empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and self.lo_closed and self.hi_closed)

    def intersect(self, other: Interval) -> Interval:
        lo, lo_closed = self.lo, self.lo_closed
        if other.lo is not None and (lo is None or other.lo > lo):
            lo, lo_closed = other.lo, other.lo_closed
        elif other.lo is not None and other.lo == lo:
            lo_closed = lo_closed and other.lo_closed
        hi, hi_closed = self.hi, self.hi_closed
        if other.hi is not None and (hi is None or other.hi < hi):
            hi, hi_closed = other.hi, other.hi_closed
        elif other.hi is not None and other.hi == hi:
            hi_closed = hi_closed and other.hi_closed
        return Interval(lo, hi, lo_closed, hi_closed)

    def integer_range(self) -> tuple[int | None, int | None]:
        """Smallest and largest integers inside (None when unbounded)."""
        if self.lo is None:
            a = None
        else:
            a = math.ceil(self.lo)
            if a == self.lo and not self.lo_closed:
                a += 1
        if self.hi is None:
            b = None
        else:
            b = math.floor(self.hi)
            if b == self.hi and not self.hi_closed:
                b -= 1
        return a, b

    def __str__(self):
        lo = "-inf" if self.lo is None else _fmt(self.lo)
        hi = "inf" if self.hi is None else _fmt(self.hi)
        return f"{'[' if self.lo_closed else '('}{lo},{hi}{']' if self.hi_closed else ')'}"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def domain(sg: SemigroupSpec) -> Interval:
    """The index set of the semigroup as a real interval."""
    if sg.kind in (Kind.NAT_MIN, Kind.NAT_PLUS):
        return Interval.at_least(1)
    if sg.kind is Kind.POSRAT_MIN:
        return Interval(Fraction(0), None, False, False)
    return Interval.everything()


def points_in(sg: SemigroupSpec, region: Interval) -> str:
    """How many semigroup points lie in `region`: "none", "finite" or "infinite"."""
    r = region.intersect(domain(sg))
    if r.is_empty:
        return "none"
    if sg.is_integer:
        a, b = r.integer_range()
        if a is None or b is None:
            return "infinite"
        return "none" if a > b else "finite"
    if r.lo is not None and r.hi is not None and r.lo == r.hi:
        return "finite"
    return "infinite"
