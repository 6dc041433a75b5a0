"""Points, the four concrete semigroups, and finite truncations."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

Point = Union[int, Fraction]


class SlalgError(Exception):
    """Base class for all errors raised by this package."""


class InvalidPointError(SlalgError, ValueError):
    pass


class SemigroupMismatchError(SlalgError, ValueError):
    pass


class PreconditionError(SlalgError):
    """A hypothesis required by a construction does not hold."""


class Kind(enum.Enum):
    NAT_MIN = "nat-min"
    INT_MIN = "int-min"
    POSRAT_MIN = "posrat-min"
    NAT_PLUS = "nat-plus"


@dataclass(frozen=True)
class Properties:
    is_semilattice: bool
    is_weakly_cancellative: bool
    has_sup_in_S: bool
    closure_scattered: bool


# closure_scattered is declared, not computed.
_PROPERTIES = {
    Kind.NAT_MIN: Properties(True, False, False, True),
    Kind.INT_MIN: Properties(True, False, False, True),
    Kind.POSRAT_MIN: Properties(True, False, False, False),
    Kind.NAT_PLUS: Properties(False, True, False, False),
}


@dataclass(frozen=True)
class SemigroupSpec:
    kind: Kind
    properties: Properties = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "properties", _PROPERTIES[self.kind])

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def is_min(self) -> bool:
        return self.properties.is_semilattice

    @property
    def is_integer(self) -> bool:
        return self.kind is not Kind.POSRAT_MIN

    @property
    def lower_bound(self) -> Point | None:
        """Least element of the index set, or None when unbounded below."""
        if self.kind in (Kind.NAT_MIN, Kind.NAT_PLUS):
            return 1
        return None

    def __str__(self):
        return self.name


NAT_MIN = SemigroupSpec(Kind.NAT_MIN)
INT_MIN = SemigroupSpec(Kind.INT_MIN)
POSRAT_MIN = SemigroupSpec(Kind.POSRAT_MIN)
NAT_PLUS = SemigroupSpec(Kind.NAT_PLUS)

SEMIGROUPS = {sg.name: sg for sg in (NAT_MIN, INT_MIN, POSRAT_MIN, NAT_PLUS)}


def semigroup(name: str | SemigroupSpec) -> SemigroupSpec:
    if isinstance(name, SemigroupSpec):
        return name
    try:
        return SEMIGROUPS[name]
    except KeyError:
        raise SlalgError(f"unknown semigroup {name!r}; expected one of {sorted(SEMIGROUPS)}") from None


def normalize(x) -> Point:
    """Canonical exact form: int when integral, else Fraction."""
    if isinstance(x, bool):
        raise InvalidPointError(f"not a number: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return normalize(Fraction(x.strip()))
    raise InvalidPointError(f"points must be exact integers or rationals, got {type(x).__name__}")


def point(sg: SemigroupSpec, x) -> Point:
    """Validate and normalize `x` as an element of `sg`."""
    p = normalize(x)
    if sg.is_integer and not isinstance(p, int):
        raise InvalidPointError(f"{sg}: {x} is not an integer")
    if sg.kind in (Kind.NAT_MIN, Kind.NAT_PLUS) and p < 1:
        raise InvalidPointError(f"{sg}: {x} is below 1")
    if sg.kind is Kind.POSRAT_MIN and p <= 0:
        raise InvalidPointError(f"{sg}: {x} is not positive")
    return p


def contains(sg: SemigroupSpec, x) -> bool:
    try:
        point(sg, x)
    except InvalidPointError:
        return False
    return True


def op(sg: SemigroupSpec, s: Point, t: Point) -> Point:
    s, t = point(sg, s), point(sg, t)
    if sg.is_min:
        return s if s <= t else t
    return s + t


def leq(sg: SemigroupSpec, s: Point, t: Point) -> bool:
    """The semilattice order s <= t iff st = s; numeric order for NatPlus."""
    if sg.is_min:
        return op(sg, s, t) == point(sg, s)
    return point(sg, s) <= point(sg, t)


def random_point(sg: SemigroupSpec, rng: random.Random, lo: int = -50, hi: int = 50) -> Point:
    if sg.kind in (Kind.NAT_MIN, Kind.NAT_PLUS):
        return rng.randint(1, max(hi, 1))
    if sg.kind is Kind.INT_MIN:
        return rng.randint(lo, hi)
    return normalize(Fraction(rng.randint(1, 4 * max(hi, 1)), rng.randint(1, 4)))


@dataclass(frozen=True)
class Truncation:
    """A finite window of a semigroup, closed under its operation."""

    semigroup: SemigroupSpec
    points: tuple

    def __post_init__(self):
        pts = tuple(point(self.semigroup, p) for p in self.points)
        if not pts:
            raise SlalgError("a truncation needs at least one point")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise SlalgError("truncation points must be strictly increasing")
        if not self.semigroup.is_min:
            members = set(pts)
            for s in pts:
                for t in pts:
                    if op(self.semigroup, s, t) not in members:
                        raise SlalgError(
                            f"{self.semigroup}: window not closed, {s}*{t} missing"
                        )
        object.__setattr__(self, "points", pts)

    @classmethod
    def range(cls, sg: SemigroupSpec, lo: int, hi: int) -> Truncation:
        return cls(sg, tuple(range(lo, hi + 1)))

    @property
    def max(self) -> Point:
        return self.points[-1]

    def __len__(self):
        return len(self.points)

    def __iter__(self) -> Iterable[Point]:
        return iter(self.points)

    def __contains__(self, p) -> bool:
        return p in set(self.points)


def format_point(p: Point) -> int | str:
    """JSON form of a point: an int, or a "p/q" string."""
    p = normalize(p)
    return p if isinstance(p, int) else f"{p.numerator}/{p.denominator}"
