"""Point sequences used to approximate points at infinity."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from ..core import Point, SlalgError, format_point, normalize, point, semigroup
from ..weights import WeightExpr, sublevel_points

KINDS = ("arith", "geom", "enum-le", "rationals-in", "explicit")


def calkin_wilf() -> Iterator[Fraction]:
    """1, 1/2, 2, 1/3, 3/2, 2/3, 3, ... (every positive rational once)."""
    x = Fraction(1)
    while True:
        yield x
        x = 1 / (2 * (x.numerator // x.denominator) - x + 1)


@dataclass(frozen=True)
class SequenceSpec:
    """A sequence kind with its parameters, thinned to indices offset, offset+step, ...

    args by kind:
        arith         (a0, d)            a0 + k d
        geom          (a0, r)            a0 r^k
        enum-le       (M,)               enumeration of {s : w(s) <= M}
        rationals-in  (a, b)             Calkin-Wilf order restricted to (a, b)
        explicit      (points, d)        the listed points, then steps of d (None: finite)
    """

    kind: str
    args: tuple
    offset: int = 0
    step: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SlalgError(f"unknown sequence kind {self.kind!r}")
        if self.offset < 0 or self.step < 1:
            raise SlalgError("offset must be >= 0 and step >= 1")
        if self.kind == "arith" and Fraction(self.args[1]) == 0:
            raise SlalgError("arith step must be nonzero")
        if self.kind == "geom":
            a0, r = map(Fraction, self.args)
            if a0 <= 0 or r <= 0 or r == 1:
                raise SlalgError("geom needs a0 > 0 and 0 < r != 1")
        if self.kind == "rationals-in":
            a, b = map(Fraction, self.args)
            if not 0 <= a < b:
                raise SlalgError("rationals-in needs 0 <= a < b")
        if self.kind == "explicit":
            pts = [normalize(p) for p in self.args[0]]
            if len(set(pts)) != len(pts):
                raise SlalgError("explicit points must be distinct")

    # constructors -----------------------------------------------------
    @classmethod
    def arith(cls, a0, d) -> SequenceSpec:
        return cls("arith", (normalize(a0), normalize(d)))

    @classmethod
    def geom(cls, a0, r) -> SequenceSpec:
        return cls("geom", (normalize(a0), normalize(r)))

    @classmethod
    def enum_le(cls, M) -> SequenceSpec:
        return cls("enum-le", (normalize(M),))

    @classmethod
    def rationals_in(cls, a, b) -> SequenceSpec:
        return cls("rationals-in", (normalize(a), normalize(b)))

    @classmethod
    def explicit(cls, points, d=None) -> SequenceSpec:
        return cls("explicit", (tuple(normalize(p) for p in points), None if d is None else normalize(d)))

    def thin(self, offset: int, step: int) -> SequenceSpec:
        """Indices offset, offset+step, ... of this sequence."""
        return SequenceSpec(self.kind, self.args, self.offset + offset * self.step, self.step * step)

    @property
    def is_finite(self) -> bool:
        return self.kind == "explicit" and self.args[1] is None

    # generation -------------------------------------------------------
    def _raw(self, w: WeightExpr | None) -> Iterator:
        k = self.kind
        if k == "arith":
            a0, d = self.args
            return (a0 + i * d for i in itertools.count())
        if k == "geom":
            a0, r = map(Fraction, self.args)
            return (a0 * r**i for i in itertools.count())
        if k == "enum-le":
            if w is None:
                raise SlalgError("enum-le needs a weight")
            return sublevel_points(w, self.args[0])
        if k == "rationals-in":
            a, b = map(Fraction, self.args)
            return (x for x in calkin_wilf() if a < x < b)
        pts, d = self.args
        if d is None:
            return iter(pts)
        return itertools.chain(pts, (pts[-1] + i * d for i in itertools.count(1)))

    def iterate(self, sg, w: WeightExpr | None = None) -> Iterator[Point]:
        sg = semigroup(sg)
        raw = itertools.islice(self._raw(w), self.offset, None, self.step)
        return (point(sg, x) for x in raw)

    def bind(self, sg, w: WeightExpr | None = None) -> BoundSequence:
        return BoundSequence(self, semigroup(sg), w)

    def take(self, sg, n: int, w: WeightExpr | None = None) -> list:
        return list(itertools.islice(self.iterate(sg, w), n))

    def contains(self, p, sg, w: WeightExpr | None = None, limit: int = 100_000):
        """Membership of p in the range; None when the search window is exhausted."""
        p = normalize(p)
        if self.kind == "enum-le":
            return _bound(self, semigroup(sg), w).contains(p, limit)
        if self.kind == "rationals-in" and self.step == 1 and self.offset == 0:
            a, b = map(Fraction, self.args)
            return a < p < b
        if self.kind == "arith" and self.step == 1:
            a0, d = self.args
            q = Fraction(p - a0) / d
            return q.denominator == 1 and q >= self.offset
        monotone = self.kind in ("arith", "geom")
        increasing = monotone and (
            Fraction(self.args[1]) > 0 if self.kind == "arith" else Fraction(self.args[1]) > 1
        )
        for i, x in enumerate(self.iterate(sg, w)):
            if x == p:
                return True
            if monotone and ((increasing and x > p) or (not increasing and x < p)):
                return False
            if i >= limit:
                return None
        return False

    # JSON -------------------------------------------------------------
    def to_json(self) -> dict:
        if self.kind == "explicit":
            pts, d = self.args
            args = [[format_point(p) for p in pts], None if d is None else format_point(d)]
        else:
            args = [format_point(a) for a in self.args]
        out = {"kind": self.kind, "args": args}
        if self.offset or self.step != 1:
            out.update(offset=self.offset, step=self.step)
        return out

    @classmethod
    def from_json(cls, data: dict) -> SequenceSpec:
        kind, args = data["kind"], data["args"]
        if kind == "explicit":
            pts, d = args
            args = (tuple(normalize(p) for p in pts), None if d is None else normalize(d))
        else:
            args = tuple(normalize(a) for a in args)
        return cls(kind, args, data.get("offset", 0), data.get("step", 1))

    def __str__(self):
        body = {
            "arith": lambda: f"Arith({self.args[0]}, {self.args[1]})",
            "geom": lambda: f"Geom({self.args[0]}, {self.args[1]})",
            "enum-le": lambda: f"EnumLE({self.args[0]})",
            "rationals-in": lambda: f"RationalsIn({self.args[0]}, {self.args[1]})",
            "explicit": lambda: f"Explicit({len(self.args[0])} points)",
        }[self.kind]()
        if self.offset or self.step != 1:
            body += f"[{self.offset}::{self.step}]"
        return body


@functools.lru_cache(maxsize=64)
def _bound(spec: SequenceSpec, sg, w) -> BoundSequence:
    return BoundSequence(spec, sg, w)


class BoundSequence:
    """1-based random access with a growing cache."""

    def __init__(self, spec: SequenceSpec, sg, w):
        self.spec = spec
        self.semigroup = sg
        self.weight = w
        self._it = spec.iterate(sg, w)
        self._cache: list = []
        self._members: set = set()

    def contains(self, p, limit: int = 100_000):
        """Membership for monotone sequences: extend until the sequence passes p."""
        first, second = self[1], self[2]
        up = second > first
        while len(self._cache) < limit:
            last = self._cache[-1]
            if (up and last >= p) or (not up and last <= p):
                return p in self._members
            self[len(self._cache) + 1]
        return None

    def __getitem__(self, i: int) -> Point:
        if i < 1:
            raise IndexError(i)
        if self.spec.kind == "arith":
            a0, d = self.spec.args
            return point(self.semigroup, a0 + (self.spec.offset + (i - 1) * self.spec.step) * d)
        while len(self._cache) < i:
            try:
                x = next(self._it)
                self._cache.append(x)
                self._members.add(x)
            except StopIteration:
                raise IndexError(f"{self.spec} has only {len(self._cache)} points") from None
        return self._cache[i - 1]
