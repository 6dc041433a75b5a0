"""Finitely supported elements of the weighted convolution algebra."""

from __future__ import annotations

import gc
import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import mpmath

from .core import Point, SemigroupMismatchError, SemigroupSpec, format_point, op, point, semigroup
from .weights import ModeError, WeightExpr, as_mpf

EXACT = "exact"
FLOAT = "float"


def _coef(x, mode):
    if mode == EXACT:
        if isinstance(x, mpmath.mpf) or isinstance(x, float):
            raise ModeError("floating coefficient in an exact element")
        return Fraction(x)
    return as_mpf(x) if isinstance(x, (Fraction, int)) else mpmath.mpf(x)


@dataclass(frozen=True, eq=False)
class Element:
    """A finite formal sum of point masses with nonzero coefficients."""

    semigroup: SemigroupSpec
    terms: tuple  # ((point, coef), ...) sorted by point
    mode: str = EXACT

    @classmethod
    def from_terms(cls, sg, terms: Mapping | Iterable, mode: str = EXACT) -> Element:
        sg = semigroup(sg)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for s, c in items:
            s = point(sg, s)
            acc[s] = acc.get(s, 0) + _coef(c, mode)
        return cls(sg, tuple(sorted((s, c) for s, c in acc.items() if c != 0)), mode)

    @classmethod
    def zero(cls, sg, mode: str = EXACT) -> Element:
        return cls(semigroup(sg), (), mode)

    def __post_init__(self):
        if self.mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown mode {self.mode!r}")

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __getitem__(self, s) -> Fraction:
        return self.as_dict().get(s, 0)

    @property
    def support(self) -> list:
        return [s for s, _ in self.terms]

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.semigroup == other.semigroup and self.terms == other.terms

    def __hash__(self):
        return hash((self.semigroup, self.terms))

    def __repr__(self):
        body = " + ".join(f"{c}*d[{s}]" for s, c in self.terms) or "0"
        return f"Element({self.semigroup}: {body})"

    def _check(self, other: Element):
        if self.semigroup != other.semigroup:
            raise SemigroupMismatchError(f"{self.semigroup} vs {other.semigroup}")
        if self.mode != other.mode:
            raise ModeError(f"cannot combine {self.mode} and {other.mode} elements")

    def __add__(self, other: Element) -> Element:
        self._check(other)
        return Element.from_terms(self.semigroup, list(self.terms) + list(other.terms), self.mode)

    def __neg__(self) -> Element:
        return Element(self.semigroup, tuple((s, -c) for s, c in self.terms), self.mode)

    def __sub__(self, other: Element) -> Element:
        return self + (-other)

    def scale(self, c) -> Element:
        c = _coef(c, self.mode)
        if c == 0:
            return Element.zero(self.semigroup, self.mode)
        return Element(self.semigroup, tuple((s, c * v) for s, v in self.terms), self.mode)

    def __mul__(self, other: Element) -> Element:
        return convolve(self, other)

    def coefficient_sum(self):
        return sum((c for _, c in self.terms), Fraction(0) if self.mode == EXACT else mpmath.mpf(0))

    def l1_norm(self):
        return sum((abs(c) for _, c in self.terms), Fraction(0) if self.mode == EXACT else mpmath.mpf(0))

    def to_json(self) -> dict:
        return {
            "semigroup": self.semigroup.name,
            "mode": self.mode,
            "terms": [[format_point(s), format_coef(c)] for s, c in self.terms],
        }

    @classmethod
    def from_json(cls, data: dict) -> Element:
        mode = data.get("mode", EXACT)
        terms = [(point_from_json(s), coef_from_json(c, mode)) for s, c in data["terms"]]
        return cls.from_terms(data["semigroup"], terms, mode)


def format_coef(c):
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return mpmath.nstr(c, 30)


def point_from_json(x):
    return Fraction(x) if isinstance(x, str) else x


def coef_from_json(x, mode=EXACT):
    if mode == FLOAT:
        return mpmath.mpf(x) if not isinstance(x, str) or "/" not in x else as_mpf(Fraction(x))
    if isinstance(x, float):
        raise ModeError("floating coefficient in exact JSON")
    return Fraction(x)


def delta(sg, s: Point) -> Element:
    sg = semigroup(sg)
    return Element(sg, ((point(sg, s), Fraction(1)),))


def delta_tilde(s: Point, w: WeightExpr, allow_float: bool = False) -> Element:
    """The normalised point mass d_s / w(s)."""
    sg = w.semigroup
    s = point(sg, s)
    if w.is_exact:
        return Element(sg, ((s, 1 / w.exact(s)),))
    if not allow_float:
        raise ModeError(f"d~_{s} needs a float-mode element for weight {w.text!r}")
    return Element(sg, ((s, 1 / w(s)),), FLOAT)


def convolve_bruteforce(a: Element, b: Element) -> Element:
    """The bilinear extension of d_s * d_t = d_{st}: the normative definition."""
    a._check(b)
    sg = a.semigroup
    acc: dict = {}
    for s, x in a.terms:
        for t, y in b.terms:
            u = op(sg, s, t)
            acc[u] = acc.get(u, 0) + x * y
    return Element(sg, tuple(sorted((u, c) for u, c in acc.items() if c != 0)), a.mode)


def convolve(a: Element, b: Element) -> Element:
    """Convolution; min-semilattices use a suffix-sum closed form.

    For st = min(s, t):
        (a*b)(u) = a(u) * sum_{t >= u} b(t) + b(u) * sum_{s > u} a(s).
    """
    a._check(b)
    if not a.semigroup.is_min:
        return convolve_bruteforce(a, b)
    if not a.terms or not b.terms:
        return Element.zero(a.semigroup, a.mode)
    with _gc_paused():
        if a.mode == EXACT:
            return _convolve_min_exact(a, b)
        return Element(a.semigroup, _convolve_min(a.terms, b.terms, mpmath.mpf(0)), a.mode)


@contextmanager
def _gc_paused():
    # the fast path allocates only acyclic objects; cyclic collections
    # triggered by them would otherwise double its running time
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def _convolve_min(ta, tb, zero):
    # walk both sorted supports from the top, keeping suffix sums
    out = []
    suffix_a = zero  # sum of a(s) for s > u
    suffix_b = zero  # sum of b(t) for t > u
    i, j = len(ta) - 1, len(tb) - 1
    while i >= 0 or j >= 0:
        if j < 0 or (i >= 0 and ta[i][0] > tb[j][0]):
            u, x = ta[i]
            i -= 1
            c = x * suffix_b
            suffix_a += x
        elif i < 0 or tb[j][0] > ta[i][0]:
            u, y = tb[j]
            j -= 1
            c = y * suffix_a
            suffix_b += y
        else:
            u, x = ta[i]
            y = tb[j][1]
            i -= 1
            j -= 1
            c = x * (suffix_b + y) + y * suffix_a
            suffix_a += x
            suffix_b += y
        if c:
            out.append((u, c))
    out.reverse()
    return tuple(out)


def _slots_work() -> bool:
    f = object.__new__(Fraction)
    f._numerator, f._denominator = -3, 4
    return f == Fraction(-3, 4) and hash(f) == hash(Fraction(-3, 4)) and str(f) == "-3/4"


# building reduced Fractions through their slots skips the constructor's
# argument dispatch, about half the cost of the exact fast path
_SLOTS = _slots_work()


def _scaled(terms, D):
    factor: dict = {}
    out = []
    for s, c in terms:
        q = c.denominator
        f = factor.get(q)
        if f is None:
            f = factor[q] = D // q
        out.append((s, c.numerator * f))
    return out


def _convolve_min_exact(a: Element, b: Element) -> Element:
    # integer arithmetic over common denominators, reduced once at the end
    Da = math.lcm(*{c.denominator for _, c in a.terms})
    Db = math.lcm(*{c.denominator for _, c in b.terms})
    raw = _convolve_min(_scaled(a.terms, Da), _scaled(b.terms, Db), 0)
    D = Da * Db
    gcd = math.gcd
    out = []
    if _SLOTS:
        new = object.__new__
        for u, c in raw:
            g = gcd(c, D)
            f = new(Fraction)
            f._numerator, f._denominator = c // g, D // g
            out.append((u, f))
    else:
        out = [(u, Fraction(c, D)) for u, c in raw]
    return Element(a.semigroup, tuple(out), EXACT)


def norm(a: Element, w: WeightExpr):
    """Weighted l1 norm sum |a(s)| w(s); exact for rational-valued weights."""
    if a.semigroup != w.semigroup:
        raise SemigroupMismatchError(f"{a.semigroup} vs {w.semigroup}")
    if a.mode == EXACT and w.is_exact:
        return sum((abs(c) * w.exact(s) for s, c in a.terms), Fraction(0))
    return sum((abs(as_mpf(c)) * as_mpf(w(s)) for s, c in a.terms), mpmath.mpf(0))


def theta_omega(a: Element, w: WeightExpr) -> Element:
    """Coefficientwise division by the weight; an isometry from l1 to l1(w)."""
    if a.mode == EXACT and not w.is_exact:
        raise ModeError(f"theta needs a rational-valued weight, got {w.text!r}")
    if a.mode == EXACT:
        return Element(a.semigroup, tuple((s, c / w.exact(s)) for s, c in a.terms), EXACT)
    return Element(a.semigroup, tuple((s, c / as_mpf(w(s))) for s, c in a.terms), FLOAT)


def theta_omega_inverse(a: Element, w: WeightExpr) -> Element:
    if a.mode == EXACT and not w.is_exact:
        raise ModeError(f"theta needs a rational-valued weight, got {w.text!r}")
    if a.mode == EXACT:
        return Element(a.semigroup, tuple((s, c * w.exact(s)) for s, c in a.terms), EXACT)
    return Element(a.semigroup, tuple((s, c * as_mpf(w(s))) for s, c in a.terms), FLOAT)
