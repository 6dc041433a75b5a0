"""Asymptotic expansions of weight expressions at the ends of their domain.

An expansion is a finite sum of terms c * exp(E(n)) * n^p * (log n)^q, ordered
by dominance, plus an optional remainder bound O(scale) that is dominated by
every listed term. E(n) is itself a sum of growing monomials, so exp grows
faster than any power, which grows faster than any power of log. Anything
outside that fragment (nested exponentials, log log n, cancellation past the
known terms) raises UndecidableExpression rather than guessing.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ..core import SlalgError
from .expr import Abs, BinOp, Const, Func, Neg, Node, Pow, Var, precision

MAX_TERMS = 10
SERIES_ORDER = 10
_CANCEL = mpmath.mpf(2) ** -80


class UndecidableExpression(SlalgError):
    """The expression leaves the eventually-monotone fragment."""


def _is_mp(c) -> bool:
    return isinstance(c, mpmath.mpf)


def _mp(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpf(c)


def _add(a, b):
    if _is_mp(a) or _is_mp(b):
        return _mp(a) + _mp(b)
    return a + b


def _mul(a, b):
    if _is_mp(a) or _is_mp(b):
        return _mp(a) * _mp(b)
    return a * b


def _sign(c) -> int:
    return (c > 0) - (c < 0)


@dataclass(frozen=True)
class Scale:
    """exp(sum of E) * n^p * (log n)^q with E a sorted tuple of ((p, q), coef)."""

    E: tuple = ()
    p: Fraction = Fraction(0)
    q: Fraction = Fraction(0)

    def __mul__(self, other: Scale) -> Scale:
        return Scale(_merge_E(self.E, other.E, 1), self.p + other.p, self.q + other.q)

    def __pow__(self, a: Fraction) -> Scale:
        if a == 0:
            return ONE
        return Scale(tuple((k, _mul(c, a)) for k, c in self.E), self.p * a, self.q * a)

    def compare(self, other: Scale) -> int:
        d1, d2 = dict(self.E), dict(other.E)
        for key in sorted(set(d1) | set(d2), reverse=True):
            c1, c2 = d1.get(key, 0), d2.get(key, 0)
            if c1 != c2:
                return _sign(_add(c1, _mul(c2, -1)))
        if self.p != other.p:
            return _sign(self.p - other.p)
        return _sign(self.q - other.q)

    def __str__(self):
        parts = []
        if self.E:
            inner = " + ".join(f"{c}*n^{p}*log(n)^{q}" for (p, q), c in self.E)
            parts.append(f"exp({inner})")
        if self.p:
            parts.append(f"n^{self.p}")
        if self.q:
            parts.append(f"log(n)^{self.q}")
        return "*".join(parts) or "1"


ONE = Scale()
LOG = Scale((), Fraction(0), Fraction(1))


def _merge_E(e1, e2, sign):
    d = dict(e1)
    for k, c in e2:
        v = _add(d.get(k, 0), _mul(c, sign))
        if v == 0:
            d.pop(k, None)
        else:
            d[k] = v
    return tuple(sorted(d.items(), reverse=True))


def _cmp_key(term):
    return term[1]


def _max_scale(a: Scale | None, b: Scale | None) -> Scale | None:
    if a is None:
        return b
    if b is None:
        return a
    return a if a.compare(b) >= 0 else b


@dataclass(frozen=True)
class Expansion:
    terms: tuple  # of (coef, Scale), strictly decreasing scales
    rem: Scale | None = None  # None: the expansion is exact

    @classmethod
    def make(cls, terms, rem: Scale | None = None) -> Expansion:
        merged: list[list] = []
        for c, s in sorted(terms, key=functools.cmp_to_key(lambda x, y: -x[1].compare(y[1]))):
            if merged and merged[-1][1].compare(s) == 0:
                prev = merged[-1]
                total = _add(prev[0], c)
                if _is_mp(total):
                    prev[2] = max(prev[2], abs(_mp(c)))
                prev[0] = total
            else:
                merged.append([c, s, abs(_mp(c)) if _is_mp(c) else 0])
        out = []
        for c, s, mag in merged:
            if c == 0:
                continue
            if _is_mp(c) and abs(c) <= _CANCEL * mag:
                # numerical cancellation: the true coefficient is unknown
                rem = _max_scale(rem, s)
                continue
            out.append((c, s))
        if rem is not None:
            out = [t for t in out if t[1].compare(rem) > 0]
        if len(out) > MAX_TERMS:
            rem = _max_scale(rem, out[MAX_TERMS][1])
            out = out[:MAX_TERMS]
        return cls(tuple(out), rem)

    @classmethod
    def const(cls, c) -> Expansion:
        return cls.make([(c, ONE)]) if c != 0 else cls(())

    @property
    def exact(self) -> bool:
        return self.rem is None

    @property
    def top(self) -> Scale | None:
        return self.terms[0][1] if self.terms else self.rem

    def lead(self):
        if not self.terms:
            raise UndecidableExpression("leading term cancelled beyond the known expansion")
        return self.terms[0]

    def __neg__(self):
        return Expansion(tuple((_mul(c, -1), s) for c, s in self.terms), self.rem)

    def __add__(self, other: Expansion) -> Expansion:
        return Expansion.make(self.terms + other.terms, _max_scale(self.rem, other.rem))

    def __sub__(self, other: Expansion) -> Expansion:
        return self + (-other)

    def __mul__(self, other: Expansion) -> Expansion:
        terms = [(_mul(c1, c2), s1 * s2) for c1, s1 in self.terms for c2, s2 in other.terms]
        rem = None
        if self.rem is not None and other.top is not None:
            rem = _max_scale(rem, self.rem * other.top)
        if other.rem is not None and self.top is not None:
            rem = _max_scale(rem, other.rem * self.top)
        return Expansion.make(terms, rem)

    def scale_by(self, c, s: Scale = ONE) -> Expansion:
        return Expansion.make(
            [(_mul(c, c0), s * s0) for c0, s0 in self.terms],
            None if self.rem is None else self.rem * s,
        )

    def sign(self) -> int:
        """Eventual sign of the expression."""
        if self.terms:
            return _sign(self.terms[0][0])
        if self.rem is None:
            return 0
        raise UndecidableExpression("sign lost to cancellation")

    def limit(self):
        """Limit as an exact/mp number, or +-mpmath.inf."""
        if self.terms:
            c, s = self.terms[0]
            k = s.compare(ONE)
            if k > 0:
                return mpmath.inf if c > 0 else -mpmath.inf
            if k == 0:
                return c
            return Fraction(0)
        if self.rem is None or self.rem.compare(ONE) < 0:
            return Fraction(0)
        raise UndecidableExpression("limit lost to cancellation")

    def __str__(self):
        body = " + ".join(f"{c}*{s}" for c, s in self.terms) or "0"
        return body if self.rem is None else f"{body} + O({self.rem})"


def _split(f: Expansion):
    """f = c0 * S0 * (1 + r) with r = o(1); returns (c0, S0, r)."""
    c0, s0 = f.lead()
    inv = s0 ** Fraction(-1)
    r = f.scale_by(_coef_pow(c0, -1), inv) - Expansion.const(Fraction(1))
    return c0, s0, r


def _series(r: Expansion, coeffs) -> Expansion:
    """sum coeffs[j] * r^j, with the truncation error recorded."""
    total = Expansion(())
    power = Expansion.const(Fraction(1))
    for j, a in enumerate(coeffs):
        if j:
            power = power * r
        if a != 0:
            total = total + power.scale_by(a)
    if r.top is not None:
        tail = r.top ** Fraction(len(coeffs))
        total = Expansion.make(total.terms, _max_scale(total.rem, tail))
    return total


def _coef_pow(c, a: Fraction):
    if a.denominator == 1:
        if _is_mp(c):
            return c ** int(a)
        return Fraction(c) ** int(a)
    if c <= 0:
        raise UndecidableExpression("non-integer power of a non-positive leading coefficient")
    if isinstance(c, Fraction):
        root = _exact_root(c, a.denominator)
        if root is not None:
            return root ** a.numerator
    with mpmath.workprec(precision()):
        return _mp(c) ** _mp(a)


def _exact_root(c: Fraction, k: int) -> Fraction | None:
    def iroot(x):
        r = round(x ** (1.0 / k)) if x < 2**1000 else int(mpmath.floor(mpmath.root(x, k)))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**k == x:
                return cand
        return None

    a, b = iroot(c.numerator), iroot(c.denominator)
    return None if a is None or b is None else Fraction(a, b)


def _binom_coeffs(a: Fraction, order: int):
    out, c = [], Fraction(1)
    for j in range(order):
        out.append(c)
        c = c * (a - j) / (j + 1)
    return out


def reciprocal(f: Expansion) -> Expansion:
    return power(f, Fraction(-1))


def power(f: Expansion, a: Fraction) -> Expansion:
    a = Fraction(a)
    if a == 0:
        return Expansion.const(Fraction(1))
    if not f.terms and f.exact:
        if a < 0:
            raise UndecidableExpression("negative power of zero")
        return f
    if a.denominator == 1 and a > 0 and f.exact and len(f.terms) <= 2:
        out = Expansion.const(Fraction(1))
        for _ in range(int(a)):
            out = out * f
        return out
    c0, s0, r = _split(f)
    head = Expansion.make([(_coef_pow(c0, a), s0**a)])
    return head * _series(r, _binom_coeffs(a, SERIES_ORDER))


def exp(f: Expansion) -> Expansion:
    if f.rem is not None and f.rem.compare(ONE) >= 0:
        raise UndecidableExpression("exponent known only up to a non-vanishing error")
    E: dict = {}
    p = Fraction(0)
    c0 = Fraction(0)
    decaying = []
    for c, s in f.terms:
        k = s.compare(ONE)
        if k < 0:
            decaying.append((c, s))
            continue
        if k == 0:
            c0 = _add(c0, c)
            continue
        if s.E:
            raise UndecidableExpression("nested exponential growth")
        if s.p == 0 and s.q == 1:
            if _is_mp(c):
                raise UndecidableExpression("irrational power of n")
            p += c
        elif s.p == 0 and s.q < 1:
            raise UndecidableExpression("exp of a sub-logarithmic growth")
        else:
            E[(s.p, s.q)] = c
    r = Expansion.make(decaying, f.rem)
    factor = Fraction(1) if c0 == 0 else _mp_exp(c0)
    head = Expansion.make([(factor, Scale(tuple(sorted(E.items(), reverse=True)), p, Fraction(0)))])
    coeffs = [Fraction(1)]
    for j in range(1, SERIES_ORDER):
        coeffs.append(coeffs[-1] / j)
    return head * _series(r, coeffs)


def _mp_exp(c):
    with mpmath.workprec(precision()):
        return mpmath.exp(_mp(c))


def log(f: Expansion) -> Expansion:
    c0, s0, r = _split(f)
    if c0 <= 0:
        raise UndecidableExpression("log of an eventually non-positive expression")
    if s0.q != 0:
        raise UndecidableExpression("log log n is outside the fragment")
    terms = []
    if c0 != 1:
        with mpmath.workprec(precision()):
            terms.append((mpmath.log(_mp(c0)), ONE))
    for (pe, qe), c in s0.E:
        terms.append((c, Scale((), pe, qe)))
    if s0.p:
        terms.append((s0.p, LOG))
    coeffs = [Fraction(0)] + [Fraction((-1) ** (j + 1), j) for j in range(1, SERIES_ORDER)]
    return Expansion.make(terms) + _series(r, coeffs)


def expand(node: Node, var: Expansion) -> Expansion:
    """Expansion of `node` with the variable replaced by `var`."""
    if isinstance(node, Const):
        return Expansion.const(node.value)
    if isinstance(node, Var):
        return var
    if isinstance(node, Neg):
        return -expand(node.arg, var)
    if isinstance(node, Abs):
        e = expand(node.arg, var)
        return -e if e.sign() < 0 else e
    if isinstance(node, BinOp):
        a = expand(node.left, var)
        b = expand(node.right, var)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            return a * reciprocal(b)
        d = (a - b).sign()
        if node.op == "max":
            return a if d >= 0 else b
        return a if d <= 0 else b
    if isinstance(node, Pow):
        return power(expand(node.base, var), node.exponent)
    if isinstance(node, Func):
        inner = expand(node.arg, var)
        return exp(inner) if node.name == "exp" else log(inner)
    raise TypeError(node)


# variable substitutions for the three kinds of tail
TOWARD_PLUS_INF = Expansion.make([(Fraction(1), Scale((), Fraction(1), Fraction(0)))])
TOWARD_MINUS_INF = Expansion.make([(Fraction(-1), Scale((), Fraction(1), Fraction(0)))])
TOWARD_ZERO = Expansion.make([(Fraction(1), Scale((), Fraction(-1), Fraction(0)))])

_TAILS = {"+inf": TOWARD_PLUS_INF, "-inf": TOWARD_MINUS_INF, "0+": TOWARD_ZERO}


def tail_expansion(node: Node, direction: str) -> Expansion:
    return expand(node, _TAILS[direction])
