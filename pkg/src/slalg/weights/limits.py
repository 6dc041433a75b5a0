"""Filter limits and order limits of weights.

Two notions are kept apart. The filter limit asks whether every sublevel
set {s : w(s) <= M} is finite. The order limits follow w toward the ends of
the ordered index set (sup S, and inf S when it is not attained).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import mpmath

from ..core import Kind, PreconditionError, SlalgError
from . import asymptotics
from .asymptotics import Expansion, UndecidableExpression
from .expr import Const, EvaluationError, as_mpf, evaluate_exact, evaluate_mp
from .interval import Interval, domain
from .weight import WeightExpr, bounded_part, branch_and_bound

INF = mpmath.inf


@dataclass
class TailInfo:
    direction: str  # "+inf", "-inf" or "0+"
    limit: object  # Fraction, mpf or +-inf
    approach: int  # eventual sign of w - limit (0 when identically equal)


@dataclass
class LimitReport:
    filter_lim_infinite: bool
    liminf_value: object  # Fraction, mpf, or mpmath.inf
    order_lim_sup_infinite: bool
    order_lim_inf_infinite: bool
    bounded_cofinal_bound: Fraction | None
    liminf_exact: bool = True
    low_set_accumulation: tuple = ()  # where {w <= liminf} accumulates: "sup", "inf", "interior"
    tails: dict = field(default_factory=dict)
    contributions: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "filter_lim_infinite": self.filter_lim_infinite,
            "liminf_value": format_extended(self.liminf_value),
            "liminf_exact": self.liminf_exact,
            "order_lim_sup_infinite": self.order_lim_sup_infinite,
            "order_lim_inf_infinite": self.order_lim_inf_infinite,
            "bounded_cofinal_bound": None
            if self.bounded_cofinal_bound is None
            else format_extended(self.bounded_cofinal_bound),
            "low_set_accumulation": list(self.low_set_accumulation),
        }


def format_extended(x):
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return x
    return mpmath.nstr(x, 20)


def _tail(expr, direction) -> TailInfo:
    e = asymptotics.tail_expansion(expr, direction)
    L = e.limit()
    if L in (INF, -INF):
        return TailInfo(direction, L, 0)
    return TailInfo(direction, L, (e - Expansion.const(L)).sign())


def _rational_infimum(expr, part: Interval, tails: list[TailInfo], span: int = 1000):
    """Infimum of a continuous expression over a non-degenerate interval.

    Returns (value, exact). The value is exact when an endpoint or tail limit
    provably realises the infimum.
    """
    candidates = [t.limit for t in tails]
    for end in (part.lo, part.hi):
        if end is not None and end > 0:
            try:
                v = evaluate_mp(expr, end)
            except EvaluationError:
                continue
            if expr.is_exact:
                v = evaluate_exact(expr, end)
            candidates.append(v)
    c, d = bounded_part(part, span)
    lower, best, _ = branch_and_bound(expr, c, d)
    best_candidate = min(candidates, key=lambda v: as_mpf(v) if v not in (INF, -INF) else v) if candidates else INF
    if best_candidate != INF and as_mpf(best_candidate) <= lower + mpmath.mpf(2) ** -60:
        return best_candidate, True
    if best is not None and (best_candidate == INF or best < best_candidate):
        return best, False
    return best_candidate, True


def analyze_limits(w: WeightExpr, region: Interval | None = None) -> LimitReport:
    """Decide both limit notions of `w`, optionally restricted to a region.

    Raises UndecidableExpression when a relevant tail leaves the
    eventually-monotone fragment.
    """
    sg = w.semigroup
    contributions = []
    tails: dict[str, TailInfo] = {}
    accumulation = set()
    dom = domain(sg) if region is None else domain(sg).intersect(region)
    for part, expr in w.pieces_in(region):
        if sg.is_integer:
            a, b = part.integer_range()
            if a is not None and b is not None:
                continue
            if b is None:
                tails["+inf"] = _tail(expr, "+inf")
                contributions.append((part, tails["+inf"].limit, True, expr))
            if a is None:
                tails["-inf"] = _tail(expr, "-inf")
                contributions.append((part, tails["-inf"].limit, True, expr))
        else:
            if part.lo is not None and part.hi is not None and part.lo == part.hi:
                continue
            local = []
            if part.hi is None:
                tails["+inf"] = _tail(expr, "+inf")
                local.append(tails["+inf"])
            if part.lo is None or part.lo == 0:
                tails["0+"] = _tail(expr, "0+")
                local.append(tails["0+"])
            value, exact = _rational_infimum(expr, part, local)
            contributions.append((part, value, exact, expr))
    if contributions:
        liminf, liminf_exact = INF, True
        for _, v, exact, _ in contributions:
            if v != INF and (liminf == INF or as_mpf(v) < as_mpf(liminf)):
                liminf, liminf_exact = v, exact
    else:
        liminf, liminf_exact = INF, True
    filter_inf = liminf == INF

    up = tails.get("+inf")
    down = tails.get("-inf") if sg.kind is Kind.INT_MIN else tails.get("0+")
    order_sup_inf = up is not None and up.limit == INF and dom.hi is None
    order_inf_inf = down is not None and down.limit == INF

    bound = None
    if up is not None and up.limit != INF and dom.hi is None:
        L = up.limit
        bound = _rational_ceiling(L) if up.approach <= 0 else _rational_ceiling(L) + 1

    if not filter_inf:
        for t in tails.values():
            if t.limit != INF and _same(t.limit, liminf) and t.approach <= 0:
                accumulation.add("sup" if t.direction == "+inf" else "inf")
        if not sg.is_integer:
            for part, v, _, expr in contributions:
                if isinstance(expr, Const) and _same(expr.value, liminf):
                    accumulation.add("interior")
    return LimitReport(
        filter_lim_infinite=filter_inf,
        liminf_value=liminf,
        order_lim_sup_infinite=order_sup_inf,
        order_lim_inf_infinite=order_inf_inf,
        bounded_cofinal_bound=bound,
        liminf_exact=liminf_exact,
        low_set_accumulation=tuple(sorted(accumulation)),
        tails=tails,
        contributions=[(str(p), format_extended(v), e) for p, v, e, _ in contributions],
    )


def _same(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return abs(as_mpf(a) - as_mpf(b)) <= mpmath.mpf(2) ** -80 * max(1, abs(as_mpf(b)))


def _rational_ceiling(x) -> Fraction:
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    f = Fraction(mpmath.nstr(x, 30, strip_zeros=False)).limit_denominator(10**12)
    while as_mpf(f.numerator) / f.denominator < x:
        f += Fraction(1, 10**12)
    return f


def sublevel_points(w: WeightExpr, M, region: Interval | None = None) -> Iterator:
    """Strictly monotone enumeration of infinitely many points with w <= M.

    Upward along the integers when the sublevel set is cofinal toward sup S,
    downward toward -inf (or 0) otherwise, and toward the right end of a
    sub-interval on which w <= M for positive rationals.
    """
    report = analyze_limits(w, region)
    dom = domain(w.semigroup) if region is None else domain(w.semigroup).intersect(region)
    M = Fraction(M) if isinstance(M, (int, Fraction)) else M

    def ok(t: TailInfo | None):
        if t is None or t.limit == INF:
            return False
        c = as_mpf(t.limit) - as_mpf(M)
        return c < 0 or (_same(t.limit, M) and t.approach <= 0)

    up = report.tails.get("+inf")
    if ok(up):
        start = dom.integer_range()[0]
        if start is None:
            start = _piece_start(w, "+inf", region)
        return (s for s in itertools.count(start) if s in dom and w.leq(s, M))
    down = report.tails.get("-inf")
    if w.semigroup.is_integer and ok(down):
        start = dom.integer_range()[1]
        if start is None:
            start = _piece_start(w, "-inf", region)
        return (s for s in itertools.count(start, -1) if s in dom and w.leq(s, M))
    if not w.semigroup.is_integer:
        for part, expr in w.pieces_in(region):
            if part.lo is not None and part.hi is not None and part.lo == part.hi:
                continue
            c, d = bounded_part(part, 1000)
            c = part.lo if part.lo is not None and part.lo > 0 else d / 2
            lower, best, _ = branch_and_bound(expr, c, d)
            upper = _upper_bound(expr, c, d)
            if upper is not None and upper <= as_mpf(M):
                return (p for p in (d - (d - c) / (k + 1) for k in itertools.count(1)) if w.leq(p, M))
        zero = report.tails.get("0+")
        if ok(zero):
            return (p for p in (Fraction(1, k) for k in itertools.count(2)) if p in dom and w.leq(p, M))
    raise PreconditionError(f"{{s : w(s) <= {M}}} is finite for weight {w.text!r}")


def _upper_bound(expr, c, d):
    from .expr import evaluate_iv, hi

    try:
        return hi(evaluate_iv(expr, (c, d)))
    except EvaluationError:
        return None


def _piece_start(w, direction, region):
    for part, _ in w.pieces_in(region):
        a, b = part.integer_range()
        if direction == "+inf" and b is None:
            return a if a is not None else 0
        if direction == "-inf" and a is None:
            return b if b is not None else 0
    raise SlalgError("no unbounded piece")
