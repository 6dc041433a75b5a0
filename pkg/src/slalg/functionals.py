"""Bounded functionals on the weighted algebra, given symbolically.

A functional l pairs with a finitely supported element a as sum a(s) l(s).
Its dual norm is sup |l(s)| / w(s). The subspace of functionals with
|l(s)| / w(s) -> 0 along the cofinite filter is the standard predual E_w.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import mpmath

from .algebra import Element, convolve, delta, format_coef, norm
from .core import (
    Kind,
    Point,
    PreconditionError,
    SemigroupMismatchError,
    SlalgError,
    Truncation,
    format_point,
    normalize,
    op,
    point,
    semigroup,
)
from .weights import Interval, WeightExpr, analyze_limits, as_mpf, domain, parse_expr, points_in
from .weights.asymptotics import UndecidableExpression, tail_expansion
from .weights.expr import BinOp, EvaluationError, evaluate_exact, evaluate_mp

MEMBER, NOT_MEMBER, UNDETERMINED = "member", "not_member", "undetermined"


# ---------------------------------------------------------------------------
# sets of points


@dataclass(frozen=True)
class SetSpec:
    """interval (Interval), parity ("even" | "odd"), finite (points) or sequence (SequenceSpec)."""

    kind: str
    data: object

    @classmethod
    def interval(cls, iv: Interval) -> SetSpec:
        return cls("interval", iv)

    @classmethod
    def parity(cls, which: str) -> SetSpec:
        if which not in ("even", "odd"):
            raise SlalgError(f"parity must be 'even' or 'odd', got {which!r}")
        return cls("parity", which)

    @classmethod
    def finite(cls, points) -> SetSpec:
        return cls("finite", tuple(sorted({normalize(p) for p in points})))

    @classmethod
    def sequence(cls, seq) -> SetSpec:
        return cls("sequence", seq)

    def contains(self, p, sg, w=None):
        p = normalize(p)
        if self.kind == "interval":
            return p in self.data
        if self.kind == "parity":
            return isinstance(p, int) and p % 2 == (0 if self.data == "even" else 1)
        if self.kind == "finite":
            return p in self.data
        return self.data.contains(p, sg, w)

    def finite_in(self, sg, region: Interval):
        """Whether the set meets `region` in finitely many points (None: unknown)."""
        region = region.intersect(domain(sg))
        if self.kind == "finite":
            return True
        if self.kind == "interval":
            return points_in(sg, self.data.intersect(region)) != "infinite"
        if self.kind == "parity":
            if not sg.is_integer:
                return points_in(sg, region) != "infinite" or None
            return points_in(sg, region) != "infinite"
        seq = self.data
        if seq.is_finite:
            return True
        if seq.kind == "rationals-in":
            a, b = map(Fraction, seq.args)
            return points_in(sg, Interval(a, b).intersect(region)) != "infinite"
        if seq.kind == "arith":
            d = Fraction(seq.args[1])
            return (region.hi is not None) if d > 0 else (region.lo is not None)
        if seq.kind == "geom":
            r = Fraction(seq.args[1])
            if r > 1:
                return region.hi is not None
            lo = region.lo
            return lo is not None and lo > 0
        if seq.kind == "explicit":
            d = Fraction(seq.args[1])
            return (region.hi is not None) if d > 0 else (region.lo is not None)
        return None

    def enumerate(self, sg, w=None) -> Iterator[Point]:
        """Points of the set inside the semigroup; increasing where that is possible."""
        if self.kind == "finite":
            return (p for p in self.data)
        if self.kind == "sequence":
            return self.data.iterate(sg, w)
        if self.kind == "parity":
            start = sg.lower_bound if sg.lower_bound is not None else 0
            par = 0 if self.data == "even" else 1
            return (n for n in itertools.count(start) if n % 2 == par)
        r = self.data.intersect(domain(sg))
        if sg.is_integer:
            a, b = r.integer_range()
            if a is not None:
                return iter(range(a, b + 1)) if b is not None else itertools.count(a)
            return itertools.count(b, -1)
        a, b = r.integer_range()
        if r.hi is None:
            return (Fraction(n) for n in itertools.count(max(a, 1)))
        from .arens.sequences import calkin_wilf

        return (x for x in calkin_wilf() if x in r)

    def to_json(self) -> dict:
        if self.kind == "interval":
            return {"kind": "interval", "interval": interval_to_json(self.data)}
        if self.kind == "parity":
            return {"kind": "parity", "parity": self.data}
        if self.kind == "finite":
            return {"kind": "finite", "points": [format_point(p) for p in self.data]}
        return {"kind": "sequence", "sequence": self.data.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> SetSpec:
        kind = data["kind"]
        if kind == "interval":
            return cls.interval(interval_from_json(data["interval"]))
        if kind == "parity":
            return cls.parity(data["parity"])
        if kind == "finite":
            return cls.finite(data["points"])
        if kind == "sequence":
            from .arens.sequences import SequenceSpec

            return cls.sequence(SequenceSpec.from_json(data["sequence"]))
        raise SlalgError(f"unknown set kind {kind!r}")

    def __str__(self):
        if self.kind == "finite":
            return "{" + ", ".join(str(p) for p in self.data) + "}"
        return str(self.data) if self.kind != "parity" else self.data + "s"


def interval_to_json(iv: Interval) -> dict:
    f = lambda x: None if x is None else format_point(x)  # noqa: E731
    return {"lo": f(iv.lo), "hi": f(iv.hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}


def interval_from_json(data: dict) -> Interval:
    g = lambda x: None if x is None else Fraction(x)  # noqa: E731
    return Interval(g(data["lo"]), g(data["hi"]), data.get("lo_closed", False), data.get("hi_closed", False))


# ---------------------------------------------------------------------------
# functional forms


class Functional:
    """Base class of the symbolic functional forms."""

    form = "abstract"

    def value(self, s: Point, w: WeightExpr):
        raise NotImplementedError

    def dual_norm_bound(self, w: WeightExpr):
        """An upper bound for sup |l(s)| / w(s); weights are >= 1."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class CharTimesOmega(Functional):
    """l(s) = w(s) on the set, 0 elsewhere."""

    set: SetSpec
    form = "char-times-omega"

    def value(self, s, w):
        member = self.set.contains(s, w.semigroup, w)
        if member is None:
            raise SlalgError(f"membership of {s} in {self.set} undetermined")
        return w(s) if member else Fraction(0)

    def dual_norm_bound(self, w):
        return Fraction(1)

    def to_json(self):
        return {"form": self.form, "set": self.set.to_json()}


@dataclass(frozen=True)
class Indicator(Functional):
    points: tuple
    form = "indicator"

    def __init__(self, points):
        object.__setattr__(self, "points", tuple(sorted({normalize(p) for p in points})))

    def value(self, s, w):
        return Fraction(1) if normalize(s) in self.points else Fraction(0)

    def dual_norm_bound(self, w):
        return max((_recip(w(p)) for p in self.points), default=Fraction(0), key=as_mpf)

    def to_json(self):
        return {"form": self.form, "points": [format_point(p) for p in self.points]}


@dataclass(frozen=True)
class PhiK(Functional):
    """The character summing coefficients at points >= k."""

    k: Point
    form = "phi-k"

    def value(self, s, w):
        return Fraction(1) if s >= self.k else Fraction(0)

    def dual_norm_bound(self, w):
        return Fraction(1)

    def to_json(self):
        return {"form": self.form, "k": format_point(self.k)}


@dataclass(frozen=True)
class PhiOmega(Functional):
    """l(s) = 1 / w(s), so that <a, l> = sum a(s) / w(s)."""

    form = "phi-omega"

    def value(self, s, w):
        return _recip(w(s))

    def dual_norm_bound(self, w):
        return Fraction(1)

    def to_json(self):
        return {"form": self.form}


@dataclass(frozen=True)
class Table(Functional):
    """Finitely many listed values, then a constant tail from tail_start on.

    tail_start None puts the tail on every unlisted point. A window marks a
    table that is only known up to that point.
    """

    entries: tuple  # ((point, value), ...)
    tail: Fraction = Fraction(0)
    tail_start: Point | None = None
    window: Point | None = None
    form = "table"

    @classmethod
    def of(cls, entries: dict | None = None, tail=0, tail_start=None, window=None) -> Table:
        entries = entries or {}
        items = tuple(sorted((normalize(p), Fraction(v)) for p, v in entries.items()))
        return cls(items, Fraction(tail), None if tail_start is None else normalize(tail_start), window)

    def value(self, s, w):
        s = normalize(s)
        if self.window is not None and s > self.window:
            raise SlalgError(f"table only known up to {self.window}")
        for p, v in self.entries:
            if p == s:
                return v
        if self.tail_start is None or s >= self.tail_start:
            return self.tail
        return Fraction(0)

    def dual_norm_bound(self, w):
        vals = [abs(v) * _recip(w(p)) for p, v in self.entries]
        return max(vals + [abs(self.tail)], key=as_mpf)

    def to_json(self):
        return {
            "form": self.form,
            "entries": [[format_point(p), format_coef(v)] for p, v in self.entries],
            "tail": format_coef(self.tail),
            "tail_start": None if self.tail_start is None else format_point(self.tail_start),
            "window": None if self.window is None else format_point(self.window),
        }


@dataclass(frozen=True)
class Spliced(Functional):
    """l(r) = inner(r) for r < cut and the constant c for r >= cut."""

    inner: Functional
    cut: Point
    c: object
    form = "spliced"

    def value(self, s, w):
        return self.inner.value(s, w) if s < self.cut else self.c

    def dual_norm_bound(self, w):
        return max(self.inner.dual_norm_bound(w), abs(self.c), key=as_mpf)

    def to_json(self):
        return {"form": self.form, "inner": self.inner.to_json(), "cut": format_point(self.cut), "c": format_coef(self.c)}


@dataclass(frozen=True)
class Formula(Functional):
    """l(s) given by a DSL expression in n, e.g. "1/n"."""

    text: str
    node: object = field(default=None, compare=False, repr=False)
    form = "formula"

    def __post_init__(self):
        if self.node is None:
            object.__setattr__(self, "node", parse_expr(self.text))

    def value(self, s, w):
        if self.node.is_exact:
            return evaluate_exact(self.node, Fraction(s))
        return evaluate_mp(self.node, Fraction(s))

    def dual_norm_bound(self, w, window: int = 1000):
        # sampled bound over a window; exact only for eventually decreasing ratios
        pts = itertools.islice(SetSpec.interval(domain(w.semigroup)).enumerate(w.semigroup), window)
        return max((abs(self.value(p, w)) * _recip(w(p)) for p in pts), key=as_mpf)

    def to_json(self):
        return {"form": self.form, "text": self.text}


def _recip(x):
    return 1 / x if isinstance(x, Fraction) else 1 / as_mpf(x)


def functional_from_json(data: dict) -> Functional:
    form = data["form"]
    if form == "char-times-omega":
        return CharTimesOmega(SetSpec.from_json(data["set"]))
    if form == "indicator":
        return Indicator(data["points"])
    if form == "phi-k":
        return PhiK(normalize(data["k"]))
    if form == "phi-omega":
        return PhiOmega()
    if form == "table":
        entries = {normalize(p): Fraction(v) for p, v in data.get("entries", [])}
        return Table.of(entries, Fraction(data.get("tail", 0)), data.get("tail_start"), data.get("window"))
    if form == "spliced":
        return Spliced(functional_from_json(data["inner"]), normalize(data["cut"]), Fraction(data["c"]))
    if form == "formula":
        return Formula(data["text"])
    raise SlalgError(f"unknown functional form {form!r}")


# ---------------------------------------------------------------------------
# operations


def pair(a: Element, l: Functional, w: WeightExpr):
    """<a, l> = sum a(s) l(s); exact whenever every term is rational."""
    if a.semigroup != w.semigroup:
        raise SemigroupMismatchError(f"{a.semigroup} vs {w.semigroup}")
    total = Fraction(0)
    for s, c in a.terms:
        v = l.value(s, w)
        if isinstance(total, Fraction) and isinstance(v, Fraction) and isinstance(c, Fraction):
            total += c * v
        else:
            total = as_mpf(total) + as_mpf(c) * as_mpf(v)
    return total


def module_action(s: Point, l: Functional, w: WeightExpr, window: int = 100) -> Functional:
    """The functional r -> l(rs)."""
    sg = w.semigroup
    s = point(sg, s)
    if not sg.is_min:
        entries = {r: l.value(op(sg, r, s), w) for r in range(1, window + 1)}
        return Table.of(entries, 0, None, window)
    if isinstance(l, PhiK):
        return l if s >= l.k else Table.of()
    if isinstance(l, Spliced) and s >= l.cut:
        return l
    if isinstance(l, Spliced):
        return Spliced(l.inner, s, l.value(s, w)) if l.value(s, w) != 0 else _restrict(l.inner, s)
    v = l.value(s, w)
    if isinstance(l, Indicator) or (isinstance(l, Table) and l.tail == 0 and l.window is None):
        pts = l.points if isinstance(l, Indicator) else [p for p, _ in l.entries]
        return Table.of({p: l.value(p, w) for p in pts if p < s}, v, s)
    if isinstance(l, Table) and l.window is None and sg.is_integer and l.tail_start is not None:
        lo = l.tail_start
        entries = {p: l.value(p, w) for p in [q for q, _ in l.entries] + list(range(lo, s)) if p < s}
        return Table.of(entries, v, s)
    return Spliced(l, s, v)


def _restrict(l: Functional, cut) -> Functional:
    return Spliced(l, cut, Fraction(0))


@dataclass(frozen=True)
class Membership:
    status: str
    reason: str
    window: int | None = None

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "window": self.window}


def e_omega_membership(l: Functional, w: WeightExpr) -> Membership:
    """Whether |l(s)| / w(s) -> 0 along the cofinite filter."""
    try:
        verdict, reason = _member(l, w, domain(w.semigroup))
    except UndecidableExpression as exc:
        return Membership(UNDETERMINED, f"asymptotics undecidable: {exc}")
    if verdict is None:
        return Membership(UNDETERMINED, reason, getattr(l, "window", None))
    return Membership(MEMBER if verdict else NOT_MEMBER, reason)


def _constant_ratio_member(w, region, c) -> tuple:
    """|c| / w(s) on region: a member iff c = 0, finitely many points, or w -> inf there."""
    if c == 0:
        return True, "zero tail"
    if points_in(w.semigroup, region) != "infinite":
        return True, "finitely many points"
    report = analyze_limits(w, region)
    if report.filter_lim_infinite:
        return True, f"w tends to infinity along the cofinite filter on {region}"
    return False, f"w stays below {report.to_json()['liminf_value']} infinitely often on {region}"


def _member(l: Functional, w: WeightExpr, region: Interval) -> tuple:
    sg = w.semigroup
    if points_in(sg, region) == "none":
        return True, "empty region"
    if isinstance(l, Indicator):
        return True, "finite support"
    if isinstance(l, Table):
        if l.window is not None:
            return None, f"table known only up to {l.window}"
        tail_region = region if l.tail_start is None else region.intersect(Interval.at_least(l.tail_start))
        return _constant_ratio_member(w, tail_region, l.tail)
    if isinstance(l, PhiK):
        return _constant_ratio_member(w, region.intersect(Interval.at_least(l.k)), 1)
    if isinstance(l, PhiOmega):
        return _constant_ratio_member(w, region, 1)
    if isinstance(l, CharTimesOmega):
        fin = l.set.finite_in(sg, region)
        if fin is None:
            return None, f"cannot decide whether {l.set} is finite"
        return (True, "ratio is 1 on a finite set") if fin else (False, "ratio is 1 on an infinite set")
    if isinstance(l, Spliced):
        below, why_b = _member(l.inner, w, region.intersect(Interval.below(l.cut)))
        above, why_a = _constant_ratio_member(w, region.intersect(Interval.at_least(l.cut)), l.c)
        if below is False or above is False:
            return False, why_b if below is False else why_a
        if below and above:
            return True, f"{why_b}; {why_a}"
        return None, f"{why_b}; {why_a}"
    if isinstance(l, Formula):
        if not sg.is_integer:
            return None, "formula functionals are decided on integer semigroups only"
        for part, expr in w.pieces_in(region):
            a, b = part.integer_range()
            for direction, unbounded in (("+inf", b is None), ("-inf", a is None)):
                if not unbounded:
                    continue
                lim = tail_expansion(BinOp("/", l.node, expr), direction).limit()
                if lim != 0:
                    return False, f"l/w tends to {lim} toward {direction}"
        return True, "l/w tends to 0 on every unbounded tail"
    raise SlalgError(f"unsupported functional {l!r}")


# ---------------------------------------------------------------------------
# the non-submodule witness


@dataclass
class WitnessReport:
    points: list
    bound_M: object
    functional: Functional
    pairings: list  # <alpha_n, l>
    products: list  # |<alpha_n * delta_t, l>|
    lower_bound: object  # |<delta_u, l>| / M
    verdict: bool

    def to_json(self) -> dict:
        return {
            "points": [format_point(p) for p in self.points],
            "M": format_coef(self.bound_M),
            "functional": self.functional.to_json(),
            "pairings": [format_coef(v) for v in self.pairings],
            "products": [format_coef(v) for v in self.products],
            "lower_bound": format_coef(self.lower_bound),
            "verdict": self.verdict,
        }


def non_submodule_witness(
    sg,
    w: WeightExpr,
    U: SetSpec,
    t: Point,
    u: Point,
    n_max: int,
    l: Functional | None = None,
    checkpoints: tuple = (1, 2, 3, 10),
) -> WitnessReport:
    """Averages alpha_n = (1/n) sum_{i<=n} d~_{s_i} over points s_i of U with s_i t = u.

    <alpha_n, l> tends to 0 for l in E_w, while |<alpha_n * d_t, l>| stays
    above |l(u)| / M, so multiplication by d_t is not weak* continuous.
    """
    sg = semigroup(sg)
    t, u = point(sg, t), point(sg, u)
    report = analyze_limits(w)
    if report.filter_lim_infinite:
        raise PreconditionError("w tends to infinity, so no infinite set carries a bounded weight")
    if U.kind == "interval":
        if points_in(sg, U.data) != "infinite":
            raise PreconditionError(f"U = {U} is finite")
        local = analyze_limits(w, U.data)
        if any(tail.limit == mpmath.inf for tail in local.tails.values()):
            raise PreconditionError(f"w is unbounded on U = {U}")
    if U.finite_in(sg, domain(sg)) is True:
        raise PreconditionError(f"U = {U} is finite")
    l = l if l is not None else Indicator([u])
    member = e_omega_membership(l, w)
    if member.status != MEMBER:
        raise PreconditionError(f"test functional is not in E_w: {member.reason}")
    lu = l.value(u, w)
    if lu == 0:
        raise PreconditionError("<d_u, l> must be nonzero")
    pts = []
    for r in itertools.islice(U.enumerate(sg, w), 100 * n_max + 1000):
        if op(sg, r, t) == u:
            pts.append(r)
            if len(pts) == n_max:
                break
    if len(pts) < n_max:
        raise PreconditionError(f"{{r in U : r*{t} = {u}}} has fewer than {n_max} points on the search window")
    exact = w.is_exact and all(isinstance(l.value(p, w), Fraction) for p in pts[:1])
    weights = [w.exact(p) if exact else as_mpf(w(p)) for p in pts]
    M = max(weights)
    pairings, products = [], []
    s_pair, s_prod = 0, 0
    for n, (p, wp) in enumerate(zip(pts, weights), 1):
        s_pair += l.value(p, w) / wp
        s_prod += 1 / wp
        pairings.append(s_pair / n)
        products.append(abs(lu * s_prod / n))
    for n in checkpoints + (n_max,):
        if n > n_max:
            continue
        # rebuild alpha_n as an element and pair directly
        if exact:
            alpha = Element.from_terms(sg, {p: Fraction(1, n) / wp for p, wp in zip(pts[:n], weights)})
            assert pair(alpha, l, w) == pairings[n - 1]
            assert abs(pair(convolve(alpha, delta(sg, t)), l, w)) == products[n - 1]
    bound = abs(lu) / M
    verdict = all(v >= bound for v in products) and abs(pairings[-1]) < bound
    return WitnessReport(pts, M, l, pairings, products, bound, verdict)


# ---------------------------------------------------------------------------
# compactness of multiplication operators


@dataclass
class CompactnessReport:
    x: Point
    M: object
    eps: object
    G_size: int
    ratios: list
    max_ratio: object
    ok: bool

    def to_json(self) -> dict:
        return {
            "x": format_point(self.x),
            "M": format_coef(self.M),
            "eps": format_coef(self.eps),
            "G_size": self.G_size,
            "max_ratio": format_coef(self.max_ratio),
            "ok": self.ok,
        }


def compactness_probe(
    x: Point,
    w: WeightExpr,
    window: Truncation,
    eps=Fraction(1, 100),
    samples: int = 20,
    seed: int = 0,
    support: int = 12,
    fs: list | None = None,
) -> CompactnessReport:
    """Compare d_x * f with its projection onto F = xG, G = {t : w(t) <= M / eps}."""
    sg = w.semigroup
    if sg.kind is not Kind.NAT_MIN:
        raise PreconditionError("xS must be finite; only nat-min qualifies")
    if not analyze_limits(w).filter_lim_infinite:
        raise PreconditionError("w is bounded on an infinite set")
    x = point(sg, x)
    eps = Fraction(eps)
    M = max((w(s) for s in range(1, x + 1)), key=as_mpf)
    G = [t for t in window if as_mpf(w(t)) <= as_mpf(M) / as_mpf(eps)]
    F = {op(sg, x, g) for g in G}
    rng = random.Random(seed)
    if fs is None:
        fs = []
        for _ in range(samples):
            pts = rng.sample(list(window), min(support, len(window)))
            fs.append(Element.from_terms(sg, {p: Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 9)) for p in pts}))
    ratios = []
    for f in fs:
        g = convolve(delta(sg, x), f)
        rest = Element(sg, tuple((s, c) for s, c in g.terms if s not in F), g.mode)
        nf = norm(f, w)
        ratios.append(norm(rest, w) / nf if nf else Fraction(0))
    top = max(ratios, key=as_mpf, default=Fraction(0))
    return CompactnessReport(x, M, eps, len(G), ratios, top, as_mpf(top) <= as_mpf(eps))
