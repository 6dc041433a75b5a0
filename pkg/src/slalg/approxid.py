"""Approximate identities built from cofinal point masses."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Element, convolve, delta, format_coef, norm
from .arens.sequences import SequenceSpec
from .core import Point, PreconditionError, SemigroupSpec, Truncation, format_point, semigroup
from .weights import WeightExpr, analyze_limits, as_mpf

BOUNDED = "bounded"
SEQUENTIAL = "sequential_unbounded"
IDENTITY = "identity"


@dataclass
class VerificationRow:
    test: int  # index into the test list
    n: int
    point: Point
    residual: object  # ||a - a * d_{s_n}||
    tail: object  # sum_{t > s_n} |a(t)| w(t)
    bound: object  # factor * tail
    ok: bool
    multiplier_ok: bool

    def to_json(self) -> dict:
        return {
            "test": self.test,
            "n": self.n,
            "s_n": format_point(self.point),
            "residual": format_coef(self.residual),
            "tail": format_coef(self.tail),
            "bound": format_coef(self.bound),
            "ok": self.ok,
            "multiplier_ok": self.multiplier_ok,
        }


@dataclass
class AIReport:
    kind: str
    sequence: SequenceSpec
    weight: WeightExpr
    bound: Fraction | None = None  # M in the bounded case
    multiplier_bound: Fraction = Fraction(2)
    search: int = 200
    verification: list = field(default_factory=list)

    @property
    def tail_factor(self) -> Fraction:
        return self.bound + 1 if self.kind == BOUNDED else Fraction(2)

    def points(self, N: int) -> list:
        if self.kind == SEQUENTIAL and len(self.sequence.args[0]) < N:
            self.sequence = SequenceSpec.explicit(greedy_sequence(self.weight, N, self.search))
        return self.sequence.take(self.weight.semigroup, N, self.weight)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "bound": None if self.bound is None else format_coef(self.bound),
            "multiplier_bound": format_coef(self.multiplier_bound),
            "sequence": self.sequence.to_json(),
            "verification": [r.to_json() for r in self.verification],
        }


def _key(w, s):
    return w.exact(s) if w.is_exact else as_mpf(w(s))


def greedy_sequence(w: WeightExpr, N: int, search: int = 200, start: Point = 1) -> list:
    """s_1 = argmin of w near `start`; s_{k+1} = argmin of w over the grid after s_k.

    Each arg-min ranges over `search` grid points (ties: smallest point), so
    w(s_k) <= w(t) for grid points t >= s_k within the window.
    """
    pts, lo = [], start
    for _ in range(N):
        best = min(range(lo, lo + search + 1), key=lambda s: (_key(w, s), s))
        pts.append(best)
        lo = best + 1
    return pts


def build_ai(w: WeightExpr, depth: int = 50, search: int = 200) -> AIReport:
    sg = w.semigroup
    if not sg.is_min:
        raise PreconditionError(f"{sg} is not a totally ordered semilattice")
    report = analyze_limits(w)
    if report.bounded_cofinal_bound is not None:
        M = report.bounded_cofinal_bound
        return AIReport(BOUNDED, SequenceSpec.enum_le(M), w, M, M, search)
    if not report.order_lim_sup_infinite:
        raise PreconditionError("no cofinal sublevel set and w does not tend to infinity toward sup S")
    pts = greedy_sequence(w, depth, search)
    return AIReport(SEQUENTIAL, SequenceSpec.explicit(pts), w, None, Fraction(2), search)


def verify_ai(report: AIReport, tests: list[Element], N: int) -> list[VerificationRow]:
    """Exact residuals ||a - a * d_{s_n}|| against the tail bound, for n <= N."""
    w = report.weight
    sg = w.semigroup
    pts = report.points(N)
    rows = []
    for i, a in enumerate(tests):
        na = norm(a, w)
        for n, s in enumerate(pts, 1):
            prod = convolve(a, delta(sg, s))
            residual = norm(a - prod, w)
            tail = sum((abs(c) * _key(w, t) for t, c in a.terms if t > s), Fraction(0))
            bound = report.tail_factor * tail
            ok = as_mpf(residual) <= as_mpf(bound) if not isinstance(residual, Fraction) else residual <= bound
            mult = norm(prod, w)
            mult_ok = as_mpf(mult) <= as_mpf(report.multiplier_bound * na)
            rows.append(VerificationRow(i, n, s, residual, tail, bound, bool(ok), bool(mult_ok)))
    report.verification = rows
    return rows


@dataclass
class IdentityReport:
    identity: Element | None
    verified: bool
    reason: str

    def to_json(self) -> dict:
        return {
            "identity": None if self.identity is None else self.identity.to_json(),
            "verified": self.verified,
            "reason": self.reason,
        }


def identity_check(target: Truncation | SemigroupSpec | str, samples: int = 20, seed: int = 0) -> IdentityReport:
    """A truncation has identity d_max; the full semigroups have no greatest element."""
    if not isinstance(target, Truncation):
        sg = semigroup(target)
        if sg.properties.has_sup_in_S:
            raise PreconditionError(f"{sg} has a greatest element")
        return IdentityReport(None, True, f"{sg} has no greatest element")
    sg = target.semigroup
    if not sg.is_min:
        raise PreconditionError("identity detection needs a semilattice truncation")
    e = delta(sg, target.max)
    rng = random.Random(seed)
    pts = list(target)
    ok = True
    for _ in range(samples):
        chosen = rng.sample(pts, rng.randint(1, len(pts)))
        a = Element.from_terms(sg, {p: Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for p in chosen})
        ok &= convolve(e, a) == a and convolve(a, e) == a
    return IdentityReport(e, ok, f"d_{target.max} fixes every element supported in the truncation")
