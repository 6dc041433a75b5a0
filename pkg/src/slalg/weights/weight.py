from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from ..core import Kind, Point, SemigroupSpec, SlalgError, point, semigroup
from . import asymptotics
from .expr import Const, EvaluationError, Node, evaluate_exact, evaluate_iv, evaluate_mp, hi, lo, precision
from .interval import Interval, domain
from .parser import ParseError, parse_pieces


class ValidityError(SlalgError, ValueError):
    def __init__(self, message: str, point=None):
        self.point = point
        super().__init__(message)


class ModeError(SlalgError, TypeError):
    """Float-valued data reached a pipeline that requires exact values."""


@dataclass(frozen=True)
class Piece:
    interval: Interval
    expr: Node


@dataclass(frozen=True)
class ValidationConfig:
    window: int = 2000
    grid: int = 64
    rational_span: int = 1000
    bisection_depth: int = 18


@dataclass(frozen=True, eq=False)
class WeightExpr:
    text: str
    semigroup: SemigroupSpec
    pieces: tuple
    is_exact: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "is_exact", all(p.expr.is_exact for p in self.pieces))

    def __repr__(self):
        return f"WeightExpr({self.text!r}, {self.semigroup})"

    def piece_at(self, s) -> Piece:
        for piece in self.pieces:
            if s in piece.interval:
                return piece
        raise ValidityError(f"no piece covers {s}", s)

    def __call__(self, s: Point):
        return eval_weight(self, s)

    def exact(self, s: Point) -> Fraction:
        if not self.is_exact:
            raise ModeError(f"weight {self.text!r} is not rational-valued")
        return evaluate_exact(self.piece_at(s).expr, Fraction(s))

    def enclose(self, s, prec: int | None = None):
        """Interval enclosure of the weight at `s` (outward rounded)."""
        return evaluate_iv(self.piece_at(s).expr, s, prec)

    def compare(self, s, M) -> int:
        """Sign of w(s) - M, decided exactly or with directed rounding.

        Values that cannot be separated from M at 4x working precision
        are treated as equal.
        """
        M = Fraction(M) if not isinstance(M, mpmath.mpf) else M
        if self.is_exact and not isinstance(M, mpmath.mpf):
            v = self.exact(s)
            return (v > M) - (v < M)
        prec = precision()
        for _ in range(3):
            box = self.enclose(s, prec)
            target = evaluate_iv(Const(M), 0, prec) if isinstance(M, Fraction) else None
            m_lo, m_hi = (lo(target), hi(target)) if target is not None else (M, M)
            if hi(box) < m_lo:
                return -1
            if lo(box) > m_hi:
                return 1
            prec *= 2
        return 0

    def leq(self, s, M) -> bool:
        return self.compare(s, M) <= 0

    def pieces_in(self, region: Interval | None = None):
        dom = domain(self.semigroup)
        if region is not None:
            dom = dom.intersect(region)
        for piece in self.pieces:
            part = piece.interval.intersect(dom)
            if not part.is_empty:
                yield part, piece.expr


def eval_weight(w: WeightExpr, s: Point):
    """Weight value: a Fraction for rational-valued weights, else an mpf."""
    s = point(w.semigroup, s)
    expr = w.piece_at(s).expr
    if w.is_exact:
        return evaluate_exact(expr, Fraction(s))
    return evaluate_mp(expr, s)


def parse_weight(text: str, sg, validate: bool = True, config: ValidationConfig | None = None) -> WeightExpr:
    sg = semigroup(sg)
    raw = parse_pieces(text)
    if raw[0][0] is None:
        pieces = (Piece(domain(sg), raw[0][1]),)
    else:
        pieces = tuple(sorted((Piece(i, e) for i, e in raw), key=_lo_key))
        _check_partition(text, sg, pieces)
    w = WeightExpr(text, sg, pieces)
    if validate:
        validate_weight(w, config or ValidationConfig())
    return w


def _lo_key(piece: Piece):
    iv = piece.interval
    return (float("-inf") if iv.lo is None else iv.lo, 0 if iv.lo_closed else 1)


def _check_partition(text, sg, pieces):
    dom = domain(sg)
    if sg.is_integer:
        covered = []
        for p in pieces:
            a, b = p.interval.intersect(dom).integer_range()
            if a is not None and b is not None and a > b:
                continue
            covered.append((a, b, p.interval))
        da, _ = dom.integer_range()
        expected = da
        for k, (a, b, interval) in enumerate(covered):
            if k == 0:
                if expected is not None and (a is None or a <= expected):
                    pass
                elif expected is None and a is None:
                    pass
                else:
                    raise ParseError(f"pieces leave {expected if expected is not None else '-inf'} uncovered", 0, text)
            elif a is None or prev_b is None or a != prev_b + 1:
                if a is not None and prev_b is not None and a <= prev_b:
                    raise ParseError(f"pieces overlap at {a}", 0, text)
                raise ParseError(f"pieces leave a gap after {prev_b}", 0, text)
            prev_b = b
        if not covered or covered[-1][1] is not None:
            raise ParseError("pieces do not reach +inf", 0, text)
        return
    parts = [p.interval.intersect(dom) for p in pieces]
    parts = [iv for iv in parts if not iv.is_empty]
    if not parts or parts[0].lo != dom.lo or parts[0].lo_closed:
        raise ParseError("pieces must start at the lower end of the domain", 0, text)
    for a, b in zip(parts, parts[1:]):
        if a.hi is None or a.hi != b.lo:
            raise ParseError(f"pieces leave a gap after {a}", 0, text)
        if a.hi_closed == b.lo_closed:
            word = "overlap" if a.hi_closed else "leave a gap"
            raise ParseError(f"pieces {word} at {a.hi}", 0, text)
    if parts[-1].hi is not None:
        raise ParseError("pieces do not reach +inf", 0, text)


def validate_weight(w: WeightExpr, config: ValidationConfig = ValidationConfig()):
    if w.semigroup.kind is Kind.NAT_PLUS:
        _validate_submultiplicative(w, config)
        return
    for part, expr in w.pieces_in():
        if w.semigroup.is_integer:
            _validate_integer_piece(w, part, expr, config)
        else:
            _validate_rational_piece(w, part, expr, config)


def _violation(w, s):
    raise ValidityError(f"weight {w.text!r} is below 1 at {s}", s)


def _check_points(w, points):
    for s in points:
        if w.compare(s, 1) < 0:
            _violation(w, s)


def _check_tail(w, expr, direction, start, step):
    try:
        e = asymptotics.tail_expansion(expr, direction)
        L = e.limit()
        if L > 1:
            return
        if L == 1 and (e - asymptotics.Expansion.const(Fraction(1))).sign() >= 0:
            return
    except asymptotics.UndecidableExpression:
        return  # sampling already done; limit analysis reports the problem
    s = start
    for _ in range(200):
        s = s + step
        step *= 2
        try:
            if w.compare(s, 1) < 0:
                _violation(w, s)
        except EvaluationError:
            break
    raise ValidityError(f"weight {w.text!r} tends to {L} < 1 toward {direction}")


def _validate_integer_piece(w, part: Interval, expr, config):
    a, b = part.integer_range()
    n = config.window
    try:
        if a is not None and b is not None:
            _check_points(w, range(a, min(b, a + n) + 1))
            if b > a + n:
                _check_points(w, range(max(b - n, a + n), b + 1))
        elif a is not None:
            _check_points(w, range(a, a + n + 1))
            _check_tail(w, expr, "+inf", a + n, n)
        elif b is not None:
            _check_points(w, range(b, b - n - 1, -1))
            _check_tail(w, expr, "-inf", b - n, -n)
        else:
            _check_points(w, range(-n, n + 1))
            _check_tail(w, expr, "+inf", n, n)
            _check_tail(w, expr, "-inf", -n, -n)
    except EvaluationError as exc:
        raise ValidityError(f"weight {w.text!r} is undefined somewhere on {part}: {exc}") from None


def bounded_part(part: Interval, span: int):
    """A compact sub-interval [c, d] of a positive-rational piece."""
    c = part.lo if part.lo is not None and part.lo > 0 else None
    d = part.hi if part.hi is not None else (c or Fraction(0)) + span
    if c is None:
        c = min(d / 2, Fraction(1, 2**20))
    return Fraction(c), Fraction(d)


def branch_and_bound(expr, c: Fraction, d: Fraction, target=None, depth: int = 18):
    """Rigorous lower bound of expr on [c, d] and the best sampled value.

    With a target, stops early once the lower bound clears it or a sample
    falls below it. Returns (lower_bound, best_value, best_point).
    """
    best_val, best_pt = None, None
    for x in (c, d, (c + d) / 2):
        try:
            v = evaluate_mp(expr, x)
        except EvaluationError:
            continue
        if best_val is None or v < best_val:
            best_val, best_pt = v, x
    stack = [(c, d, 0)]
    lower = mpmath.inf
    while stack:
        a, b, k = stack.pop()
        box = evaluate_iv(expr, (a, b))
        lb = lo(box)
        if target is not None and lb >= target:
            continue
        if best_val is not None and lb >= best_val and target is None:
            lower = min(lower, lb)
            continue
        m = (a + b) / 2
        v = evaluate_mp(expr, m)
        if best_val is None or v < best_val:
            best_val, best_pt = v, m
        if target is not None and v < target:
            return lb, best_val, best_pt
        if k >= depth:
            lower = min(lower, lb)
            continue
        stack.append((m, b, k + 1))
        stack.append((a, m, k + 1))
    if target is not None and lower == mpmath.inf:
        lower = mpmath.mpf(target)
    return lower, best_val, best_pt


def _validate_rational_piece(w, part: Interval, expr, config):
    c, d = bounded_part(part, config.rational_span)
    try:
        lb, best, at = branch_and_bound(expr, c, d, target=1, depth=config.bisection_depth)
    except EvaluationError as exc:
        raise ValidityError(f"weight {w.text!r} is undefined somewhere on {part}: {exc}") from None
    if best is not None and best < 1 and w.compare(at, 1) < 0:
        _violation(w, at)
    if part.hi is None:
        _check_tail(w, expr, "+inf", d, config.rational_span)
    if part.lo is None or part.lo == 0:
        try:
            e = asymptotics.tail_expansion(expr, "0+")
            L = e.limit()
            if L < 1 or (L == 1 and (e - asymptotics.Expansion.const(Fraction(1))).sign() < 0):
                _violation(w, c / 2)
        except asymptotics.UndecidableExpression:
            pass


def _validate_submultiplicative(w, config):
    n = config.grid
    values = {}
    for s in range(1, 2 * n + 1):
        box = w.enclose(s)
        if hi(box) <= 0:
            raise ValidityError(f"weight {w.text!r} is not positive at {s}", s)
        values[s] = box
    for s, t in itertools.product(range(1, n + 1), repeat=2):
        if w.is_exact:
            if w.exact(s + t) > w.exact(s) * w.exact(t):
                raise ValidityError(f"weight {w.text!r} is not submultiplicative at ({s}, {t})", (s, t))
        elif lo(values[s + t]) > hi(values[s] * values[t]):
            raise ValidityError(f"weight {w.text!r} is not submultiplicative at ({s}, {t})", (s, t))
