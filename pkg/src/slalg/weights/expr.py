"""Expression trees for weight formulas and their three evaluation modes.

Every node evaluates either exactly (Fractions), in multiprecision floating
point, or in interval arithmetic with outward rounding. Exact evaluation is
available only when the tree avoids exp, log and non-integer powers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import iv

from ..core import SlalgError

DEFAULT_PRECISION = 53 + 50


def precision() -> int:
    """Working precision in bits; override with SLALG_PRECISION."""
    raw = os.environ.get("SLALG_PRECISION")
    if raw is None:
        return DEFAULT_PRECISION
    try:
        bits = int(raw)
    except ValueError:
        raise SlalgError(f"SLALG_PRECISION must be an integer, got {raw!r}") from None
    return max(bits, 53)


class EvaluationError(SlalgError, ArithmeticError):
    pass


class Node:
    __slots__ = ()

    def children(self) -> tuple:
        return ()

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.children())


@dataclass(frozen=True)
class Const(Node):
    value: Fraction

    def __str__(self):
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"


@dataclass(frozen=True)
class Var(Node):
    def __str__(self):
        return "n"


@dataclass(frozen=True)
class Abs(Node):
    arg: Node

    def children(self):
        return (self.arg,)

    def __str__(self):
        return f"|{self.arg}|"


@dataclass(frozen=True)
class Neg(Node):
    arg: Node

    def children(self):
        return (self.arg,)

    def __str__(self):
        return f"(-{self.arg})"


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def children(self):
        return (self.left, self.right)

    def __str__(self):
        if self.op in ("max", "min"):
            return f"{self.op}({self.left}, {self.right})"
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: Fraction

    def children(self):
        return (self.base,)

    @property
    def is_exact(self) -> bool:
        return self.exponent.denominator == 1 and self.base.is_exact

    def __str__(self):
        e = self.exponent
        es = str(e.numerator) if e.denominator == 1 else f"({e.numerator}/{e.denominator})"
        return f"{self.base}^{es}"


@dataclass(frozen=True)
class Func(Node):
    name: str  # "exp" or "log"
    arg: Node

    def children(self):
        return (self.arg,)

    @property
    def is_exact(self) -> bool:
        return False

    def __str__(self):
        return f"{self.name}({self.arg})"


def substitute(node: Node, replacement: Node) -> Node:
    """Replace the variable by another expression."""
    if isinstance(node, Var):
        return replacement
    if isinstance(node, Const):
        return node
    if isinstance(node, Abs):
        return Abs(substitute(node.arg, replacement))
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, replacement))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, replacement), substitute(node.right, replacement))
    if isinstance(node, Pow):
        return Pow(substitute(node.base, replacement), node.exponent)
    if isinstance(node, Func):
        return Func(node.name, substitute(node.arg, replacement))
    raise TypeError(node)


def evaluate_exact(node: Node, x: Fraction) -> Fraction:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return Fraction(x)
    if isinstance(node, Abs):
        return abs(evaluate_exact(node.arg, x))
    if isinstance(node, Neg):
        return -evaluate_exact(node.arg, x)
    if isinstance(node, BinOp):
        a = evaluate_exact(node.left, x)
        b = evaluate_exact(node.right, x)
        return _binop(node.op, a, b)
    if isinstance(node, Pow):
        if node.exponent.denominator != 1:
            raise EvaluationError("non-integer power is not exact")
        b = evaluate_exact(node.base, x)
        if b == 0 and node.exponent < 0:
            raise EvaluationError("zero raised to a negative power")
        return b ** node.exponent.numerator
    raise EvaluationError(f"{node} has no exact value")


def _binop(op, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise EvaluationError("division by zero")
        return a / b
    if op == "max":
        return a if a >= b else b
    if op == "min":
        return a if a <= b else b
    raise ValueError(op)


def _mpf(x, ctx):
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    return ctx.mpf(x)


def evaluate_mp(node: Node, x, prec: int | None = None):
    """Evaluate in multiprecision floating point (round-to-nearest)."""
    with mpmath.workprec(prec or precision()):
        return _eval_ctx(node, _mpf(Fraction(x) if not isinstance(x, mpmath.mpf) else x, mpmath), mpmath)


def evaluate_iv(node: Node, x, prec: int | None = None):
    """Evaluate with interval arithmetic; `x` may itself be an interval."""
    old = iv.prec
    iv.prec = prec or precision()
    try:
        if isinstance(x, iv.mpf):
            xv = x
        elif isinstance(x, tuple):
            xv = iv.mpf([_mpf(x[0], iv), _mpf(x[1], iv)]) if x[0] != x[1] else _mpf(x[0], iv)
        else:
            xv = _mpf(Fraction(x), iv)
        return _eval_ctx(node, xv, iv)
    finally:
        iv.prec = old


def _eval_ctx(node, x, ctx):
    if isinstance(node, Const):
        return _mpf(node.value, ctx)
    if isinstance(node, Var):
        return x
    if isinstance(node, Abs):
        return abs(_eval_ctx(node.arg, x, ctx))
    if isinstance(node, Neg):
        return -_eval_ctx(node.arg, x, ctx)
    if isinstance(node, BinOp):
        a = _eval_ctx(node.left, x, ctx)
        b = _eval_ctx(node.right, x, ctx)
        if node.op in ("max", "min"):
            return _minmax(node.op, a, b, ctx)
        if node.op == "/" and _may_be_zero(b, ctx):
            raise EvaluationError(f"division by zero in {node}")
        return _binop(node.op, a, b)
    if isinstance(node, Pow):
        b = _eval_ctx(node.base, x, ctx)
        e = node.exponent
        if e.denominator == 1:
            if e < 0 and _may_be_zero(b, ctx):
                raise EvaluationError(f"zero raised to a negative power in {node}")
            return b ** e.numerator
        if _lower(b, ctx) < 0:
            raise EvaluationError(f"non-integer power of a negative number in {node}")
        if e < 0 and _may_be_zero(b, ctx):
            raise EvaluationError(f"zero raised to a negative power in {node}")
        return b ** _mpf(e, ctx)
    if isinstance(node, Func):
        a = _eval_ctx(node.arg, x, ctx)
        if node.name == "exp":
            return ctx.exp(a)
        if _lower(a, ctx) <= 0:
            raise EvaluationError(f"log of a non-positive number in {node}")
        return ctx.log(a)
    raise TypeError(node)


def as_mpf(x):
    """Convert an exact or floating value to mpf (infinities pass through)."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def lo(v):
    """Lower endpoint of an interval as a plain mpf."""
    return mpmath.mpf(v.a)


def hi(v):
    return mpmath.mpf(v.b)


def _lower(v, ctx):
    return lo(v) if ctx is iv else v


def _may_be_zero(v, ctx):
    if ctx is iv:
        return lo(v) <= 0 <= hi(v)
    return v == 0


def _minmax(op, a, b, ctx):
    if ctx is iv:
        pick = min if op == "min" else max
        return iv.mpf([pick(lo(a), lo(b)), pick(hi(a), hi(b))])
    if op == "max":
        return a if a >= b else b
    return a if a <= b else b
