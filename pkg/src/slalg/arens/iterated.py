"""Repeated limits of two-variable kernels along point sequences.

A single limit lim_n v(n) is estimated from a tail of the sequence. Each
estimate extrapolates the values at indices N, N/2, N/4, ... to h = 1/n = 0
with Neville's scheme; a limit is declared only when the estimates for the
last `tail_window` values of N agree within `tolerance`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import mpmath

from ..algebra import format_coef
from ..weights import as_mpf
from .sequences import SequenceSpec

DIVERGES = "diverges"
UNDETERMINED = "undetermined"
_HUGE = mpmath.mpf(10) ** 12


@dataclass(frozen=True)
class LimitConfig:
    inner_depth: int = 1000
    outer_depth: int = 1000
    tolerance: float = 1e-6
    tail_window: int = 8
    order: int = 5  # extrapolation nodes per estimate

    def __post_init__(self):
        need = 2 ** (self.order - 1) + self.tail_window
        if min(self.inner_depth, self.outer_depth) < need:
            raise ValueError(f"depths must be at least {need}")
        if self.tail_window < 2 or self.order < 1:
            raise ValueError("tail_window >= 2 and order >= 1 required")

    def swapped(self) -> LimitConfig:
        return LimitConfig(self.outer_depth, self.inner_depth, self.tolerance, self.tail_window, self.order)

    def to_json(self) -> dict:
        return {
            "inner_depth": self.inner_depth,
            "outer_depth": self.outer_depth,
            "tolerance": self.tolerance,
            "tail_window": self.tail_window,
            "order": self.order,
        }

    @classmethod
    def from_json(cls, data: dict) -> LimitConfig:
        return cls(**{k: data[k] for k in ("inner_depth", "outer_depth", "tolerance", "tail_window", "order") if k in data})


@dataclass
class IteratedLimitResult:
    value: object  # a number, DIVERGES or UNDETERMINED
    inner_depth: int
    outer_depth: int
    tolerance: float
    tail_window: int
    estimates: list = field(default_factory=list)
    reason: str = ""

    @property
    def determined(self) -> bool:
        return self.value not in (DIVERGES, UNDETERMINED)

    def to_json(self) -> dict:
        return {
            "value": self.value if not self.determined else format_coef(self.value),
            "inner_depth": self.inner_depth,
            "outer_depth": self.outer_depth,
            "tolerance": self.tolerance,
            "tail_window": self.tail_window,
            "reason": self.reason,
        }


class Undetermined(Exception):
    def __init__(self, value, reason):
        self.value, self.reason = value, reason
        super().__init__(reason)


def neville_at_zero(hs: list, vs: list):
    """Value at h = 0 of the interpolating polynomial through (hs[i], vs[i])."""
    exact = all(isinstance(v, (Fraction, int)) for v in vs)
    p = [Fraction(v) for v in vs] if exact else [as_mpf(v) for v in vs]
    h = list(hs) if exact else [as_mpf(x) for x in hs]
    n = len(p)
    for level in range(1, n):
        for i in range(n - level):
            j = i + level
            p[i] = (h[j] * p[i] - h[i] * p[i + 1]) / (h[j] - h[i])
    return p[0]


def _within(values: list, tol) -> bool:
    if all(isinstance(v, Fraction) for v in values):
        return max(values) - min(values) <= Fraction(tol)
    vs = [as_mpf(v) for v in values]
    return max(vs) - min(vs) <= tol


def estimate_limit(v: Callable[[int], object], depth: int, cfg: LimitConfig, offset: int = 0, upward: bool = False):
    """Estimate lim_n v(n) from indices offset + (N >> i), N in the last tail window.

    With `upward` the nodes are (offset + N) << i instead: every node lies past
    offset + N and the spread of 1/n stays fixed however large the offset.
    Raises Undetermined when the estimates disagree or grow without bound.
    """
    cache: dict = {}

    def val(n):
        if n not in cache:
            cache[n] = v(n)
        return cache[n]

    estimates, raw = [], []
    for N in range(depth - cfg.tail_window + 1, depth + 1):
        if upward:
            nodes = [(offset + N) << i for i in range(cfg.order)]
        else:
            nodes = [offset + (N >> i) for i in range(cfg.order)]
        vals = [val(n) for n in nodes]
        raw.append(vals[0])
        if len(set(vals)) == 1:
            estimates.append(vals[0])
        else:
            estimates.append(neville_at_zero([Fraction(1, n) for n in nodes], vals))
    if all(abs(as_mpf(r)) > _HUGE for r in raw) and all(
        abs(as_mpf(a)) < abs(as_mpf(b)) for a, b in zip(raw, raw[1:])
    ):
        raise Undetermined(DIVERGES, f"values exceed {mpmath.nstr(_HUGE, 3)} and keep growing")
    if not _within(estimates, cfg.tolerance):
        spread = max(as_mpf(e) for e in estimates) - min(as_mpf(e) for e in estimates)
        raise Undetermined(UNDETERMINED, f"tail estimates spread by {mpmath.nstr(spread, 3)}")
    return estimates[-1], estimates


INNER_RETRIES = 3
# inner errors are amplified by the outer extrapolation, so inner limits must
# agree more tightly than the reported tolerance
INNER_TOL_FACTOR = 1e-3


def _box(kernel, outer, inner, cfg: LimitConfig) -> IteratedLimitResult:
    inner_cfg = replace(cfg, tolerance=cfg.tolerance * INNER_TOL_FACTOR)

    def inner_limit(m):
        s = outer[m]
        # past the index where the inner sequence overtakes s the kernel is
        # smooth in 1/n; when the first window straddles it, move further out
        for k in range(INNER_RETRIES):
            offset = m + (4**k - 1) * cfg.inner_depth
            try:
                value, _ = estimate_limit(
                    lambda n: kernel(s, inner[n]), cfg.inner_depth, inner_cfg, offset=offset, upward=True
                )
                return value
            except Undetermined as exc:
                if exc.value == DIVERGES or k == INNER_RETRIES - 1:
                    raise

    try:
        value, estimates = estimate_limit(inner_limit, cfg.outer_depth, cfg)
        reason = "converged"
    except Undetermined as exc:
        value, estimates, reason = exc.value, [], exc.reason
    return IteratedLimitResult(value, cfg.inner_depth, cfg.outer_depth, cfg.tolerance, cfg.tail_window, estimates, reason)


def iterated_limit(
    kernel: Callable,
    outer: SequenceSpec,
    inner: SequenceSpec,
    sg,
    w=None,
    cfg: LimitConfig = LimitConfig(),
) -> tuple[IteratedLimitResult, IteratedLimitResult]:
    """(lim_m lim_n f(s_m, t_n), lim_n lim_m f(s_m, t_n)).

    The second order is computed as the first order of the transposed kernel
    with the sequences exchanged, so swapping the arguments swaps the results.
    """
    s, t = outer.bind(sg, w), inner.bind(sg, w)
    box = _box(kernel, s, t, cfg)
    diamond = _box(lambda a, b: kernel(b, a), t, s, cfg.swapped())
    diamond.inner_depth, diamond.outer_depth = cfg.inner_depth, cfg.outer_depth
    return box, diamond
