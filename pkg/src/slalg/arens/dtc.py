"""Desk-scale check of the two-point DTC set for (N, min)."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from ..algebra import Element, convolve, delta_tilde, format_coef
from ..core import Kind, PreconditionError
from ..weights import WeightExpr, analyze_limits, as_mpf
from .iterated import LimitConfig, Undetermined, estimate_limit
from .sequences import SequenceSpec


@dataclass
class DTCReport:
    status: str  # "ok", "failed" or "undetermined"
    p_a: object = None  # lim 1/w along a_seq
    p_b: object = None
    absorption: list = field(default_factory=list)  # (s, f * d~_s == f / w(s))
    matrix: list = field(default_factory=list)
    rank: int = 0
    trivial_only: bool = False
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "p_a": None if self.p_a is None else format_coef(self.p_a),
            "p_b": None if self.p_b is None else format_coef(self.p_b),
            "absorption": [[s, ok] for s, ok in self.absorption],
            "matrix": [[format_coef(v) for v in row] for row in self.matrix],
            "rank": self.rank,
            "trivial_only": self.trivial_only,
            "reason": self.reason,
        }


def _recip_limit(w, seq, cfg):
    b = seq.bind(w.semigroup, w)
    value, _ = estimate_limit(lambda n: 1 / (w.exact(b[n]) if w.is_exact else as_mpf(w(b[n]))), cfg.inner_depth, cfg)
    return value


def _rank(rows) -> int:
    rows = [[as_mpf(x) for x in r] for r in rows]
    rank, cols = 0, len(rows[0]) if rows else 0
    for c in range(cols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def dtc_demo(
    w: WeightExpr,
    a_seq: SequenceSpec,
    b_seq: SequenceSpec,
    f: Element,
    cfg: LimitConfig = LimitConfig(),
    checks: int = 50,
) -> DTCReport:
    """(i) f * d~_s = f / w(s) once s >= max supp f; (ii) the 2x2 separation system.

    For mu = c_a d_a + c_b d_b, agreement of the two Arens products against
    d_a and d_b gives c_a p_b = c_a p_a = 0 and c_b p_a = c_b p_b = 0, where p
    is lim 1/w along the sequence.
    """
    if w.semigroup.kind is not Kind.NAT_MIN:
        raise PreconditionError("the DTC demonstration runs on nat-min")
    if analyze_limits(w).filter_lim_infinite:
        raise PreconditionError("liminf w is infinite")
    try:
        p_a = _recip_limit(w, a_seq, cfg)
        p_b = _recip_limit(w, b_seq, cfg)
    except Undetermined as exc:
        return DTCReport("undetermined", reason=f"limit of 1/w undetermined: {exc.reason}")
    top = max(f.support, default=1)
    absorption = []
    for s in a_seq.iterate(w.semigroup, w):
        if len(absorption) >= checks:
            break
        if s < top:
            continue
        ws = w.exact(s) if w.is_exact and f.mode == "exact" else None
        got = convolve(f, delta_tilde(s, w, allow_float=ws is None))
        want = f.scale(1 / ws) if ws is not None else Element(
            f.semigroup, tuple((p, as_mpf(c) / as_mpf(w(s))) for p, c in f.terms), "float"
        )
        absorption.append((s, got == want if ws is not None else _close(got, want)))
    matrix = [[0, p_a], [0, p_b], [p_b, 0], [p_a, 0]]
    rank = _rank(matrix)
    nonzero = as_mpf(p_a) != 0 or as_mpf(p_b) != 0
    ok = all(x for _, x in absorption) and rank == 2 and nonzero
    return DTCReport("ok" if ok else "failed", p_a, p_b, absorption, matrix, rank, rank == 2, "")


def _close(a: Element, b: Element) -> bool:
    da, db = a.as_dict(), b.as_dict()
    return da.keys() == db.keys() and all(abs(as_mpf(da[k]) - as_mpf(db[k])) < mpmath.mpf(2) ** -80 for k in da)
