"""Arens regularity / strong irregularity verdicts for weighted semilattice algebras."""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath

from ..core import Kind, PreconditionError, SlalgError
from ..weights import LimitReport, UndecidableExpression, WeightExpr, analyze_limits
from ..weights.expr import EvaluationError, evaluate_iv, hi
from ..weights.weight import bounded_part

ARENS_REGULAR = "ArensRegular"
SAI = "StronglyArensIrregular"
NEITHER = "NeitherRegularNorSAI"
UNKNOWN = "NotRegularSAIUnknown"

E_OMEGA_PREDUAL = "E_omega_predual"
NO_PREDUAL = "no_predual_hypothesis_met"
PREDUAL_UNKNOWN = "unknown"

# reason tags
TAG_REGULAR = "regular-iff-weight-tends-to-infinity"
TAG_NAT_MIN_DTC = "nat-min-two-point-dtc"
TAG_BOUNDED = "bounded-weight-unweighted-scatteredness"
TAG_NOT_SAI = "weight-unbounded-toward-sup-not-sai"
TAG_NOT_REGULAR = "weight-bounded-on-infinite-set-not-regular"
TAG_PREDUAL = "predual-when-weight-tends-to-infinity"
TAG_NO_PREDUAL = "low-set-accumulates-outside-S"


class ClassificationError(SlalgError):
    pass


@dataclass
class Classification:
    verdict: str
    reasons: list = field(default_factory=list)  # (tag, satisfied hypothesis)
    predual_note: str = PREDUAL_UNKNOWN
    limits: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "reasons": [{"tag": t, "hypothesis": h} for t, h in self.reasons],
            "predual_note": self.predual_note,
            "limits": self.limits,
        }


def weight_bounded(w: WeightExpr, report: LimitReport) -> bool:
    """Whether sup w < inf, from tail limits and interval bounds on bounded pieces."""
    if any(t.limit == mpmath.inf for t in report.tails.values()):
        return False
    if w.semigroup.is_integer:
        return True
    for part, expr in w.pieces_in():
        if part.lo is not None and part.hi is not None and part.lo == part.hi:
            continue
        c, d = bounded_part(part, 1000)
        try:
            if hi(evaluate_iv(expr, (c, d))) == mpmath.inf:
                return False
        except EvaluationError:
            return False
    return True


def classify(w: WeightExpr) -> Classification:
    sg = w.semigroup
    if not sg.is_min:
        raise PreconditionError(f"{sg} is not a totally ordered semilattice")
    try:
        report = analyze_limits(w)
    except UndecidableExpression as exc:
        raise ClassificationError(f"weight {w.text!r}: {exc}") from exc
    liminf = report.to_json()["liminf_value"]
    limits = report.to_json()
    if report.filter_lim_infinite:
        return Classification(
            ARENS_REGULAR,
            [
                (TAG_REGULAR, "w tends to infinity along the cofinite filter"),
                (TAG_PREDUAL, "w tends to infinity, so E_w is a submodule predual"),
            ],
            E_OMEGA_PREDUAL,
            limits,
        )
    note = NO_PREDUAL if report.low_set_accumulation else PREDUAL_UNKNOWN
    reasons = [(TAG_NOT_REGULAR, f"liminf w = {liminf} < inf")]
    if note == NO_PREDUAL:
        where = ", ".join(report.low_set_accumulation)
        reasons.append((TAG_NO_PREDUAL, f"{{w <= liminf w}} accumulates at: {where}"))
    if sg.kind is Kind.NAT_MIN:
        reasons.insert(0, (TAG_NAT_MIN_DTC, f"S = N with min and liminf w = {liminf} < inf"))
        return Classification(SAI, reasons, note, limits)
    if weight_bounded(w, report):
        scattered = sg.properties.closure_scattered
        reasons.insert(
            0,
            (TAG_BOUNDED, f"w is bounded; the order closure of S is {'' if scattered else 'not '}scattered"),
        )
        return Classification(SAI if scattered else NEITHER, reasons, note, limits)
    if report.order_lim_sup_infinite:
        reasons.insert(0, (TAG_NOT_SAI, f"liminf w = {liminf} < inf and w -> inf toward sup S"))
        return Classification(NEITHER, reasons, note, limits)
    return Classification(UNKNOWN, reasons, note, limits)
