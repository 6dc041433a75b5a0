"""Weight formulas: parsing, evaluation, validation and limit analysis."""

from .asymptotics import UndecidableExpression
from .expr import EvaluationError, as_mpf, precision
from .interval import Interval, domain, points_in
from .limits import LimitReport, analyze_limits, sublevel_points
from .parser import ParseError, parse_expr
from .weight import ModeError, ValidationConfig, ValidityError, WeightExpr, eval_weight, parse_weight

__all__ = [
    "EvaluationError",
    "Interval",
    "LimitReport",
    "ModeError",
    "ParseError",
    "UndecidableExpression",
    "ValidationConfig",
    "ValidityError",
    "WeightExpr",
    "analyze_limits",
    "as_mpf",
    "domain",
    "eval_weight",
    "parse_expr",
    "parse_weight",
    "points_in",
    "precision",
    "sublevel_points",
]
