"""The cluster kernel, Arens-product pairings and non-regularity witnesses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from ..algebra import convolve, delta_tilde, format_coef
from ..core import Point, PreconditionError, format_point, op, point
from ..functionals import CharTimesOmega, Functional, SetSpec, pair
from ..weights import UndecidableExpression, WeightExpr, analyze_limits, as_mpf
from .iterated import IteratedLimitResult, LimitConfig, Undetermined, estimate_limit, iterated_limit
from .sequences import SequenceSpec


def _w(w: WeightExpr, s):
    return w.exact(s) if w.is_exact else as_mpf(w(s))


def omega_fn(s: Point, t: Point, w: WeightExpr):
    """Omega(s, t) = w(st) / (w(s) w(t)); exact for rational-valued weights."""
    sg = w.semigroup
    s, t = point(sg, s), point(sg, t)
    return _w(w, op(sg, s, t)) / (_w(w, s) * _w(w, t))


def omega_kernel(w: WeightExpr):
    sg = w.semigroup
    cache: dict = {}

    def wv(s):
        if s not in cache:
            cache[s] = _w(w, s)
        return cache[s]

    return lambda s, t: wv(op(sg, s, t)) / (wv(s) * wv(t))


def pairing_kernel(l: Functional, w: WeightExpr):
    """(s, t) -> <d~_s * d~_t, l> = l(st) / (w(s) w(t))."""
    sg = w.semigroup
    return lambda s, t: _coerce(l.value(op(sg, s, t), w)) / (_w(w, s) * _w(w, t))


def _coerce(v):
    return v if isinstance(v, Fraction) else as_mpf(v)


def arens_pairing(
    outer: SequenceSpec, inner: SequenceSpec, l: Functional, w: WeightExpr, cfg: LimitConfig = LimitConfig()
) -> tuple[IteratedLimitResult, IteratedLimitResult]:
    """Both repeated limits of <d~_{s_m} * d~_{t_n}, l>."""
    return iterated_limit(pairing_kernel(l, w), outer, inner, w.semigroup, w, cfg)


# ---------------------------------------------------------------------------
# zero clustering


@dataclass
class ZeroClusterResult:
    clusters_zero: object  # True, False or "undetermined"
    reason: str
    M: Fraction | None = None
    outer: SequenceSpec | None = None
    inner: SequenceSpec | None = None
    box: IteratedLimitResult | None = None
    diamond: IteratedLimitResult | None = None
    witness_ok: bool | None = None

    def to_json(self) -> dict:
        out = {"clusters_zero": self.clusters_zero, "reason": self.reason}
        if self.outer is not None:
            out["witness"] = {
                "M": format_coef(self.M),
                "outer": self.outer.to_json(),
                "inner": self.inner.to_json(),
                "box": self.box.to_json(),
                "diamond": self.diamond.to_json(),
                "lower_bound": format_coef(1 / self.M**2),
                "ok": self.witness_ok,
            }
        return out


def witness_level(report) -> Fraction:
    """A rational M with {s : w(s) <= M} infinite."""
    L = report.liminf_value
    if report.low_set_accumulation and isinstance(L, Fraction):
        return L
    return Fraction(math.floor(as_mpf(L)) + 1)


def zero_cluster_test(w: WeightExpr, cfg: LimitConfig = LimitConfig(), witness: bool = True) -> ZeroClusterResult:
    """Omega clusters at zero on a totally ordered semilattice iff w -> inf cofinitely.

    Otherwise the even and odd terms of an enumeration of {w <= M} give
    repeated limits of Omega of at least 1/M^2.
    """
    if not w.semigroup.is_min:
        return ZeroClusterResult("undetermined", "decided for totally ordered semilattices only")
    try:
        report = analyze_limits(w)
    except UndecidableExpression as exc:
        return ZeroClusterResult("undetermined", f"asymptotics undecidable: {exc}")
    if report.filter_lim_infinite:
        return ZeroClusterResult(True, "w tends to infinity along the cofinite filter")
    M = witness_level(report)
    reason = f"w <= {M} on an infinite set"
    if not witness:
        return ZeroClusterResult(False, reason, M)
    base = SequenceSpec.enum_le(M)
    outer, inner = base.thin(0, 2), base.thin(1, 2)
    box, diamond = iterated_limit(omega_kernel(w), outer, inner, w.semigroup, w, cfg)
    floor = as_mpf(1 / M**2) - mpmath.mpf(cfg.tolerance)
    ok = all(r.determined and as_mpf(r.value) >= floor for r in (box, diamond))
    return ZeroClusterResult(False, reason, M, outer, inner, box, diamond, ok)


def separating_functional(result: ZeroClusterResult) -> Functional:
    """w times the indicator of the outer witness sequence's range."""
    return CharTimesOmega(SetSpec.sequence(result.outer))


# ---------------------------------------------------------------------------
# Craw-Young extraction on weakly cancellative semigroups


@dataclass
class CrawYoungWitness:
    status: str  # "ok" or "undetermined"
    s_points: list
    t_points: list
    chi: SetSpec | None = None
    matrix: list = field(default_factory=list)  # pairing <d~_s'_n * d~_t'_m, w chi>
    distinct_products: bool = False
    matrix_ok: bool = False
    diagnostics: str = ""

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "s": [format_point(p) for p in self.s_points],
            "t": [format_point(p) for p in self.t_points],
            "chi": None if self.chi is None else self.chi.to_json(),
            "matrix": [[format_coef(v) for v in row] for row in self.matrix],
            "distinct_products": self.distinct_products,
            "matrix_ok": self.matrix_ok,
            "diagnostics": self.diagnostics,
        }


def craw_young_witness(
    w: WeightExpr,
    s_seq: SequenceSpec,
    t_seq: SequenceSpec,
    eps=Fraction(1, 2),
    k: int = 12,
    window: int = 2000,
    cfg: LimitConfig = LimitConfig(),
) -> CrawYoungWitness:
    """Greedy subsequences s', t' with Omega(s'_n, t'_m) > eps for n <= m and distinct products.

    The products s'_n t'_m with n <= m form a set P; pairing
    d~_{s'_n} * d~_{t'_m} with w 1_P gives Omega above the diagonal and 0 below.
    """
    sg = w.semigroup
    if not sg.properties.is_weakly_cancellative:
        raise PreconditionError(f"{sg} is not weakly cancellative")
    eps = Fraction(eps)
    kernel = omega_kernel(w)
    S, T = s_seq.bind(sg, w), t_seq.bind(sg, w)

    def inner_ok(s):
        try:
            value, _ = estimate_limit(lambda m: kernel(s, T[m]), cfg.inner_depth, cfg)
        except Undetermined:
            return False
        # the limit is only known to within the tolerance
        return as_mpf(value) > as_mpf(eps) + mpmath.mpf(cfg.tolerance)

    s_pts, t_pts = [], []
    products: set = set()
    i = j = 0
    tested_any = False
    while len(t_pts) < k:
        # next s': its products with earlier t' must be new
        while True:
            i += 1
            if i > window:
                return _exhausted(s_pts, t_pts, "s", window, tested_any)
            c = S[i]
            if c in s_pts or not inner_ok(c):
                continue
            tested_any = True
            new = [op(sg, c, t) for t in t_pts]
            if len(set(new)) == len(new) and not products.intersection(new):
                s_pts.append(c)
                products.update(new)
                break
        # next t': Omega above eps against all chosen s', products new
        while True:
            j += 1
            if j > window:
                return _exhausted(s_pts, t_pts, "t", window, tested_any)
            c = T[j]
            if c in t_pts:
                continue
            if not all(as_mpf(kernel(s, c)) > as_mpf(eps) for s in s_pts):
                continue
            new = [op(sg, s, c) for s in s_pts]
            if len(set(new)) == len(new) and not products.intersection(new):
                t_pts.append(c)
                products.update(new)
                break
    s_pts = s_pts[:k]
    upper = {op(sg, s_pts[n], t_pts[m]) for n in range(k) for m in range(n, k)}
    chi = SetSpec.finite(upper)
    lam = CharTimesOmega(chi)
    all_products = [op(sg, s, t) for s in s_pts for t in t_pts]
    matrix, ok = [], True
    for n in range(k):
        row = []
        for m in range(k):
            v = pair(convolve(delta_tilde(s_pts[n], w, True), delta_tilde(t_pts[m], w, True)), lam, w)
            row.append(v)
            ok &= (v == 0) if n > m else (as_mpf(v) > as_mpf(eps))
        matrix.append(row)
    return CrawYoungWitness(
        "ok", s_pts, t_pts, chi, matrix, len(set(all_products)) == len(all_products), ok
    )


def _exhausted(s_pts, t_pts, which, window, tested_any):
    if not tested_any:
        raise PreconditionError(
            f"no s in the first {window} terms has lim_m Omega(s, t_m) above eps"
        )
    return CrawYoungWitness(
        "undetermined",
        s_pts,
        t_pts,
        diagnostics=f"window of {window} exhausted while choosing {which}' number "
        f"{len(s_pts if which == 's' else t_pts) + 1}",
    )
