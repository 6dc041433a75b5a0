"""Semicharacters, the characters phi_k and the Gel'fand transform."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import Element, format_coef
from .core import Kind, Point, PreconditionError, SlalgError, Truncation, format_point, normalize
from .functionals import (
    MEMBER,
    Functional,
    Indicator,
    PhiK,
    Table,
    e_omega_membership,
)
from .weights import WeightExpr, analyze_limits, as_mpf

MAX_BRUTE_FORCE = 20


@dataclass(frozen=True)
class Semicharacter:
    """Indicator of the upward set {s >= k} (or {s > k} when open)."""

    threshold: Point
    closed: bool = True

    def __call__(self, s) -> int:
        return int(s > self.threshold or (self.closed and s == self.threshold))

    def to_json(self) -> dict:
        return {"threshold": format_point(self.threshold), "closed": self.closed}


def phi_k(k: Point) -> Functional:
    return PhiK(normalize(k))


def phi_k_apply(k: Point, a: Element):
    return sum((c for s, c in a.terms if s >= k), Fraction(0) if a.mode == "exact" else as_mpf(0))


def gelfand(a: Element, K: int, start: Point | None = None) -> list:
    """[(k, phi_k(a))] for K consecutive integer thresholds from `start`."""
    if start is None:
        lb = a.semigroup.lower_bound
        start = lb if lb is not None else (min(a.support) if a else 0)
    ks = [start + i for i in range(K)]
    # suffix sums over the sorted support
    out, acc = [], Fraction(0) if a.mode == "exact" else as_mpf(0)
    terms = list(a.terms)
    idx = len(terms)
    for k in reversed(ks):
        while idx > 0 and terms[idx - 1][0] >= k:
            idx -= 1
            acc += terms[idx][1]
        out.append((k, acc))
    out.reverse()
    return out


def gelfand_json(vector: list) -> list:
    return [[format_point(k), format_coef(v)] for k, v in vector]


def enumerate_characters(tr: Truncation, w: WeightExpr | None = None) -> list[Semicharacter]:
    """All nonzero {0,1} assignments on a min-truncation that are multiplicative.

    Brute force over the 2^n assignments; the result is checked to be the n
    threshold characters.
    """
    sg = tr.semigroup
    if sg.kind not in (Kind.NAT_MIN, Kind.INT_MIN):
        raise PreconditionError("character enumeration supports nat-min and int-min truncations")
    n = len(tr)
    if n > MAX_BRUTE_FORCE:
        raise SlalgError(f"truncation of size {n} exceeds the brute-force bound {MAX_BRUTE_FORCE}")
    pts = list(tr)
    codes = np.arange(1, 2**n, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
    ok = np.ones(len(codes), dtype=bool)
    # points are increasing, so min(p_i, p_j) = p_i for i < j
    for i, j in itertools.combinations(range(n), 2):
        ok &= bits[:, i] == (bits[:, i] & bits[:, j])
    chars = []
    for row in bits[ok]:
        ones = [pts[i] for i in range(n) if row[i]]
        chars.append(Semicharacter(ones[0]))
        if any(Semicharacter(ones[0])(p) != int(row[i]) for i, p in enumerate(pts)):
            raise SlalgError("non-threshold character found")
    chars.sort(key=lambda c: c.threshold)
    if len(chars) != n:
        raise SlalgError(f"expected {n} characters, found {len(chars)}")
    return chars


@dataclass
class DensityReport:
    n: int
    coefficients: list  # (k, l(k)): mu = sum l(k) (phi_k - phi_{k+1})
    residual: object  # sup_{s > n} |l(s)| / w(s)
    exact: bool
    window: int | None

    def functional(self) -> Table:
        return Table.of(dict(self.coefficients))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "coefficients": [[format_point(k), format_coef(v)] for k, v in self.coefficients],
            "residual": format_coef(self.residual),
            "exact": self.exact,
            "window": self.window,
        }


def predual_density_approx(l: Functional, w: WeightExpr, n: int, window: int = 1000) -> DensityReport:
    """Approximate l in E_w by mu_n = sum_{k<=n} l(k) (phi_k - phi_{k+1}).

    mu_n agrees with l on {1..n} and vanishes beyond, so the dual-norm
    residual is sup_{s>n} |l(s)| / w(s).
    """
    if w.semigroup.kind is not Kind.NAT_MIN:
        raise PreconditionError("density approximation runs on nat-min")
    if not analyze_limits(w).filter_lim_infinite:
        raise PreconditionError("w must tend to infinity")
    member = e_omega_membership(l, w)
    if member.status != MEMBER:
        raise PreconditionError(f"functional is not in E_w: {member.reason}")
    coeffs = [(k, l.value(k, w)) for k in range(1, n + 1)]
    coeffs = [(k, v) for k, v in coeffs if v != 0]
    finite = None
    if isinstance(l, Indicator):
        finite = list(l.points)
    elif isinstance(l, Table) and l.tail == 0 and l.window is None:
        finite = [p for p, _ in l.entries]
    if finite is not None:
        vals = [abs(l.value(p, w)) / _wv(w, p) for p in finite if p > n]
        return DensityReport(n, coeffs, max(vals, key=as_mpf, default=Fraction(0)), True, None)
    vals = [abs(l.value(s, w)) / _wv(w, s) for s in range(n + 1, n + window + 1)]
    return DensityReport(n, coeffs, max(vals, key=as_mpf), False, window)


def _wv(w, s):
    return w.exact(s) if w.is_exact else as_mpf(w(s))
