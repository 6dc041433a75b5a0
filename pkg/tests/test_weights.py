import itertools
import math
from fractions import Fraction

import mpmath
import pytest

from slalg.core import INT_MIN, NAT_MIN, NAT_PLUS, POSRAT_MIN, PreconditionError
from slalg.weights import (
    ModeError,
    ParseError,
    UndecidableExpression,
    ValidityError,
    analyze_limits,
    as_mpf,
    eval_weight,
    parse_weight,
    sublevel_points,
)
from slalg.weights.asymptotics import tail_expansion
from slalg.weights.parser import parse_expr

from conftest import Q_WEIGHT, UNKNOWN_WEIGHT, WEIGHT_TABLE, Z_WEIGHT, weight


def test_parse_examples():
    w = parse_weight("n", NAT_MIN)
    assert w(7) == 7 and w.is_exact
    z = parse_weight(Z_WEIGHT, INT_MIN)
    assert z(-5) == 1 and z(4) == 4
    q = parse_weight(Q_WEIGHT, POSRAT_MIN)
    assert q(Fraction(1, 2)) == 1 and q(1) == 1 and q(Fraction(5, 2)) == Fraction(5, 2)
    e = parse_weight("exp(|n|)", INT_MIN)
    assert eval_weight(e, 0) == 1 and not e.is_exact


@pytest.mark.parametrize(
    "text, pos",
    [("n^", 2), ("sin(n)", 0), ("piecewise{[3,1]:1}", 10), ("piecewise{[1,inf]:1}", 10), ("(n+1", 4)],
)
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_weight(text, NAT_MIN)
    assert info.value.position == pos


def test_partition_errors():
    with pytest.raises(ParseError, match="gap"):
        parse_weight("piecewise{[1,3]:1;[5,inf):n}", NAT_MIN)
    with pytest.raises(ParseError, match="gap"):
        parse_weight("piecewise{(0,1):1;(1,inf):n}", POSRAT_MIN)


@pytest.mark.parametrize(
    "sg, text, where",
    [(NAT_MIN, "n-1", 1), (NAT_MIN, "1/2", 1), (INT_MIN, "n", None), (NAT_PLUS, "n^2", None)],
)
def test_validity_errors(sg, text, where):
    with pytest.raises(ValidityError) as info:
        parse_weight(text, sg)
    if where is not None:
        assert info.value.point == where


def test_exact_and_float_modes():
    w = parse_weight("n*n/3+1", NAT_MIN)
    assert w.exact(3) == 4
    f = parse_weight("log(n+1)+1", NAT_MIN)
    with pytest.raises(ModeError):
        f.exact(3)
    with mpmath.workprec(103):
        assert abs(f(3) - (mpmath.log(4) + 1)) < mpmath.mpf(2) ** -100


def test_precision_env(monkeypatch):
    monkeypatch.setenv("SLALG_PRECISION", "200")
    f = parse_weight("exp(n)", NAT_MIN)
    with mpmath.workprec(200):
        assert abs(f(1) - +mpmath.e) < mpmath.mpf(2) ** -190


@pytest.mark.parametrize("sg, text, filt, _", WEIGHT_TABLE)
def test_filter_limit_table(sg, text, filt, _):
    assert analyze_limits(weight(sg, text)).filter_lim_infinite is filt


def test_limit_report_examples():
    r = analyze_limits(parse_weight(Q_WEIGHT, POSRAT_MIN))
    assert not r.filter_lim_infinite and r.liminf_value == 1 and r.order_lim_sup_infinite
    r = analyze_limits(parse_weight("1", NAT_MIN))
    assert r.liminf_value == 1 and r.bounded_cofinal_bound == 1
    r = analyze_limits(parse_weight("2-1/n", NAT_MIN))
    assert r.liminf_value == 2 and r.bounded_cofinal_bound == 2
    r = analyze_limits(parse_weight("1+1/n", NAT_MIN))
    assert r.liminf_value == 1 and r.low_set_accumulation == ()
    r = analyze_limits(parse_weight(UNKNOWN_WEIGHT, INT_MIN))
    assert r.order_lim_inf_infinite and not r.order_lim_sup_infinite


def test_filter_limit_implies_infinite_liminf():
    for sg, text, filt, _ in WEIGHT_TABLE:
        r = analyze_limits(weight(sg, text))
        assert (r.liminf_value == mpmath.inf) is r.filter_lim_infinite


@pytest.mark.parametrize("sg, text, filt, _", [row for row in WEIGHT_TABLE if row[0] != "posrat-min"])
def test_sublevel_counts_stabilize(sg, text, filt, _):
    # brute-force oracle: count {s in window : w(s) <= M} for growing windows
    w = weight(sg, text)
    for M in (2, 3, 4):
        counts = []
        for n in (1000, 4000):
            pts = range(1, n + 1) if sg == "nat-min" else range(-n, n + 1)
            counts.append(sum(1 for s in pts if as_mpf(w(s)) <= M))
        assert (counts[0] == counts[1]) is filt


def test_tail_expansions():
    assert tail_expansion(parse_expr("n/(2*n-1)"), "+inf").limit() == Fraction(1, 2)
    assert tail_expansion(parse_expr("log(n)/n"), "+inf").limit() == 0
    assert tail_expansion(parse_expr("exp(n)/n^10"), "+inf").limit() == mpmath.inf
    assert tail_expansion(parse_expr("1/n"), "0+").limit() == mpmath.inf
    assert tail_expansion(parse_expr("exp(-|n|)+1"), "-inf").limit() == 1


def test_undecidable_expression():
    with pytest.raises(UndecidableExpression):
        tail_expansion(parse_expr("exp(exp(n))"), "+inf")


def test_sublevel_points():
    z = parse_weight(Z_WEIGHT, INT_MIN)
    assert list(itertools.islice(sublevel_points(z, 1), 4)) == [0, -1, -2, -3]
    q = parse_weight(Q_WEIGHT, POSRAT_MIN)
    pts = list(itertools.islice(sublevel_points(q, 1), 5))
    assert all(q(p) <= 1 for p in pts) and pts == sorted(set(pts))
    with pytest.raises(PreconditionError):
        sublevel_points(parse_weight("n", NAT_MIN), 5)


def test_weights_at_least_one_and_omega_at_most_one(rng):
    # semilattice weights are >= 1, hence Omega <= 1
    for sg, text, _, _ in WEIGHT_TABLE:
        w = weight(sg, text)
        for _ in range(200):
            if sg == "posrat-min":
                s = Fraction(rng.randint(1, 400), rng.randint(1, 40))
                t = Fraction(rng.randint(1, 400), rng.randint(1, 40))
            elif sg == "int-min":
                s, t = rng.randint(-300, 300), rng.randint(-300, 300)
            else:
                s, t = rng.randint(1, 300), rng.randint(1, 300)
            ws, wt, wm = (as_mpf(w(x)) for x in (s, t, min(s, t)))
            assert ws >= 1 and wt >= 1
            assert wm / (ws * wt) <= 1


def test_nat_plus_submultiplicative_grid():
    w = parse_weight("1+n", NAT_PLUS)
    assert all(w(s + t) <= w(s) * w(t) for s in range(1, 40) for t in range(1, 40))
    assert math.isclose(float(parse_weight("exp(n)", NAT_PLUS)(2)), math.e**2)
