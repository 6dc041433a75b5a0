import json
from fractions import Fraction

import pytest

from slalg.algebra import Element, convolve, delta, norm
from slalg.arens import SequenceSpec
from slalg.core import INT_MIN, NAT_MIN, NAT_PLUS, POSRAT_MIN, PreconditionError, Truncation
from slalg.functionals import (
    CharTimesOmega,
    Formula,
    Indicator,
    PhiK,
    PhiOmega,
    SetSpec,
    Spliced,
    Table,
    compactness_probe,
    e_omega_membership,
    functional_from_json,
    module_action,
    non_submodule_witness,
    pair,
)
from slalg.weights import Interval, as_mpf, parse_weight

from conftest import Q_WEIGHT, Z_WEIGHT, random_element

W_N = parse_weight("n", NAT_MIN)
W_1 = parse_weight("1", NAT_MIN)
W_Z = parse_weight(Z_WEIGHT, INT_MIN)

FUNCTIONALS = [
    Indicator([3, 7]),
    PhiK(5),
    PhiOmega(),
    CharTimesOmega(SetSpec.parity("even")),
    CharTimesOmega(SetSpec.interval(Interval.at_least(4))),
    Table.of({1: Fraction(1, 2), 2: Fraction(-1, 3)}, Fraction(1, 4), 3),
    Spliced(PhiOmega(), 10, Fraction(2)),
    Formula("1/n"),
]


@pytest.mark.parametrize("l", FUNCTIONALS, ids=lambda l: l.form)
def test_duality_bound(l, rng):
    # |<a, l>| <= ||l||_w* ||a||_w
    for w in (W_N, W_1):
        bound = as_mpf(l.dual_norm_bound(w))
        for _ in range(40):
            a = random_element(rng)
            assert abs(as_mpf(pair(a, l, w))) <= bound * as_mpf(norm(a, w)) + 1e-25


@pytest.mark.parametrize("l", FUNCTIONALS, ids=lambda l: l.form)
def test_module_action_identity(l, rng):
    # <a * d_s, l> = <a, s.l>
    for w in (W_N, W_1):
        for _ in range(25):
            a = random_element(rng)
            s = rng.randint(1, 45)
            lhs = pair(convolve(a, delta(NAT_MIN, s)), l, w)
            rhs = pair(a, module_action(s, l, w), w)
            assert abs(as_mpf(lhs) - as_mpf(rhs)) < 1e-25


def test_module_action_int_min(rng):
    l = Table.of({-3: Fraction(1), 0: Fraction(2)}, Fraction(0))
    for _ in range(30):
        a = random_element(rng, INT_MIN)
        s = rng.randint(-20, 20)
        assert pair(convolve(a, delta(INT_MIN, s)), l, W_Z) == pair(a, module_action(s, l, W_Z), W_Z)


def test_module_action_nat_plus():
    w = parse_weight("1+n", NAT_PLUS)
    l = Indicator([5])
    a = Element.from_terms(NAT_PLUS, {2: 1, 3: 4})
    assert pair(convolve(a, delta(NAT_PLUS, 2)), l, w) == pair(a, module_action(2, l, w), w) == 4


@pytest.mark.parametrize(
    "l, w, status",
    [
        (Indicator([3]), W_1, "member"),
        (PhiK(5), W_N, "member"),
        (PhiK(5), W_1, "not_member"),
        (PhiOmega(), W_N, "member"),
        (CharTimesOmega(SetSpec.parity("even")), W_N, "not_member"),
        (CharTimesOmega(SetSpec.finite([1, 2, 3])), W_1, "member"),
        (Formula("1/n"), W_1, "member"),
        (Formula("n"), W_N, "not_member"),
        (Table.of({1: 1}, 0, None, 50), W_1, "undetermined"),
        (Spliced(PhiOmega(), 10, Fraction(0)), W_1, "member"),
    ],
)
def test_membership(l, w, status):
    assert e_omega_membership(l, w).status == status


def test_membership_brute_force(rng):
    # member iff the sampled ratio |l(s)|/w(s) shrinks far out
    for l in FUNCTIONALS:
        for w in (W_N, W_1):
            m = e_omega_membership(l, w)
            if m.status == "undetermined":
                continue
            far = max(abs(as_mpf(l.value(s, w))) / as_mpf(w(s)) for s in range(5000, 5200))
            assert (far < 1e-2) == (m.status == "member"), (l, w.text)


def test_functional_json_round_trip():
    for l in FUNCTIONALS + [CharTimesOmega(SetSpec.sequence(SequenceSpec.arith(2, 3)))]:
        back = functional_from_json(json.loads(json.dumps(l.to_json())))
        for s in range(1, 30):
            assert back.value(s, W_N) == l.value(s, W_N)


def test_set_spec_parsing_and_finiteness():
    assert SetSpec.parity("odd").contains(3, NAT_MIN)
    assert SetSpec.interval(Interval.at_least(2)).finite_in(NAT_MIN, Interval.below(100)) is True
    assert SetSpec.parity("even").finite_in(NAT_MIN, Interval.at_least(1)) is False


def test_non_submodule_witness():
    r = non_submodule_witness(NAT_MIN, W_1, SetSpec.interval(Interval.at_least(2)), 1, 1, 200)
    assert r.verdict
    assert all(p == 0 for p in r.pairings) and all(v == 1 for v in r.products)
    z = non_submodule_witness(INT_MIN, W_Z, SetSpec.interval(Interval.below(0)), -100, -100, 50)
    assert z.verdict and all(v >= z.lower_bound for v in z.products)
    with pytest.raises(PreconditionError):
        non_submodule_witness(NAT_MIN, W_N, SetSpec.interval(Interval.at_least(2)), 1, 1, 10)
    with pytest.raises(PreconditionError):
        non_submodule_witness(NAT_MIN, W_1, SetSpec.interval(Interval.at_least(2)), 1, 1, 10, PhiK(1))


def test_compactness_probe():
    r = compactness_probe(3, W_N, Truncation.range(NAT_MIN, 1, 400))
    assert r.ok and r.M == 3 and r.G_size == 300 and r.max_ratio == 0
    with pytest.raises(PreconditionError):
        compactness_probe(3, W_1, Truncation.range(NAT_MIN, 1, 40))
    with pytest.raises(PreconditionError):
        compactness_probe(3, W_Z, Truncation.range(INT_MIN, 1, 40))


def test_posrat_pairing():
    q = parse_weight(Q_WEIGHT, POSRAT_MIN)
    a = Element.from_terms(POSRAT_MIN, {Fraction(1, 2): 2, 3: 1})
    assert pair(a, PhiOmega(), q) == 2 + Fraction(1, 3)
