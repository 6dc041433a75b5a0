import itertools
import random
from fractions import Fraction

import pytest

from slalg.algebra import Element, convolve, delta
from slalg.core import INT_MIN, NAT_MIN, NAT_PLUS, PreconditionError, SlalgError, Truncation
from slalg.functionals import Formula, Indicator, PhiK, pair
from slalg.spectra import enumerate_characters, gelfand, phi_k_apply, predual_density_approx
from slalg.weights import parse_weight

from conftest import random_element


def brute_force_characters(pts):
    """Every nonzero {0,1}-valued multiplicative map on (pts, min)."""
    found = []
    for values in itertools.product((0, 1), repeat=len(pts)):
        if not any(values):
            continue
        chi = dict(zip(pts, values))
        if all(chi[min(s, t)] == chi[s] * chi[t] for s in pts for t in pts):
            found.append(chi)
    return found


@pytest.mark.parametrize("n", range(1, 13))
def test_characters_match_brute_force(n):
    tr = Truncation.range(NAT_MIN, 1, n)
    chars = enumerate_characters(tr)
    oracle = brute_force_characters(list(tr))
    assert len(chars) == len(oracle) == n
    assert sorted(tuple(c(p) for p in tr) for c in chars) == sorted(tuple(o[p] for p in tr) for o in oracle)
    assert [c.threshold for c in chars] == list(range(1, n + 1))


def test_characters_int_min_and_limits():
    tr = Truncation.range(INT_MIN, -3, 2)
    assert [c.threshold for c in enumerate_characters(tr)] == list(range(-3, 3))
    with pytest.raises(SlalgError):
        enumerate_characters(Truncation.range(NAT_MIN, 1, 21))


def test_phi_k_values():
    a = Element.from_terms(NAT_MIN, {1: 2, 4: 3})
    assert phi_k_apply(2, a) == 3
    assert phi_k_apply(1, a) == a.coefficient_sum()
    assert phi_k_apply(3, delta(NAT_MIN, 5)) == 1 and phi_k_apply(6, delta(NAT_MIN, 5)) == 0
    assert pair(a, PhiK(2), parse_weight("n", NAT_MIN)) == 3


def test_phi_k_multiplicative():
    rng = random.Random(11)
    for _ in range(500):
        a, b = random_element(rng), random_element(rng)
        k = rng.randint(1, 45)
        assert phi_k_apply(k, convolve(a, b)) == phi_k_apply(k, a) * phi_k_apply(k, b)


def test_gelfand_vector(rng):
    for _ in range(50):
        a = random_element(rng)
        assert gelfand(a, 30) == [(k, phi_k_apply(k, a)) for k in range(1, 31)]


def test_density_indicator():
    w = parse_weight("n", NAT_MIN)
    res = [predual_density_approx(Indicator([3]), w, n).residual for n in range(6)]
    assert res == [Fraction(1, 3)] * 3 + [0, 0, 0]
    assert predual_density_approx(Indicator([]), w, 0).residual == 0


def test_density_monotone():
    w = parse_weight("n^2", NAT_MIN)
    res = [predual_density_approx(Formula("1/n"), w, n, window=200).residual for n in range(1, 40)]
    assert all(a >= b for a, b in zip(res, res[1:]))
    assert res[4] == Fraction(1, 6**3)


def test_density_preconditions():
    with pytest.raises(PreconditionError):
        predual_density_approx(Indicator([1]), parse_weight("1", NAT_MIN), 3)
    with pytest.raises(PreconditionError):
        predual_density_approx(PhiK(1), parse_weight("1+n", NAT_PLUS), 3)
