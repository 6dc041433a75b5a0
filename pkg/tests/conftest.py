from __future__ import annotations

import random
from fractions import Fraction

import pytest

from slalg.algebra import Element
from slalg.core import INT_MIN, NAT_MIN, POSRAT_MIN, semigroup
from slalg.weights import parse_weight

Z_WEIGHT = "piecewise{ (-inf,1): 1; [1,inf): n }"
Q_WEIGHT = "piecewise{ (0,1]: 1; (1,inf): n }"
UNKNOWN_WEIGHT = "piecewise{ (-inf,1): 1-n; [1,inf): 1 }"

# (semigroup, weight, filter limit infinite, expected verdict)
WEIGHT_TABLE = [
    ("nat-min", "n", True, "ArensRegular"),
    ("nat-min", "n^2", True, "ArensRegular"),
    ("nat-min", "log(n+1)+1", True, "ArensRegular"),
    ("nat-min", "exp(n)", True, "ArensRegular"),
    ("nat-min", "1", False, "StronglyArensIrregular"),
    ("nat-min", "2-1/n", False, "StronglyArensIrregular"),
    ("int-min", Z_WEIGHT, False, "NeitherRegularNorSAI"),
    ("int-min", "exp(|n|)", True, "ArensRegular"),
    ("int-min", UNKNOWN_WEIGHT, False, "NotRegularSAIUnknown"),
    ("posrat-min", Q_WEIGHT, False, "NeitherRegularNorSAI"),
]


def weight(sg: str, text: str):
    return parse_weight(text, semigroup(sg))


def random_element(rng: random.Random, sg=NAT_MIN, size: int = 8, hi: int = 40) -> Element:
    n = rng.randint(0, size)
    if sg is POSRAT_MIN:
        pts = {Fraction(rng.randint(1, 4 * hi), rng.randint(1, 4)) for _ in range(n)}
    elif sg is INT_MIN:
        pts = {rng.randint(-hi, hi) for _ in range(n)}
    else:
        pts = {rng.randint(1, hi) for _ in range(n)}
    return Element.from_terms(sg, {p: Fraction(rng.randint(-20, 20), rng.randint(1, 12)) for p in pts})


@pytest.fixture
def rng():
    return random.Random(20240601)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
