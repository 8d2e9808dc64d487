import random

import pytest

from liewave.symmetry import Domain

# expression corpus shared by calculus/printing/sampling tests: text plus a
# box on which evaluation is domain-safe
CORPUS = [
    ("x^2 + 1", {"x": (-2.0, 2.0)}),
    ("exp(x - q*t)", {"x": (-1.0, 1.0), "q": (0.5, 2.0), "t": (0.0, 1.0)}),
    ("sin(k*exp(x))", {"k": (0.5, 2.0), "x": (-1.0, 1.0)}),
    ("(a*exp(x - q*t) + b)*exp(v*x)",
     {"a": (-1.0, 1.0), "b": (-1.0, 1.0), "q": (0.5, 2.0), "v": (-1.0, 1.0),
      "x": (0.0, 1.0), "t": (0.0, 1.0)}),
    ("cos(2*x)*sin(x) - x/3", {"x": (-3.0, 3.0)}),
    ("sqrt(x^2 + 1)*log(x + 2)", {"x": (-0.5, 3.0)}),
    ("x^3 - 2*x^2 + x/2 - 7", {"x": (-2.0, 2.0)}),
    ("exp(-(x^2))/(1 + x^2)", {"x": (-2.0, 2.0)}),
    ("log(exp(x) + 1)", {"x": (-2.0, 2.0)}),
    ("2/x + x^-2", {"x": (0.5, 3.0)}),
]


@pytest.fixture
def unit_domain():
    return Domain((0.0, 1.0), (0.0, 1.0))


@pytest.fixture
def rng():
    return random.Random(20260810)
