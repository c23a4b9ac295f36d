import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gcmax import ConvexityParams, Fn, Magma  # noqa: E402


@pytest.fixture
def counterexample():
    return [Fn.of([0, -1], "f1"), Fn.of([-1, 0], "f2")]


@pytest.fixture
def max3():
    return Magma.from_function(3, max)


@pytest.fixture
def half():
    return ConvexityParams(Fraction(1, 2), Fraction(1, 2))


@pytest.fixture
def rng():
    return random.Random(20241017)
