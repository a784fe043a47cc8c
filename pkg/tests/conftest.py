import os
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from semiconstrained import EQ, ConstraintSet, upper_bound_system
from semiconstrained.words import Alphabet

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SEED = int(os.environ.get("SCS_TEST_SEED", "20240601"))


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def binary():
    return Alphabet.binary()


@pytest.fixture(scope="session")
def rll(binary):
    """mu(11) <= 0.205 on binary pairs."""
    return upper_bound_system(binary, 2, {"11": Fraction("0.205")})


@pytest.fixture(scope="session")
def no000(binary):
    return upper_bound_system(binary, 3, {"000": 0}, EQ)


@pytest.fixture(scope="session")
def gamma1(binary):
    """Shift-invariant measures with mu(000), mu(111), mu(101) <= 0.01."""
    return upper_bound_system(binary, 3, {"000": "0.01", "111": "0.01", "101": "0.01"},
                              shift_invariant=True)


@pytest.fixture(scope="session")
def hull_example(binary):
    """Segment between delta_1111 and (delta_1010 + delta_0101)/2 on Sigma^4."""
    gamma = ConstraintSet.simplex(binary, 4, shift_invariant=True)
    for w in binary.words(4):
        name = binary.format(w)
        if name not in ("1111", "1010", "0101"):
            gamma = gamma.add(name, EQ, 0)
    return gamma.add({"1010": 1, "0101": -1}, EQ, 0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
