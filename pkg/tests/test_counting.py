import math
import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import constraint_sets

from semiconstrained.constraints import ConstraintSet, is_admissible, shrink, upper_bound_system
from semiconstrained.counting import AdmissibleCounter, count_by_length, log2_count
from semiconstrained.errors import LengthError
from semiconstrained.words import Alphabet


def test_case_study_counts(rll):
    shrunk = shrink(rll, Fraction(1, 200))
    assert AdmissibleCounter(shrunk, 5).count() == 13
    assert AdmissibleCounter(shrunk, 10).count() == 379
    assert count_by_length(shrunk, [5, 10]) == {5: 13, 10: 379}


def test_short_length_rejected(rll):
    with pytest.raises(LengthError):
        AdmissibleCounter(rll, 1)


def test_rank_unrank_agree_with_sorted_enumeration(rll):
    words = [w for w in product(range(2), repeat=10) if is_admissible(rll, w)]
    c = AdmissibleCounter(rll, 10)
    assert c.count() == len(words)
    assert list(c.words()) == words
    for r, w in enumerate(words):
        assert c.unrank(r) == w
        assert c.rank(w) == r


def test_rank_rejects_non_members(rll):
    c = AdmissibleCounter(rll, 6)
    with pytest.raises(ValueError):
        c.rank((1,) * 6)
    with pytest.raises((ValueError, LengthError)):
        c.rank((0,) * 5)
    with pytest.raises(IndexError):
        c.unrank(c.count())


@settings(max_examples=25)
@given(constraint_sets(), st.integers(2, 10), st.integers(0, 2**32))
def test_random_systems_rank_roundtrip(gamma, n, seed):
    c = AdmissibleCounter(gamma, n)
    total = c.count()
    assert total == sum(1 for w in product(range(2), repeat=n) if is_admissible(gamma, w))
    rng = random.Random(seed)
    for _ in range(min(total, 10)):
        r = rng.randrange(total)
        w = c.unrank(r)
        assert is_admissible(gamma, w) and c.rank(w) == r


def test_accept_predicate_filters_final_states(binary):
    g = ConstraintSet.simplex(binary, 2)
    c = AdmissibleCounter(g, 6, accept=lambda counts, head, tail: tail == 0, track_head=True)
    assert c.count() == 32
    assert all(w[-1] == 0 for w in c.words())


def test_shift_invariant_systems_count_cyclic_words(binary):
    g = ConstraintSet.simplex(binary, 2, shift_invariant=True)
    c = AdmissibleCounter(g, 7)
    assert c.count() == sum(1 for w in product(range(2), repeat=7) if w[0] == w[-1])


def test_samples_are_members(rll, rng):
    c = AdmissibleCounter(shrink(rll, "0.005"), 60)
    for _ in range(200):
        assert is_admissible(shrink(rll, "0.005"), c.sample(rng))


def test_long_lengths_stay_fast(rll):
    c = AdmissibleCounter(rll, 300)
    assert c.count() > 2**250
    assert math.isclose(log2_count(c.count()), math.log2(c.count()), rel_tol=1e-12)


def test_ternary_counts(rng):
    A = Alphabet("abc")
    g = upper_bound_system(A, 2, {"aa": "1/4", "bc": "1/3"})
    for n in range(2, 7):
        naive = sum(1 for w in product(range(3), repeat=n) if is_admissible(g, w))
        assert AdmissibleCounter(g, n).count() == naive


def test_log2_count_edge_cases():
    assert log2_count(0) == -math.inf
    assert log2_count(1) == 0
    assert log2_count(2**1000) == 1000
