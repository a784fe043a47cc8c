"""Hypothesis strategies shared by the test modules."""
from fractions import Fraction

from hypothesis import strategies as st

from semiconstrained.constraints import EQ, LE, LT, ConstraintSet, LinearConstraint
from semiconstrained.measure import Measure
from semiconstrained.words import Alphabet


def fractions(lo=-1, hi=1, max_den=10):
    return st.builds(lambda n, d: Fraction(n, d), st.integers(lo * max_den, hi * max_den),
                     st.integers(1, max_den)).filter(lambda f: lo <= f <= hi)


@st.composite
def measures(draw, alphabet, k, shift_invariant=False):
    size = alphabet.size**k
    weights = draw(st.lists(st.integers(0, 12), min_size=size, max_size=size))
    if not any(weights):
        weights[draw(st.integers(0, size - 1))] = 1
    total = sum(weights)
    return Measure(alphabet, k, tuple(Fraction(w, total) for w in weights))


@st.composite
def constraint_sets(draw, alphabet=Alphabet.binary(), k=2, max_constraints=3, allow_eq=True,
                    allow_strict=True):
    size = alphabet.size**k
    relations = [LE] + ([LT] if allow_strict else []) + ([EQ] if allow_eq else [])
    out = []
    for _ in range(draw(st.integers(1, max_constraints))):
        coeffs = draw(st.lists(st.integers(-2, 2), min_size=size, max_size=size))
        if not any(coeffs):
            coeffs[draw(st.integers(0, size - 1))] = 1
        relation = draw(st.sampled_from(relations))
        bound = draw(fractions(-1, 1, 10))
        out.append(LinearConstraint(tuple(Fraction(c) for c in coeffs), relation, bound))
    return ConstraintSet(alphabet, k, tuple(out))
