from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from semiconstrained.lp import linprog_exact

small = st.integers(-4, 4)


@st.composite
def lp_instances(draw):
    n = draw(st.integers(1, 4))
    m_ub = draw(st.integers(0, 4))
    m_eq = draw(st.integers(0, 2))
    c = draw(st.lists(small, min_size=n, max_size=n))
    A_ub = [draw(st.lists(small, min_size=n, max_size=n)) for _ in range(m_ub)]
    b_ub = draw(st.lists(st.integers(-3, 6), min_size=m_ub, max_size=m_ub))
    A_eq = [draw(st.lists(small, min_size=n, max_size=n)) for _ in range(m_eq)]
    b_eq = draw(st.lists(st.integers(-3, 6), min_size=m_eq, max_size=m_eq))
    return c, A_ub, b_ub, A_eq, b_eq


def _scipy(c, A_ub, b_ub, A_eq, b_eq, maximize):
    sign = -1 if maximize else 1
    return linprog(sign * np.array(c, float), A_ub=np.array(A_ub, float) if A_ub else None,
                   b_ub=np.array(b_ub, float) if b_ub else None,
                   A_eq=np.array(A_eq, float) if A_eq else None,
                   b_eq=np.array(b_eq, float) if b_eq else None,
                   bounds=(0, None), method="highs")


def _check_point(res, A_ub, b_ub, A_eq, b_eq):
    x = res.x
    assert all(v >= 0 for v in x)
    for row, b in zip(A_ub, b_ub):
        assert sum(Fraction(a) * v for a, v in zip(row, x)) <= b
    for row, b in zip(A_eq, b_eq):
        assert sum(Fraction(a) * v for a, v in zip(row, x)) == b


@settings(max_examples=300)
@given(lp_instances(), st.booleans())
def test_matches_scipy(inst, maximize):
    c, A_ub, b_ub, A_eq, b_eq = inst
    ours = linprog_exact(c, A_ub, b_ub, A_eq, b_eq, maximize=maximize)
    ref = _scipy(c, A_ub, b_ub, A_eq, b_eq, maximize)
    if ours.optimal:
        _check_point(ours, A_ub, b_ub, A_eq, b_eq)
        assert ours.value == sum(Fraction(a) * v for a, v in zip(c, ours.x))
        assert ref.status == 0
        assert float(ours.value) == pytest.approx((-1 if maximize else 1) * ref.fun, abs=1e-7)
    elif ours.status == "infeasible":
        # a zero objective cannot be unbounded: feasibility alone decides
        feas = _scipy([0] * len(c), A_ub, b_ub, A_eq, b_eq, False)
        assert feas.status == 2
    else:
        assert ours.status == "unbounded"
        # HiGHS may label an unbounded problem infeasible; check feasibility directly
        feas = linprog_exact([0] * len(c), A_ub, b_ub, A_eq, b_eq)
        assert feas.optimal
        assert ref.status in (2, 3)
        assert _scipy([0] * len(c), A_ub, b_ub, A_eq, b_eq, False).status == 0


def test_degenerate_problem_terminates():
    # a classic cycling example for the largest-coefficient rule
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    A = [[Fraction(1, 4), -60, Fraction(-1, 25), 9], [Fraction(1, 2), -90, Fraction(-1, 50), 3],
         [0, 0, 1, 0]]
    res = linprog_exact(c, A, [0, 0, 1], maximize=True)
    assert res.optimal and res.value == Fraction(1, 20)


def test_exact_rational_optimum():
    res = linprog_exact([1, 1], [[3, 1], [1, 3]], [1, 1], maximize=True)
    assert res.optimal and res.value == Fraction(1, 2)
    assert res.x == [Fraction(1, 4), Fraction(1, 4)]


def test_redundant_equalities():
    res = linprog_exact([1, 0], None, None, [[1, 1], [2, 2]], [1, 2], maximize=True)
    assert res.optimal and res.value == 1
    assert linprog_exact([1, 0], None, None, [[1, 1], [2, 2]], [1, 3]).status == "infeasible"
