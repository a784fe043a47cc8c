from fractions import Fraction

import pytest

from semiconstrained.constraints import EQ, LE, LT
from semiconstrained.errors import SpecParseError
from semiconstrained.specfile import parse_constraint, parse_number, parse_spec
from semiconstrained.words import Alphabet

RLL = """\
# (0,1,0.205)-RLL
alphabet: 0 1
k: 2
constraint: 11 <= 0.205   # at most a 0.205 share of 11
eps: 0.005
"""

A2 = Alphabet.binary()


def test_rll_spec():
    spec = parse_spec(RLL)
    assert spec.k == 2 and spec.alphabet.size == 2
    (c,) = spec.constraints
    assert c.relation == LE and c.bound == Fraction(41, 200)
    assert c.coefficients == (0, 0, 0, 1)
    assert spec.eps == Fraction(1, 200) and spec.m is None


def test_format_round_trip():
    spec = parse_spec(RLL + "m: 10\nmode: block\n")
    again = parse_spec(spec.format())
    assert again == spec


@pytest.mark.parametrize("text,value", [("3", 3), ("-1/4", Fraction(-1, 4)), ("0.125", Fraction(1, 8)),
                                        (".5", Fraction(1, 2)), ("2.", 2)])
def test_numbers_are_exact(text, value):
    assert parse_number(text) == value


@pytest.mark.parametrize("text", ["0.2.1", "1/0", "abc", "1e-3", ""])
def test_malformed_numbers(text):
    with pytest.raises(SpecParseError):
        parse_number(text)


def test_relations_and_signs():
    c = parse_constraint("2*01 - 1/2*10 < 1/3", A2, 2)
    assert c.coefficients == (0, 2, Fraction(-1, 2), 0) and c.relation == LT
    c = parse_constraint("00 >= 0.1", A2, 2)
    assert c.coefficients == (-1, 0, 0, 0) and c.bound == Fraction(-1, 10) and c.relation == LE
    c = parse_constraint("-00 + 11 = 0", A2, 2)
    assert c.relation == EQ and c.coefficients == (-1, 0, 0, 1)
    assert parse_constraint("11 ≤ 1/2", A2, 2).relation == LE


def test_bracketed_patterns_for_long_symbol_names():
    A = Alphabet(["ab", "cd"])
    c = parse_constraint("[ab,cd] <= 1/2", A, 2)
    assert c.coefficients == (0, 1, 0, 0)


@pytest.mark.parametrize("text,line,column", [
    ("alphabet: 0 1\nk: 2\nconstraint: 12 <= 0.2\n", 3, 13),
    ("alphabet: 0 1\nk: 2\nconstraint: 11 <= 0.2.1\n", 3, 19),
    ("alphabet: 0 1\nk 2\n", 2, 1),
    ("alphabet: 0 1\nk: 2\nconstraint: 111 <= 0.2\n", 3, 13),
    ("alphabet: 0 1\nk: 2\nconstraint: 11 01 <= 0.2\n", 3, 16),
    ("alphabet: 0 1\nk: 2\nsize: 3\n", 3, 1),
])
def test_errors_carry_positions(text, line, column):
    with pytest.raises(SpecParseError) as info:
        parse_spec(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}" in str(info.value)


def test_missing_keys_and_bad_values():
    with pytest.raises(SpecParseError, match="alphabet"):
        parse_spec("k: 2\n")
    with pytest.raises(SpecParseError, match="mode"):
        parse_spec("alphabet: 0 1\nk: 2\nmode: fast\n")
    with pytest.raises(SpecParseError, match="cancel"):
        parse_spec("alphabet: 0 1\nk: 2\nconstraint: 11 - 11 <= 0\n")
    with pytest.raises(SpecParseError, match="duplicate"):
        parse_spec("alphabet: 0 1\nk: 2\nk: 3\n")
