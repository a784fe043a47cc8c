"""Plain-text constraint specifications.

One ``key: value`` per line, ``#`` starts a comment::

    alphabet: 0 1
    k: 2
    constraint: 11 <= 0.205
    constraint: 2*01 - 1/2*10 < 1/3
    shift_invariant: no
    eps: 0.005

Patterns are written as runs of single-character symbols or, for longer
symbol names, as ``[a,b,c]``.  Relations are ``<=``, ``<``, ``=``, ``>=`` and
``>``; the last two are stored negated.  Numbers are integers, decimals or
``p/q`` and are converted exactly.  Optional keys: ``eps``, ``m``, ``p``,
``q`` and ``mode`` (``block`` or ``sliding``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .constraints import EQ, LE, LT, ConstraintSet, LinearConstraint
from .errors import SpecParseError
from .words import Alphabet, pattern_index

_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)(/\d+)?$")
_TOKEN = re.compile(r"\s*(<=|>=|≤|≥|<|>|=|\*|[+-]|\[[^\]]*\]|[^\s*+\-<>=≤≥\[\]]+)")
_RELATIONS = {"<=": LE, "≤": LE, "<": LT, "=": EQ, ">=": ">=", "≥": ">=", ">": ">"}
_MODES = ("block", "sliding")
_TRUE = ("yes", "true", "1", "on")
_FALSE = ("no", "false", "0", "off")


@dataclass(frozen=True)
class Spec:
    """A parsed specification; ``gamma`` holds alphabet, k and constraints."""

    gamma: ConstraintSet
    eps: Fraction | None = None
    m: int | None = None
    p: int | None = None
    q: int | None = None
    mode: str | None = None

    @property
    def alphabet(self) -> Alphabet:
        return self.gamma.alphabet

    @property
    def k(self) -> int:
        return self.gamma.k

    @property
    def constraints(self) -> tuple[LinearConstraint, ...]:
        return self.gamma.constraints

    def format(self) -> str:
        lines = [self.gamma.describe()]
        for key in ("eps", "m", "p", "q", "mode"):
            value = getattr(self, key)
            if value is not None:
                lines.append(f"{key}: {value}")
        return "\n".join(lines) + "\n"


def parse_number(text: str, line=None, column=None) -> Fraction:
    text = text.strip()
    if not _NUMBER.match(text):
        raise SpecParseError(f"malformed number {text!r}", line, column)
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise SpecParseError(f"malformed number {text!r}", line, column) from None


def _parse_int(text: str, key: str, line: int, column: int, minimum: int = 1) -> int:
    if not re.fullmatch(r"\d+", text):
        raise SpecParseError(f"{key} must be a positive integer, got {text!r}", line, column)
    value = int(text)
    if value < minimum:
        raise SpecParseError(f"{key} must be at least {minimum}", line, column)
    return value


def _tokenize(text: str, line: int, column: int) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            raise SpecParseError(f"unexpected character {text[pos]!r}", line, column + pos)
        tokens.append((match.group(1), column + match.start(1)))
        pos = match.end()
    return tokens


def _parse_pattern(tok: str, col: int, alphabet: Alphabet, k: int, line: int) -> int:
    if tok.startswith("["):
        names = [s.strip() for s in tok[1:-1].split(",")]
    elif alphabet.single_char:
        names = list(tok)
    else:
        raise SpecParseError(f"write patterns over multi-character symbols as [a,b,...]: {tok!r}",
                             line, col)
    word = []
    for name in names:
        if name not in alphabet.symbols:
            raise SpecParseError(f"unknown symbol {name!r} in pattern {tok!r}", line, col)
        word.append(alphabet.symbols.index(name))
    if len(word) != k:
        raise SpecParseError(f"pattern {tok!r} has length {len(word)}, expected k={k}", line, col)
    return pattern_index(word, alphabet.size)


def parse_constraint(text: str, alphabet: Alphabet, k: int, line: int = 1,
                     column: int = 1) -> LinearConstraint:
    """``[sign] [coef*]pattern (sign [coef*]pattern)* rel bound``."""
    tokens = _tokenize(text, line, column)
    rel_at = [i for i, (t, _) in enumerate(tokens) if t in _RELATIONS]
    if len(rel_at) != 1:
        col = tokens[rel_at[1]][1] if len(rel_at) > 1 else column
        raise SpecParseError("a constraint needs exactly one relation", line, col)
    r = rel_at[0]
    lhs, (rel_tok, rel_col), rhs = tokens[:r], tokens[r], tokens[r + 1 :]
    if not rhs:
        raise SpecParseError("missing bound", line, rel_col + len(rel_tok))
    bound_text = "".join(t for t, _ in rhs)
    bound = parse_number(bound_text, line, rhs[0][1])
    if not lhs:
        raise SpecParseError("missing left-hand side", line, column)
    coeffs = [Fraction(0)] * (alphabet.size**k)
    i = 0
    sign = 1
    expect_term = True
    while i < len(lhs):
        tok, col = lhs[i]
        if tok in "+-":
            step = -1 if tok == "-" else 1
            sign = sign * step if expect_term else step
            expect_term = True
            i += 1
            continue
        if not expect_term:
            raise SpecParseError(f"expected '+' or '-' before {tok!r}", line, col)
        coef = Fraction(1)
        if i + 1 < len(lhs) and lhs[i + 1][0] == "*":
            coef = parse_number(tok, line, col)
            i += 2
            if i >= len(lhs):
                raise SpecParseError("missing pattern after '*'", line, lhs[i - 1][1] + 1)
            tok, col = lhs[i]
        coeffs[_parse_pattern(tok, col, alphabet, k, line)] += sign * coef
        sign = 1
        expect_term = False
        i += 1
    if expect_term:
        raise SpecParseError("dangling sign", line, lhs[-1][1])
    relation = _RELATIONS[rel_tok]
    if relation in (">=", ">"):
        coeffs = [-c for c in coeffs]
        bound = -bound
        relation = LE if relation == ">=" else LT
    if not any(coeffs):
        raise SpecParseError("all coefficients cancel", line, column)
    return LinearConstraint(tuple(coeffs), relation, bound)


def parse_spec(text: str) -> Spec:
    """Parse a specification, reporting errors with 1-based line/column."""
    values: dict[str, tuple[str, int, int]] = {}
    constraints: list[tuple[str, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if ":" not in body:
            col = len(body) - len(body.lstrip()) + 1
            raise SpecParseError("expected 'key: value'", lineno, col)
        key, value = body.split(":", 1)
        key_col = len(key) - len(key.lstrip()) + 1
        key = key.strip().lower()
        vcol = len(body) - len(value) + 1 + (len(value) - len(value.lstrip()))
        value = value.strip()
        if key == "constraint":
            constraints.append((value, lineno, vcol))
            continue
        if key not in ("alphabet", "k", "shift_invariant", "eps", "m", "p", "q", "mode"):
            raise SpecParseError(f"unknown key {key!r}", lineno, key_col)
        if key in values:
            raise SpecParseError(f"duplicate key {key!r}", lineno, key_col)
        if not value:
            raise SpecParseError(f"empty value for {key!r}", lineno, vcol)
        values[key] = (value, lineno, vcol)
    for key in ("alphabet", "k"):
        if key not in values:
            raise SpecParseError(f"missing required key {key!r}")
    value, line, col = values["alphabet"]
    try:
        alphabet = Alphabet(value.split())
    except ValueError as exc:
        raise SpecParseError(str(exc), line, col) from None
    k = _parse_int(values["k"][0], "k", values["k"][1], values["k"][2])
    shift_invariant = False
    if "shift_invariant" in values:
        value, line, col = values["shift_invariant"]
        if value.lower() in _TRUE:
            shift_invariant = True
        elif value.lower() not in _FALSE:
            raise SpecParseError(f"shift_invariant must be yes or no, got {value!r}", line, col)
    parsed = tuple(parse_constraint(t, alphabet, k, line, col) for t, line, col in constraints)
    gamma = ConstraintSet(alphabet, k, parsed, shift_invariant)
    eps = m = p = q = mode = None
    if "eps" in values:
        value, line, col = values["eps"]
        eps = parse_number(value, line, col)
        if eps < 0:
            raise SpecParseError("eps must be non-negative", line, col)
    if "m" in values:
        m = _parse_int(values["m"][0], "m", values["m"][1], values["m"][2])
    if "p" in values:
        p = _parse_int(values["p"][0], "p", values["p"][1], values["p"][2])
    if "q" in values:
        q = _parse_int(values["q"][0], "q", values["q"][1], values["q"][2])
    if "mode" in values:
        value, line, col = values["mode"]
        if value not in _MODES:
            raise SpecParseError(f"mode must be one of {', '.join(_MODES)}", line, col)
        mode = value
    return Spec(gamma, eps, m, p, q, mode)


def read_spec(path) -> Spec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())
