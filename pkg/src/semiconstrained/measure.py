"""Probability measures on length-k patterns, stored as exact rationals."""
from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

from .errors import DimensionError
from .words import Alphabet, Word, pattern_from_index, pattern_index


def to_fraction(value) -> Fraction:
    """Exact conversion; decimal strings and floats go through their repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


@dataclass(frozen=True)
class Measure:
    """A probability vector over Sigma^k, indexed by pattern index."""

    alphabet: Alphabet
    k: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(to_fraction(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != self.alphabet.size**self.k:
            raise ValueError(
                f"expected {self.alphabet.size ** self.k} values, got {len(values)}"
            )
        if any(v < 0 for v in values):
            raise ValueError("measure values must be non-negative")
        if sum(values) != 1:
            raise ValueError(f"measure values sum to {sum(values)}, not 1")

    @classmethod
    def from_mapping(cls, alphabet: Alphabet, k: int, mapping: Mapping) -> Measure:
        """Build from ``{pattern: value}``; patterns are strings or index tuples."""
        values = [Fraction(0)] * alphabet.size**k
        for pattern, value in mapping.items():
            if isinstance(pattern, str):
                pattern = alphabet.parse(pattern)
            if len(pattern) != k:
                raise ValueError(f"pattern {pattern!r} does not have length {k}")
            values[pattern_index(pattern, alphabet.size)] += to_fraction(value)
        return cls(alphabet, k, tuple(values))

    @classmethod
    def uniform(cls, alphabet: Alphabet, k: int) -> Measure:
        n = alphabet.size**k
        return cls(alphabet, k, (Fraction(1, n),) * n)

    @classmethod
    def delta(cls, alphabet: Alphabet, pattern) -> Measure:
        if isinstance(pattern, str):
            pattern = alphabet.parse(pattern)
        return cls.from_mapping(alphabet, len(pattern), {tuple(pattern): 1})

    def __getitem__(self, pattern) -> Fraction:
        if isinstance(pattern, int):
            return self.values[pattern]
        if isinstance(pattern, str):
            pattern = self.alphabet.parse(pattern)
        return self.values[pattern_index(pattern, self.alphabet.size)]

    def __len__(self) -> int:
        return len(self.values)

    @property
    def sigma(self) -> int:
        return self.alphabet.size

    def support(self) -> list[int]:
        return [i for i, v in enumerate(self.values) if v]

    def items(self):
        """(pattern word, value) pairs in lexicographic order."""
        sigma = self.alphabet.size
        return [(pattern_from_index(i, sigma, self.k), v) for i, v in enumerate(self.values)]

    @cached_property
    def denominator(self) -> int:
        """Least common denominator M: the smallest M with M*values integral."""
        return lcm(*(v.denominator for v in self.values))

    def marginals(self) -> tuple[list[Fraction], list[Fraction]]:
        """(left, right) (k-1)-marginals: sum_a eta(a phi) and sum_a eta(phi a)."""
        sigma, k = self.alphabet.size, self.k
        size = sigma ** (k - 1)
        left = [Fraction(0)] * size
        right = [Fraction(0)] * size
        for i, v in enumerate(self.values):
            if v:
                right[i // sigma] += v
                left[i % size] += v
        return left, right

    def shift_defect(self) -> Fraction:
        left, right = self.marginals()
        return max(abs(a - b) for a, b in zip(left, right))

    def is_shift_invariant(self) -> bool:
        return self.shift_defect() == 0

    def as_floats(self) -> list[float]:
        return [float(v) for v in self.values]

    def mix(self, other: Measure, weight) -> Measure:
        """``(1-weight)*self + weight*other``."""
        _same_space(self, other)
        w = to_fraction(weight)
        return Measure(
            self.alphabet, self.k,
            tuple((1 - w) * a + w * b for a, b in zip(self.values, other.values)),
        )

    def format(self, nonzero_only: bool = True) -> str:
        parts = []
        for pattern, v in self.items():
            if v or not nonzero_only:
                parts.append(f"{self.alphabet.format(pattern)}: {v}")
        return "{" + ", ".join(parts) + "}"


def _same_space(a: Measure, b: Measure) -> None:
    if a.k != b.k or a.alphabet.size != b.alphabet.size:
        raise DimensionError(f"measures on Sigma^{a.k} and Sigma^{b.k} (|Sigma| = "
                             f"{a.alphabet.size}, {b.alphabet.size}) cannot be combined")


def average(measures: Sequence[Measure], weights: Sequence | None = None) -> Measure:
    """Convex combination (equal weights by default)."""
    if not measures:
        raise ValueError("nothing to average")
    if weights is None:
        weights = [Fraction(1, len(measures))] * len(measures)
    weights = [to_fraction(w) for w in weights]
    first = measures[0]
    for m in measures[1:]:
        _same_space(first, m)
    values = [Fraction(0)] * len(first.values)
    for m, w in zip(measures, weights):
        for i, v in enumerate(m.values):
            values[i] += w * v
    return Measure(first.alphabet, first.k, tuple(values))


def pattern_word(alphabet: Alphabet, k: int, index: int) -> Word:
    return pattern_from_index(index, alphabet.size, k)
