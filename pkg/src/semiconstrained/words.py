"""Alphabets, finite words and sliding-window k-tuple statistics.

Words are plain tuples of symbol indices; the :class:`Alphabet` carries the
user-facing symbol names and fixes the lexicographic order used everywhere
downstream.  Length-k patterns are identified with their base-sigma index, so
pattern ``(a_0, ..., a_{k-1})`` has index ``sum a_i * sigma**(k-1-i)``.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .errors import LengthError

Word = tuple[int, ...]

_NUMPY_THRESHOLD = 4096


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __init__(self, symbols: Iterable[str] | int):
        if isinstance(symbols, int):
            symbols = [str(i) for i in range(symbols)]
        symbols = tuple(str(s) for s in symbols)
        if len(symbols) < 2:
            raise ValueError("an alphabet needs at least two symbols")
        if len(set(symbols)) != len(symbols):
            raise ValueError(f"duplicate symbols in alphabet {symbols!r}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def binary(cls) -> Alphabet:
        return cls("01")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({''.join(self.symbols) if self.single_char else self.symbols!r})"

    @property
    def single_char(self) -> bool:
        return all(len(s) == 1 for s in self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise ValueError(f"unknown symbol {symbol!r}") from None

    def parse(self, text: str) -> Word:
        """Parse a word from its serialized form (see :meth:`format`)."""
        text = text.strip()
        if text in ("", "λ"):
            return ()
        if self.single_char and "," not in text:
            return tuple(self.index(c) for c in text)
        return tuple(self.index(c.strip()) for c in text.split(","))

    def format(self, word: Sequence[int]) -> str:
        if self.single_char:
            return "".join(self.symbols[a] for a in word)
        return ",".join(self.symbols[a] for a in word)

    def words(self, n: int) -> Iterator[Word]:
        """All words of length ``n`` in lexicographic order."""
        return product(range(self.size), repeat=n)


def check_word(word: Sequence[int], alphabet: Alphabet) -> Word:
    word = tuple(word)
    sigma = alphabet.size
    for a in word:
        if not 0 <= a < sigma:
            raise ValueError(f"symbol index {a} outside alphabet of size {sigma}")
    return word


def pattern_index(pattern: Sequence[int], sigma: int) -> int:
    idx = 0
    for a in pattern:
        idx = idx * sigma + a
    return idx


def pattern_from_index(index: int, sigma: int, k: int) -> Word:
    out = [0] * k
    for i in range(k - 1, -1, -1):
        index, out[i] = divmod(index, sigma)
    return tuple(out)


def concat(first: Sequence[int], second: Sequence[int]) -> Word:
    return tuple(first) + tuple(second)


def suffchop(word: Sequence[int], j: int) -> Word:
    """Drop the last ``j`` symbols of ``word``."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if len(word) < j:
        raise LengthError(f"cannot chop {j} symbols from a word of length {len(word)}")
    return tuple(word[: len(word) - j])


def subwords(word: Sequence[int], k: int) -> list[Word]:
    """The ``|word|-k+1`` length-k windows of ``word``, in order (a multiset)."""
    if k < 1:
        raise ValueError("k must be positive")
    if len(word) < k:
        raise LengthError(f"word of length {len(word)} has no windows of length {k}")
    word = tuple(word)
    return [word[i : i + k] for i in range(len(word) - k + 1)]


def pattern_counts(word: Sequence[int], sigma: int, k: int) -> list[int]:
    """Occurrence count of every length-k pattern, indexed by pattern index."""
    if k < 1:
        raise ValueError("k must be positive")
    n = len(word)
    if n < k:
        raise LengthError(f"word of length {n} has no windows of length {k}")
    size = sigma**k
    if n >= _NUMPY_THRESHOLD and size < 2**31:
        arr = np.asarray(word, dtype=np.int64)
        idx = np.zeros(n - k + 1, dtype=np.int64)
        for i in range(k):
            idx = idx * sigma + arr[i : n - k + 1 + i]
        return np.bincount(idx, minlength=size).tolist()
    counts = [0] * size
    mod = sigma ** (k - 1)
    idx = pattern_index(word[: k - 1], sigma)
    for a in word[k - 1 :]:
        idx = (idx % mod) * sigma + a if mod > 1 else a
        counts[idx] += 1
    return counts


def kmer_frequency(word: Sequence[int], k: int, alphabet: Alphabet):
    """Empirical distribution of the length-k windows of ``word`` (exact)."""
    from .measure import Measure

    counts = pattern_counts(word, alphabet.size, k)
    total = len(word) - k + 1
    return Measure(alphabet, k, tuple(Fraction(c, total) for c in counts))
