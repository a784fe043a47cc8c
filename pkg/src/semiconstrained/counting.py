"""Exact counting, ranking and sampling of admissible words of a fixed length.

Admissibility of a word depends only on its last k-1 symbols (to extend it),
its first k-1 symbols (for shift invariance) and the occurrence counts of the
patterns that appear in some constraint.  The layered automaton over these
states gives exact counts, lexicographic rank/unrank and uniform sampling.
"""
from __future__ import annotations

import logging
import math
import random
from collections.abc import Callable, Iterator, Sequence

from .errors import LengthError
from .words import Word

log = logging.getLogger(__name__)

State = tuple  # (head, tail, counts)


def _integer_rows(gamma, positions):
    """Constraints as (int coeffs over relevant patterns, int bound, relation)."""
    rows = []
    for c in gamma.constraints:
        coeffs = [c.coefficients[p] for p in positions]
        scale = math.lcm(*(x.denominator for x in coeffs), c.bound.denominator)
        rows.append(([int(x * scale) for x in coeffs], int(c.bound * scale), c.relation))
    return rows


class AdmissibleCounter:
    """Layered count automaton for B_n(Gamma).

    Parameters
    ----------
    gamma : ConstraintSet
    n : int
        Word length, at least ``gamma.k``.
    accept : callable, optional
        Extra predicate ``accept(counts, head, tail)`` applied at length n,
        where ``counts`` is indexed like :attr:`patterns`.
    track_head : bool
        Keep the first k-1 symbols in the state even when shift invariance
        does not need them (``head`` is None otherwise).
    """

    def __init__(self, gamma, n: int, accept: Callable | None = None, track_head: bool = False):
        k = gamma.k
        if n < k:
            raise LengthError(f"length {n} is shorter than k={k}")
        self.gamma = gamma
        self.n = n
        self.sigma = gamma.alphabet.size
        self.k = k
        self.patterns: tuple[int, ...] = gamma.relevant_patterns
        self._pos = {p: i for i, p in enumerate(self.patterns)}
        self._rows = _integer_rows(gamma, self.patterns)
        self._accept = accept
        self._track_head = gamma.shift_invariant or track_head
        self._ctx = self.sigma ** (k - 1)
        self._windows = n - k + 1
        self._build()

    # -- transitions ---------------------------------------------------------
    def _step(self, state: State, a: int) -> State:
        head, tail, counts = state
        pattern = tail * self.sigma + a
        pos = self._pos.get(pattern)
        if pos is not None:
            counts = counts[:pos] + (counts[pos] + 1,) + counts[pos + 1 :]
        return head, pattern % self._ctx, counts

    def _feasible(self, counts: tuple, remaining: int) -> bool:
        W = self._windows
        for coeffs, bound, rel in self._rows:
            base = sum(a * c for a, c in zip(coeffs, counts))
            lo = base + remaining * min(0, min(coeffs))
            hi = base + remaining * max(0, max(coeffs))
            target = bound * W
            if rel == "<=" and lo > target:
                return False
            if rel == "<" and lo >= target:
                return False
            if rel == "=" and not lo <= target <= hi:
                return False
        return True

    def _final(self, state: State) -> bool:
        head, tail, counts = state
        if self.gamma.shift_invariant and head != tail:
            return False
        W = self._windows
        for coeffs, bound, rel in self._rows:
            lhs = sum(a * c for a, c in zip(coeffs, counts))
            if rel == "<=" and not lhs <= bound * W:
                return False
            if rel == "<" and not lhs < bound * W:
                return False
            if rel == "=" and lhs != bound * W:
                return False
        if self._accept is not None:
            return bool(self._accept(counts, head, tail))
        return True

    def _build(self) -> None:
        k, n, sigma = self.k, self.n, self.sigma
        zero = (0,) * len(self.patterns)
        start = []
        for t in range(self._ctx):
            start.append(((t if self._track_head else None), t, zero))
        self._start = start
        layers: list[dict] = [dict.fromkeys(start)]
        for i in range(k - 1, n):
            remaining = n - i - 1
            nxt = {}
            for s in layers[-1]:
                for a in range(sigma):
                    child = self._step(s, a)
                    if child not in nxt and self._feasible(child[2], remaining):
                        nxt[child] = None
            layers.append(nxt)
        # completion counts, backwards; drop dead states
        counts: list[dict] = [None] * len(layers)
        counts[-1] = {s: 1 for s in layers[-1] if self._final(s)}
        for j in range(len(layers) - 2, -1, -1):
            ahead = counts[j + 1]
            cur = {}
            for s in layers[j]:
                total = 0
                for a in range(sigma):
                    total += ahead.get(self._step(s, a), 0)
                if total:
                    cur[s] = total
            counts[j] = cur
            log.debug("layer %d: %d live states", j + k - 1, len(cur))
        self._F = counts  # counts[j] is indexed by prefix length j + k - 1

    # -- queries -------------------------------------------------------------
    def count(self) -> int:
        return sum(self._F[0].values())

    def __len__(self) -> int:
        return self.count()

    @property
    def layer_sizes(self) -> list[int]:
        return [len(f) for f in self._F]

    def _start_word(self, t: int) -> Word:
        out = []
        for _ in range(self.k - 1):
            out.append(t % self.sigma)
            t //= self.sigma
        return tuple(reversed(out))

    def unrank(self, r: int) -> Word:
        """The word of lexicographic rank ``r`` (0-based)."""
        if not 0 <= r < self.count():
            raise IndexError(f"rank {r} out of range for {self.count()} words")
        F0 = self._F[0]
        state = None
        for s in self._start:
            c = F0.get(s, 0)
            if r < c:
                state = s
                break
            r -= c
        word = list(self._start_word(state[1]))
        for j in range(1, len(self._F)):
            layer = self._F[j]
            for a in range(self.sigma):
                child = self._step(state, a)
                c = layer.get(child, 0)
                if r < c:
                    state = child
                    word.append(a)
                    break
                r -= c
        return tuple(word)

    def rank(self, word: Sequence[int]) -> int:
        """Lexicographic rank of an admissible ``word``; ValueError otherwise."""
        word = tuple(word)
        if len(word) != self.n:
            raise LengthError(f"word of length {len(word)}, expected {self.n}")
        k, sigma = self.k, self.sigma
        t = 0
        for a in word[: k - 1]:
            t = t * sigma + a
        r = 0
        F0 = self._F[0]
        state = None
        for s in self._start:
            if s[1] == t:
                state = s
                break
            r += F0.get(s, 0)
        if state not in F0:
            raise ValueError("word is not admissible")
        for j, a in enumerate(word[k - 1 :], start=1):
            layer = self._F[j]
            for b in range(a):
                r += layer.get(self._step(state, b), 0)
            state = self._step(state, a)
            if state not in layer:
                raise ValueError("word is not admissible")
        return r

    def words(self) -> Iterator[Word]:
        """All admissible words in lexicographic order."""
        F = self._F
        sigma = self.sigma
        for s in self._start:
            if s not in F[0]:
                continue
            prefix = list(self._start_word(s[1]))
            stack = [(s, 1, iter(range(sigma)))]
            while stack:
                state, j, it = stack[-1]
                if j == len(F):
                    yield tuple(prefix)
                    stack.pop()
                    if stack:
                        prefix.pop()
                    continue
                for a in it:
                    child = self._step(state, a)
                    if child in F[j]:
                        prefix.append(a)
                        stack.append((child, j + 1, iter(range(sigma))))
                        break
                else:
                    stack.pop()
                    if stack:
                        prefix.pop()

    def final_states(self) -> list[State]:
        """(head, tail, counts) of the admissible words of length n."""
        return list(self._F[-1])

    def sample(self, rng: random.Random) -> Word:
        return self.unrank(rng.randrange(self.count()))


def count_by_length(gamma, n_values: Sequence[int]) -> dict[int, int]:
    return {n: AdmissibleCounter(gamma, n).count() for n in n_values}


def log2_count(count: int) -> float:
    """log2 of a (possibly huge) positive integer; -inf for 0."""
    if count <= 0:
        return -math.inf
    shift = max(0, count.bit_length() - 60)
    return math.log2(count >> shift) + shift

