"""Single-state block encoders: free concatenations of admissible blocks.

The code R_m(Gamma_eps) = B_m(Gamma_eps)^* is realized enumeratively: a
group of ``bits_per_block`` payload bits is read as an integer and
unranked to the codeword of that lexicographic rank.
"""
from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .constraints import ConstraintSet, is_fat, is_relatively_fat, shrink
from .counting import AdmissibleCounter
from .errors import DecodeError, InfeasibleError, LengthError, ScsError
from .measure import to_fraction
from .words import Word, pattern_counts


def min_block_length(k: int, eps) -> int:
    """M_eps = ceil((k-1)/eps); every m > M_eps keeps concatenations in Gamma."""
    eps = to_fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.ceil((k - 1) / eps)


def junction_bound(m: int, ell: int, k: int) -> Fraction:
    """L(m, l) = (l-1)(k-1)/(m l - k + 1): share of windows crossing block seams."""
    return Fraction((ell - 1) * (k - 1), m * ell - k + 1)


# --- exact block-length verification ------------------------------------------

@dataclass(frozen=True)
class BlockLengthReport:
    """Outcome of :func:`verify_block_length`.

    On failure, ``cycle`` is a list of codewords and ``repetitions`` the
    least i such that ``prefix + cycle * i`` (concatenated) leaves Gamma;
    ``limit`` is the constraint's left-hand side frequency of the
    periodic continuation (None for a finite, acyclic witness).
    """

    ok: bool
    m: int
    constraint: int | None = None
    prefix: tuple[Word, ...] = ()
    cycle: tuple[Word, ...] = ()
    repetitions: int = 0
    limit: Fraction | None = None

    def __bool__(self) -> bool:
        return self.ok

    def witness_word(self) -> Word:
        out: list[int] = []
        for w in self.prefix:
            out.extend(w)
        for _ in range(self.repetitions):
            for w in self.cycle:
                out.extend(w)
        return tuple(out)


def _weight(coeffs, counts_full) -> Fraction:
    return sum((coeffs[i] * counts_full[i] for i in range(len(coeffs)) if coeffs[i]), Fraction(0))


def verify_block_length(gamma: ConstraintSet, eps, m: int) -> BlockLengthReport:
    """Decide whether every concatenation of words of B_m(Gamma_eps) lies in B(Gamma).

    For one constraint ``a.mu <= b`` a concatenation of l blocks is fine iff
    ``sum_j (a.c(w_j) - b m) + sum_seams a.J <= -b (k-1)``, with J the
    windows across a seam.  Only the head/tail of each block and its best
    ``a.c(w)`` matter, so this is a longest-path question on the graph of
    (k-1)-tails: a positive cycle or a too-long path is a violation.
    """
    if gamma.shift_invariant:
        raise ValueError("block concatenation is not defined for shift-invariant-only systems")
    k, sigma = gamma.k, gamma.alphabet.size
    if m < k:
        raise LengthError("m must be at least k")
    inner = shrink(gamma, eps)
    counter = AdmissibleCounter(inner, m, track_head=True)
    states = counter.final_states()
    if not states:
        return BlockLengthReport(True, m)
    patterns = counter.patterns
    ctx = sigma ** (k - 1)

    def full_counts(counts):
        out = [0] * gamma.size
        for p, c in zip(patterns, counts):
            out[p] = c
        return out

    # seam counts for (tail, head)
    seam = {}
    for t in range(ctx):
        for h in range(ctx):
            tw = _ctx_word(t, sigma, k)
            hw = _ctx_word(h, sigma, k)
            seam[t, h] = pattern_counts(tw + hw, sigma, k) if k > 1 else [0] * gamma.size

    for ci, c in enumerate(gamma.constraints):
        for a, b, strict in c.upper_forms():
            rep = _check_row(counter, states, full_counts, seam, a, b, strict, m, k, ctx)
            if rep is not None:
                return BlockLengthReport(False, m, ci, *rep)
    return BlockLengthReport(True, m)


def _ctx_word(t: int, sigma: int, k: int) -> Word:
    out = []
    for _ in range(k - 1):
        out.append(t % sigma)
        t //= sigma
    return tuple(reversed(out))


def _check_row(counter, states, full_counts, seam, a, b, strict, m, k, ctx):
    # best block per (head, tail)
    best: dict = {}
    for head, tail, counts in states:
        w = _weight(a, full_counts(counts)) - b * m
        key = (head, tail)
        if key not in best or w > best[key][0]:
            best[key] = (w, counts)
    limit_total = -b * (k - 1)
    # longest-path graph: nodes 0..ctx-1 are tails, arcs carry the block used
    start_arc = {}
    for (h, t), (w, counts) in best.items():
        if t not in start_arc or w > start_arc[t][0]:
            start_arc[t] = (w, (h, t))
    arcs = {}
    for t0 in range(ctx):
        for (h, t), (w, counts) in best.items():
            val = w + _weight(a, seam[t0, h])
            if (t0, t) not in arcs or val > arcs[t0, t][0]:
                arcs[t0, t] = (val, (h, t))
    dist = {t: start_arc[t][0] for t in start_arc}
    pred = {t: None for t in start_arc}
    changed_node = None
    for _ in range(ctx + 1):
        changed_node = None
        for (u, v), (val, _) in arcs.items():
            if u in dist and dist[u] + val > dist.get(v, -math.inf):
                dist[v] = dist[u] + val
                pred[v] = u
                changed_node = v
        if changed_node is None:
            break

    def block_for(key):
        w, counts = best[key]
        head, tail = key
        target = (head, tail, counts)
        sub = AdmissibleCounter(counter.gamma, counter.n, track_head=True,
                                accept=lambda c, h, t: (h, t, c) == target)
        return sub.unrank(0)

    if changed_node is not None:
        # positive cycle: walk predecessors to land on it
        v = changed_node
        for _ in range(ctx + 1):
            v = pred[v]
        cyc = [v]
        u = pred[v]
        while u != v:
            cyc.append(u)
            u = pred[u]
        cyc.reverse()  # node sequence v -> ... in forward order
        nodes = cyc + [cyc[0]]
        keys = [arcs[nodes[i], nodes[i + 1]][1] for i in range(len(cyc))]
        blocks = [block_for(key) for key in keys]
        return _periodic_witness(blocks, a, b, strict, m, k, counter.gamma)
    worst = max(dist.values())
    violated = worst >= limit_total if strict else worst > limit_total
    if not violated:
        return None
    # finite witness: rebuild the path ending at the worst node
    v = max(dist, key=lambda t: dist[t])
    nodes = [v]
    while pred[nodes[-1]] is not None:
        nodes.append(pred[nodes[-1]])
    nodes.reverse()
    keys = [start_arc[nodes[0]][1]] + [arcs[nodes[i], nodes[i + 1]][1] for i in range(len(nodes) - 1)]
    blocks = tuple(block_for(key) for key in keys)
    return (), blocks, 1, None


def _periodic_witness(blocks, a, b, strict, m, k, gamma):
    """Least i with blocks^i outside the row's half-space, and the limit value."""
    sigma = gamma.alphabet.size
    period = tuple(x for w in blocks for x in w)
    L = len(period)
    once = _weight(a, pattern_counts(period, sigma, k))
    wrap = Fraction(0)
    if k > 1:
        seam_word = period[L - (k - 1):] + period[: k - 1]
        wrap = _weight(a, pattern_counts(seam_word, sigma, k))
    # lhs(i) = i*once + (i-1)*wrap, rhs(i) = b*(i*L - k + 1)
    slope = once + wrap - b * L
    offset = -wrap + b * (k - 1)
    # violation: slope*i + offset > 0 (>= 0 when strict); slope > 0 on a positive cycle
    reps = max(1, math.floor(-offset / slope) + 1)
    while reps > 1 and _violates(slope, offset, reps - 1, strict):
        reps -= 1
    while not _violates(slope, offset, reps, strict):
        reps += 1
    limit = (once + wrap) / L
    return (), tuple(blocks), reps, limit


def _violates(slope, offset, i, strict) -> bool:
    v = slope * i + offset
    return v >= 0 if strict else v > 0


# --- block codes -------------------------------------------------------------------

class CodewordList(Sequence):
    """Lazy, lexicographically sorted view of B_m(Gamma_eps)."""

    def __init__(self, counter: AdmissibleCounter):
        self._counter = counter
        self._len = counter.count()

    def __len__(self) -> int:
        return self._len

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(self._len))]
        if i < 0:
            i += self._len
        return self._counter.unrank(i)

    def __iter__(self):
        return self._counter.words()

    def index(self, word, *args) -> int:
        try:
            return self._counter.rank(word)
        except (ValueError, LengthError):
            raise ValueError("not a codeword") from None

    def __contains__(self, word) -> bool:
        try:
            self._counter.rank(word)
            return True
        except (ValueError, LengthError):
            return False


TABLE_LIMIT = 1 << 16


@dataclass(frozen=True, eq=False)
class BlockCode:
    gamma: ConstraintSet
    eps: Fraction
    m: int
    counter: AdmissibleCounter

    @property
    def codewords(self) -> CodewordList:
        return CodewordList(self.counter)

    @property
    def size(self) -> int:
        return self.counter.count()

    @property
    def bits_per_block(self) -> int:
        return self.size.bit_length() - 1

    @property
    def k(self) -> int:
        return self.gamma.k

    @cached_property
    def _table(self) -> tuple[list[Word], dict[Word, int]] | None:
        # lookup tables for the 2^bits_per_block words actually used
        n = 1 << self.bits_per_block
        if n > TABLE_LIMIT:
            return None
        words = [self.counter.unrank(r) for r in range(n)]
        return words, {w: r for r, w in enumerate(words)}

    @cached_property
    def _arrays(self):
        table = self._table
        sigma = self.gamma.alphabet.size
        if table is None or sigma**self.m >= 2**62:
            return None
        words = np.array(table[0], dtype=np.int64).reshape(len(table[0]), self.m)
        keys = words @ (sigma ** np.arange(self.m - 1, -1, -1, dtype=np.int64))
        order = np.argsort(keys)
        return words, keys[order], order

    def unrank(self, r: int) -> Word:
        table = self._table
        if table is not None and 0 <= r < len(table[0]):
            return table[0][r]
        return self.counter.unrank(r)

    def rank(self, word: Sequence[int]) -> int:
        table = self._table
        if table is not None:
            r = table[1].get(tuple(word))
            if r is not None:
                return r
        return self.counter.rank(word)


def build_block_code(gamma: ConstraintSet, eps, m: int, override: bool = False) -> BlockCode:
    """B_m(Gamma_eps) with frozen rank tables.

    Requires m > M_eps or a passing :func:`verify_block_length` unless
    ``override`` is set.
    """
    eps = to_fraction(eps)
    if gamma.shift_invariant:
        raise ScsError("block codes need a system on all measures, not only shift-invariant ones")
    if m < gamma.k:
        raise LengthError(f"block length {m} is shorter than k={gamma.k}")
    if not override:
        if not is_fat(gamma):
            if is_relatively_fat(gamma):
                raise ScsError("block codes for relatively fat (but not fat) systems need "
                               "junction strings, which are not supported")
            raise InfeasibleError("the constraint set is not fat")
        if m <= min_block_length(gamma.k, eps):
            report = verify_block_length(gamma, eps, m)
            if not report:
                raise InfeasibleError(
                    f"block length {m} lets concatenations leave the constraint set "
                    f"(periodic limit {report.limit})")
    counter = AdmissibleCounter(shrink(gamma, eps), m)
    if counter.count() == 0:
        raise InfeasibleError(f"no admissible words of length {m}")
    code = BlockCode(gamma, eps, m, counter)
    if code.bits_per_block == 0:
        raise InfeasibleError(f"only one admissible word of length {m}: no payload capacity")
    return code


def block_rate(code: BlockCode) -> tuple[float, float]:
    """(achieved bits_per_block / m, ceiling log2|B_m| / m)."""
    from .counting import log2_count

    return code.bits_per_block / code.m, log2_count(code.size) / code.m


def bits_to_int(bits: Sequence[int]) -> int:
    v = 0
    for b in bits:
        v = (v << 1) | (1 if b else 0)
    return v


def int_to_bits(v: int, width: int) -> list[int]:
    return [(v >> (width - 1 - i)) & 1 for i in range(width)]


def _table_arrays(code: BlockCode):
    """(codeword matrix, sorted base-sigma keys, ranks by key) or None."""
    return code._arrays


def block_encode(code: BlockCode, payload: Sequence[int]) -> Word:
    p = code.bits_per_block
    if len(payload) % p:
        raise LengthError(f"payload length {len(payload)} is not a multiple of {p}")
    arrays = _table_arrays(code)
    if arrays is not None:
        bits = np.asarray(payload, dtype=np.int64).reshape(-1, p)
        ranks = bits @ (1 << np.arange(p - 1, -1, -1, dtype=np.int64))
        return tuple(arrays[0][ranks].ravel().tolist())
    out: list[int] = []
    for i in range(0, len(payload), p):
        out.extend(code.unrank(bits_to_int(payload[i : i + p])))
    return tuple(out)


def block_decode(code: BlockCode, word: Sequence[int]) -> list[int]:
    m, p = code.m, code.bits_per_block
    word = tuple(word)
    if len(word) % m:
        raise DecodeError(f"length {len(word)} is not a multiple of the block length {m}",
                          offset=len(word) - len(word) % m)
    arrays = _table_arrays(code)
    if arrays is not None and word:
        _, keys, order = arrays
        sigma = code.gamma.alphabet.size
        blocks = np.asarray(word, dtype=np.int64).reshape(-1, m)
        if blocks.min() >= 0 and blocks.max() < sigma:
            wkeys = blocks @ (sigma ** np.arange(m - 1, -1, -1, dtype=np.int64))
            pos = np.minimum(np.searchsorted(keys, wkeys), len(keys) - 1)
            hit = keys[pos] == wkeys
            if hit.all():
                ranks = order[pos]
                shifts = np.arange(p - 1, -1, -1, dtype=np.int64)
                return ((ranks[:, None] >> shifts) & 1).ravel().tolist()
    bits: list[int] = []
    for i in range(0, len(word), m):
        block = word[i : i + m]
        try:
            r = code.rank(block)
        except (ValueError, LengthError):
            raise DecodeError("block is not a codeword", offset=i) from None
        if r >> p:
            raise DecodeError(f"codeword rank {r} is outside the {p}-bit input range", offset=i)
        bits.extend(int_to_bits(r, p))
    return bits
