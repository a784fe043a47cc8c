"""Sliding-window systems N_m(Gamma) and rate p:q finite-state encoders.

Pipeline: presentation of N_m on Sigma^{m-1} -> q-th power -> irreducible
core -> follower-set merge -> Franaszek approximate eigenvector -> x-consistent
out-splitting -> 2^p tagged edges per state.  Decoding is sliding-block:
each q-block's tag is a function of a bounded window of blocks.
"""
from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .block import bits_to_int, int_to_bits
from .capacity import graph_capacity
from .constraints import ConstraintSet
from .counting import AdmissibleCounter
from .errors import DecodeError, InfeasibleError, LengthError, RateInfeasibleError, ScsError
from .graphs import (INCOMING, LabeledDigraph, anticipation, cyclic_components, follower_merge,
                     is_definite)
from .words import Word

log = logging.getLogger(__name__)


def containment_bound(gamma_or_k, eps, m: int) -> Fraction:
    """N_eps = (2m-2)(m-k)/eps + k - 1."""
    k = gamma_or_k if isinstance(gamma_or_k, int) else gamma_or_k.k
    eps = Fraction(eps) if not isinstance(eps, str) else Fraction(eps)
    return Fraction((2 * m - 2) * (m - k)) / eps + k - 1


# --- window systems ------------------------------------------------------------

def best_component(G: LabeledDigraph) -> list[int]:
    """The SCC of largest spectral radius (ties: fewer vertices, then smallest)."""
    best, best_key = None, None
    for comp in cyclic_components(G):
        cap = graph_capacity(G.induced(comp))
        key = (-round(cap, 12), len(comp), comp[0])
        if best_key is None or key < best_key:
            best, best_key = comp, key
    if best is None:
        raise InfeasibleError("the graph has no cycle")
    return best


@dataclass(frozen=True, eq=False)
class WindowSystem:
    """N_m(Gamma): words all of whose length-m windows are admissible."""

    gamma: ConstraintSet
    m: int
    allowed_windows: frozenset
    full_presentation: LabeledDigraph
    presentation: LabeledDigraph

    @property
    def sigma(self) -> int:
        return self.gamma.alphabet.size

    def contains(self, word: Sequence[int]) -> bool:
        word = tuple(word)
        m = self.m
        return all(word[i : i + m] in self.allowed_windows for i in range(len(word) - m + 1))

    @cached_property
    def tree_presentation(self) -> LabeledDigraph:
        """Presentation on all words of length < m rooted at the empty word."""
        sigma, m = self.sigma, self.m
        verts: list[Word] = [()]
        frontier = [()]
        for _ in range(m - 1):
            frontier = [w + (a,) for w in frontier for a in range(sigma)]
            verts += frontier
        index = {v: i for i, v in enumerate(verts)}
        edges = []
        for v in verts:
            for a in range(sigma):
                if len(v) < m - 1:
                    edges.append((index[v], index[v + (a,)], (a,)))
                elif v + (a,) in self.allowed_windows:
                    edges.append((index[v], index[(v + (a,))[1:]], (a,)))
        return LabeledDigraph(tuple(verts), tuple(edges), INCOMING)

    def tree_member(self, word: Sequence[int]) -> bool:
        """Walk the tree presentation from the root (deterministic)."""
        G = self.tree_presentation
        v = 0
        for a in word:
            nxt = [G.edges[e][1] for e in G.out_edges[v] if G.edges[e][2] == (a,)]
            if not nxt:
                return False
            v = nxt[0]
        return True

    def random_word(self, n: int, rng) -> Word:
        """A word of length n generated by a random walk on the core."""
        G = self.presentation
        v = rng.randrange(G.num_vertices)
        word = list(G.vertices[v])
        while len(word) < n:
            out = G.out_edges[v]
            e = out[rng.randrange(len(out))]
            word.append(G.edges[e][2][0])
            v = G.edges[e][1]
        return tuple(word[:n]) if n >= len(G.vertices[0]) else tuple(word[-n:])


def build_window_system(gamma: ConstraintSet, m: int) -> WindowSystem:
    if m < gamma.k:
        raise LengthError(f"window length {m} is shorter than k={gamma.k}")
    counter = AdmissibleCounter(gamma, m)
    allowed = frozenset(counter.words())
    if not allowed:
        raise InfeasibleError(f"no admissible windows of length {m}")
    sigma = gamma.alphabet.size
    verts = list(AdmissibleCounter(ConstraintSet.simplex(gamma.alphabet, 1), m - 1).words()) \
        if m > 1 else [()]
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for v in verts:
        for a in range(sigma):
            w = v + (a,)
            if w in allowed:
                edges.append((index[v], index[w[1:]], (a,)))
    full = LabeledDigraph(tuple(verts), tuple(edges), INCOMING)
    core = full.induced(best_component(full))
    return WindowSystem(gamma, m, allowed, full, core)


# --- approximate eigenvectors and splitting ------------------------------------------

def franaszek_iterate(A: np.ndarray, n: int, start: np.ndarray) -> np.ndarray:
    """Largest x <= start with A x >= n x (componentwise), integers."""
    x = start.astype(object)
    Ao = A.astype(object)
    while True:
        y = np.minimum(x, (Ao.dot(x)) // n)
        if np.array_equal(y, x):
            return x
        x = y


def franaszek_vector(G: LabeledDigraph, p: int, q: int, max_scale: int = 2**24,
                     powered: bool = False) -> np.ndarray:
    """Non-zero integer x with A^q x >= 2^p x.

    ``G`` is the graph itself (A = its adjacency) or, with ``powered``,
    already its q-th power.  Raises :class:`RateInfeasibleError` when the
    iteration only reaches zero.
    """
    A = G.adjacency_matrix() if powered else G.power(q).adjacency_matrix()
    n = 2**p
    scale = 1
    while scale <= max_scale:
        x = franaszek_iterate(A, n, np.full(G.num_vertices, scale, dtype=object))
        if any(v > 0 for v in x):
            return x
        scale *= 2
    raise RateInfeasibleError(f"no approximate eigenvector for rate {p}/{q} up to scale {max_scale}")


def certificate_holds(A: np.ndarray, x, n: int, q: int = 1) -> bool:
    """Exact integer check of A^q x >= n x."""
    Ao = np.asarray(A).astype(object)
    y = np.asarray(x, dtype=object)
    for _ in range(q):
        y = Ao.dot(y)
    return all(a >= n * b for a, b in zip(y, x))


def _balanced_subset(weights: list[int], n: int, total_cap: int) -> list[int] | None:
    """Indices whose weight sum S has S % n == 0 and 0 < S < total_cap, S near half."""
    reach = {0: ()}
    for i, w in enumerate(weights):
        nxt = dict(reach)
        for s, subset in reach.items():
            t = s + w
            if t not in nxt:
                nxt[t] = subset + (i,)
        reach = nxt
    goal = total_cap / 2
    cands = [s for s in reach if s and s % n == 0 and s < total_cap]
    if not cands:
        return None
    best = min(cands, key=lambda s: (abs(s - goal), s))
    return list(reach[best])


def state_split_round(G: LabeledDigraph, x, n: int):
    """One x-consistent out-splitting round; returns (G', x') or None when
    every state already has out-degree >= n."""
    if all(G.out_degree(v) >= n for v in range(G.num_vertices)):
        return None
    x = list(x)
    order = sorted(range(G.num_vertices), key=lambda v: (-x[v], v))
    for v in order:
        succ_w = [x[G.edges[e][1]] for e in G.out_edges[v]]
        if not any(w < x[v] for w in succ_w):
            continue
        subset = _balanced_subset(succ_w, n, n * x[v])
        if subset is None:
            continue
        out = G.out_edges[v]
        part1 = {out[i] for i in subset}
        x1 = sum(succ_w[i] for i in subset) // n
        return _split(G, x, v, part1, x1)
    raise ScsError("state splitting stalled: no vertex admits an x-consistent split")


def _split(G: LabeledDigraph, x: list, v: int, part1: set, x1: int):
    """Replace v by v' (edges part1, weight x1) and v'' (the rest)."""
    nv = G.num_vertices
    new_v = nv  # v keeps its index for the first part
    edges = []
    for e, (s, d, lab) in enumerate(G.edges):
        srcs = [s] if s != v else [v if e in part1 else new_v]
        dsts = [d] if d != v else [v, new_v]
        for s2 in srcs:
            for d2 in dsts:
                edges.append((s2, d2, lab))
    names = G.vertices + ((G.vertices[v], "split", nv),)
    x2 = list(x) + [x[v] - x1]
    x2[v] = x1
    return LabeledDigraph(names, tuple(edges), G.label_convention), x2


# --- encoders --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Encoder:
    """Rate p:q encoder: ``transitions[s][tag] = (label, next_state)``.

    The decoder recovers the tag of block j from blocks j-memory..j+lookahead
    (sliding window); the first ``memory`` blocks use the known start state.
    """

    p: int
    q: int
    m: int
    alphabet_size: int
    transitions: tuple
    anticipation: int
    memory: int
    lookahead: int
    start: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def num_states(self) -> int:
        return len(self.transitions)

    @property
    def num_edges(self) -> int:
        return sum(len(t) for t in self.transitions)

    @property
    def flush_blocks(self) -> int:
        return self.lookahead

    @property
    def rate(self) -> Fraction:
        return Fraction(self.p, self.q)

    @cached_property
    def graph(self) -> LabeledDigraph:
        edges = [(s, d, lab) for s, row in enumerate(self.transitions) for lab, d in row]
        return LabeledDigraph(tuple(range(self.num_states)), tuple(edges), INCOMING)

    @cached_property
    def edge_tags(self) -> list[int]:
        return [tag for row in self.transitions for tag in range(len(row))]

    @cached_property
    def _window_tag(self):
        @lru_cache(maxsize=1 << 16)
        def lookup(window, pos, from_start):
            return _decode_window(self, window, pos, from_start)

        return lookup


def build_sliding_encoder(gamma: ConstraintSet, m: int, p: int, q: int,
                          check_certificate: bool = True, max_window: int = 16) -> Encoder:
    """Rate p:q encoder whose outputs lie in N_m(gamma)."""
    ws = build_window_system(gamma, m)
    cap = graph_capacity(ws.presentation)
    if cap * q < p - 1e-12:
        raise RateInfeasibleError(
            f"rate {p}/{q} exceeds the presentation capacity {cap:.6f}")
    n = 2**p
    Gq = ws.presentation.power(q)
    Gq = Gq.induced(best_component(Gq))
    merged, _ = follower_merge(Gq)
    try:
        x = franaszek_vector(merged, p, q, powered=True)
    except RateInfeasibleError:
        raise RateInfeasibleError(f"no approximate eigenvector for rate {p}/{q}") from None
    A_merged = merged.adjacency_matrix()
    # keep a sink component of the positive part
    support = [v for v in range(merged.num_vertices) if x[v] > 0]
    sub = merged.induced(support)
    xs = [x[v] for v in support]
    comps = cyclic_components(sub)
    sink = None
    for comp in comps:
        members = set(comp)
        if all(d in members for s, d, _ in sub.edges if s in members):
            sink = comp
            break
    if sink is None:
        raise ScsError("approximate eigenvector has no closed positive component")
    G = sub.induced(sink)
    xv = [int(xs[v]) for v in sink]
    rounds = 0
    while True:
        res = state_split_round(G, xv, n)
        if res is None:
            break
        G, xv = res
        rounds += 1
        if check_certificate and not certificate_holds(G.adjacency_matrix(), xv, n):
            raise ScsError(f"approximate eigenvector lost after split round {rounds}")
    # exactly n edges per state, then the part reachable from state 0
    rows = []
    for v in range(G.num_vertices):
        out = sorted((G.edges[e][2], G.edges[e][1]) for e in G.out_edges[v])
        rows.append(out[:n])
    seen, stack = {0}, [0]
    while stack:
        v = stack.pop()
        for _, d in rows[v]:
            if d not in seen:
                seen.add(d)
                stack.append(d)
    keep = sorted(seen)
    remap = {v: i for i, v in enumerate(keep)}
    transitions = tuple(tuple((lab, remap[d]) for lab, d in rows[v]) for v in keep)
    enc_graph = LabeledDigraph(tuple(range(len(keep))),
                               tuple((s, d, lab) for s, row in enumerate(transitions)
                                     for lab, d in row), INCOMING)
    a = anticipation(enc_graph)
    if a is None:
        raise ScsError("encoder has unbounded anticipation")
    tags = [t for row in transitions for t in range(len(row))]
    memory = lookahead = None
    for w in range(a + 1, max_window + 1):
        for la in range(a, w):
            if is_definite(enc_graph, w - 1 - la, la, key=tags):
                memory, lookahead = w - 1 - la, la
                break
        if memory is not None:
            break
    if memory is None:
        raise ScsError(f"no sliding-block decoder with a window of at most {max_window} blocks")
    stats = {
        "presentation_vertices": ws.presentation.num_vertices,
        "presentation_capacity": cap,
        "power_core_vertices": Gq.num_vertices,
        "merged_vertices": merged.num_vertices,
        "eigenvector": [int(v) for v in x],
        "merged_certificate": certificate_holds(A_merged, x, n),
        "split_rounds": rounds,
        "states_before_pruning": G.num_vertices,
    }
    return Encoder(p, q, m, gamma.alphabet.size, transitions, a, memory, lookahead, 0, stats)


def lifted_certificate(gamma: ConstraintSet, m: int, p: int, q: int):
    """(A, x) for the N_m presentation with A^q x >= 2^p x, x pulled back
    from the merged power graph through the follower-set classes."""
    ws = build_window_system(gamma, m)
    Gq = ws.presentation.power(q)
    core = best_component(Gq)
    merged, cls = follower_merge(Gq.induced(core))
    xm = franaszek_vector(merged, p, q, powered=True)
    x = np.zeros(ws.presentation.num_vertices, dtype=object)
    for i, v in enumerate(core):
        x[v] = xm[cls[i]]
    return ws.presentation.adjacency_matrix(), x


def encoder_encode(E: Encoder, payload: Sequence[int]) -> Word:
    """Encode p-bit groups from the start state, then flush with tag-0 edges."""
    if len(payload) % E.p:
        raise LengthError(f"payload length {len(payload)} is not a multiple of p={E.p}")
    state = E.start
    out: list[int] = []
    for i in range(0, len(payload), E.p):
        lab, state = E.transitions[state][bits_to_int(payload[i : i + E.p])]
        out.extend(lab)
    if payload:
        for _ in range(E.flush_blocks):
            lab, state = E.transitions[state][0]
            out.extend(lab)
    return tuple(out)


def _decode_window(E: Encoder, labels: tuple, pos: int, from_start: bool) -> int | None:
    """Tag of the edge at ``pos`` on every path reading ``labels``."""
    G = E.graph
    tags = E.edge_tags
    layers = []
    allowed_src = {E.start} if from_start else None
    for lab in labels:
        cur = [e for e, (s, _, l2) in enumerate(G.edges)
               if l2 == lab and (allowed_src is None or s in allowed_src)]
        if not cur:
            return None
        layers.append(cur)
        allowed_src = {G.edges[e][1] for e in cur}
    for i in range(len(layers) - 2, -1, -1):
        nxt_src = {G.edges[e][0] for e in layers[i + 1]}
        layers[i] = [e for e in layers[i] if G.edges[e][1] in nxt_src]
        if not layers[i]:
            return None
    found = {tags[e] for e in layers[pos]}
    return found.pop() if len(found) == 1 else None


def encoder_decode(E: Encoder, word: Sequence[int]) -> list[int]:
    """Sliding-block decoding; the trailing flush blocks carry no payload."""
    word = tuple(word)
    q = E.q
    if len(word) % q:
        raise DecodeError(f"length {len(word)} is not a multiple of q={q}",
                          offset=len(word) - len(word) % q)
    blocks = [word[i : i + q] for i in range(0, len(word), q)]
    if not blocks:
        return []
    total = len(blocks) - E.flush_blocks
    if total < 0:
        raise DecodeError("stream is shorter than the flush tail", offset=0)
    cached = E._window_tag
    bits: list[int] = []
    for j in range(total):
        lo = max(0, j - E.memory)
        window = tuple(blocks[lo : j + E.lookahead + 1])
        tag = cached(window, j - lo, j < E.memory)
        if tag is None:
            raise DecodeError("no encoder path reads this window", offset=j * q)
        bits.extend(int_to_bits(tag, E.p))
    return bits
