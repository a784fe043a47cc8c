"""Labeled digraphs, measure multigraphs and the algorithms run on them.

Two edge-label conventions coexist.  De Bruijn-style presentations label
the edge ``a_0..a_{k-2} -> a_1..a_{k-1}`` by the incoming symbol ``a_{k-1}``
(``"incoming"``); essential graphs use the first symbol ``a_0``
(``"first"``).  The convention is a field of every graph.
"""
from __future__ import annotations

from collections import defaultdict
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import EulerianError
from .measure import Measure
from .words import Alphabet, Word, pattern_from_index

INCOMING, FIRST = "incoming", "first"

Edge = tuple[int, int, Word]


@dataclass(frozen=True, eq=False)
class LabeledDigraph:
    """Directed multigraph with word labels on edges.

    ``vertices`` holds hashable vertex names (words, typically); edges are
    ``(src, dst, label)`` with src/dst indices into ``vertices``.
    """

    vertices: tuple[Hashable, ...]
    edges: tuple[Edge, ...]
    label_convention: str = INCOMING

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        edges = tuple((int(s), int(d), tuple(lab)) for s, d, lab in self.edges)
        object.__setattr__(self, "edges", edges)
        n = len(self.vertices)
        lengths = set()
        for s, d, lab in edges:
            if not (0 <= s < n and 0 <= d < n):
                raise ValueError(f"edge ({s}, {d}) has an endpoint outside 0..{n - 1}")
            lengths.add(len(lab))
        if len(lengths) > 1:
            raise ValueError(f"edge labels have mixed lengths {sorted(lengths)}")
        if 0 in lengths:
            raise ValueError("edge labels must be non-empty")

    def __eq__(self, other):
        if not isinstance(other, LabeledDigraph):
            return NotImplemented
        return (self.vertices == other.vertices
                and sorted(self.edges) == sorted(other.edges)
                and self.label_convention == other.label_convention)

    def __hash__(self):
        return hash((self.vertices, tuple(sorted(self.edges))))

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def label_length(self) -> int:
        return len(self.edges[0][2]) if self.edges else 0

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def out_edges(self) -> list[list[int]]:
        out = [[] for _ in self.vertices]
        for e, (s, _, _) in enumerate(self.edges):
            out[s].append(e)
        return out

    @cached_property
    def in_edges(self) -> list[list[int]]:
        inc = [[] for _ in self.vertices]
        for e, (_, d, _) in enumerate(self.edges):
            inc[d].append(e)
        return inc

    def out_degree(self, v: int) -> int:
        return len(self.out_edges[v])

    def adjacency_matrix(self) -> np.ndarray:
        """Integer matrix with A[u, v] = number of edges u -> v."""
        n = len(self.vertices)
        A = np.zeros((n, n), dtype=np.int64)
        for s, d, _ in self.edges:
            A[s, d] += 1
        return A

    @property
    def is_deterministic(self) -> bool:
        for v, out in enumerate(self.out_edges):
            labels = [self.edges[e][2] for e in out]
            if len(set(labels)) != len(labels):
                return False
        return True

    def induced(self, keep: Iterable[int]) -> LabeledDigraph:
        """Subgraph induced on ``keep`` (vertex indices), order preserved."""
        keep = sorted(set(keep))
        remap = {v: i for i, v in enumerate(keep)}
        edges = [(remap[s], remap[d], lab) for s, d, lab in self.edges
                 if s in remap and d in remap]
        return LabeledDigraph(tuple(self.vertices[v] for v in keep), tuple(edges),
                              self.label_convention)

    def without_isolated(self) -> LabeledDigraph:
        touched = {s for s, _, _ in self.edges} | {d for _, d, _ in self.edges}
        return self.induced(touched)

    def power(self, q: int) -> LabeledDigraph:
        """G^q: one edge per path of q edges, labelled by the concatenation."""
        if q < 1:
            raise ValueError("q must be positive")
        paths = [(s, d, lab) for s, d, lab in self.edges]
        for _ in range(q - 1):
            nxt = []
            for s, d, lab in paths:
                for e in self.out_edges[d]:
                    _, d2, lab2 = self.edges[e]
                    nxt.append((s, d2, lab + lab2))
            paths = nxt
        paths.sort(key=lambda e: (e[0], e[2], e[1]))
        return LabeledDigraph(self.vertices, tuple(paths), self.label_convention)

    def successors(self, v: int) -> list[int]:
        return [self.edges[e][1] for e in self.out_edges[v]]


def debruijn(alphabet: Alphabet | int, order: int, convention: str = INCOMING) -> LabeledDigraph:
    """Full De Bruijn graph on Sigma^order.

    The edge for pattern ``v a`` is labelled ``a`` (``"incoming"``) or by the
    first symbol of ``v a`` (``"first"``).
    """
    sigma = alphabet if isinstance(alphabet, int) else alphabet.size
    verts = list(product(range(sigma), repeat=order))
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for i, v in enumerate(verts):
        for a in range(sigma):
            pattern = v + (a,)
            w = pattern[1:]
            label = (pattern[0],) if convention == FIRST else (a,)
            edges.append((i, index[w], label))
    return LabeledDigraph(tuple(verts), tuple(edges), convention)


def strongly_connected_components(G: LabeledDigraph) -> list[list[int]]:
    """SCC partition, each component sorted, components ordered by min vertex."""
    n = G.num_vertices
    if n == 0:
        return []
    _, labels = connected_components(sparse_adjacency(G), directed=True, connection="strong")
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def cyclic_components(G: LabeledDigraph) -> list[list[int]]:
    """The SCCs that carry at least one cycle, in one pass over the edges."""
    comps = strongly_connected_components(G)
    where = [0] * G.num_vertices
    for i, comp in enumerate(comps):
        for v in comp:
            where[v] = i
    cyclic = {where[s] for s, d, _ in G.edges if where[s] == where[d]}
    return [c for i, c in enumerate(comps) if i in cyclic]


def sparse_adjacency(G: LabeledDigraph) -> csr_matrix:
    n = G.num_vertices
    rows = [s for s, _, _ in G.edges]
    cols = [d for _, d, _ in G.edges]
    return csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))


def is_strongly_connected(G: LabeledDigraph) -> bool:
    return G.num_vertices > 0 and len(strongly_connected_components(G)) == 1


# --- measure multigraphs ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class MultiDigraph:
    """Multigraph on Sigma^{k-1} with parallel edges per pattern of Sigma^k.

    ``multiplicity`` maps pattern index -> number of parallel edges
    ``a_0..a_{k-2} -> a_1..a_{k-1}``.  Only patterns with positive
    multiplicity are stored; vertices with no edge are absent.
    """

    alphabet: Alphabet
    k: int
    multiplicity: dict
    scale: int = 1   # n*M: edges per unit of measure

    @property
    def sigma(self) -> int:
        return self.alphabet.size

    def src(self, pattern: int) -> int:
        return pattern // self.sigma

    def dst(self, pattern: int) -> int:
        return pattern % (self.sigma ** (self.k - 1))

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        vs = set()
        for p in self.multiplicity:
            vs.add(self.src(p))
            vs.add(self.dst(p))
        return tuple(sorted(vs))

    def vertex_word(self, v: int) -> Word:
        return pattern_from_index(v, self.sigma, self.k - 1)

    @property
    def num_edges(self) -> int:
        return sum(self.multiplicity.values())

    def degrees(self) -> tuple[dict, dict]:
        out, inc = defaultdict(int), defaultdict(int)
        for p, c in self.multiplicity.items():
            out[self.src(p)] += c
            inc[self.dst(p)] += c
        return out, inc

    def is_balanced(self) -> bool:
        out, inc = self.degrees()
        return all(out[v] == inc[v] for v in self.vertices)

    def to_labeled(self, convention: str = FIRST, collapse: bool = False) -> LabeledDigraph:
        """Labelled graph on the vertex words; ``collapse`` merges parallel edges."""
        verts = self.vertices
        index = {v: i for i, v in enumerate(verts)}
        edges = []
        for p in sorted(self.multiplicity):
            word = pattern_from_index(p, self.sigma, self.k)
            label = (word[0],) if convention == FIRST else (word[-1],)
            copies = 1 if collapse else self.multiplicity[p]
            edges += [(index[self.src(p)], index[self.dst(p)], label)] * copies
        return LabeledDigraph(tuple(self.vertex_word(v) for v in verts), tuple(edges), convention)

    def is_strongly_connected(self) -> bool:
        return bool(self.multiplicity) and is_strongly_connected(self.to_labeled(collapse=True))


def measure_graph(eta: Measure, n: int = 1) -> MultiDigraph:
    """n G_eta: n*M*eta(phi) parallel edges per pattern, M the common denominator."""
    if n < 1:
        raise ValueError("n must be positive")
    M = eta.denominator
    mult = {}
    for p, v in enumerate(eta.values):
        if v:
            c = v * n * M
            assert c.denominator == 1
            mult[p] = int(c)
    return MultiDigraph(eta.alphabet, eta.k, mult, n * M)


def has_word(eta: Measure) -> bool:
    """B({eta}) is non-empty: eta shift invariant with strongly connected G_eta."""
    if not eta.is_shift_invariant():
        return False
    return measure_graph(eta, 1).is_strongly_connected()


def eulerian_cycle(G: MultiDigraph, start_vertex: int | None = None,
                   forced_prefix: Sequence[int] | None = None) -> list[int]:
    """Eulerian circuit of ``G`` as a list of pattern indices (edges).

    With ``forced_prefix`` (a path given as patterns) the returned circuit
    starts with that path: the prefix is removed and the rest is covered by
    an Eulerian path from the prefix's end back to ``start_vertex``.
    Edge choice is always the smallest available pattern index.
    """
    remaining = dict(G.multiplicity)
    if not remaining:
        raise EulerianError("graph has no edges")
    if start_vertex is None:
        start_vertex = G.src(forced_prefix[0]) if forced_prefix else min(G.vertices)
    prefix = list(forced_prefix or [])
    cur = start_vertex
    for p in prefix:
        if G.src(p) != cur:
            raise EulerianError("forced prefix is not a path", vertex=cur)
        if remaining.get(p, 0) <= 0:
            raise EulerianError(f"forced prefix uses pattern {p} more often than available",
                                vertex=cur)
        remaining[p] -= 1
        if remaining[p] == 0:
            del remaining[p]
        cur = G.dst(p)
    # degree conditions for an Eulerian path cur -> start_vertex
    out, inc = defaultdict(int), defaultdict(int)
    for p, c in remaining.items():
        out[G.src(p)] += c
        inc[G.dst(p)] += c
    for v in set(out) | set(inc) | {cur, start_vertex}:
        expected = (v == cur) - (v == start_vertex)
        if out[v] - inc[v] != expected:
            raise EulerianError(
                f"vertex {G.alphabet.format(G.vertex_word(v)) or 'λ'} has out-degree {out[v]} "
                f"and in-degree {inc[v]}", vertex=v)
    if not remaining:
        return prefix
    adj: dict[int, list[int]] = defaultdict(list)
    for p in sorted(remaining):
        adj[G.src(p)].append(p)
    ptr = defaultdict(int)
    stack: list[tuple[int, int | None]] = [(cur, None)]
    circuit: list[int] = []
    while stack:
        v, via = stack[-1]
        lst = adj[v]
        while ptr[v] < len(lst) and remaining[lst[ptr[v]]] == 0:
            ptr[v] += 1
        if ptr[v] < len(lst):
            p = lst[ptr[v]]
            remaining[p] -= 1
            stack.append((G.dst(p), p))
        else:
            stack.pop()
            if via is not None:
                circuit.append(via)
    circuit.reverse()
    left = [p for p, c in remaining.items() if c]
    if left:
        v = G.src(min(left))
        raise EulerianError(
            f"graph is not connected: edges at {G.alphabet.format(G.vertex_word(v))} unreachable",
            vertex=v)
    return prefix + circuit


def word_from_cycle(patterns: Sequence[int], sigma: int, k: int) -> Word:
    """Word whose sliding k-windows are exactly ``patterns`` (consecutive)."""
    if not patterns:
        return ()
    word = list(pattern_from_index(patterns[0], sigma, k))
    for p in patterns[1:]:
        word.append(p % sigma)
    return tuple(word)


def word_from_measure(eta: Measure, n: int = 1) -> Word:
    """A word with k-tuple frequency exactly ``eta`` (read off n G_eta)."""
    G = measure_graph(eta, n)
    if not eta.is_shift_invariant():
        raise EulerianError("measure is not shift invariant")
    cycle = eulerian_cycle(G)
    return word_from_cycle(cycle, eta.alphabet.size, eta.k)


# --- languages ----------------------------------------------------------------

def language_member(G: LabeledDigraph, word: Sequence[int]) -> bool:
    """Is ``word`` a prefix of the label sequence of some path in G?"""
    word = tuple(word)
    if not word:
        return True
    q = G.label_length
    if q == 0:
        return False
    current = set(range(G.num_vertices))
    for i in range(0, len(word), q):
        block = word[i : i + q]
        nxt = set()
        for v in current:
            for e in G.out_edges[v]:
                _, d, lab = G.edges[e]
                if lab[: len(block)] == block:
                    nxt.add(d)
        if not nxt:
            return False
        current = nxt
    return True


def _label_pairs(G: LabeledDigraph) -> set:
    by_label = defaultdict(list)
    for e, (_, _, lab) in enumerate(G.edges):
        by_label[lab].append(e)
    return {(e, f) for group in by_label.values() for e in group for f in group}


def _extend_pairs(G: LabeledDigraph, pairs: set, current: set, forward: bool) -> set:
    """Pairs that follow (forward) / precede (backward) some pair of ``current``."""
    edges = G.edges
    if forward:
        ends = {(edges[e][1], edges[f][1]) for e, f in current}
        return {(e, f) for e, f in pairs if (edges[e][0], edges[f][0]) in ends}
    starts = {(edges[e][0], edges[f][0]) for e, f in current}
    return {(e, f) for e, f in pairs if (edges[e][1], edges[f][1]) in starts}


def _sync_pairs(G: LabeledDigraph, m: int, a: int) -> set:
    """Same-label edge pairs with >= m synchronised predecessors and >= a successors."""
    pairs = _label_pairs(G)
    ahead = set(pairs)
    for _ in range(m):
        ahead = _extend_pairs(G, pairs, ahead, True)
    behind = set(pairs)
    for _ in range(a):
        behind = _extend_pairs(G, pairs, behind, False)
    return ahead & behind


def is_definite(G: LabeledDigraph, m: int, a: int, key: Sequence | None = None) -> bool:
    """(m, a)-definiteness.

    Every two paths of ``m + a + 1`` edges with equal label sequences share
    their edge at position ``m`` (0-based).  With ``key`` (one value per
    edge) the paths need only agree on the key of that edge.
    """
    if key is None:
        return not any(e != f for e, f in _sync_pairs(G, m, a))
    return not any(key[e] != key[f] for e, f in _sync_pairs(G, m, a))


def anticipation(G: LabeledDigraph, bound: int = 64) -> int | None:
    """Least a such that paths from a common state with equal labels over
    a+1 edges share their first edge; None if no a <= bound works."""
    pairs = _label_pairs(G)
    forks = {(e, f) for e, f in pairs if e != f and G.edges[e][0] == G.edges[f][0]}
    behind = set(pairs)
    for a in range(bound + 1):
        if not forks & behind:
            return a
        behind = _extend_pairs(G, pairs, behind, False)
    return None


def follower_merge(G: LabeledDigraph) -> tuple[LabeledDigraph, list[int]]:
    """Merge vertices with equal follower sets (deterministic graphs).

    Returns the quotient graph and the class index of every original vertex.
    Classes are numbered by their smallest member.
    """
    if not G.is_deterministic:
        raise ValueError("follower-set merging needs a deterministic graph")
    n = G.num_vertices
    block = [0] * n
    sigs = {}
    for v in range(n):
        key = tuple(sorted(G.edges[e][2] for e in G.out_edges[v]))
        block[v] = sigs.setdefault(key, len(sigs))
    while True:
        sigs = {}
        new = [0] * n
        for v in range(n):
            key = (block[v],) + tuple(sorted((G.edges[e][2], block[G.edges[e][1]])
                                             for e in G.out_edges[v]))
            new[v] = sigs.setdefault(key, len(sigs))
        stable = len(set(new)) == len(set(block))
        block = new
        if stable:
            break
    # renumber by smallest member
    order = {}
    for v in range(n):
        order.setdefault(block[v], len(order))
    cls = [order[b] for b in block]
    reps = {}
    for v in range(n):
        reps.setdefault(cls[v], v)
    edges = []
    for c in range(len(reps)):
        v = reps[c]
        for e in G.out_edges[v]:
            _, d, lab = G.edges[e]
            edges.append((c, cls[d], lab))
    names = tuple(G.vertices[reps[c]] for c in range(len(reps)))
    return LabeledDigraph(names, tuple(edges), G.label_convention), cls


def to_dot(G: LabeledDigraph, alphabet: Alphabet | None = None, name: str = "G",
           edge_notes: Sequence[str] | None = None) -> str:
    """Graphviz text with vertices and edges in stored order."""

    def fmt(word) -> str:
        if alphabet is not None and isinstance(word, tuple):
            return alphabet.format(word) or "λ"
        if isinstance(word, tuple):
            return "".join(map(str, word)) or "λ"
        return str(word)

    lines = [f"digraph {name} {{"]
    for i, v in enumerate(G.vertices):
        lines.append(f'  v{i} [label="{fmt(v)}"];')
    for j, (s, d, lab) in enumerate(G.edges):
        text = fmt(lab)
        if edge_notes is not None and edge_notes[j]:
            text += f"\\n{edge_notes[j]}"
        lines.append(f'  v{s} -> v{d} [label="{text}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
