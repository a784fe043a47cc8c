"""Essential graphs, containing capacity and prefix completion.

The essential part ess(Gamma) holds the measures of Gamma that have a
word: rational, shift invariant, with a strongly connected measure graph.
G_ess is the union of their supports.  It is found without enumerating
supports: the largest support reachable inside a pattern set is computed by
one margin LP per pattern; if its pattern graph is strongly connected it
belongs to G_ess (the average of the maximizers is a witness), otherwise
each strongly connected piece is searched again on its own.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .capacity import capacity_scs, graph_capacity
from .constraints import ConstraintSet, _max_margin, _region
from .errors import NotInLanguageError, ScsError
from .graphs import (FIRST, LabeledDigraph, eulerian_cycle, language_member, measure_graph,
                     strongly_connected_components, to_dot, word_from_cycle, word_from_measure)
from .measure import Measure, average
from .words import Word, pattern_counts, pattern_from_index, pattern_index

DEFAULT_PATTERN_BOUND = 4096


@dataclass(frozen=True, eq=False)
class EssentialComponent:
    patterns: tuple[int, ...]
    witness: Measure


@dataclass(frozen=True, eq=False)
class EssentialGraph:
    """G_ess(Gamma) with one witness measure per edge."""

    gamma: ConstraintSet
    graph: LabeledDigraph
    edge_patterns: tuple[int, ...]
    witnesses: tuple[Measure, ...]
    components: tuple[EssentialComponent, ...]

    @property
    def patterns(self) -> frozenset[int]:
        return frozenset(self.edge_patterns)

    def witness_for(self, pattern: int) -> Measure:
        return self.witnesses[self.edge_patterns.index(pattern)]

    def is_empty(self) -> bool:
        return not self.edge_patterns

    def to_dot(self) -> str:
        notes = []
        for w in self.witnesses:
            comp = next(i for i, c in enumerate(self.components) if c.witness is w)
            notes.append(f"w{comp}")
        text = to_dot(self.graph, self.gamma.alphabet, name="G_ess", edge_notes=notes)
        lines = text.rstrip("\n").split("\n")
        comments = [f"  // w{i} = {c.witness.format()}" for i, c in enumerate(self.components)]
        return "\n".join(lines[:-1] + comments + lines[-1:]) + "\n"


def _positive_point(gamma: ConstraintSet, allowed: frozenset[int], pattern: int):
    """A point of Gamma cap P_si, zero off ``allowed``, with eta(pattern) > 0."""
    zero = [p for p in range(gamma.size) if p not in allowed]
    reg = _region(gamma, shift_invariant=True, zero=zero)
    strict = [u for u in reg.ub if u[2]]
    row = [Fraction(0)] * gamma.size
    row[pattern] = Fraction(-1)
    target = (tuple(row), Fraction(0), True)
    res = _max_margin(reg, strict + [target])
    if not res.optimal or res.value <= 0:
        return None
    return Measure(gamma.alphabet, gamma.k, tuple(res.x[: gamma.size]))


def _pattern_graph(gamma: ConstraintSet, patterns: Iterable[int]) -> tuple[LabeledDigraph, list[int]]:
    sigma, k = gamma.alphabet.size, gamma.k
    patterns = sorted(patterns)
    ctx = sigma ** (k - 1)
    verts = sorted({p // sigma for p in patterns} | {p % ctx for p in patterns})
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for p in patterns:
        word = pattern_from_index(p, sigma, k)
        edges.append((index[p // sigma], index[p % ctx], (word[0],)))
    names = tuple(pattern_from_index(v, sigma, k - 1) for v in verts)
    return LabeledDigraph(names, tuple(edges), FIRST), patterns


def _search(gamma: ConstraintSet, allowed: frozenset[int], out: list) -> None:
    points = {}
    for p in sorted(allowed):
        pt = _positive_point(gamma, allowed, p)
        if pt is not None:
            points[p] = pt
    if not points:
        return
    G, pats = _pattern_graph(gamma, points)
    comps = strongly_connected_components(G)
    if len(comps) == 1:
        out.append(EssentialComponent(tuple(pats), average(list(points.values()))))
        return
    for comp in comps:
        members = set(comp)
        sub = frozenset(p for e, p in enumerate(pats) if G.edges[e][0] in members)
        if sub:
            _search(gamma, sub, out)


def essential_graph(gamma: ConstraintSet, max_patterns: int = DEFAULT_PATTERN_BOUND) -> EssentialGraph:
    """G_ess of Gamma cap P_si, with witnesses."""
    if gamma.size > max_patterns:
        raise ScsError(f"|Sigma|^k = {gamma.size} exceeds the pattern bound {max_patterns}")
    comps: list[EssentialComponent] = []
    _search(gamma, frozenset(range(gamma.size)), comps)
    comps.sort(key=lambda c: c.patterns[0])
    pattern_witness = {}
    for c in comps:
        for p in c.patterns:
            pattern_witness[p] = c.witness
    G, pats = _pattern_graph(gamma, pattern_witness)
    return EssentialGraph(gamma, G, tuple(pats), tuple(pattern_witness[p] for p in pats),
                          tuple(comps))


def containing_capacity(gamma: ConstraintSet, ess: EssentialGraph | None = None) -> float:
    """cap of the smallest fully constrained system containing B(Gamma)."""
    ess = ess or essential_graph(gamma)
    return graph_capacity(ess.graph)


def _extend_to_path(ess: EssentialGraph, alpha: Word) -> tuple[Word, list[int]] | None:
    """Lexicographically first gamma in Sigma^{k-1} whose windows over alpha+gamma
    are all edges of G_ess; returns (gamma, window patterns)."""
    gamma = ess.gamma
    sigma, k = gamma.alphabet.size, gamma.k
    edges = ess.patterns
    n = len(alpha)

    def dfs(word: list[int]) -> list[int] | None:
        if len(word) >= k:
            p = pattern_index(word[-k:], sigma)
            if p not in edges:
                return None
        if len(word) == n + k - 1:
            return word
        for a in range(sigma):
            res = dfs(word + [a])
            if res is not None:
                return res
        return None

    # alpha is fixed: check its own windows first
    word: list[int] = []
    for i, a in enumerate(alpha):
        word.append(a)
        if len(word) >= k and pattern_index(word[-k:], sigma) not in edges:
            return None
    full = dfs(word) if len(word) < n + k - 1 else word
    if full is None:
        return None
    tail = tuple(full[n:])
    pats = [pattern_index(full[i : i + k], sigma) for i in range(n)]
    return tail, pats


def completion_witness(gamma: ConstraintSet, alpha: Sequence[int],
                       ess: EssentialGraph | None = None) -> tuple[Measure, list[int]]:
    """(eta, window path of alpha) used to complete ``alpha``.

    eta averages, with equal weights, the witnesses of the edges on the
    G_ess path that reads alpha; it lies in Gamma by convexity.
    """
    ess = ess or essential_graph(gamma)
    if ess.is_empty():
        raise NotInLanguageError("the essential graph is empty: B(Gamma) is finite")
    alpha = tuple(alpha)
    if not alpha:
        return ess.components[0].witness, []
    found = _extend_to_path(ess, alpha)
    if found is None:
        raise NotInLanguageError(f"{gamma.alphabet.format(alpha)} is not generated by G_ess")
    _, path = found
    return average([ess.witness_for(p) for p in path]), path


def prefix_completion(gamma: ConstraintSet, alpha: Sequence[int],
                      ess: EssentialGraph | None = None) -> Word:
    """beta with alpha+beta in B(Gamma), read off an Eulerian circuit.

    The frequency of alpha+beta equals :func:`completion_witness` exactly.
    """
    ess = ess or essential_graph(gamma)
    alpha = tuple(alpha)
    eta, path = completion_witness(gamma, alpha, ess)
    if not alpha:
        return word_from_measure(eta)
    G = measure_graph(eta, len(alpha) + 1)
    cycle = eulerian_cycle(G, forced_prefix=path)
    word = word_from_cycle(cycle, gamma.alphabet.size, gamma.k)
    assert word[: len(alpha)] == alpha
    return word[len(alpha):]


@dataclass(frozen=True)
class SampleCheck:
    word: Word
    path_ok: bool
    cycle_ok: bool | None
    member: bool

    @property
    def ok(self) -> bool:
        return self.path_ok and self.member and self.cycle_ok is not False


def admissible_words_in_ess(gamma: ConstraintSet, samples: Iterable[Sequence[int]],
                            ess: EssentialGraph | None = None) -> list[SampleCheck]:
    """Check that admissible words read along G_ess (and around a cycle when
    their frequency is shift invariant)."""
    ess = ess or essential_graph(gamma)
    sigma, k = gamma.alphabet.size, gamma.k
    out = []
    for w in samples:
        w = tuple(w)
        if len(w) < k:
            continue
        counts = pattern_counts(w, sigma, k)
        path_ok = all(p in ess.patterns for p, c in enumerate(counts) if c)
        cycle_ok = None
        if k == 1 or w[: k - 1] == w[len(w) - k + 1 :]:
            # the window path closes up; its first-symbol labels spell suffchop(w, k-1)
            cycle_ok = path_ok
        out.append(SampleCheck(w, path_ok, cycle_ok, language_member(ess.graph, w)))
    return out


@dataclass(frozen=True)
class ZeroCapacityReport:
    capacity_zero: bool
    containing_zero: bool
    cycles: tuple[tuple[Word, ...], ...]

    @property
    def equivalent(self) -> bool:
        return self.capacity_zero == self.containing_zero


def zero_capacity_equiv(gamma: ConstraintSet, tol: float = 1e-6,
                        ess: EssentialGraph | None = None) -> ZeroCapacityReport:
    """Compare cap(B(Gamma)) = 0 with "G_ess is a disjoint union of simple cycles"."""
    ess = ess or essential_graph(gamma)
    G = ess.graph
    simple = (not ess.is_empty()
              and all(G.out_degree(v) == 1 and len(G.in_edges[v]) == 1
                      for v in range(G.num_vertices)))
    cycles = []
    if simple:
        for comp in strongly_connected_components(G):
            v = comp[0]
            cyc = [G.vertices[v]]
            u = G.successors(v)[0]
            while u != v:
                cyc.append(G.vertices[u])
                u = G.successors(u)[0]
            cycles.append(tuple(cyc))
    cap = capacity_scs(gamma).value
    cap_zero = not ess.is_empty() and abs(cap) < tol
    return ZeroCapacityReport(cap_zero, simple, tuple(cycles))
