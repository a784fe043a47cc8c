from collections import Counter
from itertools import product

import numpy as np
import pytest

from semiconstrained.errors import EulerianError
from semiconstrained.graphs import (FIRST, INCOMING, LabeledDigraph, cyclic_components, debruijn,
                                    eulerian_cycle,
                                    follower_merge, has_word, is_definite, language_member,
                                    measure_graph, strongly_connected_components, to_dot,
                                    word_from_cycle, word_from_measure)
from semiconstrained.measure import Measure, average
from semiconstrained.words import Alphabet, kmer_frequency

A2 = Alphabet.binary()


def reach_scc(G):
    """SCCs from pairwise reachability (independent of the library)."""
    n = G.num_vertices
    reach = np.eye(n, dtype=bool)
    for s, d, _ in G.edges:
        reach[s, d] = True
    for k in range(n):
        reach |= reach[:, [k]] & reach[[k], :]
    comps = {}
    for v in range(n):
        key = tuple(np.flatnonzero(reach[v] & reach[:, v]))
        comps[key] = list(key)
    return sorted(comps.values(), key=lambda c: c[0])


def random_graph(rng, n, m, sigma=2):
    edges = [(rng.randrange(n), rng.randrange(n), (rng.randrange(sigma),)) for _ in range(m)]
    return LabeledDigraph(tuple(range(n)), tuple(edges))


def random_cyclic_measure(rng, sigma, k, max_len=12):
    w = [rng.randrange(sigma) for _ in range(rng.randrange(1, max_len + 1))]
    return kmer_frequency(w + (w * k)[: k - 1], k, Alphabet(sigma))


# --- construction ------------------------------------------------------------------

@pytest.mark.parametrize("sigma,order,v,e", [(2, 1, 2, 4), (2, 2, 4, 8), (3, 1, 3, 9)])
def test_debruijn_sizes(sigma, order, v, e):
    G = debruijn(sigma, order)
    assert (G.num_vertices, G.num_edges) == (v, e)
    assert G.is_deterministic and G.label_convention == INCOMING


def test_debruijn_first_convention_labels():
    G = debruijn(2, 2, FIRST)
    for s, d, lab in G.edges:
        assert lab == (G.vertices[s][0],)
        assert G.vertices[s][1:] == G.vertices[d][:1]


def test_invalid_graphs_rejected():
    with pytest.raises(ValueError):
        LabeledDigraph((0,), ((0, 1, (0,)),))
    with pytest.raises(ValueError):
        LabeledDigraph((0,), ((0, 0, (0,)), (0, 0, (0, 1))))


def test_power_counts_paths(rng):
    for _ in range(20):
        G = random_graph(rng, 4, 7)
        for q in (1, 2, 3):
            Gq = G.power(q)
            A = G.adjacency_matrix()
            assert np.array_equal(Gq.adjacency_matrix(), np.linalg.matrix_power(A, q))
            assert all(len(lab) == q for _, _, lab in Gq.edges)


# --- strongly connected components -------------------------------------------------

def test_scc_examples():
    two_cycle = LabeledDigraph((0, 1), ((0, 1, (0,)), (1, 0, (1,))))
    assert strongly_connected_components(two_cycle) == [[0, 1]]
    loops = LabeledDigraph((0, 1), ((0, 0, (0,)), (1, 1, (1,))))
    assert strongly_connected_components(loops) == [[0], [1]]
    dag = LabeledDigraph((0, 1, 2), ((0, 1, (0,)), (1, 2, (0,))))
    assert strongly_connected_components(dag) == [[0], [1], [2]]


def test_scc_matches_reachability_oracle(rng):
    for _ in range(200):
        G = random_graph(rng, rng.randrange(1, 9), rng.randrange(0, 14))
        assert strongly_connected_components(G) == reach_scc(G)


def test_cyclic_components_keep_exactly_the_components_with_an_edge(rng):
    for _ in range(100):
        G = random_graph(rng, rng.randrange(1, 9), rng.randrange(0, 14))
        expected = [c for c in reach_scc(G)
                    if any(s in c and d in c for s, d, _ in G.edges)]
        assert cyclic_components(G) == expected


# --- measure graphs -------------------------------------------------------------------

def test_measure_graph_examples():
    G = measure_graph(Measure.uniform(A2, 2), 1)
    assert G.scale == 4 and G.multiplicity == {0: 1, 1: 1, 2: 1, 3: 1}
    A4 = A2
    G = measure_graph(Measure.delta(A4, "1111"))
    assert G.vertices == (7,) and G.multiplicity == {15: 1}
    mu2 = average([Measure.delta(A4, "1010"), Measure.delta(A4, "0101")])
    G = measure_graph(mu2)
    assert G.scale == 2 and G.multiplicity == {5: 1, 10: 1}
    assert set(G.vertices) == {2, 5}  # 010 and 101


def test_has_word_examples():
    assert has_word(Measure.uniform(A2, 2))
    loops = average([Measure.delta(A2, "1111"), Measure.delta(A2, "0000")])
    assert not has_word(loops)
    assert has_word(average([Measure.delta(A2, "1010"), Measure.delta(A2, "0101")]))
    assert not has_word(Measure.delta(A2, "01"))


def test_measure_graph_is_balanced_for_shift_invariant_measures(rng):
    for _ in range(300):
        sigma, k = rng.choice([(2, 2), (2, 3), (3, 2)])
        eta = average([random_cyclic_measure(rng, sigma, k) for _ in range(rng.randrange(1, 4))])
        G = measure_graph(eta, rng.randrange(1, 4))
        assert G.is_balanced()
        assert G.num_edges == G.scale


# --- Eulerian cycles ------------------------------------------------------------------------

def audit(G, cycle):
    assert Counter(cycle) == Counter(G.multiplicity)
    for p, q in zip(cycle, cycle[1:] + cycle[:1]):
        assert G.dst(p) == G.src(q)


def test_eulerian_examples():
    G = measure_graph(Measure.uniform(A2, 2), 1)
    cycle = eulerian_cycle(G, start_vertex=0)
    assert len(cycle) == 4
    audit(G, cycle)
    loop = measure_graph(Measure.delta(A2, "11"))
    assert eulerian_cycle(loop) == [3]
    G2 = measure_graph(Measure.uniform(A2, 2), 2)
    forced = eulerian_cycle(G2, forced_prefix=[2])
    assert forced[0] == 2
    audit(G2, forced)


def test_eulerian_errors_name_the_vertex():
    G = measure_graph(Measure.uniform(A2, 2), 1)
    with pytest.raises(EulerianError) as info:
        eulerian_cycle(G, forced_prefix=[3, 3])
    assert "more often" in str(info.value)
    loops = measure_graph(average([Measure.delta(A2, "00"), Measure.delta(A2, "11")]))
    with pytest.raises(EulerianError) as info:
        eulerian_cycle(loops)
    assert info.value.vertex is not None


def test_word_from_measure_examples():
    w = word_from_measure(Measure.delta(A2, "11"))
    assert len(w) >= 2 and set(w) == {1}
    u = Measure.uniform(A2, 2)
    assert kmer_frequency(word_from_measure(u), 2, A2) == u
    half = Measure.from_mapping(A2, 2, {"01": "1/2", "10": "1/2"})
    assert word_from_measure(half) in ((0, 1, 0), (1, 0, 1))


def test_word_from_measure_roundtrip_500(rng):
    done = 0
    while done < 500:
        sigma, k = rng.choice([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)])
        eta = random_cyclic_measure(rng, sigma, k)
        if rng.random() < 0.3:
            other = random_cyclic_measure(rng, sigma, k)
            candidate = average([eta, other])
            if has_word(candidate) and candidate.denominator <= 12:
                eta = candidate
        assert eta.denominator <= 12 and has_word(eta)
        n = rng.randrange(1, 3)
        w = word_from_measure(eta, n)
        assert kmer_frequency(w, k, eta.alphabet) == eta
        done += 1


def test_word_from_cycle_reads_windows():
    assert word_from_cycle([1, 2, 1], 2, 2) == (0, 1, 0, 1)
    assert word_from_cycle([], 2, 2) == ()


# --- languages and definiteness -------------------------------------------------------------

def test_language_member():
    golden = LabeledDigraph((0, 1), ((0, 0, (0,)), (0, 1, (1,)), (1, 0, (0,))))
    assert language_member(golden, ())
    assert language_member(golden, (1,))
    assert language_member(golden, (0, 1, 0, 0, 1))
    assert not language_member(golden, (0, 1, 1))


def test_definiteness_examples():
    assert is_definite(debruijn(2, 2), 2, 0)
    assert is_definite(debruijn(3, 1), 1, 0)
    assert not is_definite(debruijn(2, 2), 1, 0)
    twin_loops = LabeledDigraph((0,), ((0, 0, (0,)), (0, 0, (0,))))
    assert not any(is_definite(twin_loops, m, a) for m in range(5) for a in range(5))


def test_definite_with_key_only_needs_key_agreement():
    twin_loops = LabeledDigraph((0,), ((0, 0, (0,)), (0, 0, (0,))))
    assert is_definite(twin_loops, 0, 0, key=[7, 7])


def test_definiteness_matches_path_enumeration(rng):
    for _ in range(40):
        G = random_graph(rng, 3, 5)
        for m, a in ((0, 0), (1, 0), (1, 1), (2, 0)):
            L = m + a + 1
            paths = [[]]
            for _ in range(L):
                paths = [p + [e] for p in paths for e in range(G.num_edges)
                         if not p or G.edges[p[-1]][1] == G.edges[e][0]]
            by_label = {}
            ok = True
            for p in paths:
                lab = tuple(G.edges[e][2] for e in p)
                if by_label.setdefault(lab, p[m]) != p[m]:
                    ok = False
            assert is_definite(G, m, a) == ok


# --- follower merge ----------------------------------------------------------------------------

def test_follower_merge_merges_twins():
    twins = LabeledDigraph((0, 1, 2), ((0, 1, (0,)), (0, 2, (1,)), (1, 0, (0,)), (2, 0, (0,))))
    merged, cls = follower_merge(twins)
    assert merged.num_vertices == 2 and cls == [0, 1, 1]


def test_follower_merge_identity_on_reduced_graph():
    golden = LabeledDigraph((0, 1), ((0, 0, (0,)), (0, 1, (1,)), (1, 0, (0,))))
    merged, cls = follower_merge(golden)
    assert merged == golden and cls == [0, 1]


def test_follower_merge_preserves_language(rng):
    G = debruijn(2, 3)
    # drop the edges creating 1111: a deterministic graph with mergeable states
    keep = [e for e in G.edges if not (G.vertices[e[0]] == (1, 1, 1) and e[2] == (1,))]
    G = LabeledDigraph(G.vertices, tuple(keep))
    merged, _ = follower_merge(G)
    assert merged.num_vertices < G.num_vertices
    for n in range(1, 9):
        for w in product(range(2), repeat=n):
            assert language_member(G, w) == language_member(merged, w)


# --- DOT --------------------------------------------------------------------------------------

def test_dot_golden_outputs():
    loop = LabeledDigraph(((1,),), ((0, 0, (1,)),))
    assert to_dot(loop, A2) == 'digraph G {\n  v0 [label="1"];\n  v0 -> v0 [label="1"];\n}\n'
    cyc = LabeledDigraph(((0,), (1,)), ((0, 1, (1,)), (1, 0, (0,))))
    assert to_dot(cyc, A2, name="C") == (
        'digraph C {\n  v0 [label="0"];\n  v1 [label="1"];\n'
        '  v0 -> v1 [label="1"];\n  v1 -> v0 [label="0"];\n}\n')
    text = to_dot(debruijn(2, 2), A2)
    assert text.count("->") == 8 and text == to_dot(debruijn(2, 2), A2)
