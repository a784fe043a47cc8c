import pytest

from semiconstrained.capacity import capacity_scs, graph_capacity
from semiconstrained.constraints import (ConstraintSet, contains, enumerate_admissible,
                                         is_admissible, upper_bound_system)
from semiconstrained.errors import NotInLanguageError, ScsError
from semiconstrained.essential import (admissible_words_in_ess, completion_witness,
                                       containing_capacity, essential_graph, prefix_completion,
                                       zero_capacity_equiv)
from semiconstrained.graphs import FIRST, debruijn, has_word, language_member, word_from_measure
from semiconstrained.measure import Measure, average
from semiconstrained.words import Alphabet, kmer_frequency

A2 = Alphabet.binary()


@pytest.fixture(scope="module")
def ess_hull(hull_example):
    return essential_graph(hull_example)


@pytest.fixture(scope="module")
def ess_rll(rll):
    return essential_graph(rll)


def random_path_word(G, n, rng):
    v = rng.randrange(G.num_vertices)
    while not G.out_edges[v]:
        v = rng.randrange(G.num_vertices)
    word = []
    for _ in range(n):
        e = G.out_edges[v][rng.randrange(len(G.out_edges[v]))]
        word.append(G.edges[e][2][0])
        v = G.edges[e][1]
    return tuple(word)


# --- essential graphs ------------------------------------------------------------

def test_gamma1_gives_complete_de_bruijn(gamma1):
    ess = essential_graph(gamma1)
    assert ess.graph == debruijn(A2, 2, FIRST)


def test_hull_example_gives_two_disjoint_cycles(ess_hull):
    G = ess_hull.graph
    names = {A2.format(v) for v in G.vertices}
    assert names == {"111", "101", "010"}
    assert G.num_edges == 3
    mu1 = Measure.delta(A2, "1111")
    mu2 = average([Measure.delta(A2, "1010"), Measure.delta(A2, "0101")])
    assert {c.witness for c in ess_hull.components} == {mu1, mu2}
    assert graph_capacity(G) == 0


def test_fat_systems_give_full_de_bruijn(ess_rll, binary):
    assert ess_rll.graph == debruijn(binary, 1, FIRST)
    g = upper_bound_system(binary, 3, {"000": "0.1", "111": "0.3"})
    assert essential_graph(g).graph == debruijn(binary, 2, FIRST)


def test_witness_invariants(gamma1, hull_example, rll, no000):
    for gamma in (gamma1, hull_example, rll, no000):
        ess = essential_graph(gamma)
        for p, w in zip(ess.edge_patterns, ess.witnesses):
            assert w.is_shift_invariant()
            assert contains(gamma, w)
            assert has_word(w)
            assert w[p] > 0


def test_pattern_bound_refusal(binary):
    g = ConstraintSet.simplex(binary, 5)
    with pytest.raises(ScsError, match="bound"):
        essential_graph(g, max_patterns=16)


def test_dot_export_mentions_witnesses(ess_hull):
    text = ess_hull.to_dot()
    assert text.startswith("digraph G_ess {") and "// w0" in text and "// w1" in text


# --- containing capacity --------------------------------------------------------------

def test_containing_capacity_examples(rll, gamma1, no000):
    assert containing_capacity(rll) == pytest.approx(1.0, abs=1e-9)
    assert containing_capacity(gamma1) == pytest.approx(1.0, abs=1e-9)
    assert 0.452 <= capacity_scs(gamma1).value <= 0.472
    cap2 = containing_capacity(no000)
    assert 0.877 <= cap2 <= 0.881
    assert cap2 == pytest.approx(capacity_scs(no000).value, abs=1e-6)


def test_containment_capacity_is_not_monotone(gamma1, no000):
    assert capacity_scs(gamma1).value < capacity_scs(no000).value
    assert containing_capacity(gamma1) > containing_capacity(no000)


# --- prefix completion ----------------------------------------------------------------------

def test_prefix_completion_fat_example(rll, ess_rll):
    alpha = (1,) * 6
    beta = prefix_completion(rll, alpha, ess_rll)
    assert is_admissible(rll, alpha + beta)


def test_empty_prefix_completion_is_a_witness_word(rll, ess_rll):
    eta, path = completion_witness(rll, (), ess_rll)
    assert path == [] and prefix_completion(rll, (), ess_rll) == word_from_measure(eta)


def test_hull_prefix_completion(hull_example, ess_hull):
    beta = prefix_completion(hull_example, (1, 1, 1, 1), ess_hull)
    assert set(beta) == {1}
    assert kmer_frequency((1, 1, 1, 1) + beta, 4, A2) == Measure.delta(A2, "1111")
    with pytest.raises(NotInLanguageError):
        prefix_completion(hull_example, (1, 1, 0, 0), ess_hull)


def test_completion_frequency_equals_witness(rll, ess_rll, rng):
    for _ in range(200):
        alpha = tuple(rng.randrange(2) for _ in range(rng.randrange(1, 13)))
        beta = prefix_completion(rll, alpha, ess_rll)
        eta, _ = completion_witness(rll, alpha, ess_rll)
        assert kmer_frequency(alpha + beta, 2, A2) == eta
        assert is_admissible(rll, alpha + beta)


@pytest.mark.parametrize("name", ["no000", "hull_example", "gamma1"])
def test_minimality_random_prefixes(name, request, rng):
    gamma = request.getfixturevalue(name)
    ess = essential_graph(gamma)
    for _ in range(100):
        alpha = random_path_word(ess.graph, rng.randrange(1, 10), rng)
        beta = prefix_completion(gamma, alpha, ess)
        assert kmer_frequency(alpha + beta, gamma.k, A2) == completion_witness(gamma, alpha, ess)[0]
        if not gamma.shift_invariant:
            assert is_admissible(gamma, alpha + beta)


def test_admissible_words_lie_in_ess(rll, no000, rng):
    for gamma, n in ((rll, 12), (no000, 12)):
        words = enumerate_admissible(gamma, n)
        sample = [words[rng.randrange(len(words))] for _ in range(100)]
        checks = admissible_words_in_ess(gamma, sample)
        assert checks and all(c.ok for c in checks)
    assert admissible_words_in_ess(no000, [(0,), (1, 1)]) == []


# --- zero capacity ------------------------------------------------------------------------------

def test_zero_capacity_examples(hull_example, rll, binary):
    rep = zero_capacity_equiv(hull_example)
    assert rep.capacity_zero and rep.containing_zero and rep.equivalent
    assert len(rep.cycles) == 2
    rep = zero_capacity_equiv(rll)
    assert not rep.capacity_zero and not rep.containing_zero
    loop = upper_bound_system(binary, 2, {"11": 1}, "=")
    rep = zero_capacity_equiv(loop)
    assert (rep.capacity_zero, rep.containing_zero) == (True, True)
    assert language_member(essential_graph(loop).graph, (1, 1, 1))
