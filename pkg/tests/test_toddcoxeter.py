import pytest

from loopfold.automata import LabeledGraph, canonical_form, restrict_to_radius
from loopfold.core import EMPTY, Presentation, Word, parse_word
from loopfold.toddcoxeter import (
    PartialCayleyGraph,
    TcNonTermination,
    TcState,
    measure_tc_radius,
    partial_cayley,
    tc_decides,
    tc_round,
)

Z2 = Presentation(1, [parse_word("aa", 1)])
Z3 = Presentation(1, [parse_word("aaa", 1)])
LATTICE = Presentation(2, [parse_word("abAB", 2)])
FREE2 = Presentation(2, [])


def w(text, n=2):
    return parse_word(text, n)


def exponent_sum(u, gen):
    return sum(1 if c == 2 * gen else -1 for c in u.codes if c >> 1 == gen)


def oracle_for(p):
    if p is Z2:
        return lambda u: exponent_sum(u, 0) % 2 == 0
    if p is Z3:
        return lambda u: exponent_sum(u, 0) % 3 == 0
    if p is LATTICE:
        return lambda u: exponent_sum(u, 0) == 0 and exponent_sum(u, 1) == 0
    return lambda u: u.reduce() == EMPTY


def three_cycle():
    g = LabeledGraph(1, 3)
    g.add_edge(0, 0, 1)
    g.add_edge(1, 0, 2)
    g.add_edge(2, 0, 0)
    return g


def reduced_words_up_to(alphabet_size, max_len):
    words = [Word(b"")]
    layer = [b""]
    for _ in range(max_len):
        layer = [u + bytes((c,)) for u in layer for c in range(alphabet_size) if not u or u[-1] != c ^ 1]
        words.extend(Word(u) for u in layer)
    return words


class TestRound:
    def test_cyclic_three_first_round_gives_cycle(self):
        state = tc_round(TcState.initial(Z3))
        assert state.round == 1
        pcg = partial_cayley(state)
        assert canonical_form(pcg.graph) == canonical_form(three_cycle())
        assert pcg.radius == 1

    def test_free_group_rounds_grow_a_tree(self):
        state = tc_round(TcState.initial(FREE2))
        assert state.graph.num_vertices == 5  # origin plus four fresh ends
        assert partial_cayley(state).radius == 0
        state = tc_round(state)
        assert state.graph.num_vertices == 17  # ball of radius 2 in the tree
        assert partial_cayley(state).graph.num_vertices == 1

    def test_round_is_idempotent_on_complete_cayley_graph(self):
        state = TcState(Z3, three_cycle(), 1)
        after = tc_round(state)
        assert canonical_form(partial_cayley(after).graph) == canonical_form(three_cycle())

    def test_rounds_fold_deterministic(self):
        state = TcState.initial(LATTICE)
        for _ in range(3):
            state = tc_round(state)
            assert state.graph.is_deterministic()

    def test_vertex_counts_nondecreasing(self):
        state = TcState.initial(Z2)
        sizes = []
        for _ in range(4):
            state = tc_round(state)
            sizes.append(state.graph.num_vertices)
        assert sizes == sorted(sizes)

    def test_faces_survive_to_partial_graph(self):
        state = tc_round(TcState.initial(Z3))
        pcg = partial_cayley(state)
        assert pcg.graph.faces
        assert all(rel == w("aaa", 1) for _bp, rel in pcg.graph.faces)


class TestPartialCayley:
    def test_single_edge_collapses_to_origin(self):
        g = LabeledGraph(1, 2)
        g.add_edge(0, 0, 1)
        pcg = partial_cayley(TcState(Z2, g, 1))
        assert pcg.graph.num_vertices == 1
        assert pcg.radius == 0

    def test_pendant_edge_on_cycle_is_ignored(self):
        g = three_cycle()
        g.add_edge(1, 0, g.add_vertex())
        pcg = partial_cayley(TcState(Z3, g, 1))
        assert canonical_form(pcg.graph) == canonical_form(three_cycle())
        assert pcg.radius == 1

    def test_hair_chains_removed_transitively(self):
        g = three_cycle()
        v = g.add_vertex()
        u = g.add_vertex()
        t = g.add_vertex()
        g.add_edge(0, 0, v)
        g.add_edge(v, 0, u)
        g.add_edge(u, 0, t)
        pcg = partial_cayley(TcState(Z3, g, 1))
        assert canonical_form(pcg.graph) == canonical_form(three_cycle())

    def test_requires_a_completed_round(self):
        with pytest.raises(ValueError):
            partial_cayley(TcState.initial(Z3))


class TestDecisions:
    def test_cyclic_three_traces(self):
        pcg = partial_cayley(tc_round(TcState.initial(Z3)))
        assert tc_decides(pcg, w("aaa", 1)) is True
        assert tc_decides(pcg, w("a", 1)) is False
        assert tc_decides(pcg, EMPTY) is True
        assert tc_decides(pcg, w("aAaaa", 1)) is True  # reduction first

    def test_soundness_at_every_round(self):
        for p in (Z3, LATTICE):
            oracle = oracle_for(p)
            state = TcState.initial(p)
            for _ in range(3):
                state = tc_round(state)
                pcg = partial_cayley(state)
                for u in reduced_words_up_to(p.alphabet_size, 4):
                    if tc_decides(pcg, u):
                        assert oracle(u), (p, state.round, u)


class TestMeasureRadius:
    def test_cyclic_groups(self):
        rounds, rad, _pcg = measure_tc_radius(Z3, 6, oracle_for(Z3))
        assert (rounds, rad) == (1, 1)
        rounds, rad, _pcg = measure_tc_radius(Z2, 4, oracle_for(Z2))
        assert (rounds, rad) == (1, 1)

    def test_free_group_radius_zero(self):
        rounds, rad, pcg = measure_tc_radius(FREE2, 3, oracle_for(FREE2))
        assert rounds == 1
        assert rad == 0
        assert pcg.graph.num_vertices == 1

    def test_lattice_small_lengths(self):
        _rounds, rad, pcg = measure_tc_radius(LATTICE, 2, oracle_for(LATTICE))
        assert rad >= 1
        ball = LabeledGraph(2, 5)
        ball.add_edge(0, 0, 1)
        ball.add_edge(2, 0, 0)
        ball.add_edge(0, 1, 3)
        ball.add_edge(4, 1, 0)
        assert canonical_form(restrict_to_radius(pcg.graph, 1)) == canonical_form(ball)

    def test_agreement_is_genuine(self):
        oracle = oracle_for(Z3)
        _rounds, _rad, pcg = measure_tc_radius(Z3, 5, oracle)
        for u in reduced_words_up_to(2, 5):
            assert tc_decides(pcg, u) == oracle(u)

    def test_nontermination_guard(self):
        lying_oracle = lambda u: True  # claims every word is trivial
        with pytest.raises(TcNonTermination):
            measure_tc_radius(FREE2, 2, lying_oracle, max_rounds=2)
