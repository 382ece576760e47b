"""Round-based coset saturation producing partial Cayley graphs.

Starting from a single origin vertex, each round (1) gives every existing
vertex a full set of outgoing and incoming generator edges, growing fresh
vertices where edges are missing, (2) attaches a fresh relator cycle at every
vertex where the relator does not already trace a loop, and (3) folds.  The
folded graph with all hairs removed is a partial Cayley graph: its origin
loops decide triviality soundly at every round, and completely for words up
to a length that grows with the rounds.  The radius of the first partial
Cayley graph whose decisions agree with a reference oracle on all words of
length up to ``n`` is the saturation radius at ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core import Presentation, Word
from .automata import (
    LabeledGraph,
    _check_ceiling,
    accepts_reduced,
    fold,
    radius as graph_radius,
    strip_hairs,
    trace,
)


class TcNonTermination(RuntimeError):
    """The round limit was reached before the oracle agreed."""


@dataclass(frozen=True, eq=False)
class TcState:
    presentation: Presentation
    graph: LabeledGraph
    round: int

    @classmethod
    def initial(cls, p: Presentation) -> "TcState":
        return cls(p, LabeledGraph(p.num_generators), 0)


@dataclass(frozen=True, eq=False)
class PartialCayleyGraph:
    graph: LabeledGraph  # folded and hair-free
    radius: int


def tc_round(s: TcState) -> TcState:
    """One saturation round: complete edges, attach missing relator loops,
    fold.  Edge completion covers the vertices present when the round starts;
    loop guards are evaluated on the graph as it stands after completion,
    before any new loop is attached."""
    p = s.presentation
    g = s.graph.copy()

    start_vertices = g.num_vertices
    _check_ceiling(start_vertices * (1 + 2 * p.num_generators), "edge completion")
    for v in range(start_vertices):
        for gen in range(p.num_generators):
            if not g.out[v].get(gen):
                g.add_edge(v, gen, g.add_vertex())
            if not g.inc[v].get(gen):
                g.add_edge(g.add_vertex(), gen, v)

    completed_vertices = g.num_vertices
    need = [
        (v, r)
        for v in range(completed_vertices)
        for r in p.relators
        if trace(g, r, start=v) != v
    ]
    _check_ceiling(completed_vertices + sum(len(r) - 1 for _v, r in need), "loop attachment")
    for v, r in need:
        g.add_loop(v, r)

    folded, _ = fold(g)
    return TcState(p, folded, s.round + 1)


def partial_cayley(s: TcState) -> PartialCayleyGraph:
    """Strip hairs (iteratively) from the round's folded graph."""
    if s.round < 1:
        raise ValueError("run at least one round first")
    bald = strip_hairs(s.graph)
    return PartialCayleyGraph(bald, graph_radius(bald))


def tc_decides(g: PartialCayleyGraph, w: Word) -> bool:
    """Trace ``red(w)`` on the partial Cayley graph; True means trivial.

    Sound at every round; complete only once enough rounds have run for
    ``|w|`` (see :func:`measure_tc_radius`)."""
    return accepts_reduced(g.graph, w)


def _reduced_words_up_to(alphabet_size: int, max_len: int) -> list[Word]:
    words = [Word(b"")]
    layer = [b""]
    for _ in range(max_len):
        layer = [u + bytes((c,)) for u in layer for c in range(alphabet_size) if not u or u[-1] != c ^ 1]
        words.extend(Word(u) for u in layer)
    return words


def measure_tc_radius(
    p: Presentation,
    n: int,
    oracle: Callable[[Word], bool],
    max_rounds: int = 24,
) -> tuple[int, int, PartialCayleyGraph]:
    """Run rounds until the partial Cayley graph decides every word of
    length ≤ ``n`` the way the reference oracle does; return (rounds, radius,
    graph) for the first such round.

    Triviality is invariant under free reduction on both sides, so agreement
    is checked on reduced words only.  Raises :class:`TcNonTermination` after
    ``max_rounds`` disagreeing rounds.
    """
    words = _reduced_words_up_to(p.alphabet_size, n)
    expected = [oracle(u) for u in words]
    state = TcState.initial(p)
    for _ in range(max_rounds):
        state = tc_round(state)
        pcg = partial_cayley(state)
        if all(tc_decides(pcg, u) == exp for u, exp in zip(words, expected)):
            return state.round, pcg.radius, pcg
    raise TcNonTermination(
        f"no agreement with the oracle on words of length ≤ {n} within {max_rounds} rounds"
    )
