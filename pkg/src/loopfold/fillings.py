"""Filling-invariant profiles of a presentation, and their comparisons.

For every length bound ``n`` up to a limit, the profile aggregates, over the
trivial words of length ≤ n:

* ``P(n)`` — the largest minimum relator-application count (rewrite search);
* ``f(n)`` — the largest filling length (rewrite search);
* ``d(n)`` — the smallest loop-complex radius whose folded DFA accepts every
  reduced trivial word (completeness scan; soundness holds at any radius);
* ``rhoTC(n)`` — the radius of the first partial Cayley graph that decides
  all words of length ≤ n correctly.

Ground truth for "trivial" comes from a :class:`ReferenceOracle` — a closed
form for the classical small groups, or the rewrite search itself as a
fallback.  The profile feeds the inequality checks relating the four
functions, with the double-exponential bound instantiated at the explicit
constants ``C = 2(2|A|+1)·||R||²`` and ``c = (2|A|)²``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .automata import (
    LabeledGraph,
    build_loop_complex,
    fold,
    transition_table,
)
from .core import EMPTY, Presentation, Word
from .rewrite import (
    OracleResult,
    OracleStatus,
    RewriteSystem,
    SearchBudget,
    filling_length,
    is_trivial,
    min_isoperimetric,
)
from .toddcoxeter import TcNonTermination, measure_tc_radius


class MissingFaceData(ValueError):
    """The graph carries no face records, so it cannot be pulled apart."""


# -- reference oracles --------------------------------------------------------


class ReferenceOracle:
    """Ground-truth triviality decider: a closed form for cyclic, free
    abelian, and free groups, or the rewrite search as a fallback."""

    def __init__(self, kind: str, *, order: int = 0, rank: int = 0,
                 presentation: Presentation | None = None,
                 budget: SearchBudget | None = None):
        if kind not in ("cyclic", "free-abelian", "free", "rewrite"):
            raise ValueError(f"unknown oracle kind {kind!r}")
        if kind == "rewrite" and (presentation is None or budget is None):
            raise ValueError("the rewrite-search oracle needs a presentation and a budget")
        self.kind = kind
        self.order = order
        self.rank = rank
        self.presentation = presentation
        self.budget = budget
        self._system = RewriteSystem(presentation) if kind == "rewrite" else None

    @classmethod
    def cyclic(cls, k: int) -> "ReferenceOracle":
        if k < 1:
            raise ValueError("cyclic order must be positive")
        return cls("cyclic", order=k)

    @classmethod
    def free_abelian(cls, rank: int) -> "ReferenceOracle":
        if rank < 1:
            raise ValueError("rank must be positive")
        return cls("free-abelian", rank=rank)

    @classmethod
    def free(cls, rank: int) -> "ReferenceOracle":
        if rank < 1:
            raise ValueError("rank must be positive")
        return cls("free", rank=rank)

    @classmethod
    def rewrite_search(cls, p: Presentation, budget: SearchBudget) -> "ReferenceOracle":
        return cls("rewrite", presentation=p, budget=budget)

    @property
    def num_generators(self) -> int:
        if self.kind == "cyclic":
            return 1
        if self.kind == "rewrite":
            return self.presentation.num_generators
        return self.rank

    def decide(self, w: Word) -> bool:
        if self.kind == "cyclic":
            return _exponent_sum(w, 0) % self.order == 0
        if self.kind == "free-abelian":
            return all(_exponent_sum(w, g) == 0 for g in range(self.rank))
        if self.kind == "free":
            return w.reduce() == EMPTY
        return is_trivial(w, self._system, self.budget)[0]

    def cayley_ball(self, radius: int) -> LabeledGraph:
        """The ball of the group's Cayley graph: vertices within ``radius``
        of the identity, with all edges between them, numbered in BFS order.
        Not available for the rewrite-search fallback."""
        if self.kind == "rewrite":
            raise ValueError("the rewrite-search oracle has no closed-form Cayley graph")
        mult = self._multiplication()
        identity = self._identity()
        index = {identity: 0}
        order = [identity]
        dist = [0]
        head = 0
        while head < len(order):
            elem, d = order[head], dist[head]
            head += 1
            if d == radius:
                continue
            for code in range(2 * self.num_generators):
                nxt = mult(elem, code)
                if nxt not in index:
                    index[nxt] = len(order)
                    order.append(nxt)
                    dist.append(d + 1)
        g = LabeledGraph(self.num_generators, num_vertices=len(order))
        for elem in order:
            for gen in range(self.num_generators):
                target = mult(elem, 2 * gen)
                if target in index:
                    g.add_edge(index[elem], gen, index[target])
        return g

    def _identity(self):
        if self.kind == "cyclic":
            return 0
        if self.kind == "free-abelian":
            return (0,) * self.rank
        return b""

    def _multiplication(self):
        if self.kind == "cyclic":
            k = self.order
            return lambda e, code: (e + (-1 if code & 1 else 1)) % k
        if self.kind == "free-abelian":
            def mult(e, code):
                g, delta = code >> 1, -1 if code & 1 else 1
                return e[:g] + (e[g] + delta,) + e[g + 1 :]
            return mult

        def mult_free(e, code):
            if e and e[-1] == code ^ 1:
                return e[:-1]
            return e + bytes((code,))
        return mult_free


def _exponent_sum(w: Word, gen: int) -> int:
    return sum(1 if c == 2 * gen else -1 for c in w.codes if c >> 1 == gen)


# -- isodiametric measurement -------------------------------------------------


class LoopComplexScanner:
    """Folds loop complexes of increasing radius once each and batch-traces
    word sets against them."""

    def __init__(self, p: Presentation):
        self.presentation = p
        self._dfas: list[LabeledGraph] = []
        self._tables: list[np.ndarray] = []

    def dfa(self, j: int) -> LabeledGraph:
        while len(self._dfas) <= j:
            folded, _ = fold(build_loop_complex(self.presentation, len(self._dfas)))
            self._dfas.append(folded)
            self._tables.append(transition_table(folded))
        return self._dfas[j]

    def accepts_all(self, j: int, words: np.ndarray, lengths: np.ndarray) -> bool:
        dfa = self.dfa(j)
        finals = _kernels.trace_batch(self._tables[j], dfa.origin, words, lengths)
        return bool(np.all(finals == dfa.origin))


def _reduced_trivial_rows(p: Presentation, n: int, oracle: ReferenceOracle) -> tuple[np.ndarray, np.ndarray]:
    """Padded array of all reduced oracle-trivial words of length ≤ n."""
    rows = []
    for length in range(n + 1):
        arr = _kernels.enumerate_reduced_words(p.alphabet_size, length)
        for row in arr:
            u = Word(bytes(int(c) for c in row))
            if oracle.decide(u):
                rows.append(u.codes)
    packed = np.zeros((len(rows), max(n, 1)), dtype=np.int16)
    lengths = np.zeros(len(rows), dtype=np.int64)
    for i, codes in enumerate(rows):
        packed[i, : len(codes)] = list(codes)
        lengths[i] = len(codes)
    return packed, lengths


def measure_isodiametric(
    p: Presentation,
    n: int,
    oracle: ReferenceOracle,
    max_radius: int | None = None,
    scanner: LoopComplexScanner | None = None,
) -> OracleResult:
    """Smallest radius ``j`` whose folded loop complex accepts the reduction
    of every oracle-trivial word of length ≤ n.

    Acceptance is sound at every radius, so only completeness is scanned.
    Every trivial word reduces to a reduced trivial word of no greater
    length, so the scan runs over reduced words only.
    """
    limit = n if max_radius is None else max_radius
    scanner = scanner or LoopComplexScanner(p)
    words, lengths = _reduced_trivial_rows(p, n, oracle)
    for j in range(limit + 1):
        if scanner.accepts_all(j, words, lengths):
            return OracleResult(j, OracleStatus.EXACT)
    return OracleResult(None, OracleStatus.LOWER_BOUND_ONLY)


# -- profiles -----------------------------------------------------------------


@dataclass(frozen=True)
class ProfileRow:
    n: int
    area: OracleResult  # P(n)
    length: OracleResult  # f(n)
    diameter: OracleResult  # d(n)
    tc_radius: OracleResult  # rhoTC(n)


@dataclass(frozen=True)
class FillingProfile:
    presentation: Presentation
    n_max: int
    rows: tuple[ProfileRow, ...]


_STATUS_RANK = {
    OracleStatus.EXACT: 0,
    OracleStatus.LOWER_BOUND_ONLY: 1,
    OracleStatus.BUDGET_EXCEEDED: 2,
}


def _aggregate(results: list[OracleResult]) -> OracleResult:
    """Max over per-word results; the max over no words is exactly 0."""
    value = 0
    worst = OracleStatus.EXACT
    for r in results:
        if r.value is not None:
            value = max(value, r.value)
        if _STATUS_RANK[r.status] > _STATUS_RANK[worst]:
            worst = r.status
    return OracleResult(value, worst)


def _all_words_up_to(alphabet_size: int, n: int) -> Iterator[Word]:
    for length in range(n + 1):
        for row in _kernels.enumerate_all_words(alphabet_size, length):
            yield Word(bytes(int(c) for c in row))


def measure_profile(
    p: Presentation,
    n_max: int,
    oracle: ReferenceOracle,
    budget: SearchBudget,
    max_rounds: int = 24,
) -> FillingProfile:
    """Profile of all four filling functions for 0 ≤ n ≤ n_max.

    ``P`` and ``f`` maximize the per-word search oracles over all
    oracle-trivial words of length ≤ n, non-reduced words included (the
    word's own length counts).  ``d`` scans folded loop complexes over
    reduced trivial words, and ``rhoTC`` reruns the coset saturation per n.
    """
    rs = RewriteSystem(p)
    scanner = LoopComplexScanner(p)
    trivial = [w for w in _all_words_up_to(p.alphabet_size, n_max) if oracle.decide(w)]

    rows = []
    for n in range(n_max + 1):
        here = [w for w in trivial if len(w) <= n]
        area = _aggregate([min_isoperimetric(w, rs, budget) for w in here])
        length = _aggregate([filling_length(w, rs, budget) for w in here])
        diameter = measure_isodiametric(p, n, oracle, scanner=scanner)
        try:
            _rounds, radius, _pcg = measure_tc_radius(p, n, oracle.decide, max_rounds=max_rounds)
            tc = OracleResult(radius, OracleStatus.EXACT)
        except TcNonTermination:
            tc = OracleResult(None, OracleStatus.BUDGET_EXCEEDED)
        rows.append(ProfileRow(n, area, length, diameter, tc))
    return FillingProfile(p, n_max, tuple(rows))


# -- inequality checks --------------------------------------------------------


@dataclass(frozen=True)
class InequalityRow:
    n: int
    d_le_half_f: bool | None  # None when an input is not Exact
    double_exp: bool | None
    d_equals_rho: bool | None


@dataclass(frozen=True)
class InequalityReport:
    presentation: Presentation
    big_c: int  # C = 2(2|A|+1)||R||^2
    base: int  # c = (2|A|)^2
    rows: tuple[InequalityRow, ...]
    fitted_area_base: int | None  # least integer c >= 2 with P(n) <= c^f(n)
    fitted_length_base: int | None  # least integer c >= 2 with f(n) <= c^(d(n)+n)

    @property
    def asserted_hold(self) -> bool:
        return all(
            (r.d_le_half_f is not False) and (r.double_exp is not False) for r in self.rows
        )

    @property
    def equality_holds(self) -> bool:
        return all(r.d_equals_rho is not False for r in self.rows)


def double_exp_bound(p: Presentation, n: int, d: int) -> int:
    """The explicit double-exponential isoperimetric bound n·2^(C·c^d)."""
    big_c = 2 * (2 * p.num_generators + 1) * p.relator_total_length**2
    base = (2 * p.num_generators) ** 2
    return n * 2 ** (big_c * base**d)


def _fit_base(pairs: list[tuple[int, int]], cap: int = 64) -> int | None:
    """Least integer base c ≥ 2 with value ≤ c**exponent for every pair."""
    for c in range(2, cap + 1):
        if all(value <= c**exponent for value, exponent in pairs):
            return c
    return None


def check_inequalities(profile: FillingProfile) -> InequalityReport:
    """Per-n checks: d(n) ≤ ⌈f(n)/2⌉ and P(n) ≤ n·2^(C·c^d(n)) on Exact
    entries (others are skipped), the d = rhoTC comparison, and the fitted
    (reported, never asserted) bases for P vs f and f vs d+n."""
    p = profile.presentation
    big_c = 2 * (2 * p.num_generators + 1) * p.relator_total_length**2
    base = (2 * p.num_generators) ** 2

    rows = []
    area_pairs = []
    length_pairs = []
    for row in profile.rows:
        d_le_half_f = None
        if row.diameter.exact and row.length.exact:
            d_le_half_f = row.diameter.value <= -(-row.length.value // 2)
        double_exp = None
        if row.area.exact and row.diameter.exact:
            double_exp = row.area.value <= double_exp_bound(p, row.n, row.diameter.value)
        d_equals_rho = None
        if row.diameter.exact and row.tc_radius.exact:
            d_equals_rho = row.diameter.value == row.tc_radius.value
        rows.append(InequalityRow(row.n, d_le_half_f, double_exp, d_equals_rho))
        if row.area.exact and row.length.exact:
            area_pairs.append((row.area.value, row.length.value))
        if row.length.exact and row.diameter.exact:
            length_pairs.append((row.length.value, row.diameter.value + row.n))

    return InequalityReport(
        presentation=p,
        big_c=big_c,
        base=base,
        rows=tuple(rows),
        fitted_area_base=_fit_base(area_pairs),
        fitted_length_base=_fit_base(length_pairs),
    )


def profile_to_csv(profile: FillingProfile, report: InequalityReport | None = None) -> str:
    """Deterministic CSV: one row per n, statuses spelled out, inequality
    verdicts as true/false with 'skipped' for non-Exact inputs."""
    if report is None:
        report = check_inequalities(profile)
    by_n = {r.n: r for r in report.rows}

    def render_bool(b: bool | None) -> str:
        return "skipped" if b is None else ("true" if b else "false")

    lines = ["n,P,P_status,f,f_status,d,rhoTC,d_le_half_f,double_exp,d_eq_rhoTC"]
    for row in profile.rows:
        checks = by_n[row.n]
        lines.append(
            ",".join(
                [
                    str(row.n),
                    row.area.render_value(),
                    str(row.area.status),
                    row.length.render_value(),
                    str(row.length.status),
                    row.diameter.render_value(),
                    row.tc_radius.render_value(),
                    render_bool(checks.d_le_half_f),
                    render_bool(checks.double_exp),
                    render_bool(checks.d_equals_rho),
                ]
            )
        )
    return "\n".join(lines) + "\n"


# -- pulling a complex apart --------------------------------------------------


def pull_apart(graph: LabeledGraph) -> list[tuple[Word, Word]]:
    """One (relator, conjugator) pair per recorded face: the conjugator is
    the label of a breadth-first geodesic from the origin to the face's
    basepoint, so its length is at most the graph radius.  Re-folding the
    wedge of the resulting loops reproduces the graph (see :func:`refold`)."""
    if graph.faces is None:
        raise MissingFaceData("face records were dropped from this graph")
    paths: dict[int, Word] = {graph.origin: EMPTY}
    queue = [graph.origin]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for code in range(2 * graph.num_generators):
            for t in sorted(graph.step(v, code)):
                if t not in paths:
                    paths[t] = Word(paths[v].codes + bytes((code,)))
                    queue.append(t)
    out = []
    for bp, rel in graph.faces:
        if bp not in paths:
            raise MissingFaceData(f"face basepoint {bp} is not reachable from the origin")
        out.append((rel, paths[bp]))
    return out


def refold(num_generators: int, loops: list[tuple[Word, Word]]) -> LabeledGraph:
    """Fold the wedge of conjugated relator loops r^x at a fresh origin."""
    g = LabeledGraph(num_generators)
    for rel, conjugator in loops:
        tip = g.add_path(g.origin, conjugator)
        g.add_loop(tip, rel)
    folded, _ = fold(g)
    return folded
