"""The symmetric rewrite system of a presentation, with exhaustive oracles.

Every relator ``r`` in the symmetrized relator set contributes the factor
rewrite rules ``u -> v`` for all splits ``r = u * v^-1``; these cost one step.
Free insertion and cancellation of adjacent inverse pairs cost nothing.  The
resulting rewrite graph on words is undirected, so reachability and 0-1
shortest-path distance from the empty word give, for every word at once, its
triviality, its minimum relator-application count, and its filling length.

Searches are capped by a :class:`SearchBudget`; a value is reported ``Exact``
only when it has stabilized across two consecutive length caps (``L`` and
``L + 2``), since no a-priori bound on intermediate word length is available.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .core import EMPTY, Presentation, Word


class OracleStatus(enum.Enum):
    EXACT = "Exact"
    LOWER_BOUND_ONLY = "LowerBoundOnly"
    BUDGET_EXCEEDED = "BudgetExceeded"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OracleResult:
    """A measured value with its confidence; ``value`` is None for unreached."""

    value: int | None
    status: OracleStatus

    @property
    def exact(self) -> bool:
        return self.status is OracleStatus.EXACT

    def render_value(self) -> str:
        return "unreached" if self.value is None else str(self.value)


@dataclass(frozen=True)
class SearchBudget:
    max_word_length: int = 8
    max_states: int = 2_000_000

    def __post_init__(self):
        if self.max_word_length < 1 or self.max_states < 1:
            raise ValueError("budget fields must be positive")


class Rule(NamedTuple):
    lhs: Word
    rhs: Word
    from_relators: bool  # True: relator rule (costs a step); False: free move


class Exploration(NamedTuple):
    """Everything reachable from the empty word under a length cap."""

    costs: dict[bytes, int]  # word codes -> minimum relator-rule count
    complete: bool  # False when the state budget stopped the frontier


class RewriteSystem:
    """Factor-rewriting rules of a presentation plus the free-group moves."""

    def __init__(self, presentation: Presentation):
        self.presentation = presentation
        self.symmetrized_presentation = presentation.symmetrized()

        relator_rules = set()
        for r in self.symmetrized_presentation.relators:
            for i in range(len(r) + 1):
                relator_rules.add((r[:i], r[i:].inverse()))
        self.relator_rules: tuple[Rule, ...] = tuple(
            Rule(u, v, True)
            for u, v in sorted(relator_rules, key=lambda p: (len(p[0]), p[0].codes, len(p[1]), p[1].codes))
        )

        free_rules = []
        for c in range(presentation.alphabet_size):
            pair = Word(bytes((c, c ^ 1)))
            free_rules.append(Rule(pair, EMPTY, False))
            free_rules.append(Rule(EMPTY, pair, False))
        self.free_rules: tuple[Rule, ...] = tuple(free_rules)

        # factor-indexed views for the search inner loop
        self._subst: dict[bytes, tuple[bytes, ...]] = {}
        self._relator_inserts: tuple[bytes, ...] = ()
        by_lhs: dict[bytes, list[bytes]] = {}
        for rule in self.relator_rules:
            by_lhs.setdefault(rule.lhs.codes, []).append(rule.rhs.codes)
        inserts = tuple(sorted(by_lhs.pop(b"", [])))
        self._relator_inserts = inserts
        self._subst = {u: tuple(sorted(vs)) for u, vs in sorted(by_lhs.items())}
        self._lhs_lengths = tuple(sorted({len(u) for u in self._subst}))

        self._sweeps: dict[tuple[int, int], Exploration] = {}

    # -- rule application ------------------------------------------------

    def apply_rule_positions(self, w: Word) -> set[tuple[Rule, int, Word]]:
        """Every single-step rewrite of ``w``, as (rule, position, result)."""
        out = set()
        for rule in self.relator_rules + self.free_rules:
            k = len(rule.lhs)
            for i in range(len(w) - k + 1):
                if w.codes[i : i + k] == rule.lhs.codes:
                    out.add((rule, i, Word(w.codes[:i] + rule.rhs.codes + w.codes[i + k :])))
        return out

    def _neighbors(self, codes: bytes, cap: int) -> Iterator[tuple[int, bytes]]:
        """(cost, successor) pairs of ``codes``, intermediates capped at ``cap``."""
        n = len(codes)
        for i in range(n - 1):
            if codes[i + 1] == codes[i] ^ 1:
                yield 0, codes[:i] + codes[i + 2 :]
        if n + 2 <= cap:
            for i in range(n + 1):
                for c in range(self.presentation.alphabet_size):
                    yield 0, codes[:i] + bytes((c, c ^ 1)) + codes[i:]
        for v in self._relator_inserts:
            if n + len(v) <= cap:
                for i in range(n + 1):
                    yield 1, codes[:i] + v + codes[i:]
        for k in self._lhs_lengths:
            if k > n:
                break
            for i in range(n - k + 1):
                options = self._subst.get(codes[i : i + k])
                if options:
                    for v in options:
                        if n - k + len(v) <= cap:
                            yield 1, codes[:i] + v + codes[i + k :]

    # -- exhaustive search -----------------------------------------------

    def explore(self, cap: int, max_states: int = 2_000_000) -> Exploration:
        """0-1 BFS from the empty word over words of length ≤ ``cap``.

        By symmetry of the rule set, the cost recorded for ``w`` equals the
        minimum relator-rule count of a capped rewrite sequence from ``w``
        to the empty word.  Results are cached per (cap, state budget).
        """
        key = (cap, max_states)
        cached = self._sweeps.get(key)
        if cached is not None:
            return cached

        costs: dict[bytes, int] = {b"": 0}
        dq: deque[tuple[int, bytes]] = deque([(0, b"")])
        complete = True
        settled = 0
        while dq:
            cost, codes = dq.popleft()
            if costs.get(codes) != cost:
                continue
            settled += 1
            if settled > max_states:
                complete = False
                break
            for dcost, nxt in self._neighbors(codes, cap):
                nc = cost + dcost
                old = costs.get(nxt)
                if old is None or nc < old:
                    costs[nxt] = nc
                    if dcost:
                        dq.append((nc, nxt))
                    else:
                        dq.appendleft((nc, nxt))
        result = Exploration(costs, complete)
        self._sweeps[key] = result
        return result


def min_isoperimetric(w: Word, rs: RewriteSystem, budget: SearchBudget) -> OracleResult:
    """Minimum relator-rule count rewriting ``w`` to the empty word.

    Runs the capped search at ``L`` and ``L + 2``; agreement of the two
    values is the evidence for ``Exact``.
    """
    lo = rs.explore(budget.max_word_length, budget.max_states)
    hi = rs.explore(budget.max_word_length + 2, budget.max_states)
    v_lo, v_hi = lo.costs.get(w.codes), hi.costs.get(w.codes)
    if not (lo.complete and hi.complete):
        return OracleResult(v_hi if v_hi is not None else v_lo, OracleStatus.BUDGET_EXCEEDED)
    if v_hi is None:
        return OracleResult(None, OracleStatus.LOWER_BOUND_ONLY)
    if v_lo == v_hi:
        return OracleResult(v_hi, OracleStatus.EXACT)
    return OracleResult(v_hi, OracleStatus.LOWER_BOUND_ONLY)


def filling_length(w: Word, rs: RewriteSystem, budget: SearchBudget) -> OracleResult:
    """Minimum over rewrite sequences ``w -> ... -> 1`` of the longest
    intermediate word (the starting word included); equivalently the least
    cap ``c`` whose reachable set contains ``w``."""
    if len(w) == 0:
        return OracleResult(0, OracleStatus.EXACT)
    cap_limit = budget.max_word_length
    if len(w) > cap_limit:
        return OracleResult(None, OracleStatus.LOWER_BOUND_ONLY)

    first = rs.explore(len(w), budget.max_states)
    if not first.complete:
        return OracleResult(None, OracleStatus.BUDGET_EXCEEDED)
    if w.codes in first.costs:
        return OracleResult(len(w), OracleStatus.EXACT)

    outer = rs.explore(cap_limit, budget.max_states)
    if not outer.complete:
        return OracleResult(None, OracleStatus.BUDGET_EXCEEDED)
    if w.codes not in outer.costs:
        return OracleResult(None, OracleStatus.LOWER_BOUND_ONLY)

    lo, hi = len(w), cap_limit  # unreached at lo, reached at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        probe = rs.explore(mid, budget.max_states)
        if not probe.complete:
            return OracleResult(None, OracleStatus.BUDGET_EXCEEDED)
        if w.codes in probe.costs:
            hi = mid
        else:
            lo = mid
    return OracleResult(hi, OracleStatus.EXACT)


def is_trivial(w: Word, rs: RewriteSystem, budget: SearchBudget) -> tuple[bool, OracleStatus]:
    """Semidecision: True iff ``w`` rewrites to the empty word within budget."""
    cap = max(budget.max_word_length, len(w))
    sweep = rs.explore(cap, budget.max_states)
    if w.codes in sweep.costs:
        return True, OracleStatus.EXACT
    return False, (
        OracleStatus.LOWER_BOUND_ONLY if sweep.complete else OracleStatus.BUDGET_EXCEEDED
    )
