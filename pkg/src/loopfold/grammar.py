"""Pushdown and grammar pipeline for the double-exponential area bound.

The chain: a pushdown machine tracking free reduction of the input against a
fixed target word, its product with a tree-complex NFA, the standard
triple-construction grammar for the product, simplification, and a
shortest-generated-word computation.  The shortest word bounds the rewrite
application count from above, and the pumping bound turns the grammar size
into the explicit estimate n·2^{C·c^d}.

PDA conventions: acceptance is by empty stack from initial stack ``(z,)``;
every move either pushes one symbol above the inspected top or pops the top.
States are all-integer labels for deterministic ordering — the countdown
stages m..0 (stage m doubles as the reading phase) plus -1 for the final
state; product states pair an NFA vertex with a stage.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .automata import LabeledGraph, build_tree_nfa, nfa_accepts
from .core import EMPTY, Presentation, Word, inverse_code
from .fillings import (
    LoopComplexScanner,
    ReferenceOracle,
    double_exp_bound,
    measure_isodiametric,
)
from .rewrite import RewriteSystem, SearchBudget, min_isoperimetric

BOTTOM = -1  # the stack-bottom marker, rendered "z"

PUSH = "push"
POP = "pop"


@dataclass(frozen=True)
class Move:
    src: object
    inp: int | None  # None = empty-input move
    top: int  # inspected top of stack (letter code or BOTTOM)
    dst: object
    action: tuple  # (PUSH, code) or (POP,)


@dataclass(frozen=True)
class Pda:
    num_generators: int
    states: tuple
    start: object
    final: object
    moves: tuple[Move, ...]


def _stack_alphabet(num_generators: int) -> list[int]:
    return [BOTTOM] + list(range(2 * num_generators))


def build_dyck_pda(w: Word, num_generators: int) -> Pda:
    """Standalone machine accepting exactly the words freely equal to ``w``.

    Reading phase at stage m: pop when the input letter inverts the top,
    push otherwise.  Countdown phase: empty-input pops matching red(w) from
    its last letter down, then the bottom marker.
    """
    target = w.reduce().codes
    m = len(target)
    states = tuple(range(m, -1, -1)) + (-1,)
    moves = []
    for a in range(2 * num_generators):
        for t in _stack_alphabet(num_generators):
            if t == inverse_code(a):
                moves.append(Move(m, a, t, m, (POP,)))
            else:
                moves.append(Move(m, a, t, m, (PUSH, a)))
    for i in range(m, 0, -1):
        moves.append(Move(i, None, target[i - 1], i - 1, (POP,)))
    moves.append(Move(0, None, BOTTOM, -1, (POP,)))
    return Pda(num_generators, states, start=m, final=-1, moves=tuple(moves))


def build_product_pda(w: Word, tree: LabeledGraph) -> Pda:
    """Machine for the intersection: words freely equal to ``w`` that the
    tree complex accepts.  Reading moves step the NFA component; the
    countdown runs at the NFA origin only."""
    target = w.reduce().codes
    m = len(target)
    k = tree.num_generators
    origin = tree.origin
    reading = [(v, m) for v in range(tree.num_vertices)]
    countdown = [(origin, i) for i in range(m - 1, -1, -1)] + [(origin, -1)]
    moves = []
    for v in range(tree.num_vertices):
        for a in range(2 * k):
            for p in sorted(tree.step(v, a)):
                for t in _stack_alphabet(k):
                    if t == inverse_code(a):
                        moves.append(Move((v, m), a, t, (p, m), (POP,)))
                    else:
                        moves.append(Move((v, m), a, t, (p, m), (PUSH, a)))
    for i in range(m, 0, -1):
        moves.append(Move((origin, i), None, target[i - 1], (origin, i - 1), (POP,)))
    moves.append(Move((origin, 0), None, BOTTOM, (origin, -1), (POP,)))
    return Pda(
        k,
        tuple(reading) + tuple(countdown[:-1]) + ((origin, -1),),
        start=(origin, m),
        final=(origin, -1),
        moves=tuple(moves),
    )


def simulate_pda(pda: Pda, w: Word) -> bool:
    """Empty-stack acceptance by breadth-first search over configurations."""
    by_input: dict[tuple, list[Move]] = {}
    for mv in pda.moves:
        by_input.setdefault((mv.src, mv.inp, mv.top), []).append(mv)
    codes = w.codes
    start = (0, pda.start, (BOTTOM,))
    seen = {start}
    queue = [start]
    head = 0
    while head < len(queue):
        pos, state, stack = queue[head]
        head += 1
        if pos == len(codes) and not stack:
            return True
        if not stack:
            continue
        top = stack[-1]
        candidates = list(by_input.get((state, None, top), ()))
        if pos < len(codes):
            candidates += by_input.get((state, codes[pos], top), ())
        for mv in candidates:
            next_pos = pos if mv.inp is None else pos + 1
            next_stack = stack + (mv.action[1],) if mv.action[0] == PUSH else stack[:-1]
            config = (next_pos, mv.dst, next_stack)
            if config not in seen:
                seen.add(config)
                queue.append(config)
    return False


# -- grammars -----------------------------------------------------------------

START = "S"


@dataclass(frozen=True)
class Cfg:
    """Rules are (lhs, rhs) with terminal letter codes as ints, nonterminal
    triples (state, stack symbol, state) as tuples, and the start symbol
    :data:`START`."""

    num_generators: int
    start: object
    rules: tuple[tuple[object, tuple], ...]
    root_triple: tuple | None = field(default=None, compare=False)

    def nonterminals(self) -> set:
        out = {self.start}
        for lhs, rhs in self.rules:
            out.add(lhs)
            out.update(s for s in rhs if isinstance(s, tuple))
        return out


def _state_text(state) -> str:
    if isinstance(state, tuple):
        vertex, stage = state
        return f"q{vertex}f" if stage == -1 else f"q{vertex}s{stage}"
    return "f" if state == -1 else f"s{state}"


def _letter_text(code: int) -> str:
    if code == BOTTOM:
        return "z"
    base = "a" if code % 2 == 0 else "A"
    return chr(ord(base) + code // 2)


def _symbol_text(sym) -> str:
    if isinstance(sym, tuple):
        if len(sym) == 3:
            p, c, q = sym
            return f"[{_state_text(p)},{_letter_text(c)},{_state_text(q)}]"
        return "[" + ",".join(str(part) for part in sym) + "]"
    if sym == START:
        return START
    return _letter_text(sym)


def _sort_token(sym) -> tuple:
    # heterogeneous symbols need type tags to stay comparable
    if isinstance(sym, tuple):
        return (1, tuple(_sort_token(part) for part in sym))
    if isinstance(sym, int):
        return (0, sym)
    return (2, str(sym))


def _rule_key(rule) -> tuple:
    lhs, rhs = rule
    return (_sort_token(lhs), tuple(_sort_token(s) for s in rhs))


def pda_to_cfg(pda: Pda) -> Cfg:
    """Triple construction: ``[p, X, q]`` derives the inputs consumed while
    the machine goes from p to q, net effect popping X.  Pop moves become
    terminal rules; push moves become ternary rules over all state pairs."""
    rules = []
    for q in pda.states:
        rules.append((START, ((pda.start, BOTTOM, q),)))
    for mv in pda.moves:
        consumed = () if mv.inp is None else (mv.inp,)
        if mv.action[0] == POP:
            rules.append(((mv.src, mv.top, mv.dst), consumed))
        else:
            pushed = mv.action[1]
            for r1 in pda.states:
                for r2 in pda.states:
                    rules.append(
                        (
                            (mv.src, mv.top, r2),
                            consumed + ((mv.dst, pushed, r1), (r1, mv.top, r2)),
                        )
                    )
    rules = sorted(set(rules), key=_rule_key)
    return Cfg(
        pda.num_generators,
        START,
        tuple(rules),
        root_triple=(pda.start, BOTTOM, pda.final),
    )


def _productive_lengths(rules) -> dict:
    """Least derivable terminal-length per nonterminal (fixpoint)."""
    best: dict = {}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            total = 0
            for s in rhs:
                if isinstance(s, tuple) or s == START:
                    if s not in best:
                        break
                    total += best[s]
                else:
                    total += 1
            else:
                if lhs not in best or total < best[lhs]:
                    best[lhs] = total
                    changed = True
    return best


def _only_empty(rules, productive: dict) -> set:
    """Nonterminals that derive the empty word and nothing else."""
    nonempty = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            if lhs in nonempty:
                continue
            if any(s not in productive for s in rhs if isinstance(s, tuple)):
                continue  # rule derives nothing at all
            grows = any(not isinstance(s, tuple) for s in rhs) or any(
                s in nonempty for s in rhs if isinstance(s, tuple)
            )
            if grows:
                nonempty.add(lhs)
                changed = True
    return {n for n in productive if n not in nonempty and isinstance(n, tuple)}


def simplify_cfg(g: Cfg) -> Cfg:
    """Substitute away the empty-word-only (countdown) nonterminals, re-root
    at the single bottom-popping triple, and prune dead symbols.  The
    generated language is unchanged; right sides stay within length 3."""
    productive = _productive_lengths(g.rules)
    erase = _only_empty(g.rules, productive)
    rules = []
    for lhs, rhs in g.rules:
        if lhs in erase:
            continue
        if any(isinstance(s, tuple) and s not in productive for s in rhs):
            continue
        rules.append((lhs, tuple(s for s in rhs if s not in erase)))

    start = g.root_triple if g.root_triple is not None else g.start
    if start in erase:
        # The whole language is {empty word}; keep a single erased root.
        return Cfg(g.num_generators, start, ((start, ()),), root_triple=g.root_triple)
    if start != g.start:
        rules = [(lhs, rhs) for lhs, rhs in rules if lhs != g.start]

    reachable = {start}
    frontier = [start]
    by_lhs: dict = {}
    for lhs, rhs in rules:
        by_lhs.setdefault(lhs, []).append(rhs)
    while frontier:
        sym = frontier.pop()
        for rhs in by_lhs.get(sym, ()):
            for s in rhs:
                if isinstance(s, tuple) and s not in reachable:
                    reachable.add(s)
                    frontier.append(s)
    rules = [
        (lhs, rhs)
        for lhs, rhs in rules
        if lhs in reachable and all(s in reachable for s in rhs if isinstance(s, tuple))
    ]
    return Cfg(
        g.num_generators,
        start,
        tuple(sorted(set(rules), key=_rule_key)),
        root_triple=g.root_triple,
    )


def generates(g: Cfg, w: Word) -> bool:
    """Membership by memoized span derivation (right sides are short, so no
    normal form is needed)."""
    codes = w.codes
    by_lhs: dict = {}
    for lhs, rhs in g.rules:
        by_lhs.setdefault(lhs, []).append(rhs)
    memo: dict = {}

    def seq_derives(seq: tuple, lo: int, hi: int) -> bool:
        if not seq:
            return lo == hi
        if len(seq) == 1:
            return derives(seq[0], lo, hi)
        first = seq[0]
        return any(
            derives(first, lo, cut) and seq_derives(seq[1:], cut, hi)
            for cut in range(lo, hi + 1)
        )

    def derives(sym, lo: int, hi: int) -> bool:
        if not isinstance(sym, tuple) and sym != START:
            return hi == lo + 1 and lo < len(codes) and codes[lo] == sym
        key = (sym, lo, hi)
        if key in memo:
            return memo[key]
        memo[key] = False  # cycle guard; cycles cannot shorten a derivation
        memo[key] = any(seq_derives(rhs, lo, hi) for rhs in by_lhs.get(sym, ()))
        return memo[key]

    return derives(g.start, 0, len(codes))


def shortest_word(g: Cfg) -> tuple[int, Word] | None:
    """Minimum-length derivable string with a witness, by least-fixpoint
    search over nonterminal costs (priority queue; deterministic
    tie-breaking by rule text).  ``None`` when the language is empty."""
    rules = list(g.rules)
    occ: dict = {}
    remaining = []
    terminal_len = []
    for idx, (lhs, rhs) in enumerate(rules):
        nts = [s for s in rhs if isinstance(s, tuple) or s == START]
        remaining.append(len(nts))
        terminal_len.append(len(rhs) - len(nts))
        for s in set(nts):  # one entry per rule even when a symbol repeats
            occ.setdefault(s, []).append(idx)

    settled: dict = {}
    best_rule: dict = {}
    heap: list = []
    for idx, (lhs, rhs) in enumerate(rules):
        if remaining[idx] == 0:
            heapq.heappush(heap, (terminal_len[idx], _rule_key(rules[idx]), idx))
    cost_acc = list(terminal_len)
    while heap:
        cost, _, idx = heapq.heappop(heap)
        lhs = rules[idx][0]
        if lhs in settled:
            continue
        settled[lhs] = cost
        best_rule[lhs] = idx
        for jdx in occ.get(lhs, ()):
            count = sum(1 for s in rules[jdx][1] if s == lhs)
            cost_acc[jdx] += settled[lhs] * count
            remaining[jdx] -= count
            if remaining[jdx] == 0:
                heapq.heappush(heap, (cost_acc[jdx], _rule_key(rules[jdx]), jdx))

    if g.start not in settled:
        return None

    def expand(sym) -> bytes:
        if not isinstance(sym, tuple) and sym != START:
            return bytes((sym,))
        return b"".join(expand(s) for s in rules[best_rule[sym]][1])

    witness = Word(expand(g.start))
    return settled[g.start], witness


def parse_tree(g: Cfg):
    """Best-rule derivation tree for the shortest word: (symbol, children),
    terminals as leaves.  ``None`` when the language is empty."""
    if shortest_word(g) is None:
        return None
    rules = list(g.rules)
    settled = _productive_lengths(rules)
    # Rebuild the deterministic best-rule choice the shortest-word search makes.
    best: dict = {}
    for idx, (lhs, rhs) in enumerate(rules):
        nts = [s for s in rhs if isinstance(s, tuple) or s == START]
        if any(s not in settled for s in nts):
            continue
        cost = (len(rhs) - len(nts)) + sum(settled[s] for s in nts)
        key = (cost, _rule_key(rules[idx]))
        if lhs not in best or key < best[lhs][0]:
            best[lhs] = (key, idx)

    def build(sym):
        if not isinstance(sym, tuple) and sym != START:
            return (sym, ())
        children = tuple(build(s) for s in rules[best[sym][1]][1])
        return (sym, children)

    return build(g.start)


def render_cfg(g: Cfg) -> str:
    """One rule per line, nonterminals bracketed, terminals bare letters,
    the empty right side written ``1``."""
    lines = []
    for lhs, rhs in g.rules:
        body = " ".join(_symbol_text(s) for s in rhs) if rhs else "1"
        lines.append(f"{_symbol_text(lhs)} -> {body}")
    return "\n".join(sorted(lines)) + "\n"


# -- closed-path factoring ----------------------------------------------------


def _accepting_path(tree: LabeledGraph, w: Word) -> list[int] | None:
    """Vertex sequence of the lexicographically first accepting run."""
    codes = w.codes
    states = {(0, tree.origin): None}
    queue = [(0, tree.origin)]
    head = 0
    while head < len(queue):
        pos, v = queue[head]
        head += 1
        if pos == len(codes):
            continue
        for t in sorted(tree.step(v, codes[pos])):
            key = (pos + 1, t)
            if key not in states:
                states[key] = (pos, v)
                queue.append(key)
    if (len(codes), tree.origin) not in states:
        return None
    path = [tree.origin]
    key = (len(codes), tree.origin)
    while states[key] is not None:
        key = states[key]
        path.append(key[1])
    return path[::-1]


def _spanning_tree(tree: LabeledGraph) -> tuple[dict[int, Word], set]:
    """Breadth-first geodesic words per vertex, plus the set of directed
    edges used as tree links."""
    words = {tree.origin: EMPTY}
    tree_edges = set()
    queue = [tree.origin]
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for code in range(2 * tree.num_generators):
            for t in sorted(tree.step(v, code)):
                if t not in words:
                    words[t] = Word(words[v].codes + bytes((code,)))
                    edge = (v, code >> 1, t) if code % 2 == 0 else (t, code >> 1, v)
                    tree_edges.add(edge)
                    queue.append(t)
    return words, tree_edges


def _cyclic_core(w: Word) -> tuple[Word, Word]:
    """Split w = t · core · t⁻¹ with core cyclically reduced."""
    codes = w.reduce().codes
    lo, hi = 0, len(codes)
    while hi - lo >= 2 and codes[lo] == inverse_code(codes[hi - 1]):
        lo += 1
        hi -= 1
    return Word(codes[:lo]), Word(codes[lo:hi])


def _match_rotation(core: Word, relators: Iterable[Word]) -> tuple[Word, Word, int] | None:
    """Find (prefix, relator, sign) with core equal to the relator (or its
    inverse) rotated past the prefix."""
    for r in relators:
        for candidate, sign in ((r, 1), (r.inverse(), -1)):
            codes = candidate.codes
            if len(codes) != len(core):
                continue
            doubled = codes + codes
            for k in range(len(codes)):
                if doubled[k : k + len(codes)] == core.codes:
                    return Word(codes[:k]), r, sign
    return None


def loop_factors(
    tree: LabeledGraph, p: Presentation, w: Word
) -> list[tuple[Word, Word, int]]:
    """Decompose an accepted word into conjugated relators.

    Returns (conjugator y, relator r, sign s) triples whose product
    y·r^s·y⁻¹ · … freely equals ``w``; there is one factor per traversal of
    a non-tree edge, so the count never exceeds ``len(w)``.
    """
    path = _accepting_path(tree, w)
    if path is None:
        raise ValueError("the complex does not accept this word")
    words, tree_edges = _spanning_tree(tree)
    factors = []
    for pos, code in enumerate(w.codes):
        u, v = path[pos], path[pos + 1]
        edge = (u, code >> 1, v) if code % 2 == 0 else (v, code >> 1, u)
        if edge in tree_edges:
            continue
        src, gen, dst = edge
        cycle = Word(
            words[src].codes + bytes((2 * gen,)) + words[dst].inverse().codes
        )
        shift, core = _cyclic_core(cycle)
        matched = _match_rotation(core, p.relators)
        if matched is None:
            raise ValueError("a non-tree edge does not close a relator cycle")
        prefix, relator, sign = matched
        conjugator = Word(shift.codes + prefix.inverse().codes).reduce()
        if code % 2 == 1:
            sign = -sign
        factors.append((conjugator, relator, sign))
    return factors


def multiply_factors(factors: list[tuple[Word, Word, int]]) -> Word:
    """Reduced product of y·r^s·y⁻¹ over the factor list."""
    out = b""
    for y, r, s in factors:
        body = r.codes if s > 0 else r.inverse().codes
        out += y.codes + body + y.inverse().codes
    return Word(out).reduce()


# -- the end-to-end bound experiment -------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    word: Word
    n: int
    diameter: int
    shortest_length: int
    witness: Word
    area: int
    big_c: int
    base: int
    bound: int

    @property
    def holds(self) -> bool:
        return self.area <= self.shortest_length <= self.bound


def double_exp_experiment(
    p: Presentation,
    n_max: int,
    oracle: ReferenceOracle,
    budget: SearchBudget,
) -> list[BoundReport]:
    """For every oracle-trivial word of length ≤ n_max: run the full product
    pipeline, extract the shortest intersecting word, and compare it against
    the brute-force application count below and the explicit
    double-exponential bound above."""
    rs = RewriteSystem(p)
    big_c = 2 * (2 * p.num_generators + 1) * p.relator_total_length**2
    base = (2 * p.num_generators) ** 2
    scanner = LoopComplexScanner(p)
    diameters: dict[int, int] = {}
    trees: dict[int, LabeledGraph] = {}
    reports = []
    for length in range(n_max + 1):
        result = measure_isodiametric(p, length, oracle, scanner=scanner)
        if result.value is None:
            raise ValueError(f"diameter scan did not converge at n={length}")
        diameters[length] = result.value
    for length in range(n_max + 1):
        for candidate in _all_words(p.alphabet_size, length):
            if not oracle.decide(candidate):
                continue
            d = diameters[length]
            if d not in trees:
                trees[d] = build_tree_nfa(p, d)
            tree = trees[d]
            pda = build_product_pda(candidate, tree)
            cfg = simplify_cfg(pda_to_cfg(pda))
            found = shortest_word(cfg)
            if found is None:
                raise ValueError(f"empty intersection for the trivial word {candidate}")
            ell, witness = found
            if witness.reduce() != candidate.reduce():
                raise ValueError("witness is not freely equal to its word")
            if not nfa_accepts(tree, witness):
                raise ValueError("witness rejected by the tree complex")
            area = min_isoperimetric(candidate, rs, budget)
            if not area.exact:
                raise ValueError("budget too small for an exact area value")
            reports.append(
                BoundReport(
                    word=candidate,
                    n=length,
                    diameter=d,
                    shortest_length=ell,
                    witness=witness,
                    area=area.value,
                    big_c=big_c,
                    base=base,
                    bound=double_exp_bound(p, length, d),
                )
            )
    return reports


def _all_words(alphabet_size: int, length: int):
    for codes in itertools.product(range(alphabet_size), repeat=length):
        yield Word(codes)
