"""Relator fusion that halves the rewrite-application count.

Fusing the reduced products of 2..m symmetrized relators into the relator set
(``m`` being the longest base relator) yields a presentation of the same
group whose minimum application count obeys P'(n) ≤ ⌈P(n)/2 + n/2⌉: each new
relator does the work of two old ones.  The check runs both presentations
through the 0-1 BFS oracle and compares entrywise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import _kernels
from .core import Presentation, Word
from .rewrite import (
    OracleResult,
    OracleStatus,
    RewriteSystem,
    SearchBudget,
    is_trivial,
    min_isoperimetric,
)

DEFAULT_PRODUCT_CAP = 200_000


class CombinatorialBlowupError(RuntimeError):
    """The fused-relator enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class CompressedPresentation:
    base: Presentation
    symmetrized: tuple[Word, ...]
    fused: tuple[Word, ...]
    combined: Presentation
    m: int


def compress(p: Presentation, max_products: int = DEFAULT_PRODUCT_CAP) -> CompressedPresentation:
    """Adjoin every nonempty reduced product of 2..m symmetrized relators.

    Products reducing to the empty word are discarded; the fused set keeps
    literal reduced words (no cyclic identification).  Raises
    :class:`CombinatorialBlowupError` instead of truncating when the tuple
    count Σ |R_s|^i exceeds ``max_products``.
    """
    if not p.relators:
        raise ValueError("nothing to fuse: the relator set is empty")
    symmetrized = p.symmetrized().relators
    m = p.max_relator_length
    total = sum(len(symmetrized) ** i for i in range(2, m + 1))
    if total > max_products:
        raise CombinatorialBlowupError(
            f"{total} relator tuples exceed the cap of {max_products}"
        )
    fused = set()
    for i in range(2, m + 1):
        for combo in itertools.product(symmetrized, repeat=i):
            product = Word(b"".join(r.codes for r in combo)).reduce()
            if len(product) > 0:
                fused.add(product)
    combined = Presentation(p.num_generators, symmetrized + tuple(fused))
    return CompressedPresentation(
        base=p,
        symmetrized=symmetrized,
        fused=tuple(sorted(fused, key=lambda u: (len(u), u.codes))),
        combined=combined,
        m=m,
    )


@dataclass(frozen=True)
class CompressionRow:
    n: int
    base_area: OracleResult
    combined_area: OracleResult
    bound: int | None  # ⌈(P_base(n) + n) / 2⌉ when the base value is Exact
    holds: bool | None  # None when either area is not Exact


@dataclass(frozen=True)
class CompressionReport:
    compressed: CompressedPresentation
    n_max: int
    rows: tuple[CompressionRow, ...]
    triviality_agreement: bool

    @property
    def all_hold(self) -> bool:
        return self.triviality_agreement and all(r.holds is not False for r in self.rows)


def _max_area(words, system: RewriteSystem, budget: SearchBudget) -> OracleResult:
    value = 0
    worst = OracleStatus.EXACT
    rank = {
        OracleStatus.EXACT: 0,
        OracleStatus.LOWER_BOUND_ONLY: 1,
        OracleStatus.BUDGET_EXCEEDED: 2,
    }
    for w in words:
        result = min_isoperimetric(w, system, budget)
        if result.value is not None:
            value = max(value, result.value)
        if rank[result.status] > rank[worst]:
            worst = result.status
    return OracleResult(value, worst)


def verify_compression(
    p: Presentation, n_max: int, budget: SearchBudget
) -> CompressionReport:
    """Entrywise check of P_combined(n) ≤ ⌈P_base(n)/2 + n/2⌉ for n ≤ n_max,
    plus a same-group cross-check (triviality agreement on all words ≤ n_max)."""
    compressed = compress(p)
    base_system = RewriteSystem(p)
    combined_system = RewriteSystem(compressed.combined)

    trivial: list[Word] = []
    agreement = True
    for length in range(n_max + 1):
        for row in _kernels.enumerate_all_words(p.alphabet_size, length):
            w = Word(bytes(int(c) for c in row))
            in_base = is_trivial(w, base_system, budget)[0]
            in_combined = is_trivial(w, combined_system, budget)[0]
            if in_base != in_combined:
                agreement = False
            if in_base:
                trivial.append(w)

    rows = []
    for n in range(n_max + 1):
        here = [w for w in trivial if len(w) <= n]
        base_area = _max_area(here, base_system, budget)
        combined_area = _max_area(here, combined_system, budget)
        bound = None
        holds = None
        if base_area.exact:
            bound = (base_area.value + n + 1) // 2
            if combined_area.exact:
                holds = combined_area.value <= bound
        rows.append(CompressionRow(n, base_area, combined_area, bound, holds))
    return CompressionReport(
        compressed=compressed,
        n_max=n_max,
        rows=tuple(rows),
        triviality_agreement=agreement,
    )
