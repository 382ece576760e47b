"""Words over a symmetric generator alphabet, and finite group presentations.

Letters are stored as small integer codes: generator ``g`` is ``2*g`` and its
formal inverse is ``2*g + 1``, so inversion of a single letter is ``code ^ 1``.
A word is an immutable sequence of codes; free reduction cancels adjacent
``x x^-1`` pairs.  The text form writes generator ``g`` as a lowercase letter
(``a``, ``b``, ...) and its inverse as the corresponding uppercase letter.
"""

from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple


class Letter(NamedTuple):
    generator: int
    sign: int  # +1 or -1

    @property
    def code(self) -> int:
        return 2 * self.generator + (0 if self.sign > 0 else 1)


def inverse_code(code: int) -> int:
    return code ^ 1


def reduce_codes(codes: bytes) -> bytes:
    """Freely reduce a code string by cancelling adjacent inverse pairs."""
    out = bytearray()
    for c in codes:
        if out and out[-1] == c ^ 1:
            out.pop()
        else:
            out.append(c)
    return bytes(out)


class Word:
    """An immutable word over the symmetric alphabet of a presentation."""

    __slots__ = ("codes",)

    def __init__(self, codes: bytes | bytearray | Iterable[int] = b""):
        self.codes: bytes
        object.__setattr__(self, "codes", bytes(codes))

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def from_letters(cls, letters: Iterable[Letter | tuple[int, int]]) -> "Word":
        return cls(bytes(Letter(*l).code for l in letters))

    def letters(self) -> list[Letter]:
        return [Letter(c >> 1, -1 if c & 1 else 1) for c in self.codes]

    def __len__(self) -> int:
        return len(self.codes)

    def __iter__(self) -> Iterator[int]:
        return iter(self.codes)

    def __getitem__(self, i) -> "Word":
        if isinstance(i, slice):
            return Word(self.codes[i])
        return Word(self.codes[i : i + 1])

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.codes == other.codes

    def __hash__(self) -> int:
        return hash(self.codes)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.codes + other.codes)

    def __repr__(self) -> str:
        return f"Word({render_word(self)!r})"

    def inverse(self) -> "Word":
        return Word(bytes(c ^ 1 for c in reversed(self.codes)))

    def reduce(self) -> "Word":
        return Word(reduce_codes(self.codes))

    def is_reduced(self) -> bool:
        return all(self.codes[i] != self.codes[i + 1] ^ 1 for i in range(len(self.codes) - 1))

    def conjugate(self, by: "Word") -> "Word":
        """Literal (unreduced) conjugate ``by^-1 * self * by``."""
        return by.inverse() * self * by

    def cyclic_permutations(self) -> list["Word"]:
        n = len(self.codes)
        if n == 0:
            return [self]
        return [Word(self.codes[i:] + self.codes[:i]) for i in range(n)]


EMPTY = Word()


class ParseError(ValueError):
    """A syntax error in presentation or word text, with 1-based position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


def _letter_code(ch: str, num_generators: int, line: int, col: int) -> int:
    if "a" <= ch <= "z":
        g, sign_bit = ord(ch) - ord("a"), 0
    elif "A" <= ch <= "Z":
        g, sign_bit = ord(ch) - ord("A"), 1
    else:
        raise ParseError(f"invalid letter {ch!r}", line, col)
    if g >= num_generators:
        raise ParseError(f"letter {ch!r} is outside the declared alphabet", line, col)
    return 2 * g + sign_bit


def parse_word(text: str, num_generators: int, line: int = 1, col: int = 1) -> Word:
    """Parse a word; ``""`` and ``"1"`` both denote the empty word."""
    if text == "" or text == "1":
        return EMPTY
    return Word(bytes(_letter_code(ch, num_generators, line, col + i) for i, ch in enumerate(text)))


def render_word(w: Word) -> str:
    if len(w) == 0:
        return "1"
    out = []
    for c in w.codes:
        g = c >> 1
        if g >= 26:
            raise ValueError("text form supports at most 26 generators")
        out.append(chr((ord("A") if c & 1 else ord("a")) + g))
    return "".join(out)


class Presentation:
    """A finite presentation: a generator count and a tuple of relators.

    Relators are freely reduced on load, the empty relator is rejected, and
    literal duplicates are dropped.  Relators are kept in shortlex order so
    that everything built from a presentation is order-deterministic.
    """

    __slots__ = ("num_generators", "relators")

    def __init__(self, num_generators: int, relators: Iterable[Word] = ()):
        if not isinstance(num_generators, int) or num_generators < 1:
            raise ValueError("a presentation needs at least one generator")
        reduced = []
        for r in relators:
            r = r.reduce()
            if len(r) == 0:
                raise ValueError("the empty word is not allowed as a relator")
            if any(c >= 2 * num_generators for c in r.codes):
                raise ValueError("relator uses a letter outside the alphabet")
            reduced.append(r)
        reduced.sort(key=lambda w: (len(w), w.codes))
        seen, kept = set(), []
        for r in reduced:
            if r.codes not in seen:
                seen.add(r.codes)
                kept.append(r)
        object.__setattr__(self, "num_generators", num_generators)
        object.__setattr__(self, "relators", tuple(kept))

    def __setattr__(self, name, value):
        raise AttributeError("Presentation is immutable")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Presentation)
            and self.num_generators == other.num_generators
            and self.relators == other.relators
        )

    def __hash__(self) -> int:
        return hash((self.num_generators, self.relators))

    def __repr__(self) -> str:
        gens = " ".join(chr(ord("a") + g) for g in range(self.num_generators))
        rels = " ".join(render_word(r) for r in self.relators)
        return f"<Presentation gens: {gens}; rels: {rels}>"

    @property
    def relator_total_length(self) -> int:
        return sum(len(r) for r in self.relators)

    @property
    def max_relator_length(self) -> int:
        return max((len(r) for r in self.relators), default=0)

    @property
    def alphabet_size(self) -> int:
        """Size of the symmetric alphabet, ``2 * num_generators``."""
        return 2 * self.num_generators

    def symmetrized(self) -> "Presentation":
        """Close the relator set under inversion and cyclic permutation.

        Permutations of a relator that is not cyclically reduced are freely
        reduced on load; for cyclically reduced relators this is the literal
        closure.  The result presents the same group.
        """
        words = []
        for r in self.relators:
            for base in (r, r.inverse()):
                words.extend(base.cyclic_permutations())
        return Presentation(self.num_generators, words)


def parse_presentation(text: str) -> Presentation:
    """Parse the two-line text format::

        gens: a b
        rels: abAB aab
    """
    lines = text.splitlines()
    significant = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip()]
    if len(significant) != 2:
        raise ParseError("expected exactly two lines: 'gens: ...' and 'rels: ...'", len(lines) or 1, 1)
    (gline, gtext), (rline, rtext) = significant

    if not gtext.startswith("gens:"):
        raise ParseError("first line must start with 'gens:'", gline, 1)
    names = gtext[len("gens:") :].split()
    if not names:
        raise ParseError("no generators declared", gline, len(gtext) + 1)
    for name in names:
        col = gtext.index(name) + 1
        if len(name) != 1 or not ("a" <= name <= "z"):
            raise ParseError(f"generator {name!r} must be a single lowercase letter", gline, col)
    expected = [chr(ord("a") + i) for i in range(len(names))]
    if names != expected:
        raise ParseError(f"generators must be consecutive letters {' '.join(expected)!r}", gline, len("gens: ") + 1)

    if not rtext.startswith("rels:"):
        raise ParseError("second line must start with 'rels:'", rline, 1)
    relators = []
    pos = len("rels:")
    for token in rtext[len("rels:") :].split():
        col = rtext.index(token, pos) + 1
        pos = col + len(token)
        w = parse_word(token, len(names), rline, col)
        if len(w.reduce()) == 0:
            raise ParseError(f"relator {token!r} reduces to the empty word", rline, col)
        relators.append(w)
    return Presentation(len(names), relators)


def render_presentation(p: Presentation) -> str:
    gens = " ".join(chr(ord("a") + g) for g in range(p.num_generators))
    rels = " ".join(render_word(r) for r in p.relators)
    return f"gens: {gens}\nrels: {rels}\n"
