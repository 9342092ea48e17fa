"""Freely reduced words over a signed finite alphabet.

A letter is a nonzero integer: ``k > 0`` stands for generator ``k - 1`` and
``-k`` for its inverse.  Words never carry their alphabet; the names used for
printing and parsing live in a separate :class:`Alphabet`, so the same word
type serves a free group, a subgroup written in its own basis, and free
products with extra letters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

Letter = int

_NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def letter(base: int, sign: int = 1) -> Letter:
    if base < 0 or sign not in (1, -1):
        raise ValueError(f"bad letter ({base}, {sign})")
    return sign * (base + 1)


def letter_base(x: Letter) -> int:
    return abs(x) - 1


def letter_sign(x: Letter) -> int:
    return 1 if x > 0 else -1


def _free_reduce(letters: Iterable[int]) -> list[int]:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return out


class Word(tuple):
    """Immutable freely reduced word.  ``Word(seq)`` reduces its input."""

    __slots__ = ()

    def __new__(cls, letters: Iterable[int] = ()):
        return tuple.__new__(cls, _free_reduce(letters))

    @classmethod
    def _trusted(cls, letters: Iterable[int]) -> "Word":
        # caller guarantees the sequence is already reduced
        return tuple.__new__(cls, letters)

    def __mul__(self, other: "Word") -> "Word":  # type: ignore[override]
        return concat(self, other)

    def __rmul__(self, other):  # pragma: no cover - tuple repetition is not supported
        return NotImplemented

    def __pow__(self, k: int) -> "Word":
        return power(self, k)

    def __invert__(self) -> "Word":
        return invert(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    def max_base(self) -> int:
        return max((abs(x) for x in self), default=0)


IDENTITY = Word._trusted(())


def reduce(raw: Sequence[int], alphabet_size: int | None = None) -> Word:
    if alphabet_size is not None:
        for x in raw:
            if x == 0 or abs(x) > alphabet_size:
                raise ValueError(f"letter {x} outside alphabet of size {alphabet_size}")
    return Word(raw)


def concat(w1: Sequence[int], w2: Sequence[int]) -> Word:
    n1, n2 = len(w1), len(w2)
    k = 0
    while k < n1 and k < n2 and w1[n1 - 1 - k] == -w2[k]:
        k += 1
    return Word._trusted(tuple(w1[: n1 - k]) + tuple(w2[k:]))


def concat_all(words: Iterable[Sequence[int]]) -> Word:
    stack: list[int] = []
    for w in words:
        _push(stack, w)
    return Word._trusted(stack)


def _push(stack: list[int], w: Sequence[int]) -> None:
    i, n = 0, len(w)
    while i < n and stack and stack[-1] == -w[i]:
        stack.pop()
        i += 1
    if i < n:
        stack.extend(w[i:])


def invert(w: Sequence[int]) -> Word:
    return Word._trusted(-x for x in reversed(w))


def power(w: Word, k: int) -> Word:
    if k < 0:
        return power(invert(w), -k)
    if k == 0 or not w:
        return IDENTITY
    core, conj = cyclic_reduce(w)
    return concat_all((conj, tuple(core) * k, invert(conj)))


def cyclic_reduce(w: Sequence[int]) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``w = conjugator core conjugator^-1``."""
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return Word._trusted(w[i : j + 1]), Word._trusted(w[:i])


def primitive_root(w: Sequence[int]) -> tuple[Word, int]:
    return _primitive_root(tuple(w))


@lru_cache(maxsize=65536)
def _primitive_root(w: tuple[int, ...]) -> tuple[Word, int]:
    if not w:
        raise ValueError("the identity has no primitive root")
    core, conj = cyclic_reduce(w)
    n = len(core)
    for d in range(1, n + 1):
        if n % d == 0 and tuple(core[:d]) * (n // d) == tuple(core):
            root = concat_all((conj, core[:d], invert(conj)))
            return root, n // d
    raise AssertionError("unreachable")


def commute(w1: Sequence[int], w2: Sequence[int]) -> bool:
    direct = concat(w1, w2) == concat(w2, w1)
    if w1 and w2:
        r1, _ = primitive_root(w1)
        r2, _ = primitive_root(w2)
        via_roots = r1 == r2 or r1 == invert(r2)
        assert via_roots == direct, (w1, w2)
    return direct


def exponent_sum(w: Sequence[int], base: int) -> int:
    return sum(1 if x > 0 else -1 for x in w if abs(x) == base + 1)


def substitute(w: Sequence[int], images: Sequence[Sequence[int]], *, guard: int | None = None) -> Word:
    """Image of ``w`` under the homomorphism sending generator ``i`` to ``images[i]``."""
    inverses: dict[int, Word] = {}
    stack: list[int] = []
    for x in w:
        if x > 0:
            _push(stack, images[x - 1])
        else:
            inv = inverses.get(x)
            if inv is None:
                inv = inverses[x] = invert(images[-x - 1])
            _push(stack, inv)
        if guard is not None and len(stack) > guard:
            from .errors import ResourceLimit

            raise ResourceLimit(f"word length exceeded guard of {guard} letters")
    return Word._trusted(stack)


@dataclass(frozen=True)
class Alphabet:
    """Generator names for printing and parsing words."""

    names: tuple[str, ...]

    def __post_init__(self):
        for name in self.names:
            if not _NAME_RE.match(name):
                raise ValueError(f"invalid generator name {name!r}")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")

    @classmethod
    def standard(cls, n: int, prefix: str | None = None) -> "Alphabet":
        if prefix is None and n <= 26:
            return cls(tuple("abcdefghijklmnopqrstuvwxyz"[:n]))
        return cls(tuple(f"{prefix or 'x'}{i + 1}" for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.names)

    def extended(self, name: str) -> "Alphabet":
        return Alphabet(self.names + (name,))

    def parse(self, text: str) -> Word:
        tokens = text.split()
        if tokens == ["1"]:
            return IDENTITY
        raw = []
        index = {name: i for i, name in enumerate(self.names)}
        for tok in tokens:
            name, inv = (tok[:-3], True) if tok.endswith("^-1") else (tok, False)
            if name not in index:
                raise ValueError(f"unknown generator {tok!r}")
            raw.append(-(index[name] + 1) if inv else index[name] + 1)
        return Word(raw)

    def format(self, w: Sequence[int]) -> str:
        if not w:
            return "1"
        return " ".join(self.names[abs(x) - 1] + ("" if x > 0 else "^-1") for x in w)


def format_word(w: Sequence[int]) -> str:
    n = max((abs(x) for x in w), default=0)
    return Alphabet.standard(n).format(w)


def parse_word(text: str, n: int) -> Word:
    return Alphabet.standard(n).parse(text)


def words_up_to(n: int, max_len: int) -> Iterable[Word]:
    """All reduced words over ``n`` generators of length <= ``max_len``, length-lex order."""
    letters = [x for i in range(1, n + 1) for x in (i, -i)]
    layer: list[tuple[int, ...]] = [()]
    yield IDENTITY
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1] == -x:
                    continue
                nxt.append(w + (x,))
        for w in nxt:
            yield Word._trusted(w)
        layer = nxt
