"""Endomorphisms (and homomorphisms) of free groups given by generator images."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Sequence

from . import stallings
from .errors import ResourceLimit
from .words import Alphabet, Word, exponent_sum, substitute

DEFAULT_LENGTH_GUARD = 10**6

__all__ = ["FreeEndo", "exponent_sum", "DEFAULT_LENGTH_GUARD"]


@dataclass(frozen=True, eq=False)
class FreeEndo:
    """Homomorphism F_rank -> F_target sending generator ``i`` to ``images[i]``.

    ``target_rank`` defaults to ``rank``; only then is it an endomorphism and
    may be composed with itself.
    """

    images: tuple[Word, ...]
    target_rank: int | None = None
    guard: int = DEFAULT_LENGTH_GUARD
    _powers: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        images = tuple(Word(w) for w in self.images)
        object.__setattr__(self, "images", images)
        target = self.target_rank if self.target_rank is not None else len(images)
        object.__setattr__(self, "target_rank", target)
        for w in images:
            if w.max_base() > target:
                raise ValueError("image outside the target alphabet")
        if sum(map(len, images)) > self.guard:
            raise ResourceLimit(f"endomorphism images exceed {self.guard} letters")

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeEndo):
            return NotImplemented
        return self.images == other.images and self.target_rank == other.target_rank

    def __hash__(self) -> int:
        return hash((self.images, self.target_rank))

    @property
    def rank(self) -> int:
        return len(self.images)

    @property
    def is_endo(self) -> bool:
        return self.rank == self.target_rank

    @classmethod
    def identity(cls, n: int) -> "FreeEndo":
        return cls(tuple(Word((i,)) for i in range(1, n + 1)))

    @classmethod
    def from_strings(cls, specs: Sequence[str], alphabet: Alphabet | None = None) -> "FreeEndo":
        alphabet = alphabet or Alphabet.standard(len(specs))
        return cls(tuple(alphabet.parse(s) for s in specs))

    def apply(self, w: Sequence[int]) -> Word:
        if w and max(abs(x) for x in w) > self.rank:
            raise ValueError("word outside the domain alphabet")
        return substitute(w, self.images, guard=self.guard)

    __call__ = apply

    def then(self, other: "FreeEndo") -> "FreeEndo":
        """``w -> other(self(w))`` (right-action composition)."""
        if self.target_rank != other.rank:
            raise ValueError("alphabet mismatch")
        return FreeEndo(
            tuple(other.apply(w) for w in self.images),
            other.target_rank,
            guard=min(self.guard, other.guard),
        )

    def power(self, k: int) -> "FreeEndo":
        if not self.is_endo:
            raise ValueError("only endomorphisms have powers")
        if k < 0:
            raise ValueError("negative power")
        if k == 0:
            return FreeEndo.identity(self.rank)
        result = None
        bit = 1
        while k:
            if k & 1:
                sq = self._binary_power(bit)
                result = sq if result is None else result.then(sq)
            k >>= 1
            bit <<= 1
        return result  # type: ignore[return-value]

    def _binary_power(self, bit: int) -> "FreeEndo":
        with self._lock:
            cached = self._powers.get(bit)
        if cached is not None:
            return cached
        if bit == 1:
            value = self
        else:
            half = self._binary_power(bit // 2)
            value = half.then(half)
        with self._lock:
            self._powers[bit] = value
        return value

    def image_automaton(self, k: int = 1) -> stallings.StallingsAutomaton:
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self.is_endo and k > 1:
            raise ValueError("only endomorphisms have powers")
        # Im(phi^{j+1}) = phi(Im(phi^j)): push a basis forward instead of forming phi^k
        aut = stallings.from_generators(self.images, self.target_rank)
        for _ in range(k - 1):
            nxt = stallings.from_generators([self.apply(w) for w in aut.basis()], self.target_rank)
            if nxt == aut:
                break
            aut = nxt
        return aut

    def is_identity(self) -> bool:
        return self.is_endo and all(w == (i + 1,) for i, w in enumerate(self.images))

    def is_trivial(self) -> bool:
        return all(not w for w in self.images)

    def format(self, alphabet: Alphabet | None = None, name: str | None = None) -> str:
        alphabet = alphabet or Alphabet.standard(max(self.rank, self.target_rank))
        lines = [f"[endo {name}]"] if name else []
        for i, w in enumerate(self.images):
            lines.append(f"{alphabet.names[i]} -> {alphabet.format(w)}")
        return "\n".join(lines)


def compose(phi: FreeEndo, psi: FreeEndo) -> FreeEndo:
    """Apply ``phi`` first, then ``psi``."""
    return phi.then(psi)


def power(phi: FreeEndo, k: int) -> FreeEndo:
    return phi.power(k)


def apply(phi: FreeEndo, w: Sequence[int]) -> Word:
    return phi.apply(w)


def image_automaton(phi: FreeEndo, k: int = 1) -> stallings.StallingsAutomaton:
    return phi.image_automaton(k)
