"""Virtually free groups given as a disjoint union of cosets of a free normal subgroup.

Elements are pairs ``(f, i)`` standing for ``f b_i`` with ``f`` a reduced word
in the free normal subgroup ``F`` and ``b_0 = 1``.  The presentation supplies
the twist ``b_i a = u_{ia} b_i`` and the coset products
``b_i b_j = v_{ij} b_{r_{ij}}``.  Coset indices are 0-based here; index 0 is
the identity coset.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from . import stallings
from .errors import InvalidInput, ResourceLimit
from .free_endo import DEFAULT_LENGTH_GUARD, FreeEndo
from .words import IDENTITY, Alphabet, Word, concat, concat_all, invert, substitute, words_up_to


@dataclass(frozen=True, order=True)
class GElement:
    word: Word
    coset: int = 0

    def __post_init__(self):
        if not isinstance(self.word, Word):
            object.__setattr__(self, "word", Word(self.word))

    @property
    def is_identity(self) -> bool:
        return not self.word and self.coset == 0


ONE = GElement(IDENTITY, 0)


@dataclass(frozen=True, eq=False)
class VFPresentation:
    alphabet: Alphabet
    coset_names: tuple[str, ...]
    twist: tuple[tuple[Word, ...], ...]  # twist[i][a] = u_{ia}
    prod_word: tuple[tuple[Word, ...], ...]  # prod_word[i][j] = v_{ij}
    prod_coset: tuple[tuple[int, ...], ...]  # prod_coset[i][j] = r_{ij}

    @classmethod
    def free(cls, alphabet: Alphabet | int) -> "VFPresentation":
        if isinstance(alphabet, int):
            alphabet = Alphabet.standard(alphabet)
        n = alphabet.size
        return cls(alphabet, ("1",), (tuple(Word((a + 1,)) for a in range(n)),), ((IDENTITY,),), ((0,),))

    @classmethod
    def build(
        cls,
        alphabet: Alphabet,
        coset_names: Sequence[str],
        twist: dict[tuple[int, int], Word],
        products: dict[tuple[int, int], tuple[Word, int]],
    ) -> "VFPresentation":
        """Fill the identity-coset conventions and check every other entry is present."""
        m, n = len(coset_names), alphabet.size
        if not coset_names or coset_names[0] != "1":
            raise InvalidInput("first coset must be 1")
        tw = []
        for i in range(m):
            row = []
            for a in range(n):
                if i == 0:
                    row.append(Word((a + 1,)))
                elif (i, a) in twist:
                    row.append(Word(twist[(i, a)]))
                else:
                    raise InvalidInput(
                        f"missing relation: rel {coset_names[i]} {alphabet.names[a]}"
                    )
            tw.append(tuple(row))
        pw, pc = [], []
        for i in range(m):
            wrow, crow = [], []
            for j in range(m):
                if i == 0:
                    wrow.append(IDENTITY)
                    crow.append(j)
                elif j == 0:
                    wrow.append(IDENTITY)
                    crow.append(i)
                elif (i, j) in products:
                    w, r = products[(i, j)]
                    wrow.append(Word(w))
                    crow.append(r)
                else:
                    raise InvalidInput(
                        f"missing relation: rel {coset_names[i]} {coset_names[j]}"
                    )
            pw.append(tuple(wrow))
            pc.append(tuple(crow))
        return cls(alphabet, tuple(coset_names), tuple(tw), tuple(pw), tuple(pc))

    @property
    def rank(self) -> int:
        return self.alphabet.size

    @property
    def m(self) -> int:
        return len(self.coset_names)

    @property
    def is_free(self) -> bool:
        return self.m == 1

    @cached_property
    def twist_maps(self) -> tuple[FreeEndo, ...]:
        return tuple(FreeEndo(row) for row in self.twist)

    @cached_property
    def inverse_coset(self) -> tuple[int, ...]:
        out = []
        for i in range(self.m):
            js = [j for j in range(self.m) if self.prod_coset[i][j] == 0]
            out.append(js[0] if js else -1)
        return tuple(out)

    def generators(self) -> list[GElement]:
        """Free letters followed by the coset representatives ``b_1, ..., b_{m-1}``."""
        gens = [GElement(Word((a + 1,)), 0) for a in range(self.rank)]
        gens += [GElement(IDENTITY, i) for i in range(1, self.m)]
        return gens

    def generator_names(self) -> list[str]:
        return list(self.alphabet.names) + list(self.coset_names[1:])

    # -- arithmetic ------------------------------------------------------

    def mult(self, g: GElement, h: GElement, guard: int | None = DEFAULT_LENGTH_GUARD) -> GElement:
        i, j = g.coset, h.coset
        twisted = h.word if i == 0 else substitute(h.word, self.twist[i], guard=guard)
        word = concat_all((g.word, twisted, self.prod_word[i][j]))
        if guard is not None and len(word) > guard:
            raise ResourceLimit(f"word length exceeded guard of {guard} letters")
        return GElement(word, self.prod_coset[i][j])

    def product(self, elements: Iterable[GElement]) -> GElement:
        acc = ONE
        for g in elements:
            acc = self.mult(acc, g)
        return acc

    def inverse(self, g: GElement) -> GElement:
        i = g.coset
        if i == 0:
            return GElement(invert(g.word), 0)
        j = self.inverse_coset[i]
        if j < 0:
            raise InvalidInput(f"coset {self.coset_names[i]} has no inverse coset")
        # (f b_i)^-1 = b_j v_ij^-1 f^-1 = sigma_j(v_ij^-1 f^-1) b_j
        w = invert(concat(g.word, self.prod_word[i][j]))
        return GElement(substitute(w, self.twist[j]), j)

    def power(self, g: GElement, k: int) -> GElement:
        if k < 0:
            return self.power(self.inverse(g), -k)
        acc = ONE
        for _ in range(k):
            acc = self.mult(acc, g)
        return acc

    def letter_element(self, x: int) -> GElement:
        return GElement(Word((x,)), 0)

    # -- validation --------------------------------------------------------

    def validate(self) -> list[str]:
        diags: list[str] = []
        m, n = self.m, self.rank
        names = self.coset_names
        if not names or names[0] != "1":
            diags.append("first coset must be 1")
        if len(set(names)) != len(names):
            diags.append("duplicate coset names")
        if set(names[1:]) & set(self.alphabet.names):
            diags.append("coset names clash with free generator names")
        for i in range(m):
            for j in range(m):
                r = self.prod_coset[i][j]
                if not 0 <= r < m:
                    diags.append(f"coset index out of range in rel {names[i]} {names[j]}")
                w = self.prod_word[i][j]
                if w and w.max_base() > n:
                    diags.append(f"letter out of range in rel {names[i]} {names[j]}")
            for a in range(n):
                w = self.twist[i][a]
                if w and w.max_base() > n:
                    diags.append(f"letter out of range in rel {names[i]} {self.alphabet.names[a]}")
        if diags:
            return diags
        for a in range(n):
            if self.twist[0][a] != (a + 1,):
                diags.append("identity coset must act trivially")
        for j in range(m):
            if self.prod_word[0][j] or self.prod_coset[0][j] != j:
                diags.append(f"identity coset product rel 1 {names[j]} must be trivial")
            if self.prod_word[j][0] or self.prod_coset[j][0] != j:
                diags.append(f"identity coset product rel {names[j]} 1 must be trivial")
        for i in range(m):
            if self.inverse_coset[i] < 0:
                diags.append(f"coset {names[i]} has no inverse coset")
        for i in range(1, m):
            aut = stallings.from_generators(self.twist[i], n)
            if aut.rank != n or aut.index() != 1:
                diags.append(f"twist by {names[i]} is not an automorphism of the free part")
        if diags:
            return diags
        letters = [IDENTITY] + [Word((x,)) for a in range(1, n + 1) for x in (a, -a)]
        elems = [GElement(w, i) for i in range(m) for w in letters]
        for g, h, k in itertools.product(elems, repeat=3):
            left = self.mult(self.mult(g, h), k)
            right = self.mult(g, self.mult(h, k))
            if left != right:
                diags.append(
                    "associativity fails for "
                    f"({self.format_element(g)})({self.format_element(h)})({self.format_element(k)})"
                )
                return diags
        return diags

    # -- formatting ------------------------------------------------------

    def format_element(self, g: GElement) -> str:
        if g.coset == 0:
            return self.alphabet.format(g.word)
        if not g.word:
            return self.coset_names[g.coset]
        return f"{self.alphabet.format(g.word)} {self.coset_names[g.coset]}"

    def parse_element(self, text: str) -> GElement:
        tokens = text.split()
        if not tokens:
            raise InvalidInput("empty element")
        coset = 0
        if len(tokens) >= 1 and tokens[-1] in self.coset_names[1:]:
            coset = self.coset_names.index(tokens[-1])
            tokens = tokens[:-1]
        elif len(tokens) >= 2 and tokens[-1] == "1":
            tokens = tokens[:-1]
        try:
            word = self.alphabet.parse(" ".join(tokens)) if tokens else IDENTITY
        except ValueError as exc:
            raise InvalidInput(str(exc)) from exc
        return GElement(word, coset)

    def elements_up_to(self, max_len: int) -> Iterator[GElement]:
        for i in range(self.m):
            for w in words_up_to(self.rank, max_len):
                yield GElement(w, i)


@dataclass(frozen=True, eq=False)
class GEndo:
    """Endomorphism of G given by images of the free letters and of ``b_1, ..., b_{m-1}``."""

    letter_images: tuple[GElement, ...]
    coset_images: tuple[GElement, ...]  # index 0 is the identity coset
    guard: int = DEFAULT_LENGTH_GUARD
    _powers: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GEndo):
            return NotImplemented
        return (self.letter_images, self.coset_images) == (other.letter_images, other.coset_images)

    def __hash__(self) -> int:
        return hash((self.letter_images, self.coset_images))

    @classmethod
    def identity(cls, P: VFPresentation) -> "GEndo":
        return cls(
            tuple(GElement(Word((a + 1,)), 0) for a in range(P.rank)),
            tuple(GElement(IDENTITY, i) for i in range(P.m)),
        )

    @classmethod
    def from_free(cls, phi: FreeEndo) -> "GEndo":
        return cls(tuple(GElement(w, 0) for w in phi.images), (ONE,))

    def generator_images(self) -> list[GElement]:
        return list(self.letter_images) + list(self.coset_images[1:])

    def free_part(self) -> FreeEndo | None:
        """The underlying free endomorphism when every letter maps into ``F``."""
        if any(g.coset for g in self.letter_images):
            return None
        return FreeEndo(tuple(g.word for g in self.letter_images), guard=self.guard)


def endo_apply(P: VFPresentation, phi: GEndo, g: GElement) -> GElement:
    guard = phi.guard
    free = all(img.coset == 0 for img in phi.letter_images)
    if free:
        word = substitute(g.word, [img.word for img in phi.letter_images], guard=guard)
        acc = GElement(word, 0)
    else:
        inverses: dict[int, GElement] = {}
        acc = ONE
        for x in g.word:
            if x > 0:
                img = phi.letter_images[x - 1]
            else:
                img = inverses.get(x)
                if img is None:
                    img = inverses[x] = P.inverse(phi.letter_images[-x - 1])
            acc = P.mult(acc, img, guard)
    if g.coset:
        acc = P.mult(acc, phi.coset_images[g.coset], guard)
    return acc


def endo_then(P: VFPresentation, phi: GEndo, psi: GEndo) -> GEndo:
    """Apply ``phi`` first, then ``psi``."""
    return GEndo(
        tuple(endo_apply(P, psi, g) for g in phi.letter_images),
        tuple(endo_apply(P, psi, g) for g in phi.coset_images),
        guard=min(phi.guard, psi.guard),
    )


def endo_power(P: VFPresentation, phi: GEndo, k: int) -> GEndo:
    if k < 0:
        raise ValueError("negative power")
    if k == 0:
        return GEndo.identity(P)
    result = None
    bit = 1
    while k:
        if k & 1:
            sq = _binary_power(P, phi, bit)
            result = sq if result is None else endo_then(P, result, sq)
        k >>= 1
        bit <<= 1
    return result  # type: ignore[return-value]


def _binary_power(P: VFPresentation, phi: GEndo, bit: int) -> GEndo:
    with phi._lock:
        cached = phi._powers.get(bit)
    if cached is not None:
        return cached
    if bit == 1:
        value = phi
    else:
        half = _binary_power(P, phi, bit // 2)
        value = endo_then(P, half, half)
    with phi._lock:
        phi._powers[bit] = value
    return value


def endo_check(P: VFPresentation, phi: GEndo) -> list[str]:
    diags: list[str] = []
    n, m = P.rank, P.m
    if len(phi.letter_images) != n or len(phi.coset_images) != m:
        return ["endomorphism must give one image per generator"]
    if not phi.coset_images[0].is_identity:
        diags.append("identity coset must map to the identity")
    for g in phi.generator_images():
        if not 0 <= g.coset < m or (g.word and g.word.max_base() > n):
            diags.append("image outside the group")
    if diags:
        return diags
    names = P.coset_names
    for i in range(1, m):
        bi = phi.coset_images[i]
        for a in range(n):
            left = P.mult(bi, phi.letter_images[a])
            right = endo_apply(P, phi, GElement(P.twist[i][a], i))
            if left != right:
                diags.append(f"relation rel {names[i]} {P.alphabet.names[a]} is not preserved")
        for j in range(1, m):
            left = P.mult(bi, phi.coset_images[j])
            right = endo_apply(P, phi, GElement(P.prod_word[i][j], P.prod_coset[i][j]))
            if left != right:
                diags.append(f"relation rel {names[i]} {names[j]} is not preserved")
    return diags


def restrict_to_subgroup(
    P: VFPresentation, phi: GEndo, S: stallings.StallingsAutomaton
) -> FreeEndo:
    """Restriction of ``phi`` to the invariant free subgroup ``S <= F``, in the basis ``S.basis()``."""
    images = []
    for w in S.basis():
        img = endo_apply(P, phi, GElement(w, 0))
        if img.coset != 0 or not S.contains(img.word):
            raise InvalidInput("subgroup is not invariant under the endomorphism")
        images.append(S.rewrite_in_basis(img.word))
    return FreeEndo(tuple(images), S.rank, guard=phi.guard)


def quotient_endo(P: VFPresentation, phi: GEndo, sub) -> tuple[int, ...]:
    """The self-map of the cosets of a fully invariant subgroup induced by ``phi``.

    ``sub`` needs ``coset_reps`` (list of GElement) and ``coset_index(g)``.
    """
    theta = []
    for rep in sub.coset_reps:
        idx = sub.coset_index(endo_apply(P, phi, rep))
        if idx is None:
            raise InvalidInput("image coset undetermined; subgroup is not invariant")
        theta.append(idx)
    return tuple(theta)
