"""The fully invariant finite-index free subgroup F' of a virtually free group.

F' is the intersection of the kernels of all homomorphisms from G onto groups
of order at most m (m = number of cosets of F).  Every such quotient acts
regularly on itself, hence embeds in the symmetric group on m points, so it is
enough to search assignments of permutations of m points to the generators.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from . import stallings
from .errors import ResourceLimit
from .vfree import ONE, GElement, VFPresentation
from .words import Word

Perm = tuple[int, ...]

DEFAULT_MAX_M = 6


def _compose(p: Perm, q: Perm) -> Perm:
    """First ``p`` then ``q`` (right action)."""
    return tuple(q[x] for x in p)


def _inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def _word_perm(word: Sequence[int], perms: Sequence[Perm], inverses: Sequence[Perm], ident: Perm) -> Perm:
    acc = ident
    for x in word:
        acc = _compose(acc, perms[x - 1] if x > 0 else inverses[-x - 1])
    return acc


def _cycle_type_reps(m: int) -> list[Perm]:
    """One permutation per conjugacy class of the symmetric group on m points."""
    reps = []

    def partitions(n: int, largest: int):
        if n == 0:
            yield []
            return
        for k in range(min(n, largest), 0, -1):
            for rest in partitions(n - k, k):
                yield [k] + rest

    for part in partitions(m, m):
        p = list(range(m))
        start = 0
        for k in part:
            for t in range(k):
                p[start + t] = start + (t + 1) % k
            start += k
        reps.append(tuple(p))
    return reps


@dataclass(frozen=True)
class FiniteQuotient:
    """A homomorphism G -> Sym(m) given by the images of ``P.generators()``."""

    perms: tuple[Perm, ...]
    order: int  # size of the image group = index of the kernel

    def evaluate(self, P: VFPresentation, g: GElement) -> Perm:
        n = P.rank
        ident = tuple(range(len(self.perms[0]))) if self.perms else ()
        free = self.perms[:n]
        p = _word_perm(g.word, free, [_inverse(q) for q in free], ident)
        if g.coset:
            p = _compose(p, self.perms[n + g.coset - 1])
        return p

    def kernel_table(self, P: VFPresentation) -> tuple[tuple[int, ...], ...]:
        """Right-regular action of the generators on the image, canonically numbered.

        Two homomorphisms have the same kernel exactly when these tables agree.
        """
        gens = list(self.perms) + [_inverse(p) for p in self.perms[: P.rank]]
        ident = tuple(range(len(self.perms[0]))) if self.perms else ()
        number = {ident: 0}
        order = [ident]
        table = []
        i = 0
        while i < len(order):
            p = order[i]
            i += 1
            row = []
            for q in gens:
                r = _compose(p, q)
                if r not in number:
                    number[r] = len(order)
                    order.append(r)
                row.append(number[r])
            table.append(tuple(row))
        return tuple(table)


def _group_order(gens: Sequence[Perm], limit: int) -> int | None:
    if not gens:
        return 1
    ident = tuple(range(len(gens[0])))
    seen = {ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for q in gens:
            r = _compose(p, q)
            if r not in seen:
                seen.add(r)
                if len(seen) > limit:
                    return None
                queue.append(r)
    return len(seen)


def enumerate_small_quotient_homs(P: VFPresentation, m: int, max_m: int = DEFAULT_MAX_M) -> list[FiniteQuotient]:
    """Homomorphisms from G to Sym(m) whose image has order at most m.

    The first generator only ranges over cycle-type representatives; kernels are
    invariant under conjugation in Sym(m), so no kernel is lost.
    """
    if m > max_m:
        raise ResourceLimit(f"quotient search for m = {m} exceeds the cap {max_m}")
    if m < 1:
        raise ValueError("m must be positive")
    n, k = P.rank, P.m
    ident = tuple(range(m))
    all_perms = list(itertools.permutations(range(m)))
    results: list[FiniteQuotient] = []
    if n:
        first_choices = _cycle_type_reps(m)
        free_space = itertools.product(first_choices, *([all_perms] * (n - 1)))
    else:
        free_space = iter([()])
    for free in free_space:
        free_inv = [_inverse(p) for p in free]
        twist_perms = [
            [_word_perm(P.twist[i][a], free, free_inv, ident) for a in range(n)] for i in range(k)
        ]
        # candidates for b_i from the twist relations b_i a = u_ia b_i
        candidates: list[list[Perm]] = [[ident]]
        for i in range(1, k):
            cands = [
                b
                for b in all_perms
                if all(_compose(b, free[a]) == _compose(twist_perms[i][a], b) for a in range(n))
            ]
            candidates.append(cands)
        prod_perms = [[_word_perm(P.prod_word[i][j], free, free_inv, ident) for j in range(k)] for i in range(k)]

        assign: list[Perm] = [ident]

        def consistent(upto: int) -> bool:
            # check every b_i b_j = v_ij b_r with i, j, r all assigned and one of them == upto
            for i in range(1, upto + 1):
                for j in range(1, upto + 1):
                    r = P.prod_coset[i][j]
                    if r > upto or upto not in (i, j, r):
                        continue
                    if _compose(assign[i], assign[j]) != _compose(prod_perms[i][j], assign[r]):
                        return False
            return True

        def extend(i: int):
            if i == k:
                gens = list(free) + assign[1:]
                order = _group_order(gens, m)
                if order is not None:
                    results.append(FiniteQuotient(tuple(gens), order))
                return
            for b in candidates[i]:
                assign.append(b)
                if consistent(i):
                    extend(i + 1)
                assign.pop()

        extend(1)
    return results


@dataclass
class FullyInvariantSubgroup:
    """F' together with its coset decomposition in G."""

    presentation: VFPresentation
    quotients: list[FiniteQuotient]
    automaton: stallings.StallingsAutomaton  # F' as a subgroup of F
    coset_reps: list[GElement]  # b'_0 = 1, b'_1, ...
    _action: list[tuple[int, ...]] = field(repr=False)  # state -> generator column -> state
    _columns: dict = field(repr=False)

    @property
    def index_in_g(self) -> int:
        return len(self.coset_reps)

    @property
    def rank(self) -> int:
        return self.automaton.rank

    @property
    def basis(self) -> list[Word]:
        return self.automaton.basis()

    def coset_index(self, g: GElement) -> int:
        state = 0
        for x in g.word:
            state = self._action[state][self._columns[x]]
        if g.coset:
            state = self._action[state][self._columns[("b", g.coset)]]
        return state

    def contains(self, g: GElement) -> bool:
        return self.coset_index(g) == 0

    def basis_elements(self) -> list[GElement]:
        return [GElement(w, 0) for w in self.basis]


def compute_fully_invariant(P: VFPresentation, max_m: int = DEFAULT_MAX_M) -> FullyInvariantSubgroup:
    homs = enumerate_small_quotient_homs(P, P.m, max_m)
    tables: dict = {}
    for q in homs:
        tables.setdefault(q.kernel_table(P), q)
    kept = list(tables.values())
    kernel_tables = list(tables.keys())
    n, k = P.rank, P.m
    # generator columns of every kernel table: perms..., then inverses of free letters
    columns: dict = {}
    for a in range(n):
        columns[a + 1] = a
        columns[-(a + 1)] = n + k - 1 + a
    for i in range(1, k):
        columns[("b", i)] = n + i - 1
    n_cols = n + k - 1 + n
    # BFS of the product action from the tuple of identity cosets
    start = tuple(0 for _ in kernel_tables)
    number = {start: 0}
    states = [start]
    reps = [ONE]
    gen_elems: list[GElement | None] = [None] * n_cols
    for key, col in columns.items():
        if isinstance(key, int):
            gen_elems[col] = GElement(Word((key,)), 0)
        else:
            gen_elems[col] = GElement(Word(()), key[1])
    # free letters first so reps inside F are plain words
    col_order = [columns[x] for a in range(1, n + 1) for x in (a, -a)] + [columns[("b", i)] for i in range(1, k)]
    action: list[list[int]] = []
    i = 0
    while i < len(states):
        s = states[i]
        row = [0] * n_cols
        for col in col_order:
            t = tuple(tab[s[c]][col] for c, tab in enumerate(kernel_tables))
            if t not in number:
                number[t] = len(states)
                states.append(t)
                reps.append(P.mult(reps[i], gen_elems[col]))  # type: ignore[arg-type]
            row[col] = number[t]
        action.append(row)
        i += 1
    # F' inside F: the Schreier graph of F acting on the cosets reachable by free letters
    seen = {0}
    queue = deque([0])
    edges = []
    while queue:
        v = queue.popleft()
        for a in range(1, n + 1):
            t = action[v][columns[a]]
            edges.append((v, a, t))
            if t not in seen:
                seen.add(t)
                queue.append(t)
            t2 = action[v][columns[-a]]
            if t2 not in seen:
                seen.add(t2)
                queue.append(t2)
    aut = stallings.fold(n, len(states), edges) if n else stallings.trivial(0)
    return FullyInvariantSubgroup(P, kept, aut, reps, [tuple(r) for r in action], columns)


def membership_in_f_prime(S: FullyInvariantSubgroup, g: GElement) -> bool:
    return S.contains(g)
