"""Fixed subgroups.

For a free endomorphism ``phi`` the twisted action ``d . x = x^-1 d phi(x)`` of
F on itself has ``Fix(phi)`` as the stabiliser of ``1``: reading a word ``w``
from ``1`` ends at ``w^-1 phi(w)``.  The Schreier graph of this action around
``1`` is therefore a (possibly infinite) folded graph whose fundamental group at
``1`` is ``Fix(phi)``.  A closed path of length at most ``L`` stays inside the
ball of radius ``ceil(L/2)``, so the core of that ball contains every fixed word
of length ``<= L`` and nothing that is not fixed.  When the orbit of ``1`` is
finite the ball is the whole orbit and the answer is exact.

No general bound on the length of Fix-basis words is available here, so
results are tagged ``CERTIFIED`` or ``BOUNDED(L)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from . import stallings
from .errors import ResourceLimit
from .free_endo import FreeEndo
from .invariant import FullyInvariantSubgroup
from .vfree import GElement, GEndo, VFPresentation, endo_apply, restrict_to_subgroup
from .words import IDENTITY, Word, concat, concat_all, invert, substitute, words_up_to

DEFAULT_BOUND = 12
DEFAULT_MAX_STATES = 400_000


@dataclass(frozen=True)
class FixResult:
    subgroup: stallings.StallingsAutomaton
    certified: bool
    bound: int | None = None

    @property
    def flag(self) -> str:
        return "CERTIFIED" if self.certified else f"BOUNDED({self.bound})"


@dataclass(frozen=True)
class SubgroupCoset:
    """``subgroup . representative``, or the empty set."""

    subgroup: stallings.StallingsAutomaton
    representative: Word | None
    certified: bool = False

    @property
    def empty(self) -> bool:
        return self.representative is None


@dataclass
class TwistedBall:
    """The ball of radius ``radius`` around ``1`` in the twisted action ``d . x = x^-1 d phi(x)``."""

    states: list[Word]
    number: dict[Word, int]
    paths: list[Word]  # a word leading from 1 to each state
    edges: list[tuple[int, int, int]]
    truncated: bool  # False when the ball is the whole orbit of 1


@lru_cache(maxsize=16)
def twisted_ball(phi: FreeEndo, radius: int, max_states: int = DEFAULT_MAX_STATES) -> TwistedBall:
    n = phi.rank
    images = phi.images
    inv_images = [invert(w) for w in images]
    number: dict[Word, int] = {IDENTITY: 0}
    states = [IDENTITY]
    paths = [IDENTITY]
    dist = [0]
    edges: set[tuple[int, int, int]] = set()
    truncated = False
    queue = deque([0])
    while queue:
        v = queue.popleft()
        d = states[v]
        for a in range(1, n + 1):
            for x in (a, -a):
                img = images[a - 1] if x > 0 else inv_images[a - 1]
                t = concat_all(((-x,), d, img))
                k = number.get(t)
                if k is None:
                    if dist[v] >= radius:
                        truncated = True
                        continue
                    k = number[t] = len(states)
                    states.append(t)
                    paths.append(concat(paths[v], (x,)))
                    dist.append(dist[v] + 1)
                    queue.append(k)
                    if len(states) > max_states:
                        raise ResourceLimit(f"fixed-point search exceeded {max_states} states")
                edges.add((v, x, k) if x > 0 else (k, a, v))
    return TwistedBall(states, number, paths, sorted(edges), truncated)


def fix_free_bounded(phi: FreeEndo, L: int = DEFAULT_BOUND, max_states: int = DEFAULT_MAX_STATES) -> FixResult:
    if L < 1:
        raise ValueError("length bound must be >= 1")
    if not phi.is_endo:
        raise ValueError("fixed points need an endomorphism")
    n = phi.rank
    if phi.is_identity():
        return FixResult(stallings.rose(n), True, None)
    ball = twisted_ball(phi, (L + 1) // 2, max_states)
    sub = stallings.fold(n, len(ball.states), ball.edges)
    for w in sub.basis():
        assert phi.apply(w) == w, "non-fixed word in fixed subgroup"
    return FixResult(sub, not ball.truncated, None if not ball.truncated else L)


def x_u(
    psi: FreeEndo,
    u: Sequence[int],
    L: int = DEFAULT_BOUND,
    core: FixResult | None = None,
    max_states: int = DEFAULT_MAX_STATES,
) -> SubgroupCoset:
    """``X_u = {x : psi(x) = x u}``, which is empty or ``Fix(psi) x0``.

    Equivalently ``{x : psi'(x c) = x c}`` for ``psi'`` extending ``psi`` by
    ``c -> u^-1 c``.  A witness is a word whose twisted state is ``u``; the
    search meets in the middle, ``x = y z`` with ``state(y) = z u psi(z)^-1``,
    so it covers all witnesses of length up to ``L``.
    """
    n = psi.rank
    u = Word(u)
    core = core or fix_free_bounded(psi, L, max_states)
    if psi.is_identity():
        return SubgroupCoset(core.subgroup, IDENTITY if not u else None, True)
    radius = (L + 1) // 2
    ball = twisted_ball(psi, radius, max_states)
    rep = None
    k = ball.number.get(u)
    if k is not None:
        rep = ball.paths[k]
    elif ball.truncated:
        for z in words_up_to(n, radius):
            target = concat_all((z, u, invert(psi.apply(z))))
            k = ball.number.get(target)
            if k is not None:
                rep = concat(ball.paths[k], z)
                break
    if rep is not None:
        assert psi.apply(rep) == concat(rep, u)
    # with the whole orbit in hand, u is reachable exactly when it appears
    certified = core.certified and not ball.truncated
    return SubgroupCoset(core.subgroup, rep, certified)


@dataclass
class CosetPiece:
    coset: int
    shift: GElement | None  # t_i = b'_i ((b'_i)^-1 phi); None when outside F'
    representative: GElement | None  # a fixed element of the coset, None if empty
    certified: bool


@dataclass
class GFixResult:
    presentation: VFPresentation
    invariant: FullyInvariantSubgroup
    restricted: FreeEndo  # phi on F' in the basis of F'
    core: FixResult  # Fix(phi) cap F', in F'-basis coordinates
    pieces: list[CosetPiece]
    generators: list[GElement]
    bound: int = DEFAULT_BOUND
    _offsets: dict = field(default_factory=dict, repr=False)

    @property
    def certified(self) -> bool:
        return self.core.certified and all(p.certified for p in self.pieces)

    @property
    def flag(self) -> str:
        return "CERTIFIED" if self.certified else f"BOUNDED({self.bound})"

    def core_in_f(self) -> stallings.StallingsAutomaton:
        """Fix(phi) cap F' as a subgroup of F."""
        basis = self.invariant.basis
        gens = [substitute(w, basis) for w in self.core.subgroup.basis()]
        return stallings.from_generators(gens, self.presentation.rank)

    def is_trivial(self) -> bool:
        return self.core.subgroup.is_trivial and all(
            p.representative is None or p.coset == 0 for p in self.pieces
        )

    def contains(self, g: GElement) -> bool:
        P, S = self.presentation, self.invariant
        piece = self.pieces[S.coset_index(g)]
        if piece.representative is None:
            return False
        y = P.mult(g, P.inverse(piece.representative))
        assert y.coset == 0
        return self.core.subgroup.contains(S.automaton.rewrite_in_basis(y.word))


def fix_vfree(
    P: VFPresentation, phi: GEndo, Fp: FullyInvariantSubgroup, L: int = DEFAULT_BOUND
) -> GFixResult:
    psi = restrict_to_subgroup(P, phi, Fp.automaton)
    basis = Fp.basis
    core = fix_free_bounded(psi, L)
    generators = [GElement(substitute(w, basis), 0) for w in core.subgroup.basis()]
    pieces = [CosetPiece(0, GElement(IDENTITY, 0), GElement(IDENTITY, 0), core.certified)]
    for i, b in enumerate(Fp.coset_reps[1:], start=1):
        t = P.mult(b, endo_apply(P, phi, P.inverse(b)))
        if not Fp.contains(t):
            pieces.append(CosetPiece(i, None, None, True))
            continue
        u = Fp.automaton.rewrite_in_basis(t.word)
        piece = x_u(psi, u, L, core=core)
        if piece.empty:
            pieces.append(CosetPiece(i, t, None, piece.certified))
            continue
        g = P.mult(GElement(substitute(piece.representative, basis), 0), b)
        assert endo_apply(P, phi, g) == g, "coset representative is not fixed"
        pieces.append(CosetPiece(i, t, g, core.certified))
        generators.append(g)
    for g in generators:
        assert endo_apply(P, phi, g) == g
    return GFixResult(P, Fp, psi, core, pieces, generators, L)


def exact_fix_letter_permutation(phi: FreeEndo) -> FixResult | None:
    """Exact Fix(phi) when phi permutes the letters up to inversion, else None.

    Such a map sends reduced words to reduced words letter by letter, so a word
    is fixed exactly when each of its letters is.
    """
    n = phi.rank
    if any(len(w) != 1 for w in phi.images) or len({abs(w[0]) for w in phi.images}) != n:
        return None
    fixed = [Word((a,)) for a, w in enumerate(phi.images, start=1) if w[0] == a]
    return FixResult(stallings.from_generators(fixed, n), True, None)


def exact_fix(phi: FreeEndo, power: int = 1) -> tuple[FixResult, str] | None:
    """Exact ``Fix(phi^power)`` from one of the special cases, tagged with its source."""
    if power < 1:
        raise ValueError("power must be >= 1")
    if all(len(w) == 1 for w in phi.images):
        res = exact_fix_letter_permutation(phi.power(power))
        if res is not None:
            return res, "letter-permutation"
    res = exact_fix_low_rank(phi, power=power)
    if res is not None:
        return res, "stable-image"
    return None


def exact_fix_low_rank(phi: FreeEndo, max_steps: int = 64, power: int = 1) -> FixResult | None:
    """Exact ``Fix(phi^power)`` when the stable image has rank at most 1, else None.

    Fixed points lie in every ``Im(phi^j)``.  Once ranks of the images stop
    dropping, ``phi`` is injective on ``Im(phi^j)``; in rank 0 that forces Fix = 1,
    and in rank 1 ``phi`` acts on the cyclic image by ``t -> t^k``, so ``t`` is
    fixed by ``phi^power`` exactly when ``k^power = 1``.
    """
    n = phi.rank
    prev = None
    for j in range(1, max_steps + 1):
        aut = phi.image_automaton(1) if prev is None else stallings.from_generators(
            [phi.apply(w) for w in prev.basis()], n
        )
        if prev is not None and aut.rank == prev.rank:
            break
        prev = aut
    else:
        return None
    img = prev
    if img.rank == 0:
        return FixResult(stallings.trivial(n), True, None)
    if img.rank > 1:
        return None
    (t,) = img.basis()
    k = img.rewrite_in_basis(phi.apply(t))
    if k == (1,) or (k == (-1,) and power % 2 == 0):
        return FixResult(stallings.from_generators([t], n), True, None)
    return FixResult(stallings.trivial(n), True, None)
