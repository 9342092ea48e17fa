"""Eventually fixed and eventually periodic points.

Membership is decided by iterating ``C_phi`` times.  Finite generation of
EvFix reduces to a relative-index question on the free part: with
``K = Im(psi^C)`` and ``H = Fix(psi) cap K`` (here simply ``Fix(psi)``, which
already lies in every image), EvFix is finitely generated iff the kernel of
``phi^C`` is finite or ``[K : H]`` is finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from . import stallings
from .fix import DEFAULT_BOUND, FixResult, GFixResult, exact_fix, fix_vfree
from .free_endo import FreeEndo
from .invariant import FullyInvariantSubgroup
from .orbit import CPhiCertificate, achievable_orders, c_phi, iterate, orbit, theta_period
from .vfree import GElement, GEndo, VFPresentation, endo_apply, endo_power, quotient_endo, restrict_to_subgroup
from .words import IDENTITY, Word, invert, substitute


class Verdict(str, Enum):
    YES = "YES"
    NO = "NO"
    UNKNOWN = "UNKNOWN"


class Normality(str, Enum):
    WHOLE_GROUP = "WHOLE_GROUP"
    KERNEL_UNION = "KERNEL_UNION"
    NOT_NORMAL = "NOT_NORMAL"
    UNKNOWN = "UNKNOWN"


# -- membership ---------------------------------------------------------------


def in_evfix(P: VFPresentation, phi: GEndo, cert: CPhiCertificate, g: GElement) -> bool:
    h = iterate(P, phi, g, cert.c_phi)
    return endo_apply(P, phi, h) == h


def in_evper(P: VFPresentation, phi: GEndo, cert: CPhiCertificate, g: GElement) -> bool:
    return orbit(P, phi, g, cert.c_phi).finite


def kernel_finite(P: VFPresentation, phi: GEndo, cert: CPhiCertificate, Fp: FullyInvariantSubgroup) -> bool:
    psi = restrict_to_subgroup(P, phi, Fp.automaton)
    return psi.image_automaton(cert.c_phi).rank == Fp.rank


# -- subgroups of G given by generators -----------------------------------------


@dataclass
class GeneratedSubgroup:
    """``<S>`` in G, stored as ``<S> cap F'`` plus one element of ``<S>`` per F'-coset it meets."""

    presentation: VFPresentation
    invariant: FullyInvariantSubgroup
    core: stallings.StallingsAutomaton  # <S> cap F' as a subgroup of F
    reps: dict[int, GElement]

    @classmethod
    def from_generators(cls, P: VFPresentation, Fp: FullyInvariantSubgroup, gens: list[GElement]) -> "GeneratedSubgroup":
        # <S> acts on the right cosets of F'; the stabiliser of F' is <S> cap F'
        gens = [g for g in gens if not g.is_identity]
        reps = {0: GElement(IDENTITY, 0)}
        order = [0]
        schreier: list[Word] = []
        i = 0
        while i < len(order):
            j = order[i]
            i += 1
            for s in gens:
                h = P.mult(reps[j], s)
                k = Fp.coset_index(h)
                if k not in reps:
                    reps[k] = h
                    order.append(k)
                    continue
                y = P.mult(h, P.inverse(reps[k]))
                assert y.coset == 0
                if y.word:
                    schreier.append(y.word)
        core = stallings.from_generators(schreier, P.rank)
        return cls(P, Fp, core, reps)

    def contains(self, g: GElement) -> bool:
        rep = self.reps.get(self.invariant.coset_index(g))
        if rep is None:
            return False
        y = self.presentation.mult(g, self.presentation.inverse(rep))
        return y.coset == 0 and self.core.contains(y.word)

    def reduced_generators(self) -> list[GElement]:
        gens = [GElement(w, 0) for w in self.core.basis()]
        gens += [r for k, r in sorted(self.reps.items()) if k != 0]
        return gens


def _schreier_enumerate(P: VFPresentation, member, bound: int) -> list[GElement]:
    """Generators of a finite-index subgroup of G from its membership test."""
    gens = P.generators()
    reps = [GElement(IDENTITY, 0)]
    rep_inv = [GElement(IDENTITY, 0)]
    out: list[GElement] = []
    i = 0
    while i < len(reps):
        r = reps[i]
        i += 1
        for s in gens:
            h = P.mult(r, s)
            for k, ri in enumerate(rep_inv):
                y = P.mult(h, ri)
                if member(y):
                    if not y.is_identity:
                        out.append(y)
                    break
            else:
                if len(reps) >= bound:
                    raise AssertionError("coset enumeration exceeded the certified index")
                reps.append(h)
                rep_inv.append(P.inverse(h))
    return out


# -- finite generation ------------------------------------------------------


@dataclass
class EvFixReport:
    verdict: Verdict
    branch: str
    kernel_finite: bool
    relative_index: object = None  # int, INFINITE, or None when not computed
    generators: list[GElement] = field(default_factory=list)
    generators_complete: bool = True
    leaning: Verdict | None = None  # verdict an exact Fix oracle would give, when UNKNOWN
    fix_flag: str = "CERTIFIED"
    fix_certified_by: str = ""
    exponent: int = 1
    subgroup: GeneratedSubgroup | None = field(default=None, repr=False)

    @property
    def exit_code(self) -> int:
        return 2 if self.verdict is Verdict.UNKNOWN else 0


def certified_core(psi: FreeEndo, fix: GFixResult, power: int = 1) -> tuple[FixResult, str]:
    """``Fix(psi^power)``, given ``fix`` for ``phi^power``, with the best certificate available."""
    if fix.core.certified:
        return fix.core, "enumeration"
    exact = exact_fix(psi, power)
    if exact is not None:
        res, how = exact
        assert stallings.contains_subgroup(res.subgroup, fix.core.subgroup)
        return res, how
    return fix.core, ""


def _fix_complete(fix: GFixResult, core: FixResult, how: str) -> bool:
    """Whether ``fix.generators`` generate all of Fix, given the certified core."""
    if fix.certified:
        return True
    if not how or core.subgroup != fix.core.subgroup:
        return False
    # a piece with a representative is that representative times the core
    return all(p.certified or p.representative is not None for p in fix.pieces[1:])


def _kernel_elements(P, phi, cert, Fp, psi) -> list[GElement]:
    """The finite kernel of ``phi^C`` when ``psi^C`` is injective."""
    c = cert.c_phi
    phic = endo_power(P, phi, c)
    psic = psi.power(c)
    image = stallings.from_generators(psic.images, psi.rank)
    out = []
    for b in Fp.coset_reps[1:]:
        t = endo_apply(P, phic, b)
        if not Fp.contains(t):
            continue
        u = invert(Fp.automaton.rewrite_in_basis(t.word))
        if not image.contains(u):
            continue
        x = stallings.express(psic.images, u, psi.rank)
        assert x is not None
        g = P.mult(GElement(substitute(x, Fp.basis), 0), b)
        assert endo_apply(P, phic, g).is_identity
        out.append(g)
    return out


def _decide(
    P: VFPresentation,
    Fp: FullyInvariantSubgroup,
    member: Callable[[GElement], bool],
    kf: bool,
    fix: GFixResult,
    kernel: Callable[[], list[GElement]],
    image: Callable[[], stallings.StallingsAutomaton],
    trust_oracle: bool,
    base: tuple[FreeEndo, int] | None = None,
) -> EvFixReport:
    """Finite generation of ``{g : g theta in Fix}`` for a power ``theta`` of the endomorphism.

    ``member`` decides the subgroup, ``kernel`` lists the kernel of ``theta``
    when it is finite, ``image`` is ``F' theta`` and ``fix`` the fixed subgroup.
    """
    gens = P.generators()
    if all(member(g) for g in gens):
        sub = GeneratedSubgroup.from_generators(P, Fp, gens)
        return EvFixReport(Verdict.YES, "whole-group", kf, 1, gens, True, fix_flag=fix.flag, subgroup=sub)
    psi, power = base or (fix.restricted, 1)
    core, how = certified_core(psi, fix, power)
    if kf:
        # Fix lies in every image, so EvFix = <Fix, Ker>
        found = list(fix.generators) + kernel()
        sub = GeneratedSubgroup.from_generators(P, Fp, found)
        return EvFixReport(
            Verdict.YES, "finite-kernel", True, None, sub.reduced_generators(),
            _fix_complete(fix, core, how) or trust_oracle,
            fix_flag=fix.flag, fix_certified_by=how, subgroup=sub,
        )
    K = image()
    d = stallings.relative_index(core.subgroup, K)
    if d is stallings.INFINITE:
        if core.certified or trust_oracle:
            return EvFixReport(Verdict.NO, "relative-index", False, d, fix_flag=fix.flag, fix_certified_by=how)
        return EvFixReport(Verdict.UNKNOWN, "relative-index", False, d, leaning=Verdict.NO, fix_flag=fix.flag)
    # a bounded Fix only makes d larger, so YES stands; [G : EvFix] <= [G : F'] * d
    found = _schreier_enumerate(P, member, d * Fp.index_in_g)
    sub = GeneratedSubgroup.from_generators(P, Fp, found)
    return EvFixReport(
        Verdict.YES, "relative-index", False, d, sub.reduced_generators(), True,
        fix_flag=fix.flag, fix_certified_by=how, subgroup=sub,
    )


def evfix_is_fg(
    P: VFPresentation,
    phi: GEndo,
    cert: CPhiCertificate,
    Fp: FullyInvariantSubgroup,
    fix: GFixResult,
    trust_oracle: bool = False,
) -> EvFixReport:
    psi = fix.restricted
    return _decide(
        P,
        Fp,
        lambda g: in_evfix(P, phi, cert, g),
        kernel_finite(P, phi, cert, Fp),
        fix,
        lambda: _kernel_elements(P, phi, cert, Fp, psi),
        lambda: psi.image_automaton(cert.c_phi),
        trust_oracle,
    )


def stable_image_rank(psi: FreeEndo) -> int:
    j = 1
    rank = psi.image_automaton(1).rank
    while True:
        nxt = psi.image_automaton(j + 1).rank
        if nxt == rank:
            return rank
        rank, j = nxt, j + 1


def period_exponent(P: VFPresentation, phi: GEndo, Fp: FullyInvariantSubgroup) -> int:
    """A common multiple of every period a periodic point of ``phi`` can have.

    A periodic point in coset ``i`` has period ``p_i * q`` where ``p_i`` is the
    period of ``i`` under the coset map and ``q`` is the order of a torsion
    element of ``Aut(F_s)``, ``s`` being the stable image rank (plus one outside F').
    """
    theta = quotient_endo(P, phi, Fp)
    rank = stable_image_rank(restrict_to_subgroup(P, phi, Fp.automaton))
    e = 1
    for i in range(len(theta)):
        _, p = theta_period(theta, i)
        if p is None:
            continue
        s = rank + (1 if i else 0)
        e = math.lcm(e, p * math.lcm(*achievable_orders(s)) if s else p)
    return e


def evper_is_fg(
    P: VFPresentation,
    phi: GEndo,
    Fp: FullyInvariantSubgroup,
    L: int = DEFAULT_BOUND,
    trust_oracle: bool = False,
    cert: CPhiCertificate | None = None,
) -> EvFixReport:
    """EvPer(phi) = EvFix(phi^e) for any ``e`` divisible by every period.

    With ``N`` a multiple of ``e`` that is at least ``C_phi``, ``phi^N`` maps
    EvPer onto the periodic points and has the stable kernel, so the same
    relative-index test applies with ``theta = phi^N`` and Fix(phi^e).
    """
    cert = cert or c_phi(P, phi, Fp)
    e = period_exponent(P, phi, Fp)
    N = e * -(-cert.c_phi // e)
    psi = restrict_to_subgroup(P, phi, Fp.automaton)
    member = lambda g: in_evper(P, phi, cert, g)  # noqa: E731
    if all(member(g) for g in P.generators()):
        gens = P.generators()
        sub = GeneratedSubgroup.from_generators(P, Fp, gens)
        return EvFixReport(Verdict.YES, "whole-group", kernel_finite(P, phi, cert, Fp), 1, gens, True,
                           exponent=e, subgroup=sub)
    fix_e = fix_vfree(P, endo_power(P, phi, e), Fp, L)
    report = _decide(
        P,
        Fp,
        member,
        kernel_finite(P, phi, cert, Fp),
        fix_e,
        lambda: _kernel_elements(P, phi, cert, Fp, psi),
        lambda: psi.image_automaton(N),
        trust_oracle,
        base=(psi, e),
    )
    report.exponent = e
    return report


# -- normality in the free case --------------------------------------------


@dataclass(frozen=True)
class NormalityVerdict:
    verdict: Normality
    vanishing: bool = False
    leaning: Normality | None = None
    fix_flag: str = "CERTIFIED"
    fix_certified_by: str = ""

    @property
    def exit_code(self) -> int:
        return 2 if self.verdict is Normality.UNKNOWN else 0


def normality_free(
    P: VFPresentation, phi: GEndo, cert: CPhiCertificate, fix: GFixResult, trust_oracle: bool = False
) -> NormalityVerdict:
    if not P.is_free:
        raise ValueError("normality test needs a free group")
    gens = P.generators()
    if all(in_evfix(P, phi, cert, g) for g in gens):
        vanishing = all(iterate(P, phi, g, cert.c_phi).is_identity for g in gens)
        return NormalityVerdict(Normality.WHOLE_GROUP, vanishing, fix_flag=fix.flag)
    core, how = certified_core(fix.restricted, fix)
    if not core.subgroup.is_trivial:
        return NormalityVerdict(Normality.NOT_NORMAL, fix_flag=fix.flag, fix_certified_by="witness")
    if core.certified or trust_oracle:
        return NormalityVerdict(Normality.KERNEL_UNION, fix_flag=fix.flag, fix_certified_by=how)
    return NormalityVerdict(Normality.UNKNOWN, leaning=Normality.KERNEL_UNION, fix_flag=fix.flag)


def rank_bound(P: VFPresentation, Fp: FullyInvariantSubgroup) -> int:
    r = Fp.rank
    return Fp.index_in_g + max(r, r * r - 3 * r + 3)
