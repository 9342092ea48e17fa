"""Orbits of endomorphisms and the computable bound C_phi on finite orbits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import stallings
from .invariant import FullyInvariantSubgroup
from .vfree import GElement, GEndo, VFPresentation, endo_apply, endo_power, quotient_endo, restrict_to_subgroup


@dataclass(frozen=True)
class OrbitReport:
    elements: tuple[GElement, ...]
    preperiod: int | None
    period: int | None
    cap: int

    @property
    def finite(self) -> bool:
        return self.period is not None

    @property
    def status(self) -> str:
        return "FINITE" if self.finite else f"EXCEEDED({self.cap})"

    @property
    def straight_part(self) -> tuple[GElement, ...]:
        return self.elements[: self.preperiod or 0]

    @property
    def periodic_part(self) -> tuple[GElement, ...]:
        return self.elements[self.preperiod or 0 :] if self.finite else ()


def orbit(P: VFPresentation, phi: GEndo, g: GElement, cap: int) -> OrbitReport:
    if cap < 1:
        raise ValueError("cap must be >= 1")
    seen: dict[GElement, int] = {}
    elements: list[GElement] = []
    x = g
    while True:
        k = seen.get(x)
        if k is not None:
            return OrbitReport(tuple(elements), k, len(elements) - k, cap)
        if len(elements) == cap:
            return OrbitReport(tuple(elements), None, None, cap)
        seen[x] = len(elements)
        elements.append(x)
        x = endo_apply(P, phi, x)


# -- the periodic part -----------------------------------------------------


def _prime_powers(n: int):
    """Yield ``(p, [(p^a, cost), ...])`` for primes with ``p - 1 <= n``."""
    for p in range(2, n + 2):
        if all(p % q for q in range(2, math.isqrt(p) + 1)):
            options = []
            a = 1
            while (p - 1) * p ** (a - 1) <= n:
                options.append((p**a, (p - 1) * p ** (a - 1)))
                a += 1
            yield p, options


def aut_order_bound(n: int) -> int:
    """Largest order of a torsion element of Aut(F_n).

    ``m = prod p_i^{a_i}`` occurs exactly when ``sum (p_i - 1) p_i^{a_i - 1} <= n``;
    knapsack over primes with cost as weight and log of the prime power as value.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    best = [1] * (n + 1)  # best[c] = largest product of total cost <= c
    for _, options in _prime_powers(n):
        new = best[:]
        for value, cost in options:
            for c in range(cost, n + 1):
                cand = best[c - cost] * value
                if cand > new[c]:
                    new[c] = cand
        best = new
    return best[n]


def achievable_orders(n: int) -> list[int]:
    """All torsion orders of Aut(F_n), by the same cost criterion."""
    orders = {1}
    for _, options in _prime_powers(n):
        nxt = set(orders)
        for m in orders:
            cost_m = order_cost(m)
            for value, cost in options:
                if cost_m + cost <= n:
                    nxt.add(m * value)
        orders = nxt
    return sorted(orders)


def order_cost(m: int) -> int:
    cost = 0
    p = 2
    while m > 1:
        if m % p == 0:
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            cost += (p - 1) * p ** (a - 1)
        p += 1
    return cost


@dataclass(frozen=True)
class CosetPeriod:
    coset: int
    theta_orbit: tuple[int, ...]
    period: int | None  # None: coset is not theta-periodic
    bound: int


def theta_period(theta: tuple[int, ...], i: int) -> tuple[tuple[int, ...], int | None]:
    seen: dict[int, int] = {}
    path = []
    x = i
    while x not in seen:
        seen[x] = len(path)
        path.append(x)
        x = theta[x]
    start = seen[x]
    return tuple(path), (len(path) - start) if start == 0 else None


def period_bound(P: VFPresentation, phi: GEndo, Fp: FullyInvariantSubgroup) -> tuple[int, list[CosetPeriod]]:
    theta = quotient_endo(P, phi, Fp)
    C = aut_order_bound(Fp.rank + 1)
    trace = []
    for i in range(len(theta)):
        orb, p = theta_period(theta, i)
        trace.append(CosetPeriod(i, orb, p, C * p if p else 0))
    return max(t.bound for t in trace), trace


# -- the straight part ------------------------------------------------------


@dataclass(frozen=True)
class StraightStep:
    j: int
    rank: int
    stabilized: bool
    new_collapse: tuple[int, ...] = ()
    note: str = ""


def _collapsed(P, phi_j_reps: list[GElement], Fp: FullyInvariantSubgroup, image: stallings.StallingsAutomaton) -> set[int]:
    out = set()
    for i, g in enumerate(phi_j_reps):
        if i == 0:
            continue
        if Fp.contains(g) and image.contains(Fp.automaton.rewrite_in_basis(g.word)):
            out.add(i)
    return out


def straight_bound(
    P: VFPresentation, phi: GEndo, Fp: FullyInvariantSubgroup, max_steps: int = 256
) -> tuple[int, list[StraightStep]]:
    psi = restrict_to_subgroup(P, phi, Fp.automaton)
    trace: list[StraightStep] = []
    ranks = {1: psi.image_automaton(1)}

    def image(j: int) -> stallings.StallingsAutomaton:
        if j not in ranks:
            ranks[j] = psi.image_automaton(j)
        return ranks[j]

    def reps_at(j: int) -> list[GElement]:
        phij = endo_power(P, phi, j)
        return [endo_apply(P, phij, b) for b in Fp.coset_reps]

    for j in range(1, max_steps + 1):
        a, b = image(j), image(j + 1)
        if a.rank != b.rank:
            trace.append(StraightStep(j, a.rank, False))
            continue
        if a.rank == 0:
            # Im(phi^j) is the finite set of images of the coset reps
            finite_image = set(reps_at(j))
            M = 0
            for g in finite_image:
                rep = orbit(P, phi, g, len(finite_image) + 1)
                assert rep.finite
                M = max(M, len(rep.elements))
            trace.append(StraightStep(j, 0, True, note=f"vanishing on F'; |Im| = {len(finite_image)}, M = {M}"))
            return j + M, trace
        before = _collapsed(P, reps_at(j), Fp, a)
        after = _collapsed(P, reps_at(j + 1), Fp, b)
        fresh = tuple(sorted(after - before))
        trace.append(StraightStep(j, a.rank, True, fresh))
        if not fresh:
            return j, trace
    raise RuntimeError("straight bound did not stabilise")


@dataclass(frozen=True)
class CPhiCertificate:
    period_bound: int
    straight_bound: int
    coset_periods: tuple[CosetPeriod, ...] = field(default=())
    straight_trace: tuple[StraightStep, ...] = field(default=())

    @property
    def c_phi(self) -> int:
        return self.period_bound + self.straight_bound

    def lines(self, P: VFPresentation | None = None, prefix: str = "") -> list[str]:
        out = [
            f"{prefix}c_phi: {self.c_phi}",
            f"{prefix}period_bound: {self.period_bound}",
            f"{prefix}straight_bound: {self.straight_bound}",
        ]
        for cp in self.coset_periods:
            per = cp.period if cp.period is not None else "NONPERIODIC"
            orb = " ".join(map(str, cp.theta_orbit))
            out.append(f"{prefix}coset.{cp.coset}: theta_orbit=[{orb}] period={per} bound={cp.bound}")
        for st in self.straight_trace:
            extra = f" new_collapse=[{' '.join(map(str, st.new_collapse))}]" if st.stabilized else ""
            note = f" note={st.note}" if st.note else ""
            out.append(f"{prefix}straight.{st.j}: rank={st.rank} stabilized={st.stabilized}{extra}{note}")
        return out


def c_phi(P: VFPresentation, phi: GEndo, Fp: FullyInvariantSubgroup) -> CPhiCertificate:
    kp, per_trace = period_bound(P, phi, Fp)
    ks, st_trace = straight_bound(P, phi, Fp)
    return CPhiCertificate(kp, ks, tuple(per_trace), tuple(st_trace))


# -- decisions ------------------------------------------------------------


@dataclass(frozen=True)
class FiniteOrder:
    finite: bool
    preperiod: int | None = None
    period: int | None = None

    def __str__(self) -> str:
        return f"FINITE p={self.preperiod} m={self.period}" if self.finite else "INFINITE"


def is_finite_order(P: VFPresentation, phi: GEndo, cert: CPhiCertificate) -> FiniteOrder:
    reports = [orbit(P, phi, g, cert.c_phi) for g in P.generators()]
    if any(not r.finite for r in reports):
        return FiniteOrder(False)
    p = max((r.preperiod for r in reports), default=0)
    m = math.lcm(*(r.period for r in reports)) if reports else 1
    a, b = endo_power(P, phi, p), endo_power(P, phi, p + m)
    assert a.generator_images() == b.generator_images()
    return FiniteOrder(True, p, m)


def stabilizes(P: VFPresentation, phi: GEndo, cert: CPhiCertificate) -> int | None:
    best = 0
    for g in P.generators():
        r = orbit(P, phi, g, cert.c_phi)
        if not r.finite or r.period != 1:
            return None
        best = max(best, r.preperiod)
    return best


def iterate(P: VFPresentation, phi: GEndo, g: GElement, k: int) -> GElement:
    for _ in range(k):
        g = endo_apply(P, phi, g)
    return g


def in_stable_kernel(P: VFPresentation, phi: GEndo, cert: CPhiCertificate, g: GElement) -> bool:
    return iterate(P, phi, g, cert.c_phi).is_identity
