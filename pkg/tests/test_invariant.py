import itertools
import math
import random

import pytest

from conftest import fixture_endos, fprime, load, random_word
from vfendo import stallings
from vfendo.invariant import compute_fully_invariant, enumerate_small_quotient_homs, membership_in_f_prime
from vfendo.vfree import ONE, GElement, VFPresentation, endo_apply
from vfendo.words import Word

DINF = load("dinf.grp").presentation
F2 = VFPresentation.free(2)


def _apply(p, q):
    return tuple(q[x] for x in p)


def _perm_of(pres, perms, g):
    """Evaluate ``g`` under generator permutations, written out independently of the library."""
    m = len(perms[0])
    acc = tuple(range(m))
    for x in g.word:
        p = perms[abs(x) - 1]
        if x < 0:
            inv = [0] * m
            for i, y in enumerate(p):
                inv[y] = i
            p = tuple(inv)
        acc = _apply(acc, p)
    if g.coset:
        acc = _apply(acc, perms[pres.rank + g.coset - 1])
    return acc


def _image_order(perms):
    seen = {tuple(range(len(perms[0])))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for p in frontier:
            for q in perms:
                r = _apply(p, q)
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return len(seen)


def _respects_relations(pres, perms):
    def ev(word, coset=0):
        return _perm_of(pres, perms, GElement(word, coset))

    for i in range(1, pres.m):
        b = ev(Word(), i)
        for a in range(pres.rank):
            # b_i a = u_ia b_i
            if _apply(b, ev(Word((a + 1,)))) != _apply(ev(pres.twist[i][a]), b):
                return False
        for j in range(1, pres.m):
            # b_i b_j = v_ij b_r
            if _apply(b, ev(Word(), j)) != ev(pres.prod_word[i][j], pres.prod_coset[i][j]):
                return False
    return True


def _fingerprint(pres, perms, probes):
    ident = tuple(range(len(perms[0])))
    return frozenset(k for k, g in enumerate(probes) if _perm_of(pres, perms, g) == ident)


def _brute_kernels(pres, m, probes):
    out = set()
    for perms in itertools.product(itertools.permutations(range(m)), repeat=pres.rank + pres.m - 1):
        if _image_order(perms) <= m and _respects_relations(pres, perms):
            out.add(_fingerprint(pres, perms, probes))
    return out


@pytest.mark.parametrize("pres, m", [(F2, 2), (F2, 3), (DINF, 2), (DINF, 3), (DINF, 4)])
def test_hom_enumeration_complete(pres, m):
    probes = list(pres.elements_up_to(4))
    lib = {_fingerprint(pres, q.perms, probes) for q in enumerate_small_quotient_homs(pres, m)}
    assert lib == _brute_kernels(pres, m, probes)


def test_hom_examples():
    homs = enumerate_small_quotient_homs(F2, 2)
    kernels = {q.kernel_table(F2) for q in homs}
    assert len(kernels) == 4  # trivial quotient plus the three index-2 kernels
    assert sum(1 for q in homs if q.order == 2) >= 3
    for pres in (F2, DINF):
        assert all(q.order == 1 for q in enumerate_small_quotient_homs(pres, 1))
    killing_x = [
        q for q in enumerate_small_quotient_homs(DINF, 2)
        if q.evaluate(DINF, GElement(Word((1,)), 0)) == (0, 1) and q.evaluate(DINF, GElement(Word(), 1)) == (1, 0)
    ]
    assert killing_x


def test_fully_invariant_examples():
    S = compute_fully_invariant(F2)
    assert S.index_in_g == 1 and S.automaton == stallings.rose(2)
    D = fprime("dinf.grp")
    x, xx, t = (GElement(Word(w), c) for w, c in [((1,), 0), ((1, 1), 0), ((), 1)])
    assert not membership_in_f_prime(D, x)
    assert membership_in_f_prime(D, xx)
    assert not membership_in_f_prime(D, t)
    assert membership_in_f_prime(D, ONE)
    assert D.index_in_g == 4 and D.rank == 1
    assert all(membership_in_f_prime(D, b) for b in D.basis_elements())


@pytest.mark.parametrize("name", ["dinf.grp", "semidirect.grp", "f2_zoo.grp", "f3_zoo.grp"])
def test_structure(name):
    pres = load(name).presentation
    S = fprime(name)
    assert S.index_in_g == len(S.coset_reps)
    assert S.coset_reps[0] == ONE
    assert S.index_in_g <= math.prod(q.order for q in S.quotients)
    # F' <= F with the Schreier formula on the free side
    d = stallings.relative_index(S.automaton, stallings.rose(pres.rank))
    assert S.rank - 1 == d * (pres.rank - 1)
    assert d * pres.m == S.index_in_g
    # reps lie in distinct cosets
    assert len({S.coset_index(b) for b in S.coset_reps}) == S.index_in_g
    rng = random.Random(name)
    for _ in range(300):
        w = random_word(rng, pres.rank, 8)
        g = GElement(w, 0)
        assert S.contains(g) == S.automaton.contains(w)
        h = GElement(w, rng.randrange(pres.m))
        assert S.contains(h) == all(q.evaluate(pres, h) == tuple(range(len(q.perms[0]))) for q in S.quotients)


@pytest.mark.parametrize("name, endo", fixture_endos("dinf.grp", "semidirect.grp", "f2_zoo.grp", "f3_zoo.grp"))
def test_full_invariance(name, endo):
    doc = load(name)
    S = fprime(name)
    phi = doc.endo(endo)
    for b in S.basis_elements():
        assert membership_in_f_prime(S, endo_apply(doc.presentation, phi, b))
