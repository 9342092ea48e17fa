"""The ten acceptance criteria, one test each.

A summary with one PASS/FAIL line per criterion is printed at the end of the run.
"""

import random

import pytest

from conftest import FIXTURES, certificate, evfix_report, fix_of, fixture_endos, fprime, load
from laws import check_laws
from oracles import (
    all_words,
    death_times,
    dihedral_apply,
    dihedral_elements,
    dihedral_element,
    orbit_census_oracle,
    subst,
    torsion_order_oracle,
)
from vfendo import stallings
from vfendo.cli import main
from vfendo.evfix import Verdict, rank_bound
from vfendo.invariant import membership_in_f_prime
from vfendo.orbit import aut_order_bound, is_finite_order, stabilizes
from vfendo.vfree import GElement, GEndo, VFPresentation, endo_apply
from vfendo.words import Word

FREE_FIXTURES = [("f2_zoo.grp", 2), ("f3_zoo.grp", 3)]
CENSUS_LEN = 6


def cli(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr().out
    return code, dict(line.split(": ", 1) for line in out.splitlines())


def fixture(name):
    return str(FIXTURES / name)


def as_dihedral(g: GElement) -> str:
    return "".join("x" if a > 0 else "X" for a in g.word) + ("t" if g.coset else "")


def dihedral_to_element(s: str) -> GElement:
    k, e = dihedral_element(s)
    return GElement(Word((1 if k > 0 else -1,) * abs(k)), e)


def dihedral_images(phi: GEndo) -> dict:
    return {"x": as_dihedral(phi.letter_images[0]), "t": as_dihedral(phi.coset_images[1])}


def census_cases():
    """(label, step, elements, identity, c_phi) for every free-group and D_inf fixture endomorphism."""
    for name, n in FREE_FIXTURES:
        words = list(all_words(n, CENSUS_LEN))
        for endo, phi in load(name).endos.items():
            images = phi.free_part().images
            yield f"{name}:{endo}", (lambda w, im=images: subst(w, im)), words, (), certificate(name, endo).c_phi
    elements = dihedral_elements(CENSUS_LEN)
    for endo, phi in load("dinf.grp").endos.items():
        images = dihedral_images(phi)
        step = lambda s, im=images: dihedral_apply(im, s)  # noqa: E731
        yield f"dinf.grp:{endo}", step, elements, "", certificate("dinf.grp", endo).c_phi


@pytest.mark.acceptance(1, "a -> aba, b -> 1: trivial bounded Fix, EvFix not f.g., kernel union")
def test_criterion_1(capsys):
    f = fixture("f2_aba.grp")
    code, out = cli(capsys, "fix", f, "phi", "--bound", "12")
    assert code == 0 and out["flag"] == "BOUNDED(12)" and out["generator_count"] == "0"
    code, out = cli(capsys, "evfix-fg", f, "phi")
    assert code == 0 and out["verdict"] == "NO" and out["relative_index"] == "INFINITE"
    for element, expected in [("b", "true"), ("a b a^-1 b^-1", "true"), ("a", "false"), ("a b a^-1 b a^-1", "false")]:
        assert cli(capsys, "evfix-member", f, "phi", element)[1]["result"] == expected, element
    code, out = cli(capsys, "normal", f, "phi", "--trust-oracle")
    assert code == 0 and out["verdict"] == "KERNEL_UNION"


@pytest.mark.acceptance(2, "a -> bab^-1, b -> 1: Fix = <bab^-1>, EvFix is everything")
def test_criterion_2(capsys):
    f = fixture("f2_bab.grp")
    doc = load("f2_bab.grp")
    res = fix_of("f2_bab.grp", "phi")
    assert res.core_in_f() == stallings.from_generators([Word((2, 1, -2))], 2)
    code, out = cli(capsys, "evfix-fg", f, "phi")
    assert code == 0 and out["verdict"] == "YES"
    gens = [doc.presentation.parse_element(out[f"generator.{k}"]).word for k in range(int(out["generator_count"]))]
    assert stallings.relative_index(stallings.from_generators(gens, 2), stallings.rose(2)) == 1
    assert cli(capsys, "normal", f, "phi")[1]["verdict"] == "WHOLE_GROUP"


@pytest.mark.acceptance(3, "every finite orbit of a word of length <= 6 has size <= c_phi")
def test_criterion_3():
    violations = []
    count = 0
    for label, step, elements, _, c in census_cases():
        count += 1
        census = orbit_census_oracle(step, elements, max_iter=2 * c + 8)
        violations += [(label, x, s) for x, s in census.sizes.items() if s > c]
    assert count >= 20 + 10
    assert not violations, violations[:5]


@pytest.mark.acceptance(4, "g phi^c = 1 iff g phi^(c+1) = 1 for words of length <= 6")
def test_criterion_4():
    violations = []
    for label, step, elements, identity, c in census_cases():
        times = death_times(step, elements, c + 1, identity)
        violations += [(label, x) for x, k in times.items() if k == c + 1]
    assert not violations, violations[:5]


@pytest.mark.acceptance(5, "aut_order_bound matches the torsion oracle for n = 1..8")
def test_criterion_5():
    assert [aut_order_bound(n) for n in (1, 2, 3)] == [2, 4, 6]
    for n in range(1, 9):
        assert aut_order_bound(n) == torsion_order_oracle(n), n


@pytest.mark.acceptance(6, "finite-order and stabilization decisions")
def test_criterion_6(capsys):
    F2 = VFPresentation.free(2)
    zoo = load("f2_zoo.grp")
    ident = is_finite_order(F2, zoo.endo("id"), certificate("f2_zoo.grp", "id"))
    assert ident.finite and (ident.preperiod, ident.period) == (0, 1)
    swap = is_finite_order(F2, zoo.endo("swap"), certificate("f2_zoo.grp", "swap"))
    assert swap.finite and (swap.preperiod, swap.period) == (0, 2)
    assert stabilizes(F2, zoo.endo("swap"), certificate("f2_zoo.grp", "swap")) is None
    assert not is_finite_order(F2, zoo.endo("aba"), certificate("f2_zoo.grp", "aba")).finite
    assert stabilizes(F2, zoo.endo("vanish"), certificate("f2_zoo.grp", "vanish")) == 1
    assert cli(capsys, "finite-order", fixture("swap.grp"), "phi")[1]["result"] == "FINITE p=0 m=2"
    assert cli(capsys, "stabilizes", fixture("swap.grp"), "phi")[1]["result"] == "NONE"
    assert cli(capsys, "stabilizes", fixture("f2_vanishing.grp"), "phi")[1]["result"] == "1"


def _random_finite_index(rng, r, d):
    """Coset-complete automaton of a random transitive action of F_r on d points."""
    while True:
        perms = [rng.sample(range(d), d) for _ in range(r)]
        seen, stack = {0}, [0]
        while stack:
            v = stack.pop()
            for p in perms:
                for t in (p[v], p.index(v)):
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
        if len(seen) == d:
            return stallings.fold(r, d, [(i, a + 1, perms[a][i]) for a in range(r) for i in range(d)])


@pytest.mark.acceptance(7, "Schreier index formula on random finite-index subgroups")
def test_criterion_7():
    rng = random.Random(77)
    checked = 0
    for k in range(60):
        r, d = 2 + k % 2, rng.randint(1, 8)
        aut = _random_finite_index(rng, r, d)
        assert aut.is_complete() and aut.index() == d
        assert aut.rank - 1 == d * (r - 1)
        # the basis regenerates the same subgroup
        assert stallings.from_generators(aut.basis(), r) == aut
        checked += 1
    assert checked >= 50


@pytest.mark.acceptance(8, "closure, Fix <= EvFix, EvFix cap Per = Fix, monomorphism collapse")
@pytest.mark.parametrize("name, endo", fixture_endos("f2_zoo.grp", "f3_zoo.grp", "dinf.grp", "semidirect.grp"))
def test_criterion_8(name, endo):
    assert check_laws(name, endo, samples=1000) >= 1000


@pytest.mark.acceptance(9, "D_inf end to end")
def test_criterion_9(capsys):
    code, out = cli(capsys, "validate", fixture("dinf.grp"))
    assert code == 0 and out["status"] == "ok"
    doc = load("dinf.grp")
    P, Fp = doc.presentation, fprime("dinf.grp")
    assert Fp.index_in_g == 4 and Fp.automaton.index() == 2 and Fp.rank == 1
    for endo, phi in doc.endos.items():
        for b in Fp.basis_elements():
            assert membership_in_f_prime(Fp, endo_apply(P, phi, b)), endo
    conj = doc.endo("conj")
    images = dihedral_images(conj)
    brute = {s for s in dihedral_elements(8) if dihedral_apply(images, s) == s}
    # the centraliser of x is <x>
    assert brute == {s for s in dihedral_elements(8) if not s.endswith("t")}
    res = fix_of("dinf.grp", "conj")
    for s in dihedral_elements(8):
        assert res.contains(dihedral_to_element(s)) == (s in brute), s


@pytest.mark.acceptance(10, "rank bound closed form and every YES respects it")
def test_criterion_10():
    assert rank_bound(load("f2_zoo.grp").presentation, fprime("f2_zoo.grp")) == 3
    assert rank_bound(load("f3_zoo.grp").presentation, fprime("f3_zoo.grp")) == 4
    for name, endo in fixture_endos("f2_zoo.grp", "f3_zoo.grp", "dinf.grp", "semidirect.grp"):
        rep = evfix_report(name, endo)
        if rep.verdict is Verdict.YES:
            bound = rank_bound(load(name).presentation, fprime(name))
            assert len(rep.subgroup.reduced_generators()) <= bound, (name, endo)
