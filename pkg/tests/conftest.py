from __future__ import annotations

import random
from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import strategies as st

from vfendo.evfix import evfix_is_fg
from vfendo.fileformat import read_file
from vfendo.fix import fix_vfree
from vfendo.invariant import compute_fully_invariant
from vfendo.orbit import c_phi
from vfendo.words import Word

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
GOOD_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.grp") if not p.name.startswith("bad_"))


@lru_cache(maxsize=None)
def load(name: str):
    return read_file(str(FIXTURES / name))


@lru_cache(maxsize=None)
def fprime(name: str):
    return compute_fully_invariant(load(name).presentation)


@lru_cache(maxsize=None)
def certificate(name: str, endo: str):
    doc = load(name)
    return c_phi(doc.presentation, doc.endo(endo), fprime(name))


@lru_cache(maxsize=None)
def fix_of(name: str, endo: str):
    doc = load(name)
    return fix_vfree(doc.presentation, doc.endo(endo), fprime(name))


@lru_cache(maxsize=None)
def evfix_report(name: str, endo: str, trust_oracle: bool = False):
    doc = load(name)
    return evfix_is_fg(
        doc.presentation, doc.endo(endo), certificate(name, endo), fprime(name), fix_of(name, endo), trust_oracle
    )


def fixture_endos(*names: str):
    """``(file, endo)`` pairs for every endomorphism in the given fixture files."""
    return [(n, e) for n in names for e in load(n).endos]


def random_word(rng: random.Random, n: int, max_len: int) -> Word:
    letters = [x for k in range(1, n + 1) for x in (k, -k)]
    return Word(rng.choice(letters) for _ in range(rng.randint(0, max_len)))


def words(n: int, max_len: int = 8):
    letters = [x for k in range(1, n + 1) for x in (k, -k)]
    return st.lists(st.sampled_from(letters), max_size=max_len).map(Word)


@pytest.fixture
def rng():
    return random.Random(20240601)


# -- acceptance summary ----------------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when == "teardown" or (rep.when == "setup" and rep.passed):
        return
    number, title = mark.args
    ok = rep.passed
    prev = _ACCEPTANCE.get(number)
    _ACCEPTANCE[number] = (title, ok and (prev is None or prev[1]))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, ok = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}")
