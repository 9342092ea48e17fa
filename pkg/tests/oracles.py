"""Brute-force reference implementations used only by the test suite.

Nothing here imports ``vfendo``: words are plain tuples of signed ints
(``k`` is generator ``k``, ``-k`` its inverse) and every operation is written
from scratch, so agreement with the library is meaningful evidence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product


class ScopeExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class BruteForceScope:
    max_word_length: int
    alphabet_size: int
    element_cap: int = 2_000_000


# -- free group arithmetic ----------------------------------------------------


def free_reduce(seq) -> tuple:
    out: list[int] = []
    for x in seq:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inv(w) -> tuple:
    return tuple(-x for x in reversed(w))


def mul(*ws) -> tuple:
    return free_reduce(x for w in ws for x in w)


def subst(w, images) -> tuple:
    inv_images = [inv(v) for v in images]
    out: list[int] = []
    for x in w:
        piece = images[x - 1] if x > 0 else inv_images[-x - 1]
        for y in piece:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


def all_words(n: int, max_len: int):
    """Every reduced word of length <= max_len, shortest first."""
    letters = [x for k in range(1, n + 1) for x in (k, -k)]
    layer = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x in letters:
                if not w or w[-1] != -x:
                    v = w + (x,)
                    nxt.append(v)
                    yield v
        layer = nxt


def raw_sequences(n: int, length: int):
    letters = [x for k in range(1, n + 1) for x in (k, -k)]
    return product(letters, repeat=length)


# -- subgroups ---------------------------------------------------------------


def subgroup_ball(gens, scope: BruteForceScope) -> set:
    """Elements of <gens> reachable by products whose partial products all have length <= scope."""
    steps = [tuple(g) for g in gens if g] + [inv(g) for g in gens if g]
    seen = {()}
    queue = deque([()])
    while queue:
        w = queue.popleft()
        for s in steps:
            v = mul(w, s)
            if len(v) <= scope.max_word_length and v not in seen:
                seen.add(v)
                if len(seen) > scope.element_cap:
                    raise ScopeExceeded("subgroup enumeration exceeded the element cap")
                queue.append(v)
    return seen


def subgroup_membership_oracle(gens, w, scope: BruteForceScope) -> bool:
    """True when ``w`` is found among products of generators within scope.

    A True answer is a proof of membership.  False only means no witness
    exists among products whose partial products stay within the length scope.
    """
    return free_reduce(w) in subgroup_ball(gens, scope)


def evaluate_in_generators(expr, gens) -> tuple:
    """Evaluate a word over generator indices (1-based, signed) in the free group."""
    return subst(expr, [tuple(g) for g in gens])


# -- endomorphisms -------------------------------------------------------------


def fixed_points_oracle(images, scope: BruteForceScope) -> list:
    return [w for w in all_words(scope.alphabet_size, scope.max_word_length) if subst(w, images) == w]


def twisted_solutions(images, u, scope: BruteForceScope) -> list:
    """All words x within scope with phi(x) = x u."""
    return [x for x in all_words(scope.alphabet_size, scope.max_word_length) if subst(x, images) == mul(x, u)]


@dataclass(frozen=True)
class OrbitCensus:
    max_finite: int
    finite_count: int
    undecided: int  # orbits cut off by the iteration or length cap
    sizes: dict


def orbit_size(step, x, max_iter: int, size_of=len, max_size: int = 512):
    """Size of the orbit of ``x`` under ``step``, or None when a cap is hit."""
    seen = {x: 0}
    for k in range(1, max_iter + 1):
        x = step(x)
        if x in seen:
            return k
        if size_of(x) > max_size:
            return None
        seen[x] = k
    return None


def orbit_census_oracle(step, elements, max_iter: int = 64, size_of=len, max_size: int = 512) -> OrbitCensus:
    sizes = {}
    undecided = 0
    for x in elements:
        s = orbit_size(step, x, max_iter, size_of, max_size)
        if s is None:
            undecided += 1
        else:
            sizes[x] = s
    return OrbitCensus(max(sizes.values(), default=0), len(sizes), undecided, sizes)


def death_times(step, elements, horizon: int, identity=()) -> dict:
    """Map each element to the least k <= horizon with x phi^k = 1, or None."""
    memo: dict = {identity: 0}

    def dt(x, budget):
        chain = []
        while x not in memo and len(chain) < budget:
            chain.append(x)
            x = step(x)
        if x in memo and memo[x] is not None:
            base = memo[x]
        elif x == identity:
            base = 0
        else:
            base = None
        for k, y in enumerate(reversed(chain), start=1):
            # only definite answers are memoised
            if base is not None:
                memo[y] = base + k
        if base is None:
            return None
        total = base + len(chain)
        return total if total <= horizon else None

    return {x: dt(x, horizon + 1) for x in elements}


# -- torsion orders ------------------------------------------------------------


def _factor(m: int) -> dict:
    out: dict = {}
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def torsion_cost(m: int) -> int:
    return sum((p - 1) * p ** (a - 1) for p, a in _factor(m).items())


def torsion_order_oracle(n: int) -> int:
    return max(m for m in range(1, 10 * n * n + 1) if torsion_cost(m) <= n)


# -- the infinite dihedral group --------------------------------------------------

# x, X = x^-1, t.  Rules: tt -> e, tx -> Xt, tX -> xt, xX -> e, Xx -> e.
_RULES = {"tt": "", "tx": "Xt", "tX": "xt", "xX": "", "Xx": ""}


def dihedral_normalize(s: str) -> str:
    """Leftmost rewriting; the stack is always irreducible, so the result has the shape x^k t^e."""
    stack: list[str] = []
    pending = list(reversed(s))
    while pending:
        c = pending.pop()
        if stack and stack[-1] + c in _RULES:
            pending.extend(reversed(_RULES[stack.pop() + c]))
        else:
            stack.append(c)
    return "".join(stack)


def dihedral_mult(*parts: str) -> str:
    return dihedral_normalize("".join(parts))


def dihedral_inverse(s: str) -> str:
    swap = {"x": "X", "X": "x", "t": "t"}
    return dihedral_normalize("".join(swap[c] for c in reversed(s)))


def dihedral_element(s: str) -> tuple[int, int]:
    """Normal form ``x^k t^e`` as ``(k, e)``."""
    s = dihedral_normalize(s)
    e = 1 if s.endswith("t") else 0
    body = s[:-1] if e else s
    assert "t" not in body
    return body.count("x") - body.count("X"), e


def dihedral_string(k: int, e: int) -> str:
    return ("x" * k if k >= 0 else "X" * -k) + ("t" if e else "")


def dihedral_apply(images: dict, s: str) -> str:
    """Apply the endomorphism given by ``{'x': str, 't': str}``."""
    pieces = []
    for c in s:
        if c == "X":
            pieces.append(dihedral_inverse(images["x"]))
        else:
            pieces.append(images[c])
    return dihedral_normalize("".join(pieces))


def dihedral_elements(max_len: int) -> list[str]:
    """All normal forms x^k t^e with |k| + e <= max_len."""
    out = []
    for k in range(-max_len, max_len + 1):
        out.append(dihedral_string(k, 0))
        if abs(k) + 1 <= max_len:
            out.append(dihedral_string(k, 1))
    return out
