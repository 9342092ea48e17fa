"""Stallings automata of finitely generated subgroups of free groups.

Automata are stored in canonical form: vertices are numbered in breadth-first
order from the base vertex (label order ``1, -1, 2, -2, ...``), so two
automata describe the same subgroup exactly when they compare equal.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .words import IDENTITY, Alphabet, Word, concat, concat_all, invert, substitute


class _Infinite:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __str__(self) -> str:
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


def _label_order(n: int) -> list[int]:
    return [x for i in range(1, n + 1) for x in (i, -i)]


@dataclass(frozen=True, eq=False)
class StallingsAutomaton:
    """Folded core graph with base vertex 0, in canonical numbering."""

    alphabet_size: int
    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]  # (source, positive label, target), sorted
    out: tuple[dict[int, int], ...] = field(repr=False, compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StallingsAutomaton):
            return NotImplemented
        return (self.alphabet_size, self.n_vertices, self.edges) == (
            other.alphabet_size,
            other.n_vertices,
            other.edges,
        )

    def __hash__(self) -> int:
        return hash((self.alphabet_size, self.n_vertices, self.edges))

    base = 0

    # -- queries ---------------------------------------------------------

    def read(self, w: Sequence[int], start: int = 0) -> int | None:
        v = start
        for x in w:
            v = self.out[v].get(x)
            if v is None:
                return None
        return v

    def contains(self, w: Sequence[int]) -> bool:
        return self.read(w) == 0

    @property
    def rank(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    @property
    def is_trivial(self) -> bool:
        return not self.edges

    def is_complete(self) -> bool:
        full = 2 * self.alphabet_size
        return all(len(adj) == full for adj in self.out)

    def is_finite_index(self) -> bool:
        return self.is_complete()

    def index(self):
        return self.n_vertices if self.is_complete() else INFINITE

    def _tree(self) -> tuple[list[Word], set[tuple[int, int]]]:
        paths: list[Word | None] = [None] * self.n_vertices
        paths[0] = IDENTITY
        tree: set[tuple[int, int]] = set()
        queue = deque([0])
        order = _label_order(self.alphabet_size)
        while queue:
            v = queue.popleft()
            for x in order:
                t = self.out[v].get(x)
                if t is not None and paths[t] is None:
                    paths[t] = Word._trusted(paths[v] + (x,))
                    tree.add((v, x))
                    tree.add((t, -x))
                    queue.append(t)
        return paths, tree  # type: ignore[return-value]

    def coset_reps(self) -> list[Word]:
        if not self.is_complete():
            raise ValueError("subgroup has infinite index: INFINITE")
        return self._tree()[0]

    def basis(self) -> list[Word]:
        paths, tree = self._tree()
        out = []
        for u, x, v in self.edges:
            if (u, x) not in tree:
                out.append(concat_all((paths[u], (x,), invert(paths[v]))))
        return out

    def _nontree_index(self) -> dict[tuple[int, int], int]:
        _, tree = self._tree()
        idx = {}
        k = 0
        for u, x, v in self.edges:
            if (u, x) not in tree:
                k += 1
                idx[(u, x)] = k
                idx[(v, -x)] = -k
        return idx

    def rewrite_in_basis(self, w: Sequence[int]) -> Word:
        """Express ``w`` as a word in ``self.basis()`` (letter ``k`` = basis word ``k-1``)."""
        idx = self._nontree_index()
        v = 0
        out = []
        for x in w:
            t = self.out[v].get(x)
            if t is None:
                raise ValueError("word is not in the subgroup")
            k = idx.get((v, x))
            if k is not None:
                out.append(k)
            v = t
        if v != 0:
            raise ValueError("word is not in the subgroup")
        return Word(out)

    def dump(self, alphabet: Alphabet | None = None) -> str:
        alphabet = alphabet or Alphabet.standard(self.alphabet_size)
        lines = [f"base {self.base}"]
        for u, x, v in self.edges:
            lines.append(f"{u} --{alphabet.names[x - 1]}--> {v}")
        return "\n".join(lines)


# -- construction ----------------------------------------------------------


def _canonical(alphabet_size: int, adj: dict[int, dict[int, int]], base) -> StallingsAutomaton:
    number = {base: 0}
    order = [base]
    labels = _label_order(alphabet_size)
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for x in labels:
            t = adj[v].get(x)
            if t is not None and t not in number:
                number[t] = len(order)
                order.append(t)
    out = tuple({x: number[t] for x, t in adj[v].items()} for v in order)
    edges = tuple(
        sorted((number[v], x, number[t]) for v in order for x, t in adj[v].items() if x > 0)
    )
    return StallingsAutomaton(alphabet_size, len(order), edges, out)


def _core(adj: dict[int, dict[int, int]], base) -> None:
    """Remove hanging trees not containing ``base``, in place."""
    stack = [v for v in adj if v != base and len(adj[v]) <= 1]
    while stack:
        v = stack.pop()
        if v not in adj or v == base or len(adj[v]) > 1:
            continue
        for x, t in adj.pop(v).items():
            if t in adj:
                adj[t].pop(-x, None)
                if t != base and len(adj[t]) <= 1:
                    stack.append(t)


def fold(alphabet_size: int, n_vertices: int, edges: Iterable[tuple[int, int, int]], base: int = 0) -> StallingsAutomaton:
    """Fold an arbitrary labelled graph and return the core of the base component."""
    parent = list(range(n_vertices))
    adj: list[dict[int, int] | None] = [dict() for _ in range(n_vertices)]
    pending: list[tuple[int, int]] = []

    def find(v: int) -> int:
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    def add(u: int, x: int, v: int) -> None:
        t = adj[u].get(x)  # type: ignore[union-attr]
        if t is None:
            adj[u][x] = v  # type: ignore[index]
        elif find(t) != v:
            pending.append((t, v))

    def drain() -> None:
        while pending:
            a, b = pending.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            if len(adj[a]) < len(adj[b]):  # type: ignore[arg-type]
                a, b = b, a
            parent[b] = a
            moved = adj[b]
            adj[b] = None
            for x, t in moved.items():  # type: ignore[union-attr]
                add(a, x, find(t))

    for u, x, v in edges:
        if x < 0:
            u, x, v = v, -x, u
        if not 0 < x <= alphabet_size:
            raise ValueError(f"label {x} outside alphabet")
        ru, rv = find(u), find(v)
        add(ru, x, rv)
        ru, rv = find(u), find(v)
        add(rv, -x, ru)
        drain()

    b = find(base)
    graph: dict[int, dict[int, int]] = {}
    queue = deque([b])
    graph[b] = {}
    while queue:
        v = queue.popleft()
        for x, t in adj[v].items():  # type: ignore[union-attr]
            t = find(t)
            graph[v][x] = t
            if t not in graph:
                graph[t] = {}
                queue.append(t)
    _core(graph, b)
    return _canonical(alphabet_size, graph, b)


def from_generators(gens: Iterable[Sequence[int]], alphabet_size: int) -> StallingsAutomaton:
    edges: list[tuple[int, int, int]] = []
    n = 1
    for w in gens:
        w = Word(w)
        if not w:
            continue
        if w.max_base() > alphabet_size:
            raise ValueError("generator outside alphabet")
        prev = 0
        for i, x in enumerate(w):
            nxt = 0 if i == len(w) - 1 else n
            if nxt:
                n += 1
            edges.append((prev, x, nxt))
            prev = nxt
    return fold(alphabet_size, n, edges)


def trivial(alphabet_size: int) -> StallingsAutomaton:
    return from_generators([], alphabet_size)


def rose(alphabet_size: int) -> StallingsAutomaton:
    return from_generators([(i,) for i in range(1, alphabet_size + 1)], alphabet_size)


def intersect(a1: StallingsAutomaton, a2: StallingsAutomaton) -> StallingsAutomaton:
    if a1.alphabet_size != a2.alphabet_size:
        raise ValueError("alphabet mismatch")
    start = (0, 0)
    graph: dict[tuple[int, int], dict[int, tuple[int, int]]] = {start: {}}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        o1, o2 = a1.out[v[0]], a2.out[v[1]]
        for x, t1 in o1.items():
            t2 = o2.get(x)
            if t2 is None:
                continue
            t = (t1, t2)
            graph[v][x] = t
            if t not in graph:
                graph[t] = {}
                queue.append(t)
    _core(graph, start)
    return _canonical(a1.alphabet_size, graph, start)


def is_subgroup(h: StallingsAutomaton, k: StallingsAutomaton) -> bool:
    return all(k.contains(w) for w in h.basis())


def relative_index(h: StallingsAutomaton, k: StallingsAutomaton):
    """Index of ``h`` in ``k``; requires ``h <= k``."""
    if not is_subgroup(h, k):
        raise ValueError("first subgroup is not contained in the second")
    r = k.rank
    if r == 0:
        return 1
    rewritten = [k.rewrite_in_basis(w) for w in h.basis()]
    return from_generators(rewritten, r).index()


def contains_subgroup(k: StallingsAutomaton, h: StallingsAutomaton) -> bool:
    return is_subgroup(h, k)


# -- expressing elements in arbitrary generators ---------------------------


def express(gens: Sequence[Sequence[int]], w: Sequence[int], alphabet_size: int) -> Word | None:
    """A word ``v`` over ``len(gens)`` letters with ``v(gens) = w``, or None if ``w`` is not in ``<gens>``.

    Folding keeps, on every edge, the element of the abstract free group on
    ``gens`` that the edge stands for, so reading ``w`` through the folded
    graph multiplies out an expression.
    """
    # adjacency: vertex -> label -> (target, tag word over generator letters)
    adj: dict[int, dict[int, tuple[int, Word]]] = {0: {}}
    forward: dict[int, tuple[int, Word]] = {}
    pending: deque[tuple[int, int, int, Word]] = deque()
    counter = 1

    def resolve(v: int) -> tuple[int, Word]:
        delta = IDENTITY
        while v in forward:
            v, d = forward[v]
            delta = concat(d, delta)
        return v, delta

    def insert(u: int, x: int, t: int, tag: Word) -> None:
        u, du = resolve(u)
        t, dt = resolve(t)
        tag = concat_all((du, tag, invert(dt)))
        cur = adj[u].get(x)
        if cur is None and -x in adj[t]:
            u, x, t, tag = t, -x, u, invert(tag)
            cur = adj[u][x]
        if cur is None:
            adj[u][x] = (t, tag)
            adj[t][-x] = (u, invert(tag))
            return
        t1, tag1 = cur
        if t1 == t:
            return
        keep, gone = t1, t
        delta = concat(invert(tag1), tag)  # potential(t1) = delta * potential(t)
        if gone == 0:
            keep, gone, delta = t, t1, invert(delta)
        forward[gone] = (keep, delta)
        moved = adj.pop(gone)
        for y, (s, mu) in moved.items():
            if s != gone:
                adj[s].pop(-y, None)
            pending.append((gone, y, s, mu))

    for j, g in enumerate(gens):
        g = Word(g)
        if not g:
            continue
        prev = 0
        for i, x in enumerate(g):
            last = i == len(g) - 1
            if last:
                nxt = 0
            else:
                nxt = counter
                counter += 1
                adj[nxt] = {}
            pending.append((prev, x, nxt, Word._trusted((j + 1,)) if last else IDENTITY))
            prev = nxt
        while pending:
            insert(*pending.popleft())

    v = 0
    tags = []
    for x in w:
        step = adj[v].get(x)
        if step is None:
            return None
        v, tag = step
        tags.append(tag)
    if v != 0:
        return None
    result = concat_all(tags)
    assert substitute(result, [Word(g) for g in gens]) == Word(w)
    return result
