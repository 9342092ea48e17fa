"""Reading and writing presentation files.

::

    [group]
    free_generators = x
    cosets = 1 t
    rel t x = x^-1 t
    rel t t = 1 1

    [endo conj]
    x -> x
    t -> x x t

``#`` starts a comment.  A file without a ``cosets`` line describes a free group.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidInput
from .vfree import GElement, GEndo, VFPresentation
from .words import IDENTITY, Alphabet, Word

_NAME = re.compile(r"[a-z][a-z0-9_]*\Z")


class ParseError(InvalidInput):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass(frozen=True)
class _Line:
    number: int
    text: str
    indent: int

    def col(self, token: str, start: int = 0) -> int:
        pos = self.text.find(token, start)
        return self.indent + (pos if pos >= 0 else 0) + 1


@dataclass
class Document:
    presentation: VFPresentation
    endos: dict[str, GEndo]

    def endo(self, name: str) -> GEndo:
        if name not in self.endos:
            known = " ".join(self.endos) or "none"
            raise InvalidInput(f"no endomorphism named {name!r} (known: {known})")
        return self.endos[name]


def _lines(text: str) -> list[_Line]:
    out = []
    for k, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        stripped = body.lstrip()
        if stripped:
            out.append(_Line(k, stripped, len(body) - len(stripped)))
    return out


def _parse_word(alphabet: Alphabet, tokens: list[str], line: _Line) -> Word:
    if tokens == ["1"]:
        return IDENTITY
    letters = []
    for tok in tokens:
        name, _, exp = tok.partition("^")
        if name not in alphabet.names:
            raise ParseError(line.number, line.col(tok), f"expected a free generator, found {tok!r}")
        if exp not in ("", "-1"):
            raise ParseError(line.number, line.col(tok), f"expected exponent ^-1, found {tok!r}")
        i = alphabet.names.index(name) + 1
        letters.append(-i if exp else i)
    return Word(letters)


def _split_element(tokens: list[str], coset_names: tuple[str, ...]) -> tuple[list[str], int]:
    """Strip a trailing coset name; a bare ``1`` after a word names the identity coset."""
    if tokens and tokens[-1] in coset_names[1:]:
        return tokens[:-1] or ["1"], coset_names.index(tokens[-1])
    if len(tokens) >= 2 and tokens[-1] == "1":
        return tokens[:-1], 0
    return tokens, 0


def parse_input(text: str) -> Document:
    lines = _lines(text)
    if not lines or lines[0].text != "[group]":
        where = lines[0] if lines else _Line(1, "", 0)
        raise ParseError(where.number, 1, "missing [group]")
    generators: list[str] | None = None
    cosets: list[str] = ["1"]
    rels: list[tuple[_Line, list[str], list[str]]] = []
    i = 1
    while i < len(lines) and not lines[i].text.startswith("["):
        ln = lines[i]
        key, eq, value = ln.text.partition("=")
        key = key.strip()
        if key == "free_generators" and eq:
            generators = value.split()
            for g in generators:
                if not _NAME.match(g):
                    raise ParseError(ln.number, ln.col(g), f"invalid generator name {g!r}")
            if len(set(generators)) != len(generators):
                raise ParseError(ln.number, 1, "duplicate free generator")
        elif key == "cosets" and eq:
            cosets = value.split()
            if not cosets or cosets[0] != "1":
                raise ParseError(ln.number, ln.col("=") + 1, "expected '1' as the first coset")
            for c in cosets[1:]:
                if not _NAME.match(c):
                    raise ParseError(ln.number, ln.col(c), f"invalid coset name {c!r}")
            if len(set(cosets)) != len(cosets):
                raise ParseError(ln.number, 1, "duplicate coset name")
        elif ln.text.startswith("rel ") and eq:
            lhs = key.split()[1:]
            if len(lhs) != 2:
                raise ParseError(ln.number, ln.col("rel") + 4, "expected 'rel <coset> <generator> ='")
            rhs = value.split()
            if not rhs:
                raise ParseError(ln.number, ln.col("=") + 1, "expected a word after '='")
            rels.append((ln, lhs, rhs))
        else:
            raise ParseError(ln.number, 1, "expected 'free_generators =', 'cosets =' or 'rel'")
        i += 1
    if generators is None:
        raise ParseError(lines[0].number, 1, "missing free_generators")
    clash = set(generators) & set(cosets[1:])
    if clash:
        raise InvalidInput(f"names used both as generator and coset: {' '.join(sorted(clash))}")
    alphabet = Alphabet(tuple(generators))
    ctuple = tuple(cosets)
    twist: dict[tuple[int, int], Word] = {}
    products: dict[tuple[int, int], tuple[Word, int]] = {}
    for ln, (left, right), rhs in rels:
        if left not in ctuple[1:]:
            raise ParseError(ln.number, ln.col(left), f"expected a coset name, found {left!r}")
        ci = ctuple.index(left)
        if right in alphabet.names:
            a = alphabet.names.index(right)
            if rhs[-1] != left or len(rhs) < 2:
                raise ParseError(ln.number, ln.col(rhs[-1], ln.text.find("=")), f"expected trailing coset {left!r}")
            if (ci, a) in twist:
                raise ParseError(ln.number, 1, "duplicate relation")
            twist[(ci, a)] = _parse_word(alphabet, rhs[:-1], ln)
        elif right in ctuple[1:]:
            cj = ctuple.index(right)
            if len(rhs) < 2 or rhs[-1] not in ctuple:
                raise ParseError(ln.number, ln.col(rhs[-1], ln.text.find("=")), "expected '<word> <coset>'")
            if (ci, cj) in products:
                raise ParseError(ln.number, 1, "duplicate relation")
            products[(ci, cj)] = (_parse_word(alphabet, rhs[:-1], ln), ctuple.index(rhs[-1]))
        else:
            raise ParseError(ln.number, ln.col(right, ln.text.find(left) + len(left)), f"unknown name {right!r}")
    P = VFPresentation.build(alphabet, ctuple, twist, products)
    endos: dict[str, GEndo] = {}
    gen_names = P.generator_names()
    while i < len(lines):
        head = lines[i]
        m = re.fullmatch(r"\[endo\s+([A-Za-z_][A-Za-z0-9_]*)\]", head.text)
        if not m:
            raise ParseError(head.number, 1, "expected '[endo NAME]'")
        name = m.group(1)
        if name in endos:
            raise ParseError(head.number, head.col(name), f"duplicate endomorphism {name!r}")
        i += 1
        images: dict[str, GElement] = {}
        while i < len(lines) and not lines[i].text.startswith("["):
            ln = lines[i]
            g, arrow, value = ln.text.partition("->")
            g = g.strip()
            if not arrow:
                raise ParseError(ln.number, 1, "expected '<generator> -> <word> [coset]'")
            if g not in gen_names:
                raise ParseError(ln.number, 1, f"unknown generator {g!r}")
            if g in images:
                raise ParseError(ln.number, 1, f"generator {g!r} given twice")
            tokens = value.split()
            if not tokens:
                raise ParseError(ln.number, ln.col("->") + 2, "expected a word after '->'")
            wtoks, coset = _split_element(tokens, ctuple)
            images[g] = GElement(_parse_word(alphabet, wtoks, ln), coset)
            i += 1
        missing = [g for g in gen_names if g not in images]
        if missing:
            raise ParseError(head.number, 1, f"endomorphism {name!r} has no image for {' '.join(missing)}")
        n = P.rank
        letters = tuple(images[g] for g in gen_names[:n])
        cosets_img = (GElement(IDENTITY, 0),) + tuple(images[g] for g in gen_names[n:])
        endos[name] = GEndo(letters, cosets_img)
    return Document(P, endos)


def read_file(path: str) -> Document:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc
    return parse_input(text)


def format_element(P: VFPresentation, g: GElement) -> str:
    return P.format_element(g)


def serialize(doc: Document) -> str:
    P = doc.presentation
    names = P.alphabet.names
    out = ["[group]", f"free_generators = {' '.join(names)}"]
    if P.m > 1:
        out.append(f"cosets = {' '.join(P.coset_names)}")
        for i in range(1, P.m):
            for a in range(P.rank):
                out.append(f"rel {P.coset_names[i]} {names[a]} = {P.alphabet.format(P.twist[i][a])} {P.coset_names[i]}")
            for j in range(1, P.m):
                w, r = P.prod_word[i][j], P.prod_coset[i][j]
                out.append(f"rel {P.coset_names[i]} {P.coset_names[j]} = {P.alphabet.format(w)} {P.coset_names[r]}")
    for name, phi in doc.endos.items():
        out.append("")
        out.append(f"[endo {name}]")
        for g, img in zip(P.generator_names(), phi.generator_images()):
            word = P.alphabet.format(img.word)
            tail = f" {P.coset_names[img.coset]}" if img.coset else ""
            out.append(f"{g} -> {word}{tail}")
    return "\n".join(out) + "\n"
