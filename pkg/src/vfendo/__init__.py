"""Decision procedures for endomorphisms of finitely generated virtually free groups."""

from .errors import InvalidInput, ResourceLimit
from .fileformat import Document, parse_input, serialize
from .free_endo import FreeEndo
from .vfree import GElement, GEndo, VFPresentation
from .words import Alphabet, Word

__all__ = [
    "Alphabet",
    "Document",
    "FreeEndo",
    "GElement",
    "GEndo",
    "InvalidInput",
    "ResourceLimit",
    "VFPresentation",
    "Word",
    "parse_input",
    "serialize",
]
