"""Slack between the certified orbit bound and the largest finite orbit actually seen.

For every endomorphism in the given files, walk all elements up to a length
bound, record finite orbits (cap ``c_phi``) and report the largest one next to
``c_phi``.  A ratio well below 1 is expected: the bound is worst-case.

    python3 scripts/orbit_census.py fixtures/f2_zoo.grp fixtures/dinf.grp --max-len 5
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

from vfendo.errors import ResourceLimit
from vfendo.fileformat import read_file
from vfendo.invariant import compute_fully_invariant
from vfendo.orbit import c_phi, orbit


@dataclass(frozen=True)
class CensusConfig:
    files: tuple[str, ...]
    max_len: int = 5


@dataclass(frozen=True)
class CensusRow:
    file: str
    endo: str
    c_phi: int
    elements: int
    finite: int
    largest: int
    skipped: int

    @property
    def slack(self) -> float:
        return self.largest / self.c_phi


def census(config: CensusConfig):
    for path in config.files:
        doc = read_file(path)
        P = doc.presentation
        Fp = compute_fully_invariant(P)
        elements = list(P.elements_up_to(config.max_len))
        for name, phi in doc.endos.items():
            c = c_phi(P, phi, Fp).c_phi
            sizes, skipped = [], 0
            for g in elements:
                try:
                    rep = orbit(P, phi, g, c)
                except ResourceLimit:
                    skipped += 1
                    continue
                if rep.finite:
                    sizes.append(rep.preperiod + rep.period)
            yield CensusRow(Path(path).name, name, c, len(elements), len(sizes), max(sizes, default=0), skipped)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("files", nargs="+")
    parser.add_argument("--max-len", type=int, default=5)
    args = parser.parse_args(argv)
    config = CensusConfig(tuple(args.files), args.max_len)
    out = csv.writer(sys.stdout)
    out.writerow(["file", "endo", "c_phi", "elements", "finite", "largest", "skipped", "slack"])
    for row in census(config):
        out.writerow([row.file, row.endo, row.c_phi, row.elements, row.finite, row.largest, row.skipped, f"{row.slack:.2f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
