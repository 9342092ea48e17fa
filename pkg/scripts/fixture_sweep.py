"""Run the decision commands over every endomorphism of every fixture and tabulate the verdicts.

    python3 scripts/fixture_sweep.py            # all fixtures
    python3 scripts/fixture_sweep.py fixtures/dinf.grp --bound 8
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
from dataclasses import dataclass
from pathlib import Path

from vfendo.cli import main as vfendo_main
from vfendo.fileformat import read_file

ROOT = Path(__file__).resolve().parent.parent
COMMANDS = ("cphi", "finite-order", "stabilizes", "fix", "evfix-fg", "evper-fg", "normal")
# the line reported for each command
KEYS = {"cphi": "c_phi", "finite-order": "result", "stabilizes": "result", "fix": "flag"}


@dataclass(frozen=True)
class SweepConfig:
    files: tuple[Path, ...]
    bound: int = 12


def run_one(args: list[str]) -> tuple[int, dict]:
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = vfendo_main(args)
    fields = dict(line.split(": ", 1) for line in out.getvalue().splitlines() if ": " in line)
    return code, fields


def cell(command: str, code: int, fields: dict) -> str:
    if code == 1:
        return "n/a"
    if code == 3:
        return "LIMIT"
    return fields.get(KEYS.get(command, "verdict"), "?")


def sweep(config: SweepConfig):
    for path in config.files:
        doc = read_file(str(path))
        for name in doc.endos:
            row = {"file": path.name, "endo": name}
            for command in COMMANDS:
                code, fields = run_one([command, str(path), name, "--bound", str(config.bound)])
                row[command] = cell(command, code, fields)
            yield row


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Tabulate verdicts over fixture files.")
    parser.add_argument("files", nargs="*", type=Path)
    parser.add_argument("--bound", type=int, default=12)
    args = parser.parse_args(argv)
    files = args.files or sorted(p for p in (ROOT / "fixtures").glob("*.grp") if not p.name.startswith("bad_"))
    rows = list(sweep(SweepConfig(tuple(files), args.bound)))
    header = ["file", "endo", *COMMANDS]
    widths = [max(len(h), *(len(str(r[h])) for r in rows)) for h in header]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for r in rows:
        print("  ".join(str(r[h]).ljust(w) for h, w in zip(header, widths)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
