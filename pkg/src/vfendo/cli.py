"""Command-line front end.

Reports are flat ``key: value`` lines (``--format text``) or ``key=value``
lines with a fixed header (``--format structured``).  Exit codes: 0 decided,
1 input error, 2 UNKNOWN, 3 resource limit.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from . import evfix, fix, invariant, orbit
from .errors import InvalidInput, ResourceLimit
from .fileformat import Document, read_file
from .vfree import GElement, endo_check

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN, EXIT_RESOURCE = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None = None
    endo_name: str | None = None
    element: str | None = None
    bound: int = fix.DEFAULT_BOUND
    cap: int | None = None
    trust_oracle: bool = False
    trace: bool = False
    output_format: str = "text"
    dump: bool = False
    n: int | None = None

    def __post_init__(self):
        if self.bound < 1:
            raise InvalidInput("--bound must be >= 1")
        if self.cap is not None and self.cap < 1:
            raise InvalidInput("--cap must be >= 1")
        if self.output_format not in ("text", "structured"):
            raise InvalidInput("--format must be text or structured")


@dataclass
class Report:
    items: list[tuple[str, str]] = field(default_factory=list)
    code: int = EXIT_OK

    def add(self, key: str, value) -> None:
        self.items.append((key, str(value)))

    def render(self, config: RunConfig) -> str:
        if config.output_format == "structured":
            head = [("format", "vfendo-report/1"), ("command", config.command)]
            lines = [f"{k}={v}" for k, v in head + self.items]
            lines.append(f"exit_code={self.code}")
        else:
            lines = [f"{k}: {v}" for k, v in self.items]
        return "\n".join(lines) + "\n"


class _Context:
    """Lazily computed pieces shared between commands."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.doc: Document = read_file(config.input_path)  # type: ignore[arg-type]
        self.P = self.doc.presentation
        diags = self.P.validate()
        if diags:
            raise InvalidInput("; ".join(diags))
        self._fp = None
        self._cert = None
        self._fix = None

    @cached_property
    def phi(self):
        phi = self.doc.endo(self.config.endo_name)  # type: ignore[arg-type]
        diags = endo_check(self.P, phi)
        if diags:
            raise InvalidInput(f"[endo {self.config.endo_name}] " + "; ".join(diags))
        return phi

    @property
    def fp(self):
        if self._fp is None:
            self._fp = invariant.compute_fully_invariant(self.P)
        return self._fp

    @property
    def cert(self):
        if self._cert is None:
            self._cert = orbit.c_phi(self.P, self.phi, self.fp)
        return self._cert

    @property
    def fix(self):
        if self._fix is None:
            self._fix = fix.fix_vfree(self.P, self.phi, self.fp, self.config.bound)
        return self._fix

    def element(self) -> GElement:
        return self.P.parse_element(self.config.element or "")

    def fmt(self, g: GElement) -> str:
        return self.P.format_element(g)


def _elements(report: Report, key: str, ctx: _Context, elems: Sequence[GElement]) -> None:
    report.add(f"{key}_count", len(elems))
    for k, g in enumerate(elems):
        report.add(f"{key}.{k}", ctx.fmt(g))


def _trace(report: Report, cert: orbit.CPhiCertificate) -> None:
    for line in cert.lines(prefix="trace."):
        key, _, value = line.partition(": ")
        report.add(key, value)


def cmd_validate(ctx: _Context, r: Report) -> None:
    P = ctx.P
    problems = []
    for name, phi in ctx.doc.endos.items():
        problems += [f"[endo {name}] {d}" for d in endo_check(P, phi)]
    for d in problems:
        print(d, file=sys.stderr)
    r.add("status", "invalid" if problems else "ok")
    r.add("free_rank", P.rank)
    r.add("cosets", P.m)
    r.add("endos", " ".join(ctx.doc.endos) or "none")
    if problems:
        r.code = EXIT_INPUT


def cmd_invariant(ctx: _Context, r: Report) -> None:
    S = ctx.fp
    r.add("index_in_g", S.index_in_g)
    r.add("index_in_f", S.automaton.index())
    r.add("rank", S.rank)
    r.add("quotients", len(S.quotients))
    for k, w in enumerate(S.basis):
        r.add(f"basis.{k}", ctx.P.alphabet.format(w))
    for k, g in enumerate(S.coset_reps):
        r.add(f"coset_rep.{k}", ctx.fmt(g))
    if ctx.config.dump:
        for line in S.automaton.dump(ctx.P.alphabet).splitlines():
            r.add("automaton", line)


def cmd_fix(ctx: _Context, r: Report) -> None:
    res = ctx.fix
    r.add("flag", res.flag)
    _elements(r, "generator", ctx, res.generators)
    r.add("core_rank", res.core.subgroup.rank)
    for p in res.pieces:
        name = ctx.P.format_element(ctx.fp.coset_reps[p.coset])
        if p.shift is None:
            state = "EMPTY (shift outside F')"
        elif p.representative is None:
            state = "EMPTY" if p.certified else "EMPTY within bound"
        else:
            state = ctx.fmt(p.representative)
        r.add(f"piece.{p.coset}", f"[{name}] {state}")
    exact = fix.exact_fix(res.restricted) if not res.core.certified else None
    if exact is not None:
        r.add("core_certified_by", exact[1])
    if ctx.config.dump:
        for line in res.core_in_f().dump(ctx.P.alphabet).splitlines():
            r.add("automaton", line)


def cmd_orbit(ctx: _Context, r: Report) -> None:
    g = ctx.element()
    cap = ctx.config.cap or ctx.cert.c_phi
    rep = orbit.orbit(ctx.P, ctx.phi, g, cap)
    r.add("status", rep.status)
    r.add("cap", cap)
    if rep.finite:
        r.add("preperiod", rep.preperiod)
        r.add("period", rep.period)
    _elements(r, "element", ctx, rep.elements)


def cmd_cphi(ctx: _Context, r: Report) -> None:
    c = ctx.cert
    r.add("c_phi", c.c_phi)
    r.add("period_bound", c.period_bound)
    r.add("straight_bound", c.straight_bound)
    if ctx.config.trace:
        _trace(r, c)


def cmd_finite_order(ctx: _Context, r: Report) -> None:
    res = orbit.is_finite_order(ctx.P, ctx.phi, ctx.cert)
    r.add("result", str(res))
    r.add("c_phi", ctx.cert.c_phi)
    if ctx.config.trace:
        _trace(r, ctx.cert)


def cmd_stabilizes(ctx: _Context, r: Report) -> None:
    res = orbit.stabilizes(ctx.P, ctx.phi, ctx.cert)
    r.add("result", "NONE" if res is None else res)
    r.add("c_phi", ctx.cert.c_phi)
    if ctx.config.trace:
        _trace(r, ctx.cert)


def cmd_kernel_member(ctx: _Context, r: Report) -> None:
    g = ctx.element()
    r.add("element", ctx.fmt(g))
    r.add("result", str(orbit.in_stable_kernel(ctx.P, ctx.phi, ctx.cert, g)).lower())
    r.add("c_phi", ctx.cert.c_phi)


def cmd_evfix_member(ctx: _Context, r: Report) -> None:
    g = ctx.element()
    r.add("element", ctx.fmt(g))
    r.add("result", str(evfix.in_evfix(ctx.P, ctx.phi, ctx.cert, g)).lower())
    r.add("evper", str(evfix.in_evper(ctx.P, ctx.phi, ctx.cert, g)).lower())
    r.add("c_phi", ctx.cert.c_phi)


def _fg_report(ctx: _Context, r: Report, rep: evfix.EvFixReport, dump: bool) -> None:
    r.add("verdict", rep.verdict.value)
    if rep.leaning is not None:
        r.add("leaning", rep.leaning.value)
    r.add("branch", rep.branch)
    r.add("kernel_finite", str(rep.kernel_finite).lower())
    if rep.relative_index is not None:
        r.add("relative_index", rep.relative_index)
    r.add("fix_flag", rep.fix_flag)
    if rep.fix_certified_by:
        r.add("fix_certified_by", rep.fix_certified_by)
    if rep.exponent != 1:
        r.add("exponent", rep.exponent)
    if rep.verdict is evfix.Verdict.YES:
        r.add("generators_complete", str(rep.generators_complete).lower())
        _elements(r, "generator", ctx, rep.generators)
        r.add("rank_bound", evfix.rank_bound(ctx.P, ctx.fp))
    if dump and rep.subgroup is not None:
        sub = rep.subgroup
        for k, g in sorted(sub.reps.items()):
            r.add(f"coset_piece.{k}", ctx.fmt(g))
        for line in sub.core.dump(ctx.P.alphabet).splitlines():
            r.add("automaton", line)
    if ctx.config.trace:
        _trace(r, ctx.cert)
    r.code = rep.exit_code


def cmd_evfix_fg(ctx: _Context, r: Report) -> None:
    rep = evfix.evfix_is_fg(ctx.P, ctx.phi, ctx.cert, ctx.fp, ctx.fix, ctx.config.trust_oracle)
    _fg_report(ctx, r, rep, ctx.config.dump)


def cmd_evfix_gens(ctx: _Context, r: Report) -> None:
    rep = evfix.evfix_is_fg(ctx.P, ctx.phi, ctx.cert, ctx.fp, ctx.fix, ctx.config.trust_oracle)
    _fg_report(ctx, r, rep, True)


def cmd_evper_fg(ctx: _Context, r: Report) -> None:
    rep = evfix.evper_is_fg(ctx.P, ctx.phi, ctx.fp, ctx.config.bound, ctx.config.trust_oracle)
    _fg_report(ctx, r, rep, ctx.config.dump)


def cmd_normal(ctx: _Context, r: Report) -> None:
    if not ctx.P.is_free:
        raise InvalidInput("normal needs a free group (no cosets)")
    v = evfix.normality_free(ctx.P, ctx.phi, ctx.cert, ctx.fix, ctx.config.trust_oracle)
    r.add("verdict", v.verdict.value)
    if v.leaning is not None:
        r.add("leaning", v.leaning.value)
    if v.vanishing:
        r.add("note", "vanishing endomorphism; EvFix is also the union of kernels")
    r.add("fix_flag", v.fix_flag)
    if v.fix_certified_by:
        r.add("fix_certified_by", v.fix_certified_by)
    if ctx.config.trace:
        _trace(r, ctx.cert)
    r.code = v.exit_code


def cmd_rank_bound(ctx: _Context, r: Report) -> None:
    r.add("rank_bound", evfix.rank_bound(ctx.P, ctx.fp))
    r.add("index_in_g", ctx.fp.index_in_g)
    r.add("rank", ctx.fp.rank)


COMMANDS: dict[str, tuple[Callable[[_Context, Report], None], str]] = {
    "validate": (cmd_validate, "f"),
    "invariant": (cmd_invariant, "f"),
    "fix": (cmd_fix, "fe"),
    "orbit": (cmd_orbit, "feg"),
    "cphi": (cmd_cphi, "fe"),
    "finite-order": (cmd_finite_order, "fe"),
    "stabilizes": (cmd_stabilizes, "fe"),
    "kernel-member": (cmd_kernel_member, "feg"),
    "evfix-member": (cmd_evfix_member, "feg"),
    "evfix-fg": (cmd_evfix_fg, "fe"),
    "evper-fg": (cmd_evper_fg, "fe"),
    "evfix-gens": (cmd_evfix_gens, "fe"),
    "normal": (cmd_normal, "fe"),
    "rank-bound": (cmd_rank_bound, "f"),
}


def run(config: RunConfig) -> tuple[str, int]:
    report = Report()
    if config.command == "aut-order-bound":
        if config.n is None or config.n < 1:
            raise InvalidInput("n must be a positive integer")
        report.add("n", config.n)
        report.add("aut_order_bound", orbit.aut_order_bound(config.n))
        return report.render(config), EXIT_OK
    handler, _ = COMMANDS[config.command]
    handler(_Context(config), report)
    return report.render(config), report.code


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; exit status 2 is reserved for UNKNOWN
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vfendo", description="Endomorphisms of virtually free groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--bound", type=int, default=fix.DEFAULT_BOUND, metavar="L", help="length bound for fixed-point search")
    common.add_argument("--cap", type=int, default=None, metavar="N", help="orbit cap (default: C_phi)")
    common.add_argument("--trust-oracle", action="store_true", help="treat bounded fixed subgroups as exact")
    common.add_argument("--trace", action="store_true", help="include the C_phi certificate trace")
    common.add_argument("--format", choices=("text", "structured"), default="text", dest="output_format")
    common.add_argument("--dump", action="store_true", help="print subgroup automata")
    for name, (_, args) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common])
        p.add_argument("file")
        if "e" in args:
            p.add_argument("endo")
        if "g" in args:
            p.add_argument("element", nargs="+", help="element, e.g. 'a b^-1' or 'x t'")
    p = sub.add_parser("aut-order-bound", parents=[common])
    p.add_argument("n", type=int)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig(
            command=args.command,
            input_path=getattr(args, "file", None),
            endo_name=getattr(args, "endo", None),
            element=" ".join(args.element) if getattr(args, "element", None) else None,
            bound=args.bound,
            cap=args.cap,
            trust_oracle=args.trust_oracle,
            trace=args.trace,
            output_format=args.output_format,
            dump=args.dump,
            n=getattr(args, "n", None),
        )
        text, code = run(config)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
