"""Command-line front end: ``klmrc rank|query|emit|check|bench``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import asp_bridge as bridge
from .baserank import InconsistentKB, base_rank
from .bench import DEFAULT_LEVELS, DEFAULT_SIZES, DEFAULT_TRIALS, BenchConfig, run_bench
from .entailment import InconsistentPremises
from .kb import ASP, INFIX, KBError, emit_kb, parse_kb, parse_query
from .oracle import CapExceeded, ReferenceRC, reference_base_rank
from .rc import rc_entails

EXIT_OK = 0
EXIT_NO = 1
EXIT_PARSE = 2
EXIT_INCONSISTENT = 3
EXIT_BRIDGE = 4
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sizes(text: str) -> tuple[int, ...]:
    try:
        if ":" in text:
            lo, hi, step = (int(x) for x in text.split(":"))
            return tuple(range(lo, hi + 1, step))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI:STEP or a comma list, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="klmrc", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true", help="show diagnostics")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def kb_cmd(name, help):
        s = sub.add_parser(name, help=help)
        s.add_argument("file", help="knowledge base file, or - for stdin")
        s.add_argument("--format", choices=(ASP, INFIX), help="input format (default: detect)")
        s.add_argument("--out", type=Path, help="write output here instead of stdout")
        return s

    s = kb_cmd("rank", "print the BaseRank partition")
    s.add_argument("--oracle", action="store_true", help="use the brute-force reference")
    s.add_argument("--facts", action="store_true", help="emit rank/2 facts instead of a table")

    s = kb_cmd("query", "answer a query under Rational Closure")
    s.add_argument("-q", "--query", help="query text; default: the query in the file")
    s.add_argument("--trace", action="store_true", help="print the inference trace")
    s.add_argument("--oracle", action="store_true", help="use the brute-force reference")

    s = kb_cmd("emit", "emit the knowledge base or the ASP programs")
    s.add_argument("-q", "--query", help="include this query")
    s.add_argument("--to", choices=(ASP, INFIX), default=ASP, help="output format for facts")
    s.add_argument(
        "--encoding", choices=("facts", "baserank", "rc", "all"), default="facts",
        help="what to emit; 'all' is facts followed by both encodings",
    )
    s.add_argument("--repaired", action="store_true", help="BaseRank template without coded_classical")

    s = kb_cmd("check", "cross-check against an external ASP solver")
    s.add_argument("-q", "--query", help="also compare the verdict for this query")
    s.add_argument("--solver", help=f"solver executable (default: ${bridge.SOLVER_ENV}, then clingo)")
    s.add_argument("--timeout", type=float, default=bridge.DEFAULT_TIMEOUT)
    s.add_argument("--workdir", type=Path)
    s.add_argument("--repaired", action="store_true")

    s = sub.add_parser("bench", help="run the scaling benchmark")
    s.add_argument("--sizes", type=_sizes, default=DEFAULT_SIZES, help="LO:HI:STEP or a,b,c")
    s.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    s.add_argument("--classical-fraction", type=float, default=0.0)
    s.add_argument("--out", type=Path, help="CSV output path")
    return p


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")


def _load(args):
    source = _read(args.file)
    return source, parse_kb(source, args.format)


def _query(args, source):
    if args.query is not None:
        return parse_query(args.query)
    return parse_query(source, args.format)


def _cmd_rank(args, out):
    _, kb = _load(args)
    ranked = reference_base_rank(kb) if args.oracle else base_rank(kb)
    lines = ranked.rank_facts() if args.facts else ranked.format_table()
    out.extend(lines)
    return EXIT_OK


def _cmd_query(args, out):
    source, kb = _load(args)
    q = _query(args, source)
    if args.oracle:
        answer = ReferenceRC(kb).query(q)
        if args.trace:
            logging.getLogger(__name__).warning("--trace is ignored with --oracle")
    else:
        answer = rc_entails(base_rank(kb), q, trace=args.trace)
    out.extend(answer.format())
    return EXIT_OK if answer.entailed else EXIT_NO


def _cmd_emit(args, out):
    _, kb = _load(args)
    q = parse_query(args.query) if args.query else None
    parts = []
    if args.encoding in ("facts", "all"):
        parts.append(emit_kb(kb, args.to, q) if args.encoding == "facts"
                     else bridge.emit_kb_facts(kb, q).text)
    if args.encoding in ("baserank", "all"):
        parts.append(bridge.baserank_encoding(args.repaired).text)
    if args.encoding in ("rc", "all"):
        parts.append(bridge.rc_encoding().text)
    out.append("".join(parts).rstrip("\n"))
    return EXIT_OK


def _cmd_check(args, out):
    _, kb = _load(args)
    q = parse_query(args.query) if args.query else None
    report = bridge.cross_check(
        kb, q, solver_path=args.solver, timeout=args.timeout,
        workdir=args.workdir, repaired=args.repaired,
    )
    out.extend(report.format())
    return EXIT_OK if report.agree and not report.indeterminate else EXIT_NO


def _cmd_bench(args, out):
    try:
        cfg = BenchConfig(
            sizes=args.sizes, trials=args.trials, seed=args.seed, output=args.out,
            levels=args.levels, classical_fraction=args.classical_fraction,
        )
    except ValueError as e:
        raise UsageError(str(e))

    def progress(r):
        print(f"size {r.size:4d}  mean {r.mean_seconds * 1e3:9.4f} ms  "
              f"ci95 {r.ci95_seconds * 1e3:8.4f} ms  ranks {r.ranks}", file=sys.stderr)

    try:
        result = run_bench(cfg, progress)
    except OSError as e:
        raise UsageError(f"cannot write {args.out}: {e.strerror}")
    out.append(f"slope {result.slope:.6g} s/statement, intercept {result.intercept:.6g} s")
    return EXIT_OK


COMMANDS = {
    "rank": _cmd_rank,
    "query": _cmd_query,
    "emit": _cmd_emit,
    "check": _cmd_check,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    out: list[str] = []
    try:
        code = COMMANDS[args.command](args, out)
    except KBError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (InconsistentKB, InconsistentPremises) as e:
        print(f"inconsistent knowledge base: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except bridge.BridgeError as e:
        print(f"solver bridge: {e}", file=sys.stderr)
        return EXIT_BRIDGE
    except (UsageError, CapExceeded) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    text = "".join(f"{line}\n" for line in out)
    target = getattr(args, "out", None)
    if target is not None and args.command != "bench":
        try:
            target.write_text(text)
        except OSError as e:
            print(f"error: cannot write {target}: {e.strerror}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return code
