"""Bridge to an external ASP solver.

Emits the BaseRank / Rational Closure encodings and knowledge-base facts,
runs a clingo-compatible solver out of process, parses its answer sets, and
compares them with the native engine.
"""
from __future__ import annotations

import enum
import os
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence, Union

from .baserank import InconsistentKB, RankedKnowledgeBase, base_rank
from .kb import KnowledgeBase, Literal, Query, emit_kb
from .rc import rc_entails

SOLVER_ENV = "RC_SOLVER"
DEFAULT_TIMEOUT = 60.0


class BridgeError(Exception):
    pass


class SolverNotFound(BridgeError):
    pass


class SolverTimeout(BridgeError):
    pass


class SolverFailed(BridgeError):
    pass


class AnswerSetSyntaxError(BridgeError, ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


class ProgramKind(enum.Enum):
    KB_FACTS = "facts"
    BASERANK = "baserank"
    RC = "rc"


@dataclass(frozen=True)
class AspProgram:
    text: str
    kind: ProgramKind


def _template(name: str) -> str:
    return resources.files("klmrc").joinpath("templates").joinpath(name).read_text(encoding="utf-8")


def baserank_encoding(repaired: bool = False) -> AspProgram:
    """The BaseRank encoding.  ``repaired`` drops the undefined
    ``coded_classical`` literal from the single-rank constraint."""
    name = "base_rank_repaired.lp" if repaired else "base_rank.lp"
    return AspProgram(_template(name), ProgramKind.BASERANK)


def rc_encoding() -> AspProgram:
    return AspProgram(_template("rational_closure.lp"), ProgramKind.RC)


def emit_kb_facts(kb: KnowledgeBase, q: Query | None = None) -> AspProgram:
    return AspProgram(emit_kb(kb, "asp", q), ProgramKind.KB_FACTS)


# --- answer sets -----------------------------------------------------------


@dataclass(frozen=True)
class Function:
    """A symbolic term or ground atom, e.g. ``rank(m_implication(man,mortal),0)``."""

    name: str
    args: tuple[Term, ...] = ()
    negated: bool = False

    def __str__(self) -> str:
        sign = "-" if self.negated else ""
        if not self.args:
            return sign + self.name
        return f"{sign}{self.name}({','.join(map(str, self.args))})"

    def to_literal(self) -> Literal:
        if self.args:
            raise ValueError(f"{self} is not a literal")
        if self.name == "top":
            return Literal(None)
        return Literal(self.name, self.negated)


Term = Union[int, str, Function]

_ANSWER_TOKEN = re.compile(
    r'\s*(?:(?P<num>-?\d+)|(?P<ident>[_a-z][A-Za-z0-9_\']*)|(?P<str>"(?:[^"\\]|\\.)*")|(?P<p>[-(),]))'
)


class _TermReader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self._skip()
        return self.pos >= len(self.text)

    def _peek_char(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _token(self):
        m = _ANSWER_TOKEN.match(self.text, self.pos)
        if not m:
            raise AnswerSetSyntaxError(f"unexpected {self.text[self.pos:self.pos + 10]!r}", self.pos)
        self.pos = m.end()
        return m.lastgroup, m.group(m.lastgroup), m.start(m.lastgroup)

    def term(self) -> Term:
        kind, text, start = self._token()
        if kind == "num":
            return int(text)
        if kind == "str":
            return text
        negated = False
        if kind == "p" and text == "-":
            negated = True
            kind, text, start = self._token()
            if kind == "num":
                return -int(text)
        if kind != "ident":
            raise AnswerSetSyntaxError(f"expected a term, found {text!r}", start)
        name = text
        args: list[Term] = []
        if self._peek_char() == "(":
            self._token()
            while True:
                args.append(self.term())
                kind, text, start = self._token()
                if text == ")":
                    break
                if text != ",":
                    raise AnswerSetSyntaxError(f"expected ',' or ')', found {text!r}", start)
        return Function(name, tuple(args), negated)


@dataclass(frozen=True)
class AnswerSet:
    atoms: frozenset[Function] = frozenset()
    optimal: bool = False
    raw: str = ""

    def named(self, predicate: str) -> list[Function]:
        return sorted((a for a in self.atoms if a.name == predicate), key=str)

    def __contains__(self, text: str) -> bool:
        return any(str(a) == text for a in self.atoms)


def parse_answer_set(text: str, optimal: bool = False) -> AnswerSet:
    """Parse one ``Answer:`` payload line into ground atoms."""
    reader = _TermReader(text)
    atoms = []
    while not reader.at_end():
        start = reader.pos
        t = reader.term()
        if not isinstance(t, Function):
            raise AnswerSetSyntaxError(f"{t!r} is not an atom", start)
        atoms.append(t)
    return AnswerSet(frozenset(atoms), optimal, text)


@dataclass
class SolverResult:
    status: str  # "optimum", "satisfiable", "unsatisfiable", "unknown"
    answer: AnswerSet | None
    answers: list[AnswerSet] = field(default_factory=list)
    output: str = ""


def parse_solver_output(output: str) -> SolverResult:
    """Pick the optimal answer set from clingo-style text output.

    The last ``Answer:`` block before ``OPTIMUM FOUND`` is taken.  A plain
    ``SATISFIABLE`` without any ``Optimization:`` line means there was no
    objective, so the last answer counts as optimal too.
    """
    lines = output.splitlines()
    payloads = []
    optimizing = False
    status = "unknown"
    for i, line in enumerate(lines):
        s = line.strip()
        if s.startswith("Answer:"):
            payloads.append(lines[i + 1] if i + 1 < len(lines) else "")
        elif s.startswith("Optimization:"):
            optimizing = True
        elif s == "OPTIMUM FOUND":
            status = "optimum"
        elif s == "UNSATISFIABLE":
            status = "unsatisfiable"
        elif s == "SATISFIABLE" and status == "unknown":
            status = "satisfiable"
    answers = [parse_answer_set(p) for p in payloads]
    best = None
    if answers and (status == "optimum" or (status == "satisfiable" and not optimizing)):
        last = answers[-1]
        best = AnswerSet(last.atoms, True, last.raw)
        answers[-1] = best
        status = "optimum"
    return SolverResult(status, best, answers, output)


def resolve_solver(solver_path: str | os.PathLike | None = None) -> str:
    """Explicit path, else ``$RC_SOLVER``, else ``clingo`` on PATH."""
    candidate = solver_path or os.environ.get(SOLVER_ENV) or "clingo"
    found = shutil.which(str(candidate))
    if found is None:
        raise SolverNotFound(f"ASP solver not found: {candidate}")
    return found


def solver_available(solver_path=None) -> bool:
    try:
        resolve_solver(solver_path)
    except SolverNotFound:
        return False
    return True


def run_solver(
    programs: Sequence[AspProgram],
    solver_path: str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    workdir: str | os.PathLike | None = None,
    extra_args: Sequence[str] = (),
) -> SolverResult:
    """``<solver> <facts-file> <encoding-file...> 0 [extra args]``."""
    exe = resolve_solver(solver_path)
    with tempfile.TemporaryDirectory(prefix="klmrc-", dir=workdir) as tmp:
        files = []
        for i, prog in enumerate(programs):
            path = Path(tmp) / f"{i:02d}-{prog.kind.value}.lp"
            path.write_text(prog.text, encoding="utf-8")
            files.append(str(path))
        cmd = [exe, *files, "0", *extra_args]
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired as exc:
            partial = exc.stdout or ""
            if isinstance(partial, bytes):
                partial = partial.decode("utf-8", "replace")
            result = parse_solver_output(partial)
            if not result.answers:
                raise SolverTimeout(f"solver exceeded {timeout}s") from exc
            result.status = "unknown"
            result.answer = None
            return result
    result = parse_solver_output(proc.stdout)
    if result.status == "unknown" and not result.answers:
        raise SolverFailed(
            f"solver exited with {proc.returncode}: {proc.stderr.strip()[-500:]}"
        )
    return result


# --- cross-check -----------------------------------------------------------

RankAtom = tuple[Literal, Literal, Union[int, str]]


def engine_rank_atoms(ranked: RankedKnowledgeBase) -> frozenset[RankAtom]:
    out = set()
    for c in ranked.infinite_rank:
        out.add((c.antecedent, c.consequent, "inf"))
    for i, rank in enumerate(ranked.finite_ranks):
        for c in rank:
            out.add((c.antecedent, c.consequent, i))
    return frozenset(out)


def solver_rank_atoms(answer: AnswerSet) -> frozenset[RankAtom]:
    out = set()
    for atom in answer.named("rank"):
        imp, level = atom.args
        a, b = (t.to_literal() for t in imp.args)
        out.add((a, b, level.name if isinstance(level, Function) else level))
    return frozenset(out)


def _fmt_rank(atom: RankAtom) -> str:
    a, b, n = atom
    return f"rank(m_implication({a},{b}),{n})"


@dataclass
class CrossCheckReport:
    engine_consistent: bool
    solver_status: str
    ranks_agree: bool | None
    verdict_agree: bool | None = None
    engine_verdict: bool | None = None
    solver_verdict: bool | None = None
    diffs: list[str] = field(default_factory=list)

    @property
    def indeterminate(self) -> bool:
        return self.solver_status == "unknown"

    @property
    def agree(self) -> bool:
        return bool(self.ranks_agree) and self.verdict_agree is not False

    def format(self) -> list[str]:
        if self.indeterminate:
            head = "indeterminate"
        else:
            head = "agreement" if self.agree else "disagreement"
        lines = [head, f"solver: {self.solver_status}"]
        if not self.engine_consistent:
            lines.append("engine: inconsistent knowledge base")
        lines.append(f"ranks: {_yn(self.ranks_agree)}")
        if self.verdict_agree is not None:
            lines.append(
                f"verdict: {_yn(self.verdict_agree)} (engine {_tf(self.engine_verdict)}, "
                f"solver {_tf(self.solver_verdict)})"
            )
        lines.extend(self.diffs)
        return lines


def _yn(x):
    return "n/a" if x is None else ("match" if x else "MISMATCH")


def _tf(x):
    return "n/a" if x is None else ("true" if x else "false")


def cross_check(
    kb: KnowledgeBase,
    q: Query | None = None,
    solver_path: str | None = None,
    timeout: float = DEFAULT_TIMEOUT,
    workdir=None,
    repaired: bool = False,
    extra_args: Sequence[str] = (),
) -> CrossCheckReport:
    """Compare the solver's rank/2 and entailed/1 atoms with the native engine.

    Ranks come from facts + BaseRank; the verdict from facts + query +
    BaseRank + RC.  An unsatisfiable program agrees with the engine only when
    the engine also rejects the knowledge base as inconsistent.
    """
    try:
        ranked = base_rank(kb)
        consistent = True
    except InconsistentKB:
        ranked = None
        consistent = False

    br = baserank_encoding(repaired)
    kw = dict(solver_path=solver_path, timeout=timeout, workdir=workdir, extra_args=extra_args)
    res = run_solver([emit_kb_facts(kb), br], **kw)
    report = CrossCheckReport(consistent, res.status, None)
    if res.status == "unknown":
        report.diffs.append("no optimum within the time limit")
        return report
    if res.status == "unsatisfiable" or not consistent:
        report.ranks_agree = (res.status == "unsatisfiable") and not consistent
        if not report.ranks_agree:
            report.diffs.append(
                "solver found no answer set" if consistent else
                "engine rejects the knowledge base but the solver found an answer set"
            )
        return report

    ours = engine_rank_atoms(ranked)
    theirs = solver_rank_atoms(res.answer)
    report.ranks_agree = ours == theirs
    for atom in sorted(ours - theirs, key=_fmt_rank):
        report.diffs.append(f"- engine only: {_fmt_rank(atom)}")
    for atom in sorted(theirs - ours, key=_fmt_rank):
        report.diffs.append(f"+ solver only: {_fmt_rank(atom)}")

    if q is not None:
        report.engine_verdict = rc_entails(ranked, q).entailed
        qres = run_solver([emit_kb_facts(kb, q), br, rc_encoding()], **kw)
        if qres.status != "optimum":
            report.solver_status = qres.status
            report.diffs.append(f"query program: {qres.status}")
            report.verdict_agree = False if qres.status == "unsatisfiable" else None
            return report
        ans = qres.answer
        if "entailed(true)" in ans:
            report.solver_verdict = True
        elif "entailed(false)" in ans:
            report.solver_verdict = False
        report.verdict_agree = report.solver_verdict == report.engine_verdict
    return report
