"""Knowledge-base model for the literal fragment, plus the two file formats.

A statement is a classical (``a -> b``) or defeasible (``a |~ b``) implication
between two literals.  Literals are signed atoms; the distinguished ``TOP``
literal is only used internally, for facts of the form ``top -> y``.

Two concrete syntaxes are supported:

* ``asp``: clingo-style facts, ``defeasible(man,mortal). classical(socrates,-mortal).``
  with ``%`` line comments;
* ``infix``: one statement per line, ``bird |~ fly`` / ``penguin -> bird`` /
  ``query: penguin |~ -fly`` with ``#`` line comments.
"""
from __future__ import annotations

import enum
import logging
import re
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

log = logging.getLogger(__name__)

RESERVED = frozenset({"top", "inf"})
_ATOM_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


class KBError(Exception):
    """Base class for everything raised while reading a knowledge base."""


class KBSyntaxError(KBError, ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ReservedAtomError(KBSyntaxError):
    pass


class NegatedTopError(KBSyntaxError):
    pass


class NestingError(KBSyntaxError):
    pass


class QueryError(KBError, ValueError):
    """Zero or several queries where exactly one was expected."""


def atom(name: str) -> str:
    """Validate and intern an atom name."""
    if name in RESERVED:
        raise ValueError(f"{name!r} is reserved")
    if not _ATOM_RE.match(name):
        raise ValueError(f"invalid atom name {name!r}")
    return sys.intern(name)


@dataclass(frozen=True)
class Literal:
    """A signed atom, or TOP when ``atom`` is None."""

    atom: str | None
    negated: bool = False

    def __post_init__(self):
        if self.atom is None and self.negated:
            raise ValueError("TOP cannot be negated")

    @property
    def is_top(self) -> bool:
        return self.atom is None

    @property
    def sort_key(self) -> tuple[str, bool]:
        return (self.atom or "", self.negated)

    def __neg__(self) -> Literal:
        if self.atom is None:
            raise ValueError("TOP cannot be negated")
        return Literal(self.atom, not self.negated)

    def __str__(self) -> str:
        if self.atom is None:
            return "top"
        return ("-" if self.negated else "") + self.atom

    def __repr__(self) -> str:
        return f"Literal({self})"

    @classmethod
    def parse(cls, text: str) -> Literal:
        """Parse ``x``, ``-x``, ``--x`` ...; the empty sign count is folded mod 2."""
        text = text.strip()
        stripped = text.lstrip("-")
        negated = (len(text) - len(stripped)) % 2 == 1
        return cls(atom(stripped), negated)


TOP = Literal(None)


def negate(lit: Literal) -> Literal:
    return -lit


class Kind(enum.Enum):
    CLASSICAL = "classical"
    DEFEASIBLE = "defeasible"


@dataclass(frozen=True)
class Conditional:
    antecedent: Literal
    consequent: Literal
    kind: Kind = Kind.DEFEASIBLE

    def __post_init__(self):
        if self.antecedent.is_top or self.consequent.is_top:
            raise ValueError("statements may not mention top")

    @property
    def defeasible(self) -> bool:
        return self.kind is Kind.DEFEASIBLE

    @property
    def implication(self) -> tuple[Literal, Literal]:
        return (self.antecedent, self.consequent)

    def __str__(self) -> str:
        op = "|~" if self.defeasible else "->"
        return f"{self.antecedent} {op} {self.consequent}"

    def to_asp(self) -> str:
        return f"{self.kind.value}({self.antecedent},{self.consequent})."


def defeasible(a: str | Literal, b: str | Literal) -> Conditional:
    return Conditional(_lit(a), _lit(b), Kind.DEFEASIBLE)


def classical(a: str | Literal, b: str | Literal) -> Conditional:
    return Conditional(_lit(a), _lit(b), Kind.CLASSICAL)


def _lit(x: str | Literal) -> Literal:
    return x if isinstance(x, Literal) else Literal.parse(x)


@dataclass(frozen=True)
class Query:
    antecedent: Literal
    consequent: Literal

    def __str__(self) -> str:
        return f"{self.antecedent} |~ {self.consequent}"

    def to_asp(self) -> str:
        return f"query({self.antecedent},{self.consequent})."

    @classmethod
    def of(cls, a: str | Literal, b: str | Literal | None = None) -> Query:
        a = _lit(a)
        return cls(a, a if b is None else _lit(b))


@dataclass(frozen=True)
class KnowledgeBase:
    statements: tuple[Conditional, ...] = ()
    diagnostics: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        seen = set()
        unique = []
        given = len(self.diagnostics)
        diags = list(self.diagnostics)
        for c in self.statements:
            if c in seen:
                diags.append(f"duplicate statement dropped: {c}")
                continue
            seen.add(c)
            unique.append(c)
        object.__setattr__(self, "statements", tuple(unique))
        object.__setattr__(self, "diagnostics", tuple(diags))
        for d in diags[given:]:
            log.warning(d)

    def __iter__(self) -> Iterator[Conditional]:
        return iter(self.statements)

    def __len__(self) -> int:
        return len(self.statements)

    def __contains__(self, c) -> bool:
        return c in self.statements

    @property
    def atoms(self) -> frozenset[str]:
        return frozenset(
            lit.atom for c in self.statements for lit in (c.antecedent, c.consequent)
        )

    @property
    def classical(self) -> tuple[Conditional, ...]:
        return tuple(c for c in self.statements if not c.defeasible)

    @property
    def defeasible(self) -> tuple[Conditional, ...]:
        return tuple(c for c in self.statements if c.defeasible)

    def to_infix(self) -> str:
        return "".join(f"{c}\n" for c in self.statements)


@dataclass(frozen=True)
class Interpretation:
    """Total truth assignment over a fixed, ordered atom list."""

    assignment: tuple[tuple[str, bool], ...]

    @classmethod
    def of(cls, values: Mapping[str, bool]) -> Interpretation:
        return cls(tuple(sorted(values.items())))

    def __getitem__(self, name: str) -> bool:
        return dict(self.assignment)[name]

    def satisfies(self, lit: Literal) -> bool:
        if lit.is_top:
            return True
        return self[lit.atom] != lit.negated

    @property
    def true_atoms(self) -> frozenset[str]:
        return frozenset(a for a, v in self.assignment if v)


class ImplicationSet:
    """A deduplicated set of material implications between literals.

    ``origin`` records, per implication, whether it came from a classical
    statement; when one implication originates from both kinds, classical wins.
    """

    __slots__ = ("implications", "origin", "_members")

    def __init__(
        self,
        implications: Iterable[tuple[Literal, Literal]] = (),
        origin: Mapping[tuple[Literal, Literal], Kind] | None = None,
    ):
        ordered = list(dict.fromkeys(implications))
        origin = dict(origin or {})
        self.implications: tuple[tuple[Literal, Literal], ...] = tuple(ordered)
        self.origin: dict[tuple[Literal, Literal], Kind] = {
            imp: origin.get(imp, Kind.DEFEASIBLE) for imp in ordered
        }
        self._members = frozenset(ordered)

    def __iter__(self):
        return iter(self.implications)

    def __len__(self) -> int:
        return len(self.implications)

    def __contains__(self, imp) -> bool:
        return imp in self._members

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImplicationSet):
            return NotImplemented
        return self._members == other._members

    def __hash__(self) -> int:
        return hash(self._members)

    def __repr__(self) -> str:
        body = ", ".join(f"{a}->{b}" for a, b in self.implications)
        return f"ImplicationSet({{{body}}})"

    def as_set(self) -> frozenset[tuple[Literal, Literal]]:
        return self._members

    @property
    def literals(self) -> frozenset[Literal]:
        return frozenset(lit for imp in self.implications for lit in imp)

    @property
    def atoms(self) -> frozenset[str]:
        return frozenset(l.atom for l in self.literals if not l.is_top)

    def without(self, *imps: tuple[Literal, Literal]) -> ImplicationSet:
        drop = set(imps)
        return ImplicationSet(
            (i for i in self.implications if i not in drop), self.origin
        )

    def union(self, other: Iterable[tuple[Literal, Literal]]) -> ImplicationSet:
        origin = dict(self.origin)
        if isinstance(other, ImplicationSet):
            for imp, kind in other.origin.items():
                if kind is Kind.CLASSICAL or imp not in origin:
                    origin[imp] = kind
        return ImplicationSet([*self.implications, *other], origin)


def materialise(statements: KnowledgeBase | Iterable[Conditional]) -> ImplicationSet:
    """Replace every ``a |~ b`` by ``a -> b``; duplicates collapse to one."""
    implications = []
    origin: dict[tuple[Literal, Literal], Kind] = {}
    for c in statements:
        imp = c.implication
        implications.append(imp)
        if c.kind is Kind.CLASSICAL or imp not in origin:
            origin[imp] = c.kind
    return ImplicationSet(implications, origin)


# --- parsing ---------------------------------------------------------------

ASP = "asp"
INFIX = "infix"
FORMATS = (ASP, INFIX)

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<op>\|~|->)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[(),.:\-])"
)
_STATEMENT_PREDICATES = {"defeasible": Kind.DEFEASIBLE, "classical": Kind.CLASSICAL}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(source: str, comment: str) -> list[_Tok]:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        if source[pos] == comment:
            end = source.find("\n", pos)
            pos = len(source) if end < 0 else end
            continue
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if not m:
            raise KBSyntaxError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            toks.append(_Tok("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, col))
        pos = m.end()
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok], eof: tuple[int, int]):
        self.toks = toks
        self.i = 0
        self.eof = eof

    def peek(self, offset: int = 0) -> _Tok | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise KBSyntaxError("unexpected end of input", *self.eof)
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            raise KBSyntaxError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok


def _read_literal(cur: _Cursor, nested_preds: Iterable[str] = ()) -> Literal:
    signs = 0
    first = cur.peek()
    while (tok := cur.peek()) is not None and tok.text == "-":
        cur.next()
        signs += 1
    tok = cur.next()
    if tok.kind != "ident":
        raise KBSyntaxError(f"expected an atom, found {tok.text!r}", tok.line, tok.col)
    nxt = cur.peek()
    if nxt is not None and nxt.text == "(":
        if tok.text in nested_preds:
            raise NestingError(f"nested statement {tok.text}(...)", tok.line, tok.col)
        raise KBSyntaxError(f"function terms are not literals: {tok.text}(...)", tok.line, tok.col)
    if tok.text == "top":
        if signs % 2:
            raise NegatedTopError("top cannot be negated", first.line, first.col)
        raise ReservedAtomError("'top' is reserved", tok.line, tok.col)
    if tok.text == "inf":
        raise ReservedAtomError("'inf' is reserved", tok.line, tok.col)
    if not _ATOM_RE.match(tok.text):
        raise KBSyntaxError(f"atoms must start lowercase: {tok.text!r}", tok.line, tok.col)
    return Literal(sys.intern(tok.text), signs % 2 == 1)


def _eof(source: str) -> tuple[int, int]:
    """Position just past the last non-blank character."""
    lines = source.rstrip().split("\n")
    return len(lines), len(lines[-1]) + 1


def _parse_asp(source: str):
    """Yield ("statement", Conditional) and ("query", Query) items."""
    toks = [t for t in _tokenize(source, "%") if t.kind != "nl"]
    cur = _Cursor(toks, _eof(source))
    nested = ("defeasible", "classical", "query")
    while cur.peek() is not None:
        head = cur.next()
        if head.kind != "ident" or head.text not in nested:
            raise KBSyntaxError(
                f"expected defeasible/classical/query, found {head.text!r}", head.line, head.col
            )
        cur.expect("(")
        a = _read_literal(cur, nested)
        cur.expect(",")
        b = _read_literal(cur, nested)
        cur.expect(")")
        cur.expect(".")
        if head.text == "query":
            yield "query", Query(a, b)
        else:
            yield "statement", Conditional(a, b, _STATEMENT_PREDICATES[head.text])


def _split_lines(toks: list[_Tok]) -> list[list[_Tok]]:
    lines, current = [], []
    for t in toks:
        if t.kind == "nl":
            if current:
                lines.append(current)
            current = []
        else:
            current.append(t)
    if current:
        lines.append(current)
    return lines


def _parse_infix(source: str, bare_query: bool = False):
    toks = _tokenize(source, "#")
    for line in _split_lines(toks):
        is_query = False
        if len(line) >= 2 and line[0].text == "query" and line[1].text == ":":
            is_query = True
            line = line[2:]
        ops = [t for t in line if t.kind == "op"]
        end = (line[-1].line, line[-1].col + len(line[-1].text))
        if len(ops) > 1:
            t = ops[1]
            cls = NestingError if any(o.text == "|~" for o in ops) else KBSyntaxError
            raise cls("only one operator per statement", t.line, t.col)
        cur = _Cursor(line, end)
        a = _read_literal(cur)
        if not ops:
            if not (bare_query or is_query) or cur.peek() is not None:
                tok = cur.peek()
                pos = (tok.line, tok.col) if tok else end
                raise KBSyntaxError("expected '|~' or '->'", *pos)
            yield "query", Query(a, a)
            continue
        op = cur.next()
        if op.kind != "op":
            raise KBSyntaxError(f"expected '|~' or '->', found {op.text!r}", op.line, op.col)
        b = _read_literal(cur)
        if (extra := cur.peek()) is not None:
            raise KBSyntaxError(f"trailing input {extra.text!r}", extra.line, extra.col)
        if is_query:
            if op.text != "|~":
                raise KBSyntaxError("queries use '|~'", op.line, op.col)
            yield "query", Query(a, b)
        elif bare_query:
            yield "query", Query(a, b)
        else:
            kind = Kind.DEFEASIBLE if op.text == "|~" else Kind.CLASSICAL
            yield "statement", Conditional(a, b, kind)


def detect_format(source: str) -> str:
    stripped = re.sub(r"[%#][^\n]*", "", source)
    if re.search(r"\b(defeasible|classical|query)\s*\(", stripped):
        return ASP
    if "|~" in stripped or "->" in stripped:
        return INFIX
    # Comments only: go by the comment character.
    return ASP if "%" in source and "#" not in source else INFIX


def parse_kb(source: str, format: str | None = None) -> KnowledgeBase:
    """Parse a knowledge base; ``query`` items are skipped."""
    fmt = format or detect_format(source)
    items = _parse_asp(source) if fmt == ASP else _parse_infix(source)
    return KnowledgeBase(tuple(x for tag, x in items if tag == "statement"))


def parse_query(source: str, format: str | None = None) -> Query:
    """Extract the single query from ``source``.

    In infix text a lone ``a |~ b`` or bare ``a`` is accepted as the query
    (``a`` reads as ``a |~ a``).  When the source also holds statements, only
    ``query:`` lines (infix) and ``query(..)`` facts (asp) count.
    """
    fmt = format or detect_format(source)
    if fmt == ASP:
        queries = [x for tag, x in _parse_asp(source) if tag == "query"]
    else:
        single = len(_split_lines(_tokenize(source, "#"))) == 1
        items = list(_parse_infix(source, bare_query=single))
        queries = [x for tag, x in items if tag == "query"]
    if len(queries) != 1:
        raise QueryError(f"expected exactly one query, found {len(queries)}")
    return queries[0]


def emit_kb(kb: KnowledgeBase, format: str = ASP, query: Query | None = None) -> str:
    if format == ASP:
        lines = [c.to_asp() for c in kb]
        if query is not None:
            lines.append(query.to_asp())
    else:
        lines = [str(c) for c in kb]
        if query is not None:
            lines.append(f"query: {query}")
    return "".join(f"{line}\n" for line in lines)
