"""Classical entailment over sets of literal implications.

Two engines live here:

* :class:`ImplicationGraph` -- the decision procedure.  A set of literal
  implications is a 2-CNF, so consistency and entailment reduce to
  strongly-connected components and reachability in the implication graph.
* :func:`closure` -- forward chaining with identity, transitivity,
  contraposition and the two disjunction-elimination rules.  Slower, but it
  produces a derivation trace and is what the graph engine is tested against.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .kb import TOP, ImplicationSet, Literal

Pair = tuple[Literal, Literal]


class InconsistentPremises(Exception):
    """Raised when asking what an unsatisfiable set entails."""


class ImplicationGraph:
    """2-SAT view of an implication set.

    Each atom owns two nodes (``2k`` positive, ``2k + 1`` negative), so
    negation is ``node ^ 1``.  ``a -> b`` contributes the edges ``a => b`` and
    ``-b => -a``; a fact ``top -> b`` contributes ``-b => b``.
    """

    def __init__(self, implications: Iterable[Pair]):
        self._index: dict[str, int] = {}
        self._pairs = list(implications)
        edges: list[tuple[int, int]] = []
        for a, b in self._pairs:
            if b.is_top:
                continue
            nb = self._node(b)
            if a.is_top:
                edges.append((nb ^ 1, nb))
                continue
            na = self._node(a)
            edges.append((na, nb))
            edges.append((nb ^ 1, na ^ 1))
        n = 2 * len(self._index)
        self._succ: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            self._succ[u].append(v)
        self._comp = self._tarjan()
        self.consistent = all(
            self._comp[2 * k] != self._comp[2 * k + 1] for k in range(len(self._index))
        )
        self._reach: list[int] | None = None

    def _node(self, lit: Literal) -> int:
        k = self._index.setdefault(lit.atom, len(self._index))
        return 2 * k + lit.negated

    def node(self, lit: Literal) -> int | None:
        k = self._index.get(lit.atom)
        return None if k is None else 2 * k + lit.negated

    def _tarjan(self) -> list[int]:
        # Iterative Tarjan; component ids come out in reverse topological order.
        n = len(self._succ)
        index = [-1] * n
        low = [0] * n
        comp = [-1] * n
        on_stack = [False] * n
        stack: list[int] = []
        counter = 0
        ncomp = 0
        for root in range(n):
            if index[root] >= 0:
                continue
            work = [(root, 0)]
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on_stack[root] = True
            while work:
                v, i = work[-1]
                succ = self._succ[v]
                if i < len(succ):
                    work[-1] = (v, i + 1)
                    w = succ[i]
                    if index[w] < 0:
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append(w)
                        on_stack[w] = True
                        work.append((w, 0))
                    elif on_stack[w]:
                        low[v] = min(low[v], index[w])
                    continue
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
        self._ncomp = ncomp
        return comp

    def _reachability(self) -> list[int]:
        if self._reach is None:
            # Successor components always carry smaller ids, so one ascending
            # pass over the condensation suffices.
            members: list[list[int]] = [[] for _ in range(self._ncomp)]
            for v, c in enumerate(self._comp):
                members[c].append(v)
            reach = [0] * self._ncomp
            for c in range(self._ncomp):
                bits = 1 << c
                for v in members[c]:
                    for w in self._succ[v]:
                        d = self._comp[w]
                        if d != c:
                            bits |= reach[d]
                reach[c] = bits
            self._reach = reach
        return self._reach

    def reaches(self, x: Literal, y: Literal) -> bool:
        """Path ``x => ... => y`` (zero-length paths included)."""
        if x == y:
            return True
        nx, ny = self.node(x), self.node(y)
        if nx is None or ny is None:
            return False
        return bool(self._reachability()[self._comp[nx]] >> self._comp[ny] & 1)

    def _check(self):
        if not self.consistent:
            raise InconsistentPremises("premises are unsatisfiable")

    def forced(self, y: Literal) -> bool:
        """The premises entail ``y`` on their own."""
        self._check()
        if y.is_top:
            return True
        return self.reaches(-y, y)

    def exceptional(self, x: Literal) -> bool:
        """The premises entail ``-x``."""
        if x.is_top:
            self._check()
            return False
        return self.forced(-x)

    def entails(self, x: Literal, y: Literal) -> bool:
        """Whether every model of the premises satisfies ``x -> y``.

        For satisfiable 2-CNF premises, adding the units ``x`` and ``-y`` is
        unsatisfiable exactly when ``x`` reaches ``y``, ``x`` reaches ``-x``,
        or ``-y`` reaches ``y``.
        """
        self._check()
        if y.is_top or x == y:
            return True
        if x.is_top:
            return self.forced(y)
        return self.reaches(x, y) or self.reaches(x, -x) or self.reaches(-y, y)

    def entails_by_units(self, x: Literal, y: Literal) -> bool:
        """Same verdict as :meth:`entails`, by rebuilding the graph with units
        ``x`` and ``-y`` and rerunning the SCC consistency test."""
        self._check()
        if y.is_top:
            return True
        units = [(TOP, -y)]
        if not x.is_top:
            units.append((TOP, x))
        return not ImplicationGraph([*self._pairs, *units]).consistent


@lru_cache(maxsize=256)
def graph_for(s: ImplicationSet) -> ImplicationGraph:
    return ImplicationGraph(s)


def is_consistent(s: ImplicationSet) -> bool:
    return graph_for(s).consistent


def entails(s: ImplicationSet, antecedent: Literal, consequent: Literal) -> bool:
    return graph_for(s).entails(antecedent, consequent)


def is_exceptional(s: ImplicationSet, antecedent: Literal) -> bool:
    return graph_for(s).exceptional(antecedent)


# --- rule closure ----------------------------------------------------------

RULES = ("premise", "identity", "trans", "contra", "disj-elim")


@dataclass(frozen=True)
class Step:
    pair: Pair
    rule: str
    premises: tuple[Pair, ...] = ()

    def __str__(self) -> str:
        x, y = self.pair
        text = f"infer: {x} -> {y} [rule: {self.rule}"
        if self.premises:
            text += ", from: " + ", ".join(f"{a} -> {b}" for a, b in self.premises)
        return text + "]"


@dataclass(frozen=True)
class InferenceClosure:
    derived: frozenset[Pair]
    consistent: bool
    steps: tuple[Step, ...] = field(default=(), compare=False)

    @property
    def forced(self) -> frozenset[Literal]:
        return frozenset(y for x, y in self.derived if x.is_top)

    def entails(self, x: Literal, y: Literal) -> bool:
        """Read an entailment verdict off the closure.

        Besides direct membership of ``(x, y)``, a forced consequent or a
        refuted antecedent also makes ``x -> y`` hold.
        """
        if not self.consistent:
            raise InconsistentPremises("premises are unsatisfiable")
        if y.is_top or x == y or (x, y) in self.derived or (TOP, y) in self.derived:
            return True
        return not x.is_top and (TOP, -x) in self.derived

    def trace(self) -> list[str]:
        return [str(s) for s in self.steps]


def closure(s: Iterable[Pair]) -> InferenceClosure:
    """Saturate ``s`` under the inference rules (semi-naive forward chaining)."""
    succ: dict[Literal, set[Literal]] = {}
    pred: dict[Literal, set[Literal]] = {}
    derived: set[Pair] = set()
    steps: list[Step] = []
    queue: list[Pair] = []

    def add(pair: Pair, rule: str, *premises: Pair):
        if pair in derived:
            return
        derived.add(pair)
        succ.setdefault(pair[0], set()).add(pair[1])
        pred.setdefault(pair[1], set()).add(pair[0])
        steps.append(Step(pair, rule, premises))
        queue.append(pair)

    for a, b in s:
        if not b.is_top:
            add((a, b), "premise")

    head = 0
    while head < len(queue):
        x, y = p = queue[head]
        head += 1
        if not x.is_top:
            add((x, x), "identity", p)
            add((-y, -x), "contra", p)
            if (-x, y) in derived:
                add((TOP, y), "disj-elim", p, (-x, y))
            if (x, -y) in derived:
                add((TOP, -x), "disj-elim", p, (x, -y))
        for z in list(succ.get(y, ())):
            add((x, z), "trans", p, (y, z))
        if not x.is_top:
            for w in list(pred.get(x, ())):
                add((w, y), "trans", (w, x), p)

    forced = {y for x, y in derived if x.is_top}
    consistent = not any(-y in forced for y in forced)
    return InferenceClosure(frozenset(derived), consistent, tuple(steps))
