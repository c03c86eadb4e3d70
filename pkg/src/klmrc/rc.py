"""Rational Closure query answering by rank elimination."""
from __future__ import annotations

from dataclasses import dataclass, field

from .baserank import RankedKnowledgeBase
from .entailment import ImplicationGraph, closure
from .kb import Query, materialise


@dataclass(frozen=True)
class RcAnswer:
    entailed: bool
    eliminated_ranks: tuple[int, ...] = ()
    remaining_from: int | str = 0
    vacuous: bool = False
    trace: tuple[str, ...] | None = field(default=None, compare=False)

    def format(self) -> list[str]:
        lines = [
            f"entailed({'true' if self.entailed else 'false'})",
            f"eliminated: [{', '.join(map(str, self.eliminated_ranks))}]",
            f"vacuous: {'true' if self.vacuous else 'false'}",
        ]
        if self.trace is not None:
            lines.extend(self.trace)
        return lines


class RationalClosure:
    """Answers queries against one ranked KB, caching one engine per level.

    Level ``k`` holds the materialisation of R_k, ..., R_{n-1} and R_inf;
    level ``n`` is R_inf alone.
    """

    def __init__(self, ranked: RankedKnowledgeBase):
        self.ranked = ranked
        self._graphs: dict[int, ImplicationGraph] = {}

    def premises(self, k: int):
        return materialise(self.ranked.statements_from(k))

    def graph(self, k: int) -> ImplicationGraph:
        g = self._graphs.get(k)
        if g is None:
            g = self._graphs[k] = ImplicationGraph(self.premises(k))
        return g

    def query(self, q: Query, trace: bool = False) -> RcAnswer:
        n = self.ranked.n
        k = 0
        while self.graph(k).exceptional(q.antecedent) and k < n:
            k += 1
        vacuous = self.graph(k).exceptional(q.antecedent)
        entailed = vacuous or self.graph(k).entails(q.antecedent, q.consequent)
        steps = None
        if trace:
            steps = tuple(closure(self.premises(k)).trace())
        return RcAnswer(
            entailed=entailed,
            eliminated_ranks=tuple(range(k)),
            remaining_from=k if k < n else "inf",
            vacuous=vacuous,
            trace=steps,
        )


def rc_entails(ranked: RankedKnowledgeBase, q: Query, trace: bool = False) -> RcAnswer:
    return RationalClosure(ranked).query(q, trace=trace)
