"""BaseRank: partition a knowledge base by exceptionality."""
from __future__ import annotations

from dataclasses import dataclass, field

from .entailment import ImplicationGraph
from .kb import Conditional, Kind, KnowledgeBase, Literal, materialise


class InconsistentKB(Exception):
    """The knowledge base has no model even after ranking."""


@dataclass(frozen=True)
class RankedKnowledgeBase:
    finite_ranks: tuple[tuple[Conditional, ...], ...] = ()
    infinite_rank: tuple[Conditional, ...] = ()
    # Defeasible statements whose antecedent stays exceptional all the way up.
    totally_exceptional: tuple[Conditional, ...] = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return len(self.finite_ranks)

    def __eq__(self, other):
        if not isinstance(other, RankedKnowledgeBase):
            return NotImplemented
        return self.partition() == other.partition()

    def __hash__(self):
        return hash(self.partition())

    def partition(self):
        """Order-insensitive view used for equality."""
        return (
            tuple(frozenset(r) for r in self.finite_ranks),
            frozenset(self.infinite_rank),
        )

    def level(self, c: Conditional) -> int | None:
        """Rank index of ``c``; None for the infinite rank."""
        for i, rank in enumerate(self.finite_ranks):
            if c in rank:
                return i
        if c in self.infinite_rank:
            return None
        raise KeyError(c)

    def statements_from(self, i: int):
        """R_i, ..., R_{n-1} followed by R_inf."""
        for rank in self.finite_ranks[i:]:
            yield from rank
        yield from self.infinite_rank

    def rank_facts(self) -> list[str]:
        """``rank(m_implication(X,Y),N).`` facts, infinite rank first."""
        seen = set()
        out = []
        levels = [("inf", self.infinite_rank)] + [
            (str(i), r) for i, r in enumerate(self.finite_ranks)
        ]
        for label, rank in levels:
            for c in rank:
                if c.implication in seen:
                    continue
                seen.add(c.implication)
                a, b = c.implication
                out.append(f"rank(m_implication({a},{b}),{label}).")
        return out

    def format_table(self) -> list[str]:
        """``R_inf: ...`` then ``R_k`` down to ``R_0``; empty for an empty KB."""
        if not self.finite_ranks and not self.infinite_rank:
            return []
        lines = [_rank_line("R_inf", self.infinite_rank, self.totally_exceptional)]
        for i in reversed(range(self.n)):
            lines.append(_rank_line(f"R_{i}", self.finite_ranks[i], ()))
        return lines


def _rank_line(label: str, rank, marked) -> str:
    parts = [f"{c} (totally exceptional)" if c in marked else str(c) for c in rank]
    return f"{label}: {'; '.join(parts)}" if parts else f"{label}:"


def base_rank(kb: KnowledgeBase) -> RankedKnowledgeBase:
    """Rank ``kb``.

    Starting from the full materialisation, the defeasible implications whose
    antecedent is exceptional in the current set move up one level; the rest
    form the current rank.  Classical implications stay in every set and are
    reported only in the infinite rank.
    """
    e0 = materialise(kb)
    pinned = [imp for imp in e0 if e0.origin[imp] is Kind.CLASSICAL]
    current = [imp for imp in e0 if e0.origin[imp] is Kind.DEFEASIBLE]

    if not ImplicationGraph(e0).consistent:
        raise InconsistentKB("materialisation of the knowledge base is unsatisfiable")

    ranks: list[list[tuple[Literal, Literal]]] = []
    while current:
        graph = ImplicationGraph(pinned + current)
        verdict: dict[Literal, bool] = {}
        upper = []
        rank = []
        for imp in current:
            a = imp[0]
            if a not in verdict:
                verdict[a] = graph.exceptional(a)
            (upper if verdict[a] else rank).append(imp)
        if not rank:
            break
        ranks.append(rank)
        current = upper

    by_imp: dict[tuple[Literal, Literal], list[Conditional]] = {}
    for c in kb:
        by_imp.setdefault(c.implication, []).append(c)

    finite = tuple(
        tuple(c for imp in rank for c in by_imp[imp]) for rank in ranks
    )
    ranked = {imp for rank in ranks for imp in rank}
    stuck = set(current)
    infinite = tuple(c for c in kb if c.implication not in ranked)
    totally = tuple(c for c in infinite if c.defeasible and c.implication in stuck)
    return RankedKnowledgeBase(finite, infinite, totally)
