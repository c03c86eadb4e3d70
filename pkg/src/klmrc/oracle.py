"""Brute-force reference implementations.

Everything here decides entailment by enumerating interpretations, and never
touches :mod:`klmrc.entailment`.  Agreement between the two paths is the
evidence the test-suite relies on, so keep it that way.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .baserank import InconsistentKB, RankedKnowledgeBase
from .kb import TOP, Conditional, Interpretation, KnowledgeBase, Literal, Query
from .rc import RcAnswer

DEFAULT_ATOM_CAP = 20
REFINEMENT_CAP = 8

Pair = tuple[Literal, Literal]


class CapExceeded(ValueError):
    pass


class OracleDisagreement(AssertionError):
    """The two internal brute-force routes disagreed (a bug in this module)."""


@dataclass(frozen=True)
class ModelSet:
    atoms: tuple[str, ...]
    masks: frozenset[int]  # bit i set <=> atoms[i] is true

    def __len__(self) -> int:
        return len(self.masks)

    def __iter__(self) -> Iterator[Interpretation]:
        for m in sorted(self.masks):
            yield Interpretation(
                tuple((a, bool(m >> i & 1)) for i, a in enumerate(self.atoms))
            )

    def true_sets(self) -> set[frozenset[str]]:
        return {i.true_atoms for i in self}


class _Table:
    """Truth table over ``atoms``: one boolean column per literal."""

    def __init__(self, atoms: Sequence[str], cap: int):
        if len(atoms) > cap:
            raise CapExceeded(f"{len(atoms)} atoms exceeds the cap of {cap}")
        self.atoms = tuple(atoms)
        self.pos = {a: i for i, a in enumerate(self.atoms)}
        self.rows = np.arange(1 << len(self.atoms), dtype=np.int64)
        self._cols: dict[Literal, np.ndarray] = {}

    def value(self, lit: Literal) -> np.ndarray:
        col = self._cols.get(lit)
        if col is None:
            if lit.is_top:
                col = np.ones(len(self.rows), dtype=bool)
            else:
                if lit.atom not in self.pos:
                    raise ValueError(f"atom {lit.atom!r} not in the enumerated atom list")
                col = (self.rows >> self.pos[lit.atom] & 1).astype(bool)
                if lit.negated:
                    col = ~col
            self._cols[lit] = col
        return col

    def satisfying(self, implications: Iterable[Pair]) -> np.ndarray:
        ok = np.ones(len(self.rows), dtype=bool)
        for a, b in implications:
            if b.is_top:
                continue
            ok &= ~self.value(a) | self.value(b)
        return ok


def _atoms_of(pairs: Iterable[Pair], extra: Iterable[Literal] = ()) -> list[str]:
    names = {l.atom for p in pairs for l in p if not l.is_top}
    names |= {l.atom for l in extra if not l.is_top}
    return sorted(names)


def enumerate_models(
    s: Iterable[Pair], atoms: Sequence[str] | None = None, cap: int = DEFAULT_ATOM_CAP
) -> ModelSet:
    s = list(s)
    atoms = _atoms_of(s) if atoms is None else list(atoms)
    table = _Table(atoms, cap)
    ok = table.satisfying(s)
    return ModelSet(table.atoms, frozenset(int(m) for m in table.rows[ok]))


class BruteForce:
    """Models of ``s`` enumerated once, then queried many times."""

    def __init__(self, s: Iterable[Pair], atoms: Sequence[str] | None = None,
                 cap: int = DEFAULT_ATOM_CAP):
        self.implications = list(s)
        self.cap = cap
        atoms = _atoms_of(self.implications) if atoms is None else list(atoms)
        self.table = _Table(atoms, cap)
        self.models = self.table.satisfying(self.implications)

    @property
    def consistent(self) -> bool:
        return bool(self.models.any())

    def _v(self, lit: Literal) -> np.ndarray:
        if not lit.is_top and lit.atom not in self.table.pos:
            # An atom the premises never mention: extend the table.
            self.table = _Table([*self.table.atoms, lit.atom], self.cap)
            self.models = self.table.satisfying(self.implications)
        return self.table.value(lit)

    def entails(self, x: Literal, y: Literal) -> bool:
        if y.is_top:
            return True
        self._v(x)
        self._v(y)
        vx, vy = self.table.value(x), self.table.value(y)
        return not bool((self.models & vx & ~vy).any())

    def exceptional(self, x: Literal) -> bool:
        if x.is_top:
            return not self.consistent
        return self.entails(TOP, -x)


def brute_entails(
    s: Iterable[Pair], antecedent: Literal, consequent: Literal, cap: int = DEFAULT_ATOM_CAP
) -> bool:
    """Every model of ``s`` satisfies ``antecedent -> consequent``.

    Computed twice: by filtering the model set, and by checking that
    ``s + {antecedent, -consequent}`` has no model at all.
    """
    s = list(s)
    if consequent.is_top:
        return True
    atoms = _atoms_of(s, (antecedent, consequent))
    models = enumerate_models(s, atoms, cap)
    pos = {a: i for i, a in enumerate(atoms)}

    def holds(lit: Literal, m: int) -> bool:
        return lit.is_top or bool(m >> pos[lit.atom] & 1) != lit.negated

    by_filter = all(not holds(antecedent, m) or holds(consequent, m) for m in models.masks)
    units = [(TOP, -consequent)] + ([] if antecedent.is_top else [(TOP, antecedent)])
    by_refutation = len(enumerate_models(s + units, atoms, cap)) == 0
    if by_filter != by_refutation:
        raise OracleDisagreement(f"{antecedent} -> {consequent} over {s}")
    return by_filter


# --- reference BaseRank / RC ---------------------------------------------


def _material(kb: KnowledgeBase) -> tuple[list[Pair], list[Pair]]:
    classical: list[Pair] = []
    for c in kb:
        if not c.defeasible and c.implication not in classical:
            classical.append(c.implication)
    defeasible: list[Pair] = []
    for c in kb:
        imp = (c.antecedent, c.consequent)
        if c.defeasible and imp not in classical and imp not in defeasible:
            defeasible.append(imp)
    return classical, defeasible


def reference_base_rank(kb: KnowledgeBase, cap: int = DEFAULT_ATOM_CAP) -> RankedKnowledgeBase:
    classical, e = _material(kb)
    atoms = sorted(kb.atoms)
    if not BruteForce(classical + e, atoms, cap).consistent:
        raise InconsistentKB("no model")
    ranks: list[list[Pair]] = []
    while True:
        premises = classical + e
        e_next = [(a, b) for a, b in e if brute_entails(premises, TOP, -a, cap)]
        r = [imp for imp in e if imp not in e_next]
        if not r:
            break
        ranks.append(r)
        e = e_next
    finite = tuple(
        tuple(c for imp in r for c in kb if c.defeasible and c.implication == imp)
        for r in ranks
    )
    in_finite = {c for r in finite for c in r}
    infinite = tuple(c for c in kb if c not in in_finite)
    stuck = tuple(c for c in infinite if c.defeasible and c.implication in e)
    return RankedKnowledgeBase(finite, infinite, stuck)


class ReferenceRC:
    """Rank elimination over brute-force model sets, one per level."""

    def __init__(self, kb: KnowledgeBase, cap: int = DEFAULT_ATOM_CAP):
        self.ranked = reference_base_rank(kb, cap)
        self.cap = cap
        self._levels: dict[int, BruteForce] = {}

    def level(self, k: int) -> BruteForce:
        if k not in self._levels:
            stmts = [c.implication for c in self.ranked.statements_from(k)]
            self._levels[k] = BruteForce(stmts, cap=self.cap)
        return self._levels[k]

    def query(self, q: Query) -> RcAnswer:
        n = self.ranked.n
        removed = []
        k = 0
        while k < n and self.level(k).exceptional(q.antecedent):
            removed.append(k)
            k += 1
        vacuous = self.level(k).exceptional(q.antecedent)
        entailed = vacuous or self.level(k).entails(q.antecedent, q.consequent)
        return RcAnswer(entailed, tuple(removed), k if k < n else "inf", vacuous)


def reference_rc(kb: KnowledgeBase, q: Query, cap: int = DEFAULT_ATOM_CAP) -> RcAnswer:
    return ReferenceRC(kb, cap).query(q)


# --- refinements ---------------------------------------------------------

Levels = tuple[frozenset[Conditional], ...]


def level_sum(levels: Levels) -> int:
    return sum(i * len(block) for i, block in enumerate(levels))


class _Tolerance:
    """Memoised "no antecedent in the block is exceptional in what remains"."""

    def __init__(self, infinite: Sequence[Conditional], cap: int):
        self.infinite = [c.implication for c in infinite]
        self.cap = cap
        self._memo: dict[frozenset, BruteForce] = {}

    def ok(self, block: Iterable[Conditional], remaining: frozenset) -> bool:
        bf = self._memo.get(remaining)
        if bf is None:
            stmts = self.infinite + [c.implication for c in remaining]
            bf = self._memo[remaining] = BruteForce(stmts, cap=self.cap)
        return not any(bf.exceptional(c.antecedent) for c in block)


def _subsets(items: tuple) -> Iterator[tuple]:
    for size in range(len(items), 0, -1):
        yield from itertools.combinations(items, size)


def iter_refinements(
    kb: KnowledgeBase,
    cap: int = REFINEMENT_CAP,
    restrict_to_canonical: bool = True,
    ranked: RankedKnowledgeBase | None = None,
    max_cost: int | None = None,
) -> Iterator[Levels]:
    """Tolerant ordered partitions of the finitely-ranked defeasible statements.

    Levels are chosen bottom-up.  A level is tolerated when none of its
    antecedents is exceptional in the statements not yet placed (itself
    included) plus R_inf, which is exactly the suffix condition.

    With ``restrict_to_canonical`` every level is a subset of one canonical
    rank, and levels drawn from a lower canonical rank come first.  Without
    it, any ordered partition is a candidate.  ``max_cost`` prunes partitions
    whose level sum would exceed it.
    """
    ranked = ranked or reference_base_rank(kb)
    finite = [tuple(r) for r in ranked.finite_ranks]
    count = sum(len(r) for r in finite)
    if count > cap:
        raise CapExceeded(f"{count} ranked statements exceeds the cap of {cap}")
    tol = _Tolerance(ranked.infinite_rank, DEFAULT_ATOM_CAP)
    everything = tuple(itertools.chain.from_iterable(finite))

    def pool(remaining: frozenset) -> tuple:
        if not restrict_to_canonical:
            return tuple(c for c in everything if c in remaining)
        for rank in finite:
            left = tuple(c for c in rank if c in remaining)
            if left:
                return left
        return ()

    def extend(prefix: list, remaining: frozenset, cost: int):
        if not remaining:
            yield tuple(prefix)
            return
        level = len(prefix)
        if max_cost is not None and cost + level * len(remaining) > max_cost:
            return
        for block in _subsets(pool(remaining)):
            if tol.ok(block, remaining):
                prefix.append(frozenset(block))
                yield from extend(prefix, remaining - prefix[-1], cost + level * len(block))
                prefix.pop()

    yield from extend([], frozenset(everything), 0)


def enumerate_refinements(kb: KnowledgeBase, cap: int = REFINEMENT_CAP, **kw) -> list[Levels]:
    return list(iter_refinements(kb, cap, **kw))


def canonical_levels(ranked: RankedKnowledgeBase) -> Levels:
    return tuple(frozenset(r) for r in ranked.finite_ranks)


def minimality_counterexamples(kb: KnowledgeBase, cap: int = REFINEMENT_CAP, **kw) -> list[Levels]:
    """Refinements other than the canonical one whose cost is not larger.

    The canonical partition itself is reported when it is not a valid
    refinement.  Only partitions up to the canonical cost are explored.
    """
    ranked = reference_base_rank(kb)
    canonical = canonical_levels(ranked)
    best = level_sum(canonical)
    seen_canonical = False
    bad = []
    for levels in iter_refinements(kb, cap, ranked=ranked, max_cost=best, **kw):
        if levels == canonical:
            seen_canonical = True
        else:
            bad.append(levels)
    if not seen_canonical:
        bad.append(canonical)
    return bad
