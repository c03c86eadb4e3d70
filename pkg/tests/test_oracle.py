import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import K1, PENGUIN, literals, pairs, seeded_kbs
from klmrc.baserank import InconsistentKB
from klmrc.entailment import ImplicationGraph
from klmrc.kb import TOP, ImplicationSet, KnowledgeBase, Literal, Query, defeasible, materialise
from klmrc.oracle import (
    BruteForce,
    CapExceeded,
    ReferenceRC,
    brute_entails,
    canonical_levels,
    enumerate_models,
    enumerate_refinements,
    level_sum,
    minimality_counterexamples,
    reference_base_rank,
    reference_rc,
)

L = Literal.parse
SMW = ("socrates", "man", "mortal")


def test_k1_models():
    models = enumerate_models(materialise(K1), SMW)
    # s̄mw, s̄m̄w, s̄m̄w̄
    assert models.true_sets() == {frozenset({"man", "mortal"}), frozenset({"mortal"}), frozenset()}


def test_k1_revised_models():
    s = materialise(K1).without((L("man"), L("mortal")))
    models = enumerate_models(s, SMW)
    listed = {frozenset({"man", "mortal"}), frozenset({"mortal"}), frozenset(), frozenset({"socrates", "man"})}
    # s̄mw̄ violates only the removed man -> mortal, so it is a model too.
    assert models.true_sets() == listed | {frozenset({"man"})}


def test_empty_set_has_every_interpretation():
    models = enumerate_models([], ["a"])
    assert len(models) == 2
    for i in models:
        assert set(i.assignment) <= {("a", True), ("a", False)}


def test_cap():
    with pytest.raises(CapExceeded):
        enumerate_models([], [f"a{i}" for i in range(21)])
    with pytest.raises(CapExceeded):
        enumerate_models([], ["a", "b", "c"], cap=2)
    bf = BruteForce([(L("a"), L("b"))], cap=2)
    with pytest.raises(CapExceeded):
        bf.entails(L("c"), L("a"))


@given(st.lists(pairs(), max_size=8), st.integers(0, 2))
def test_models_satisfy_and_count(s, extra):
    atoms = sorted({l.atom for p in s for l in p} | {f"z{i}" for i in range(extra)})
    models = enumerate_models(s, atoms)
    assert len(models) <= 2 ** len(atoms)
    for i in models:
        for a, b in s:
            assert not i.satisfies(a) or i.satisfies(b)
    if not s:
        assert len(models) == 2 ** len(atoms)


class TestBruteEntails:
    def test_k1_not_socrates(self):
        assert brute_entails(materialise(K1), TOP, L("-socrates"))

    def test_identity(self):
        assert brute_entails([], L("x"), L("x"))

    def test_transitivity(self):
        assert brute_entails([(L("a"), L("b")), (L("b"), L("c"))], L("a"), L("c"))
        assert not brute_entails([(L("a"), L("b")), (L("b"), L("c"))], L("c"), L("a"))

    def test_inconsistent_entails_everything(self):
        s = [(TOP, L("a")), (TOP, L("-a"))]
        assert brute_entails(s, L("b"), L("-b"))

    @given(st.lists(pairs(), max_size=8), literals(top=True), literals())
    def test_model_cache_agrees(self, s, x, y):
        assert BruteForce(s).entails(x, y) == brute_entails(s, x, y)


def test_reference_base_rank_k1():
    r = reference_base_rank(K1)
    assert r.finite_ranks == ((defeasible("man", "mortal"),),)
    assert r.n == 1


def test_reference_classical_only():
    assert reference_base_rank(KnowledgeBase((K1.statements[1],))).finite_ranks == ()


def test_reference_rc_examples():
    assert reference_rc(K1, Query.of("socrates", "man")).entailed
    assert reference_rc(KnowledgeBase(), Query.of("a", "a")).entailed
    a = reference_rc(PENGUIN, Query.of("penguin", "fly"))
    assert not a.entailed and a.eliminated_ranks == (0,)


def test_reference_rc_unknown_antecedent():
    a = ReferenceRC(PENGUIN).query(Query.of("whale", "fly"))
    assert not a.entailed and a.eliminated_ranks == ()


class TestRefinements:
    def test_k1(self):
        refs = enumerate_refinements(K1)
        assert canonical_levels(reference_base_rank(K1)) in refs
        assert minimality_counterexamples(K1) == []

    def test_single_statement(self):
        assert len(enumerate_refinements(KnowledgeBase((defeasible("a", "b"),)))) == 1

    def test_penguin(self):
        refs = enumerate_refinements(PENGUIN)
        canonical = canonical_levels(reference_base_rank(PENGUIN))
        assert len(canonical) == 2 and canonical in refs
        costs = sorted(level_sum(r) for r in refs)
        assert costs[0] == level_sum(canonical) < costs[1]
        assert minimality_counterexamples(PENGUIN) == []

    def test_level_sum(self):
        a, b, c = (defeasible(x, "y") for x in "abc")
        assert level_sum((frozenset({a}), frozenset({b, c}))) == 2

    def test_cap(self):
        kb = KnowledgeBase(tuple(defeasible(f"a{i}", "b") for i in range(9)))
        with pytest.raises(CapExceeded):
            enumerate_refinements(kb)

    @pytest.mark.parametrize("restrict", [True, False])
    def test_random_minimality(self, restrict):
        for kb in seeded_kbs(40, seed=7, max_statements=6, max_atoms=4):
            try:
                assert minimality_counterexamples(kb, restrict_to_canonical=restrict) == [], kb
            except InconsistentKB:
                pass

    def test_every_refinement_is_tolerant(self):
        r = reference_base_rank(PENGUIN)
        for levels in enumerate_refinements(PENGUIN, restrict_to_canonical=False):
            for i, block in enumerate(levels):
                above = [c.implication for blk in levels[i:] for c in blk]
                g = ImplicationGraph(above + [c.implication for c in r.infinite_rank])
                assert not any(g.exceptional(c.antecedent) for c in block)


def test_implication_set_input():
    s = ImplicationSet([(L("a"), L("b"))])
    assert brute_entails(s, L("-b"), L("-a"))


def _naive_refinements(kb, restrict):
    """All ordered partitions, filtered afterwards by the suffix condition."""
    ranked = reference_base_rank(kb)
    items = [c for r in ranked.finite_ranks for c in r]
    where = {c: i for i, r in enumerate(ranked.finite_ranks) for c in r}
    out = set()
    for labels in itertools.product(range(len(items)), repeat=len(items)):
        used = sorted(set(labels))
        if used != list(range(len(used))):
            continue
        levels = tuple(frozenset(c for c, l in zip(items, labels) if l == k) for k in used)
        if restrict:
            spans = [{where[c] for c in b} for b in levels]
            if any(len(s) > 1 for s in spans):
                continue
            order = [next(iter(s)) for s in spans]
            if order != sorted(order):
                continue
        ok = True
        for i, block in enumerate(levels):
            above = [c.implication for b in levels[i:] for c in b]
            bf = BruteForce(above + [c.implication for c in ranked.infinite_rank])
            if any(bf.exceptional(c.antecedent) for c in block):
                ok = False
        if ok:
            out.add(levels)
    return out


@pytest.mark.parametrize("restrict", [True, False])
def test_enumerator_matches_naive(restrict):
    for kb in seeded_kbs(40, seed=11, max_statements=5, max_atoms=3):
        try:
            expected = _naive_refinements(kb, restrict)
        except InconsistentKB:
            continue
        got = enumerate_refinements(kb, restrict_to_canonical=restrict)
        assert len(got) == len(set(got))
        assert set(got) == expected, kb
