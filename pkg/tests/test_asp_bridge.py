import os
import stat
import sys
from pathlib import Path

import pytest
from hypothesis import given

from conftest import GOLDEN, K1, PENGUIN, kbs
from klmrc import asp_bridge as bridge
from klmrc.asp_bridge import (
    AnswerSetSyntaxError,
    Function,
    ProgramKind,
    SolverFailed,
    SolverNotFound,
    SolverTimeout,
    baserank_encoding,
    cross_check,
    emit_kb_facts,
    parse_answer_set,
    parse_solver_output,
    rc_encoding,
    resolve_solver,
    run_solver,
    solver_rank_atoms,
)
from klmrc.kb import KnowledgeBase, Literal, Query, parse_kb

SOLVER_OUT = GOLDEN / "solver"


class TestEncodings:
    def test_baserank_golden(self):
        assert baserank_encoding().text == (GOLDEN / "base_rank.lp").read_text()
        assert baserank_encoding().kind is ProgramKind.BASERANK

    def test_rc_golden(self):
        assert rc_encoding().text == (GOLDEN / "rational_closure.lp").read_text()

    def test_repaired_differs_only_in_coded_classical(self):
        verbatim = baserank_encoding().text.splitlines()
        repaired = baserank_encoding(repaired=True).text.splitlines()
        diff = [(a, b) for a, b in zip(verbatim, repaired) if a != b]
        assert len(verbatim) == len(repaired) and len(diff) == 1
        assert "coded_classical" in diff[0][0] and "coded_classical" not in diff[0][1]


class TestFacts:
    def test_k1_with_query(self):
        text = emit_kb_facts(K1, Query.of("socrates", "man")).text
        assert text.split() == (Path(__file__).parent.parent / "data" / "k1_query.lp").read_text().split()
        assert text.splitlines()[-1] == "query(socrates,man)."

    def test_empty(self):
        assert emit_kb_facts(KnowledgeBase()).text == ""

    def test_penguin_round_trip(self):
        text = emit_kb_facts(PENGUIN).text
        assert len(text.splitlines()) == 3
        assert parse_kb(text) == PENGUIN

    @given(kbs(max_size=10))
    def test_round_trip(self, kb):
        assert parse_kb(emit_kb_facts(kb).text) == kb


class TestAnswerSet:
    def test_listing_line(self):
        text = " ".join((GOLDEN / "k1_answer.txt").read_text().split())
        a = parse_answer_set(text)
        for atom in ("entailed(true)", "guess(inf)", "inference(socrates,man)", "inference(-man,-socrates)"):
            assert atom in a
        assert len(a.atoms) == 8

    def test_empty(self):
        assert parse_answer_set("").atoms == frozenset()

    def test_nested_rank(self):
        a = parse_answer_set("rank(m_implication(man,mortal),0)")
        (atom,) = a.named("rank")
        imp, level = atom.args
        assert imp == Function("m_implication", (Function("man"), Function("mortal")))
        assert level == 0
        assert solver_rank_atoms(a) == {(Literal("man"), Literal("mortal"), 0)}

    def test_inf_and_negation(self):
        a = parse_answer_set("rank(m_implication(socrates,-mortal),inf)")
        assert solver_rank_atoms(a) == {(Literal("socrates"), Literal("mortal", True), "inf")}

    def test_atoms_print_back(self):
        atoms = ["rank(m_implication(a,-b),inf)", "guess(2)", "entailed(false)", 'p("s t",-3)', "-q"]
        a = parse_answer_set(" ".join(atoms))
        assert {str(x) for x in a.atoms} == set(atoms)

    @pytest.mark.parametrize("text,offset", [("rank(a,", 7), ("p) q", 1), ("3", 0), ("p(q,,r)", 4)])
    def test_malformed(self, text, offset):
        with pytest.raises(AnswerSetSyntaxError) as err:
            parse_answer_set(text)
        assert err.value.offset == offset


class TestSolverOutput:
    def test_last_answer_before_optimum(self):
        r = parse_solver_output((SOLVER_OUT / "k1_rank.out").read_text())
        assert r.status == "optimum" and len(r.answers) == 2
        assert "rank(m_implication(man,mortal),0)" in r.answer
        assert r.answer.optimal

    def test_satisfiable_without_objective(self):
        r = parse_solver_output((SOLVER_OUT / "empty_rank.out").read_text())
        assert r.status == "optimum" and r.answer.atoms == frozenset()

    def test_unsat(self):
        r = parse_solver_output((SOLVER_OUT / "total_exc_rank.out").read_text())
        assert r.status == "unsatisfiable" and r.answer is None

    def test_no_optimum_marker(self):
        r = parse_solver_output("Answer: 1\np\nOptimization: 3\nSATISFIABLE\n")
        assert r.status == "satisfiable" and r.answer is None


@pytest.fixture
def fake(tmp_path, monkeypatch):
    script = tmp_path / "fake-clingo"
    script.write_text(f'#!/bin/sh\nexec "{sys.executable}" "{Path(__file__).parent / "fake_solver.py"}" "$@"\n')
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    log = tmp_path / "argv.log"
    monkeypatch.setenv("FAKE_LOG", str(log))

    def use(br, rc=None):
        monkeypatch.setenv("FAKE_BR_OUT", str(SOLVER_OUT / br))
        monkeypatch.setenv("FAKE_RC_OUT", str(SOLVER_OUT / (rc or br)))
        return str(script)

    use.log = log
    return use


class TestProcess:
    def test_resolution_order(self, fake, monkeypatch):
        path = fake("k1_rank.out")
        monkeypatch.setenv("RC_SOLVER", path)
        assert resolve_solver() == path
        with pytest.raises(SolverNotFound):
            resolve_solver("/nonexistent/clingo")
        monkeypatch.delenv("RC_SOLVER")
        monkeypatch.setenv("PATH", "/nonexistent")
        with pytest.raises(SolverNotFound):
            resolve_solver()

    def test_invocation_contract(self, fake, tmp_path):
        path = fake("k1_rank.out")
        run_solver([emit_kb_facts(K1), baserank_encoding()], solver_path=path, workdir=tmp_path)
        (line,) = fake.log.read_text().splitlines()
        args = line.split()
        assert args[0].endswith("-facts.lp") and args[1].endswith("-baserank.lp") and args[2] == "0"
        assert Path(args[0]).parent.parent == tmp_path
        assert not Path(args[0]).exists()

    def test_solver_failure(self, fake, monkeypatch):
        path = fake("k1_rank.out")
        monkeypatch.setenv("FAKE_FAIL", "1")
        with pytest.raises(SolverFailed):
            run_solver([emit_kb_facts(K1)], solver_path=path)

    def test_timeout_with_partial_answer(self, fake, monkeypatch):
        path = fake("k1_rank.out")
        monkeypatch.setenv("FAKE_SLEEP", "5")
        r = run_solver([emit_kb_facts(K1)], solver_path=path, timeout=1)
        assert r.status == "unknown" and r.answer is None and r.answers
        report = cross_check(K1, solver_path=path, timeout=1)
        assert report.indeterminate and not report.agree
        assert report.format()[0] == "indeterminate"

    def test_timeout_without_output(self, monkeypatch, tmp_path):
        script = tmp_path / "slow"
        script.write_text("#!/bin/sh\nsleep 5\n")
        script.chmod(0o755)
        with pytest.raises(SolverTimeout):
            run_solver([emit_kb_facts(K1)], solver_path=str(script), timeout=0.5)


class TestCrossCheckWithCannedOutput:
    def test_k1_agreement(self, fake):
        report = cross_check(K1, Query.of("socrates", "man"), solver_path=fake("k1_rank.out", "k1_query.out"))
        assert report.agree and report.ranks_agree and report.verdict_agree
        assert report.format()[0] == "agreement"

    def test_penguin_ranks(self, fake):
        assert cross_check(PENGUIN, solver_path=fake("penguin_rank.out")).agree

    def test_empty(self, fake):
        report = cross_check(KnowledgeBase(), solver_path=fake("empty_rank.out"))
        assert report.agree

    def test_rank_mismatch_is_reported(self, fake):
        report = cross_check(PENGUIN, solver_path=fake("k1_rank.out"))
        assert not report.agree
        assert any(d.startswith("- engine only: rank(m_implication(bird,fly),0)") for d in report.diffs)

    def test_verdict_mismatch(self, fake):
        report = cross_check(K1, Query.of("man", "mortal"), solver_path=fake("k1_rank.out", "k1_man_mortal.out"))
        assert report.ranks_agree and report.verdict_agree is False
        assert (report.engine_verdict, report.solver_verdict) == (True, False)

    def test_unsat_versus_consistent_engine(self, fake):
        kb = parse_kb("a |~ b\na |~ -b")
        report = cross_check(kb, solver_path=fake("total_exc_rank.out"))
        assert report.solver_status == "unsatisfiable" and not report.agree

    def test_unsat_matches_inconsistent_kb(self, fake):
        kb = parse_kb("-a -> b\n-a -> -b\na -> b\na -> -b")
        report = cross_check(kb, solver_path=fake("total_exc_rank.out"))
        assert report.agree and not report.engine_consistent


needs_solver = pytest.mark.skipif(not bridge.solver_available(), reason="no ASP solver installed")


@pytest.mark.solver
@needs_solver
def test_real_solver_k1():
    report = cross_check(K1, Query.of("socrates", "man"))
    assert report.agree, report.format()


@pytest.mark.solver
@needs_solver
def test_real_solver_penguin_ranks():
    assert cross_check(PENGUIN).ranks_agree
