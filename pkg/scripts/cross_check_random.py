"""Cross-check seeded random KBs against an external ASP solver and classify
every disagreement.

    RC_SOLVER=/path/to/clingo python scripts/cross_check_random.py --count 100
"""
import argparse
import collections
import random

from klmrc import asp_bridge as bridge
from klmrc.baserank import InconsistentKB, base_rank
from klmrc.bench import random_kb
from klmrc.kb import Query


def classify(kb, q, report, repaired):
    if report.agree and not report.indeterminate:
        return "agree"
    try:
        ranked = base_rank(kb)
    except InconsistentKB:
        return "engine inconsistent, solver found answer set"
    if report.solver_status == "unsatisfiable" and not report.ranks_agree:
        if ranked.totally_exceptional:
            return "solver unsat: totally exceptional statements"
        return "solver unsat: other"
    if report.ranks_agree is False:
        return "rank atoms differ"
    if report.verdict_agree is False:
        return f"verdict differs (engine {report.engine_verdict}, solver {report.solver_verdict})"
    return "indeterminate"


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=20241014 + 7)
    p.add_argument("--max-statements", type=int, default=12)
    p.add_argument("--max-atoms", type=int, default=8)
    p.add_argument("--solver")
    p.add_argument("--repaired", action="store_true", help="use the BaseRank template without coded_classical")
    p.add_argument("--show", type=int, default=3, help="examples to print per category")
    args = p.parse_args(argv)
    if not bridge.solver_available(args.solver):
        p.exit(2, f"no ASP solver found; pass --solver or set ${bridge.SOLVER_ENV}\n")

    rng = random.Random(args.seed)
    tally = collections.Counter()
    examples = collections.defaultdict(list)
    for _ in range(args.count):
        kb = random_kb(rng, args.max_statements, args.max_atoms, min_statements=1)
        c = rng.choice(kb.statements)
        q = Query(c.antecedent, c.consequent)
        report = bridge.cross_check(kb, q, solver_path=args.solver, repaired=args.repaired)
        label = classify(kb, q, report, args.repaired)
        tally[label] += 1
        if len(examples[label]) < args.show:
            examples[label].append((kb, q, report))

    for label, n in tally.most_common():
        print(f"{n:4d}  {label}")
    for label, items in examples.items():
        if label == "agree":
            continue
        print(f"\n== {label}")
        for kb, q, report in items:
            print("  kb:", "; ".join(map(str, kb)), "| query:", q)
            for line in report.format():
                print("    " + line)


if __name__ == "__main__":
    main()
