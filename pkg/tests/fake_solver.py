"""Stand-in for a clingo executable, driven by environment variables.

FAKE_BR_OUT / FAKE_RC_OUT name canned output files for BaseRank-only runs and
for runs that include the RC encoding.  FAKE_LOG, when set, receives argv.
FAKE_SLEEP delays the output; FAKE_FAIL makes the process die silently.
"""
import os
import sys
import time

args = sys.argv[1:]
if log := os.environ.get("FAKE_LOG"):
    with open(log, "a") as fh:
        fh.write(" ".join(args) + "\n")
if os.environ.get("FAKE_FAIL"):
    sys.stderr.write("parse error in input\n")
    sys.exit(65)
if delay := os.environ.get("FAKE_SLEEP"):
    print("Solving...\nAnswer: 1\nrank(m_implication(a,b),0)\nOptimization: 1", flush=True)
    time.sleep(float(delay))
rc = any(a.endswith("-rc.lp") for a in args)
with open(os.environ["FAKE_RC_OUT" if rc else "FAKE_BR_OUT"]) as fh:
    out = fh.read()
sys.stdout.write(out)
sys.exit(30 if "OPTIMUM" in out else 20 if "UNSAT" in out else 10)
