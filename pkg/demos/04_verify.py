"""Run the verification suites and print one line per check.

    python3 demos/04_verify.py
"""
from pfrecon.verify import Check, verify

report = verify("all")
for c in report["checks"]:
    print(Check(**c).line())
for suite, secs in report["seconds"].items():
    print(f"  {suite:9s} {secs:6.1f} s")
print("all checks passed" if report["passed"] else "some checks failed")
