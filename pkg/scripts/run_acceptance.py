"""Run the acceptance criteria and print one PASS/FAIL line each.

    python scripts/run_acceptance.py            # all eleven
    python scripts/run_acceptance.py --quick
    python scripts/run_acceptance.py --only 4,9 --json out.json
"""
import argparse
import json
import sys

from gammastat.acceptance import run_acceptance


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--only")
    ap.add_argument("--json")
    a = ap.parse_args()
    only = [int(k) for k in a.only.split(",")] if a.only else None
    res = run_acceptance(quick=a.quick, only=only)
    for r in res:
        print(r.line())
    if a.json:
        with open(a.json, "w") as fh:
            json.dump([r.to_dict() for r in res], fh, indent=1, sort_keys=True, default=str)
    sys.exit(0 if all(r.passed and r.in_time for r in res) else 1)


if __name__ == "__main__":
    main()
