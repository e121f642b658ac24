"""Differential fuzz of the class engine against the brute-force oracle.

    python3 scripts/run_fuzz.py --n 1000 --seed 0 --out fuzz_report.json
"""

import argparse
import json
import sys

from gkring.fuzz import FuzzConfig, run_fuzz


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-depth", type=int, default=3)
    ap.add_argument("--out", default=None, help="write the JSON report here")
    args = ap.parse_args()

    def progress(rep):
        if rep.checked % 100 == 0:
            print(f"{rep.checked:5d} checked, {len(rep.disagreements)} disagreements", file=sys.stderr)

    rep = run_fuzz(FuzzConfig(n=args.n, seed=args.seed, max_depth=args.max_depth), progress)
    data = rep.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(data, fh, indent=2)
    for d in rep.disagreements:
        print(f"{d.what}: {d.formula}  engine={d.engine} oracle={d.oracle}")
    print(f"{rep.checked} formulas, {len(rep.disagreements)} disagreements, "
          f"{rep.budget_errors} over budget, {rep.seconds:.1f}s")
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
