"""Push random domains through every catalog map and compare classes.

Prints one row per map: domains checked, domains over the depth budget,
and class or count mismatches (there should be none).
"""

import argparse
import sys
import time

from gkring.errors import DepthBudgetExceeded
from gkring.functions import adapted_decomposition, catalog, check_function
from gkring.fuzz import FormulaGenerator, FuzzConfig
from gkring.grothendieck import class_of_formula
from gkring.syntax import to_text


def main() -> int:
    ap = argparse.ArgumentParser(description="class(A) == class(h(A)) over the bijection catalog")
    ap.add_argument("--domains", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--depth", type=int, default=2, help="depth of the random domains")
    ap.add_argument("--show", action="store_true", help="print each map's pieces first")
    args = ap.parse_args()

    cfg = FuzzConfig(n=args.domains, seed=args.seed, max_vars=1, max_depth=args.depth, max_atoms=3)
    domains = list(FormulaGenerator(cfg))
    bad = 0
    print(f"{'map':20s} {'pieces':>6s} {'checked':>8s} {'budget':>7s} {'bad':>4s} {'secs':>6s}")
    for name, h in catalog().items():
        if args.show:
            print(h.to_text(), end="")
        rep = check_function(h)
        if not rep.ok:
            print(f"{name}: not a bijection candidate: {rep.problems}")
            bad += 1
            continue
        start, checked, budget, wrong = time.perf_counter(), 0, 0, 0
        for a in domains:
            try:
                ad = adapted_decomposition(h, a)
            except DepthBudgetExceeded:
                budget += 1
                continue
            checked += 1
            if ad.image_class() != class_of_formula(a) or not ad.counts_match():
                wrong += 1
                print(f"  mismatch on {to_text(a)}")
        bad += wrong
        print(f"{name:20s} {len(h.pieces):6d} {checked:8d} {budget:7d} {wrong:4d} {time.perf_counter() - start:6.2f}")
    return 0 if bad == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
