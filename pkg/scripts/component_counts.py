"""Tabulate b(G, c, q, n) for G = H x| Gamma against b(Gamma, Gamma - 1, q, n).

    python scripts/component_counts.py --q 5 --n-max 20            # S3 vs Z/2
    python scripts/component_counts.py --case f5sq --q 7 --n-max 12
"""
import argparse

from gammastat.acceptance import f5sq_order3, z3_inversion
from gammastat.hurwitz import compare_semidirect

CASES = {"s3": z3_inversion, "f5sq": f5sq_order3}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--case", choices=sorted(CASES), default="s3")
    ap.add_argument("--q", type=int, default=5)
    ap.add_argument("--n-max", type=int, default=20)
    a = ap.parse_args()
    H = CASES[a.case]()
    cmp = compare_semidirect(H, a.q, range(1, a.n_max + 1))
    print(f"|G1| = {H.semidirect.order}, Gamma order {H.Gamma.order}, q = {a.q}")
    for n, (b1, b2) in cmp.counts.items():
        print(f"n={n:3d}  b(G1)={b1:4d}  b(Gamma)={b2:4d}" + ("" if b1 == b2 else "   <-- differs"))
    print("equal" if cmp.equal else "NOT equal",
          "| class bijection", cmp.class_bijection, "| ab iso", cmp.abelianization_iso)


if __name__ == "__main__":
    main()
