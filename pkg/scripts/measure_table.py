"""Certified limiting values mu_u(H) for small H at the level {Z/3 with inversion}.

    python scripts/measure_table.py --u 0 --rank-max 3
"""
import argparse

from gammastat import groups as gr
from gammastat.acceptance import level_z3
from gammastat.gamma import GammaGroup, gamma_group_from_matrices
from gammastat.measure import mu_basic_open


def inv(k):
    C2 = gr.cyclic(2)
    if k == 0:
        return GammaGroup(gr.trivial_group(), C2, [[0], [0]])
    return gamma_group_from_matrices(3, C2, {C2.generators[0]: [[2 * (i == j) for j in range(k)]
                                                               for i in range(k)]})


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--u", type=int, default=0)
    ap.add_argument("--rank-max", type=int, default=3)
    ap.add_argument("--prefix", type=int, default=12)
    a = ap.parse_args()
    C = level_z3()
    tot = 0.0
    for k in range(a.rank_max + 1):
        v = mu_basic_open(C, a.u, inv(k), prefix_len=a.prefix)
        tot += v.float_estimate
        print(f"(Z/3)^{k}: [{float(v.lower):.12f}, {float(v.upper):.12f}]")
    print(f"partial mass {tot:.12f}")


if __name__ == "__main__":
    main()
