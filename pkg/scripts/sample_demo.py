"""Sample X_{u,n} for the level {Z/3 with inversion} and compare with the exact law.

    python scripts/sample_demo.py -n 2 -u 1 --count 100000 --seed 1 --threads 4
"""
import argparse

from gammastat.acceptance import level_z3
from gammastat.sampler import build_free_level_model, compare_to_exact, sample_batch


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-n", type=int, default=2)
    ap.add_argument("-u", type=int, default=1)
    ap.add_argument("--count", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()
    C = level_z3()
    M = build_free_level_model(C.Gamma, C, a.n)
    b = sample_batch(M, a.u, a.count, a.seed, threads=a.threads)
    rep = compare_to_exact(b)
    print(f"model order {M.admissible_image.order}, {a.count} samples, seed {a.seed}")
    print(f"{'class':>6} {'exact':>12} {'freq':>10} {'z':>7}")
    for r in rep.rows:
        print(f"{r.label:>6} {float(r.exact):12.6f} {r.frequency:10.6f} {r.z:7.2f}")
    print("ok" if rep.passed else "MISMATCH")


if __name__ == "__main__":
    main()
