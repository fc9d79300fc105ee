"""The acceptance suite: eleven exact / statistical checks across all modules.

Each ``criterion_k`` returns a CriterionResult; ``run_acceptance`` runs a
selection and times it.  Nothing here loosens a tolerance: a failing check
reports FAIL with its detail.
"""

from __future__ import annotations

import time
import traceback
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, log

from . import groups as gr
from .gamma import GammaGroup, LevelSet, count_equivariant_homs, gamma_group_from_matrices

QUICK = (1, 2, 3, 6, 10, 11)
LIMITS = {1: 60, 2: 60, 3: 300, 4: 300, 5: 300, 6: 120, 7: 600, 8: 600, 9: 120, 10: 120, 11: 120}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    limit: float = 0.0

    @property
    def in_time(self):
        return self.seconds <= self.limit

    def line(self):
        tag = "PASS" if self.passed and self.in_time else "FAIL"
        return f"{tag} criterion {self.number:2d} {self.title} ({self.seconds:.1f}s / {self.limit:.0f}s)"

    def to_dict(self):
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "in_time": self.in_time, "seconds": round(self.seconds, 3), "detail": self.detail}


# -- shared configurations ------------------------------------------------------------

def z3_inversion():
    C2 = gr.cyclic(2)
    return GammaGroup(gr.cyclic(3), C2, {C2.generators[0]: [0, 2, 1]}, name="Z3 inv")


def z9_inversion():
    C2 = gr.cyclic(2)
    return GammaGroup(gr.cyclic(9), C2, {C2.generators[0]: [(-x) % 9 for x in range(9)]}, name="Z9 inv")


def z3sq_inversion():
    C2 = gr.cyclic(2)
    return gamma_group_from_matrices(3, C2, {C2.generators[0]: [[2, 0], [0, 2]]}, name="Z3^2 inv")


def v4_order3():
    C3 = gr.cyclic(3)
    return gamma_group_from_matrices(2, C3, {C3.generators[0]: [[0, 1], [1, 1]]}, name="V4")


def f5sq_order3():
    """(Z/5)^2 with an order-3 automorphism; the semidirect product has order 75."""
    C3 = gr.cyclic(3)
    return gamma_group_from_matrices(5, C3, {C3.generators[0]: [[0, 4], [1, 4]]}, name="F5^2")


def level_z3():
    return LevelSet([z3_inversion()], name="Z3 inv")


# -- criteria --------------------------------------------------------------------------

def criterion_1():
    from .ylaws import battery, check_y_laws
    reps = [check_y_laws(A, name) for name, A in battery()]
    gammas = {A.Gamma.order for _, A in battery()}
    ok = len(reps) >= 12 and all(r.passed for r in reps) and {2, 3, 6} <= gammas
    failed = [r.name for r in reps if not r.passed]
    return ok, {"pairs": len(reps), "gamma_orders": sorted(gammas), "failed": failed}


def criterion_2():
    from .sampler import build_free_level_model
    rows = []
    C = level_z3()
    for n in (1, 2):
        M = build_free_level_model(C.Gamma, C, n)
        rows.append(("Z3 inv", n, M.check_hom_counts()))
    V = LevelSet([v4_order3()])
    M = build_free_level_model(V.Gamma, V, 1)
    rows.append(("V4", 1, M.check_hom_counts()))
    ok = all(g == w for _, _, lst in rows for g, w in lst)
    return ok, {"rows": [{"level": a, "n": n, "counts": lst} for a, n, lst in rows]}


def criterion_3():
    from .sampler import build_free_level_model, compare_to_exact, exact_class_probabilities, sample_batch
    C = level_z3()
    out, ok = [], True
    for n in (1, 2):
        M = build_free_level_model(C.Gamma, C, n)
        for u in (0, 1):
            exact = exact_class_probabilities(M, u)
            batch = sample_batch(M, u, 0, seed=0, exhaustive=True)
            rep = compare_to_exact(batch, exact=exact)
            exact_match = all(Fraction(batch.tally.get(k, 0), batch.count) == v for k, v in exact.items())
            mass = sum(exact.values(), Fraction(0))
            ok &= rep.passed and exact_match and mass == 1
            out.append({"n": n, "u": u, "tuples": batch.count, "mass": str(mass),
                        "classes": {k: str(v) for k, v in exact.items()}})
    return ok, {"runs": out}


def criterion_4(count=100_000, seed=20240611):
    from .sampler import build_free_level_model, compare_to_exact, sample_batch
    C = level_z3()
    M = build_free_level_model(C.Gamma, C, 2)
    b1 = sample_batch(M, 1, count, seed, threads=1)
    b8 = sample_batch(M, 1, count, seed, threads=8)
    rep = compare_to_exact(b1, tolerance_sigma=4.0)
    same = b1.tally == b8.tally
    zs = {r.label: round(r.z, 3) for r in rep.rows}
    return rep.passed and same, {"count": count, "seed": seed, "z": zs, "threads_identical": same}


def criterion_5():
    from .gamma import count_equivariant_homs as ceh
    from .measure import moment, moment_gap_bound, moment_level, prob_level
    from .sampler import build_free_level_model
    C = level_z3()
    A = z3_inversion()
    ok, rows = True, []
    for n in (1, 2):
        M = build_free_level_model(C.Gamma, C, n)
        for u in (0, 1):
            lhs = sum((prob_level(C, n, u, H) * ceh(H, A, surjective_only=True)
                       for H in M.classes.values()), Fraction(0))
            # Sur((F_n)^C, A) counted on the explicit model
            rhs = Fraction(ceh(M.admissible_image, A, surjective_only=True), len(A.y_image) ** (n + u))
            ok &= lhs == rhs == moment_level(C, n, u, A)
            rows.append({"n": n, "u": u, "moment": str(lhs)})
    target = moment(1, A)
    intervals = []
    for n in (1, 2, 3):
        lo = moment_level(C, n, 1, A)
        gap = moment_gap_bound(A, n)
        hi = lo / (1 - gap)
        intervals.append((lo, hi))
        ok &= lo <= target <= hi
    nested = all(a[0] <= b[0] and b[1] <= a[1] for a, b in zip(intervals, intervals[1:]))
    ok &= nested and target == Fraction(1, 3)
    return ok, {"finite": rows, "limit": str(target),
                "intervals": [[str(a), str(b)] for a, b in intervals], "nested": nested}


def criterion_6():
    from .measure import (abelian_factors, bbh_multiplicity, bbh_specialization, clm_specialization,
                          elementary_abelian_ranks, multiplicity, mu_basic_open, aut_gamma_order)
    out, ok = {}, True
    # CLM ratio law: mu(H1)/mu(H2) = |Aut H2| |H2|^u / (|Aut H1| |H1|^u), with identical tails
    C2 = gr.cyclic(2)
    Hs = [GammaGroup(gr.trivial_group(), C2, [[0], [0]]), z3_inversion(), z9_inversion(), z3sq_inversion()]
    ratios = []
    for u in (0, 1):
        vals = [clm_specialization(u, H, [3]) for H in Hs]
        for H1, v1 in zip(Hs, vals):
            for H2, v2 in zip(Hs, vals):
                want = Fraction(aut_gamma_order(H2) * H2.order ** u, aut_gamma_order(H1) * H1.order ** u)
                good = (v1.exact_prefix / v2.exact_prefix == want and v1.tail_lower == v2.tail_lower
                        and v1.tail_upper == v2.tail_upper)
                ok &= good
        ratios.append({"u": u, "values": [v.float_estimate for v in vals]})
    out["clm"] = ratios
    # BBH: class-1 (level Z/3 inversion) for k = 0, 1, 2 and pro-3 shadow (level Z/9) for k = 1
    checks = []
    configs = [(level_z3(), H, "class-c") for H in Hs[:2] + Hs[3:]]
    configs.append((LevelSet([z9_inversion()]), z3_inversion(), "pro-p"))
    for C, H, mode in configs:
        d, r = elementary_abelian_ranks(H, 3)
        nu = r if mode == "class-c" else 0
        for G in abelian_factors(C, H):
            if G.y_size == 1:
                continue
            for n in range(max(1, d), 5):
                m = multiplicity(C, n, H, G).m
                ok &= m == bbh_multiplicity(n, d, r, nu)
        for u in (0, 1):
            a = bbh_specialization(u, 3, H, mode=mode)
            b = mu_basic_open(C, u, H)
            same = a.exact_prefix == b.exact_prefix and a.tail_lower == b.tail_lower
            ok &= same
            checks.append({"H": H.name or f"order {H.order}", "mode": mode, "u": u, "d": d, "r": r,
                           "mu": a.float_estimate, "agrees": same})
    out["bbh"] = checks
    return ok, out


def criterion_7():
    from .schur import (braid_identity_holds, build_reduced_cover, central_extension_count_oracle,
                        compute_h2)
    from .groups import abelianization, prime_factors
    expected = {"Z6": (), "Z5": (), "Z4": (), "V4": (2,), "S3": (), "D8": (2,), "A4": (2,)}
    groups = {"Z6": gr.cyclic(6), "Z5": gr.cyclic(5), "Z4": gr.cyclic(4), "V4": gr.abelian_group([2, 2]),
              "S3": gr.symmetric(3), "D8": gr.dihedral(4), "A4": gr.alternating(4)}
    ok, rows = True, []
    for name, G in groups.items():
        h2 = compute_h2(G, cross_check=True)
        got = tuple(h2.h2.cyclic_factors)
        ab = abelianization(G).form.cyclic_factors
        oracle_ok = True
        for p in prime_factors(G.order):
            dim = round(log(central_extension_count_oracle(G, p), p))
            rk = lambda fs: sum(1 for d in fs if d % p == 0)
            oracle_ok &= dim == rk(got) + rk(ab)
        c = [x for x in range(G.order) if x != G.identity]
        cov = build_reduced_cover(G, c)     # certify(): transgression, lifts, centrality
        braid = braid_identity_holds(cov)
        bar = tuple(h2.bar_check) == got
        good = got == expected[name] and oracle_ok and braid and bar
        ok &= good
        rows.append({"G": name, "H2": list(got), "oracle": oracle_ok, "bar": list(h2.bar_check),
                     "braid_identity": braid, "kernel": list(cov.kernel.cyclic_factors)})
    # covers with nontrivial kernel on proper class sets
    A4 = groups["A4"]
    c3 = [x for x in range(12) if A4.orders[x] == 3]
    cov = build_reduced_cover(A4, c3)
    ok &= braid_identity_holds(cov) and cov.kernel.order == 2
    rows.append({"G": "A4, order-3 elements", "kernel": list(cov.kernel.cyclic_factors)})
    return ok, {"groups": rows}


def criterion_8():
    from .hurwitz import braid_relations_hold, conway_parker_check
    S3 = gr.symmetric(3)
    tr = [x for x in range(6) if S3.orders[x] == 2]
    Z2 = gr.cyclic(2)
    ok = True
    rel = {}
    for n in range(2, 7):
        rel[n] = braid_relations_hold(S3, tr, n) and braid_relations_hold(Z2, [1], n)
        ok &= rel[n]
    cp = []
    for n in (4, 5, 6):
        v = conway_parker_check(S3, tr, n)
        ok &= v.passed or not v.per_M or all(a == 0 for a, _, _ in v.per_M.values())
        cp.append({"G": "S3", "n": n, "threshold": v.threshold, "per_M": {k: list(x) for k, x in v.per_M.items()}})
    for n in range(2, 11, 2):
        v = conway_parker_check(Z2, [1], n)
        ok &= v.passed
        cp.append({"G": "Z2", "n": n, "threshold": v.threshold})
    return ok, {"braid_relations": rel, "conway_parker": cp}


def criterion_9(n_max=40):
    from .hurwitz import compare_semidirect, frobenius_fixed_check, semidirect_class_set
    from .schur import build_reduced_cover
    ok, out = True, {}
    H = z3_inversion()
    covers = (build_reduced_cover(H.semidirect, semidirect_class_set(H)),
              build_reduced_cover(H.Gamma, [1]))
    runs = []
    for q in (5, 11, 17):
        assert gcd(q, 6) == 1 and gcd(q - 1, 3) == 1
        cmp = compare_semidirect(H, q, range(1, n_max + 1), covers=covers)
        parity = all(b1 == (1 if n % 2 == 0 else 0) for n, (b1, _) in cmp.counts.items())
        good = cmp.equal and parity and cmp.class_bijection and cmp.abelianization_iso
        ok &= good
        for n in (2, 4, 6):
            fixed, b = frobenius_fixed_check(covers[0], q, n)
            ok &= fixed == b
        runs.append({"q": q, "equal": cmp.equal, "parity": parity})
    out["S3"] = runs
    # nontrivial kernel: (Z/5)^2 x| Z/3 with c_1, against (Z/3, Z/3 - {1})
    H1 = f5sq_order3()
    c1 = semidirect_class_set(H1)
    cov1 = build_reduced_cover(H1.semidirect, c1)
    cov2 = build_reduced_cover(H1.Gamma, [1, 2])
    second = []
    for q in (2, 7):
        cmp = compare_semidirect(H1, q, range(1, 13), covers=(cov1, cov2))
        fr = [frobenius_fixed_check(cov1, q, n) for n in (3, 6)]
        good = cmp.equal and all(a == b for a, b in fr) and cov1.kernel.order == 5
        ok &= good
        second.append({"q": q, "equal": cmp.equal, "kernel": list(cov1.kernel.cyclic_factors),
                       "counts": {n: list(v) for n, v in cmp.counts.items()}})
    out["F5^2 x| Z3"] = second
    # A4 itself: Frobenius criterion with its order-3 classes (kernel Z/2)
    A4h = v4_order3()
    cA = semidirect_class_set(A4h)
    covA = build_reduced_cover(A4h.semidirect, cA)
    fa = [frobenius_fixed_check(covA, q, n) for q in (5, 7) for n in (3, 6)]
    ok &= all(a == b for a, b in fa) and covA.kernel.order == 2
    out["A4 frobenius"] = [list(x) for x in fa]
    return ok, out


def criterion_10():
    from .hurwitz import lattice_asymptotics, q_lattice
    from .schur import build_reduced_cover
    cov = build_reduced_cover(gr.cyclic(2), [1])
    r1 = lattice_asymptotics(q_lattice(cov, 5), range(1, 31))
    ok = r1.period == 2 and r1.residues == [0] and r1.degree == 0 and r1.max_residual == 0
    cov3 = build_reduced_cover(gr.cyclic(3), [1, 2])
    L = q_lattice(cov3, 7)
    r2 = lattice_asymptotics(L, range(1, 46))
    slopes = {k: str(v) for k, v in r2.leading.items()}
    ok &= L.dimension == 2 and r2.max_residual == 0 and r2.degree == 1 and r2.periods_observed >= 3
    return ok, {"Z2": {"period": r1.period, "residues": r1.residues},
                "Z3": {"d": L.dimension, "period": r2.period, "slopes": slopes,
                       "periods_observed": r2.periods_observed}}


def criterion_11():
    from .correspondence import decompose_surjections, section_renormalization_check
    H = z3_inversion()
    S3 = gr.symmetric(3)
    cases = [("S3", S3, H), ("S3xZ3", gr.direct_product(S3, gr.cyclic(3)), H),
             ("S3xS3", gr.direct_product(S3, S3), H),
             ("A4", gr.alternating(4), v4_order3()),
             ("S3 / trivial H", S3, GammaGroup(gr.trivial_group(), gr.cyclic(2), [[0], [0]]))]
    ok, rows = True, []
    for name, G, A in cases:
        rec = decompose_surjections(G, A)
        rep = section_renormalization_check(G, A, rec)
        good = rec.consistent and rep.passed
        ok &= good
        rows.append({"G": name, "surjections": len(rec.surjections), "quadruples": rec.independent_count,
                     "Y": rep.y_size, "pairs": len(rep.per_pair)})
    ok &= sum(1 for r in rows if r["surjections"]) >= 3
    return ok, {"cases": rows}


CRITERIA = {
    1: ("Y-map laws", criterion_1),
    2: ("free-model hom counts", criterion_2),
    3: ("exhaustive sampler", criterion_3),
    4: ("Monte Carlo agreement", criterion_4),
    5: ("moments", criterion_5),
    6: ("specializations", criterion_6),
    7: ("Schur suite", criterion_7),
    8: ("braid and lifting suite", criterion_8),
    9: ("component-count equality", criterion_9),
    10: ("lattice asymptotics", criterion_10),
    11: ("correspondence suite", criterion_11),
}


def run_criterion(k) -> CriterionResult:
    title, fn = CRITERIA[k]
    t = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:   # a crash is a failure of that criterion, reported not hidden
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}",
                             "trace": traceback.format_exc(limit=4)}
    return CriterionResult(k, title, bool(ok), detail, time.perf_counter() - t, LIMITS[k])


def run_acceptance(quick=False, only=None):
    ids = list(only) if only else (list(QUICK) if quick else sorted(CRITERIA))
    return [run_criterion(k) for k in ids]
