import copy
from math import gcd

import pytest

from gammastat import groups as gr
from gammastat.acceptance import f5sq_order3, v4_order3, z3_inversion
from gammastat.errors import InternalCheckFailed, PreconditionError
from gammastat.hurwitz import nielsen_tuples, semidirect_class_set
from gammastat.schur import (ReducedSchurCover, braid_identity_holds, build_reduced_cover, compute_h2,
                             is_cocycle, lifting_invariant)

import oracles

SCHUR = {"Z6": (), "V4": (2,), "S3": (), "D8": (2,), "Q8": (), "A4": (2,), "Z2xZ4": (2,)}


def group(name):
    return {"Z6": gr.cyclic(6), "V4": gr.abelian_group([2, 2]), "S3": gr.symmetric(3),
            "D8": gr.dihedral(4), "Q8": gr.quaternion(), "A4": gr.alternating(4),
            "Z2xZ4": gr.abelian_group([2, 4])}[name]


@pytest.mark.parametrize("name", sorted(SCHUR))
def test_schur_multipliers(name):
    h = compute_h2(group(name), cross_check=True)
    assert tuple(h.h2.cyclic_factors) == SCHUR[name]
    assert tuple(h.bar_check) == SCHUR[name]


@pytest.mark.parametrize("name", ["V4", "S3", "D8", "Q8", "Z6", "A4"])
def test_h2_against_raw_cocycles(name):
    # universal coefficients: dim H^2(G, F_p) = rank_p H_2 + rank_p G^ab
    G = group(name)
    h = compute_h2(G)
    ab = gr.abelianization(G).form.cyclic_factors
    for p in gr.prime_factors(G.order):
        rk = lambda fs: sum(1 for d in fs if d % p == 0)
        assert oracles.h2_fp_dimension(G, p) == rk(h.h2.cyclic_factors) + rk(ab), p


def test_schur_cover_is_stem():
    h = compute_h2(group("D8"))
    assert h.cover.order == 16 and not h.cover.is_abelian
    # kernel (indices 0, 1 over the identity) is central and inside [S, S]
    assert h.cover.center == frozenset({0, 1})
    assert {0, 1} <= set(h.cover.derived_subgroup)


def test_kernel_shrinks_with_c():
    A4 = group("A4")
    full = build_reduced_cover(A4, [x for x in range(12) if x != A4.identity])
    three = build_reduced_cover(A4, [x for x in range(12) if A4.orders[x] == 3])
    assert full.kernel.order == 1 and three.kernel.order == 2
    assert braid_identity_holds(full) and braid_identity_holds(three)


def test_class_set_validation():
    S3 = group("S3")
    with pytest.raises(PreconditionError):
        build_reduced_cover(S3, [1])                 # not conjugation closed in general
    with pytest.raises(PreconditionError):
        build_reduced_cover(S3, [S3.identity])


def test_round_trip_and_poison():
    A4 = group("A4")
    c = [x for x in range(12) if A4.orders[x] == 3]
    cov = build_reduced_cover(A4, c)
    data = cov.to_dict()
    back = ReducedSchurCover.from_dict(A4, data)
    assert back.to_dict() == data
    bad = copy.deepcopy(data)
    bad["cocycle"][1][2] ^= 1
    with pytest.raises(InternalCheckFailed):
        ReducedSchurCover.from_dict(A4, bad)
    bad = copy.deepcopy(data)
    bad["class_lifts"][0] = bad["class_lifts"][1]
    with pytest.raises(InternalCheckFailed):
        ReducedSchurCover.from_dict(A4, bad)
    bad = copy.deepcopy(data)
    bad["kernel"] = []
    with pytest.raises(InternalCheckFailed):
        ReducedSchurCover.from_dict(A4, bad)


def test_cocycle_check():
    cov = build_reduced_cover(group("V4"), [1, 2, 3])
    assert is_cocycle(cov.base, cov.kernel, cov.fbar)


@pytest.mark.parametrize("choice", [1, 2, 5])
def test_invariants_do_not_depend_on_choices(choice):
    # same partition of Nielsen tuples by lifting invariant under other lifts / reps
    A4 = group("A4")
    c = [x for x in range(12) if A4.orders[x] == 3]
    base = build_reduced_cover(A4, c)
    other = build_reduced_cover(A4, c, choice=choice)
    tuples = nielsen_tuples(A4, c, 4)

    def partition(cov):
        blocks = {}
        for t in tuples:
            blocks.setdefault(lifting_invariant(cov, t), set()).add(t)
        return sorted(sorted(b) for b in blocks.values())

    assert partition(base) == partition(other)


def test_h2_projection_kernel_prime_to_gamma():
    from gammastat.ylaws import battery
    for name, H in battery():
        if not H.admissible or H.semidirect.order > 100:
            continue
        a, b = compute_h2(H.semidirect).h2.order, compute_h2(H.Gamma).h2.order
        # split surjection on H_2, so |ker| = a / b
        assert a % b == 0 and gcd(a // b, H.Gamma.order) == 1, name


def test_cover_kernel_prime_to_gamma():
    for H in (z3_inversion(), v4_order3(), f5sq_order3()):
        cov1 = build_reduced_cover(H.semidirect, semidirect_class_set(H))
        cov2 = build_reduced_cover(H.Gamma, [g for g in range(H.Gamma.order) if g != H.Gamma.identity])
        assert cov2.kernel.order == 1             # cyclic Gamma has trivial multiplier
        assert gcd(cov1.kernel.order, H.Gamma.order) == 1
