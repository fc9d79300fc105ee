"""Small worked values, each checked against a brute-force computation or a
closed form that is independent of the code path it exercises."""

from fractions import Fraction
from itertools import product

import pytest

from gammastat import groups as gr
from gammastat.acceptance import level_z3, v4_order3, z3_inversion, z3sq_inversion
from gammastat.extensions import ModuleRep, enumerate_h_extensions, trivial_module
from gammastat.gamma import (GammaGroup, LevelSet, chief_factor_pairs, count_equivariant_homs,
                             count_surjections_from_free, gamma_automorphisms)
from gammastat.hurwitz import braid_orbits, enumerate_fixed_vectors, nielsen_tuples, q_lattice, sigma
from gammastat.measure import bbh_specialization, clm_specialization, mu_basic_open, prob_level
from gammastat.sampler import build_free_level_model
from gammastat.schur import build_reduced_cover, compute_h2, lifting_invariant, q_c_subgroup

import oracles

C2 = gr.cyclic(2)
S3 = gr.symmetric(3)
TR = [x for x in range(6) if S3.orders[x] == 2]
TRIV = GammaGroup(gr.trivial_group(), C2, [[0], [0]])


def prod_one_minus(base, start, stop):
    out = Fraction(1)
    for i in range(start, stop + 1):
        out *= 1 - Fraction(1, base ** i)
    return out


# -- groups ----------------------------------------------------------------------

def test_perm_closure_and_semidirect_census():
    G = gr.from_perms([gr.parse_cycles("(1,2)", 3), gr.parse_cycles("(1,2,3)")])[0]
    assert G.order == 6 and gr.isomorphism_test(G, S3)
    B = gr.semidirect(gr.cyclic(3), C2, {C2.generators[0]: [0, 2, 1]})
    assert sum(1 for x in range(6) if B.orders[x] == 2) == 3


def test_small_hom_and_aut_counts():
    assert len(oracles.table_homs(S3, C2)) == 2
    assert len(gr.enumerate_homs(S3, C2, surjective_only=True)) == 1
    assert len(gr.automorphisms(gr.cyclic(5))) == 4
    assert len(gr.automorphisms(gr.abelian_group([2, 2]))) == 6
    assert gr.isomorphism_test(gr.cyclic(6), gr.abelian_group([2, 3]))


# -- Gamma-groups ----------------------------------------------------------------

def test_y_value_of_generator():
    A = z3_inversion()
    assert tuple(A.y_values[1]) == (1,)          # g^-1 sigma(g) = -2 = 1 additively


def test_gamma_automorphisms_commute_with_inversion():
    assert len(gamma_automorphisms(z3_inversion())) == 2


def test_gamma_closure_of_a_three_cycle():
    t = TR[0]
    A = GammaGroup(S3, C2, {C2.generators[0]: [S3.conj(t, x) for x in range(6)]})
    r = next(x for x in range(6) if S3.orders[x] == 3)
    assert A.normal_gamma_closure([r]) == frozenset(x for x in range(6) if S3.orders[x] in (1, 3))


# -- extensions ------------------------------------------------------------------

def test_trivial_kernel_action_gives_no_admissible_extension():
    assert enumerate_h_extensions(TRIV, trivial_module(C2, 3)) == []


def test_inversion_kernel_unique_extension():
    M = ModuleRep.from_generators(C2, 3, {C2.generators[0]: [[2]]})
    exts = enumerate_h_extensions(TRIV, M)
    assert len(exts) == 1 and exts[0].E.order == 3
    P = exts[0].poset()
    # nodes {1, E}; mu(1, E) = -1
    assert [len(D) for D in P.nodes] == [1, 3]
    assert P.mobius[frozenset({0})] == -1


def test_quaternion_extension_of_v4():
    H = v4_order3()
    exts = enumerate_h_extensions(H, trivial_module(H.semidirect, 2))
    assert len(exts) == 1
    E = exts[0].E.G
    assert E.order == 8 and gr.isomorphism_test(E, gr.quaternion())
    # non-split: a single involution, so no subgroup of order 4 misses the kernel
    assert sum(1 for x in range(8) if E.orders[x] == 2) == 1


def test_chief_factor_pairs():
    prs = chief_factor_pairs(z3_inversion())
    assert len(prs) == 1 and prs[0].order == 3 and len(prs[0].A) == 2
    A = z3sq_inversion()
    a, b = chief_factor_pairs(A, 0), chief_factor_pairs(A, 1)
    assert len(a) == len(b) == 1 and a[0].isomorphic(b[0])


# -- measure-engine worked values ------------------------------------------------

def test_trivial_target_finite_probability():
    # n = 1, u = 1: the quotient is trivial unless both relations lie in 0
    assert prob_level(level_z3(), 1, 1, TRIV) == Fraction(8, 9)
    assert prob_level(level_z3(), 1, 1, z3_inversion()) == Fraction(1, 9)


def test_trivial_target_limit_value():
    L = 12
    v = mu_basic_open(level_z3(), 1, TRIV, prefix_len=L)
    assert v.exact_prefix == prod_one_minus(3, 2, L + 1)


def test_clm_and_bbh_closed_forms():
    L = 10
    H = z3_inversion()
    want = Fraction(1, 6) * prod_one_minus(3, 2, L + 1)
    assert clm_specialization(1, H, [3], prefix_len=L).exact_prefix == want
    assert bbh_specialization(1, 3, H, prefix_len=L).exact_prefix == want


def test_surjections_two_ways():
    A = z3_inversion()
    M = build_free_level_model(C2, level_z3(), 1)
    assert count_equivariant_homs(M.admissible_image, A, surjective_only=True) == \
        count_surjections_from_free(A, 1) == len(A.y_image) - 1


def test_free_model_is_z3():
    M = build_free_level_model(C2, level_z3(), 1)
    assert M.admissible_image.order == 3 and M.check_hom_counts() == [(3, 3)]


# -- Schur data ------------------------------------------------------------------

def test_v4_qc():
    V = gr.abelian_group([2, 2])
    h = compute_h2(V)
    assert h.cover.order == 8 and not h.cover.is_abelian
    for c in ([1, 2, 3], [1]):
        gens, K, _ = q_c_subgroup(h, c)
        assert K.order == 1
        want = {tuple(h.commutator_class(x, y)) for x in c for y in range(4)} - {(0,)}
        assert {tuple(g) for g in gens} == want


def test_lift_conjugation_equivariance():
    A4 = gr.alternating(4)
    c = [x for x in range(12) if A4.orders[x] == 3]
    cov = build_reduced_cover(A4, c)
    S = cov.cover
    for gt in range(S.order):
        g = cov.proj[gt]
        for x in c:
            assert cov.lift(A4.conj(g, x)) == S.conj(gt, cov.lift(x))


def test_w_alpha_additive_and_action_composes():
    A4 = gr.alternating(4)
    cov = build_reduced_cover(A4, [x for x in range(12) if A4.orders[x] == 3])
    K = cov.kernel
    vecs = list(product(range(4), repeat=2))
    for a in (5, 7, 11):
        for m, m2 in product(vecs, repeat=2):
            s = tuple(x + y for x, y in zip(m, m2))
            assert cov.w_alpha(a, s) == K.add(cov.w_alpha(a, m), cov.w_alpha(a, m2))
    from gammastat.hurwitz import lattice_k_elements
    for k in lattice_k_elements(cov, 6):
        for a, b in ((5, 7), (7, 11)):
            assert cov.powering_action(a, cov.powering_action(b, k)) == cov.powering_action(a * b, k)


# -- braid orbits and lattices ---------------------------------------------------

def test_s3_transpositions_single_orbit():
    assert len(braid_orbits(S3, TR, 4).orbits) == 1


def test_s3_n2_census():
    assert nielsen_tuples(S3, TR, 2) == []              # (g, g) never generates S3
    allt = nielsen_tuples(S3, TR, 2, generating=False)
    assert sorted(allt) == sorted((g, g) for g in TR)
    assert all(sigma(S3, t, 0) == t for t in allt)


def test_lifting_invariant_braid_invariant():
    cov = build_reduced_cover(S3, TR)
    for n in (4, 5, 6):
        for t in nielsen_tuples(S3, TR, n):
            for i in range(n - 1):
                assert lifting_invariant(cov, sigma(S3, t, i)) == lifting_invariant(cov, t)


def test_z2_lattice_vectors():
    L = q_lattice(build_reduced_cover(C2, [1]), 5)
    for n in range(1, 12):
        assert enumerate_fixed_vectors(L, n) == ([(n,)] if n % 2 == 0 else [])
