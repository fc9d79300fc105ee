from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gammastat import groups as gr
from gammastat.acceptance import level_z3, z3_inversion, z3sq_inversion, z9_inversion
from gammastat.errors import NotAdmissible, PreconditionError
from gammastat.gamma import GammaGroup, LevelSet, gamma_group_from_matrices
from gammastat.measure import (abelian_factors, bbh_multiplicity, bbh_specialization, clm_specialization,
                               elementary_abelian_ranks, geometric_product, lambda_constant, moment,
                               moment_level, mu_basic_open, multiplicity, prob_level)
from gammastat.sampler import build_free_level_model

import oracles

C2 = gr.cyclic(2)
TRIV = GammaGroup(gr.trivial_group(), C2, [[0], [0]])


def inv_power(k):
    if k == 0:
        return TRIV
    if k == 1:
        return z3_inversion()
    return gamma_group_from_matrices(3, C2, {C2.generators[0]: [[2 if i == j else 0 for j in range(k)]
                                                               for i in range(k)]})


def nontrivial_factor(C, H):
    fs = [G for G in abelian_factors(C, H) if G.y_size > 1]
    assert len(fs) == 1
    return fs[0]


@pytest.mark.parametrize("n,u", [(1, 0), (1, 1), (2, 0), (2, 1), (2, 2), (3, 0)])
def test_prob_matches_span_codimension(n, u):
    # X = (Z/3)^n / span of n+u uniform vectors, all with the inversion action
    C = level_z3()
    law = oracles.elementary_quotient_law(3, n, u)
    for k in range(n + 1):
        assert prob_level(C, n, u, inv_power(k)) == law.get(k, 0), k


@pytest.mark.parametrize("n,u", [(1, 0), (2, 1), (3, 0)])
def test_prob_sums_to_one(n, u):
    C = level_z3()
    M = build_free_level_model(C.Gamma, C, n)
    assert sum(prob_level(C, n, u, H) for H in M.classes.values()) == 1


def test_multiplicity_trivial_target():
    C = level_z3()
    G = nontrivial_factor(C, TRIV)
    assert [multiplicity(C, n, TRIV, G).m for n in (1, 2, 3)] == [1, 2, 3]
    assert lambda_constant(C, TRIV, G) == 1


def test_lambda_approximants_converge():
    C = level_z3()
    H = z3_inversion()
    G = nontrivial_factor(C, H)
    lam = lambda_constant(C, H, G)
    assert lam == Fraction(1, 3)
    for n in (1, 2, 3, 4):
        m = multiplicity(C, n, H, G).m
        assert Fraction(G.h ** m, G.y_size ** n) == lam


def test_pro_p_lambda():
    # level Z/9: H = Z/3, the nontrivial factor has lambda = p^(r-d) with r = d = 1
    C = LevelSet([z9_inversion()])
    H = z3_inversion()
    G = nontrivial_factor(C, H)
    assert lambda_constant(C, H, G) == 1


def test_nonadmissible_target_has_no_mass():
    C = level_z3()
    fixed = GammaGroup(gr.cyclic(3), C2, {C2.generators[0]: [0, 1, 2]})
    with pytest.raises(NotAdmissible):
        mu_basic_open(C, 0, fixed)
    with pytest.raises(NotAdmissible):
        moment(1, fixed)


def test_negative_u_rejected():
    with pytest.raises(PreconditionError):
        mu_basic_open(level_z3(), -1, TRIV)


def test_moments():
    A = z3_inversion()
    assert moment(0, A) == 1 and moment(1, A) == Fraction(1, 3) and moment(2, A) == Fraction(1, 9)
    assert moment_level(level_z3(), 1, 1, A) == Fraction(2, 9)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=2), st.integers(min_value=2, max_value=8))
def test_intervals_nest(u, L):
    C = level_z3()
    H = z3_inversion()
    a = mu_basic_open(C, u, H, prefix_len=L)
    b = mu_basic_open(C, u, H, prefix_len=L + 3)
    assert b.within(a)
    assert a.lower <= a.float_estimate <= a.upper


def test_mu_total_mass_bound():
    # rank <= 2 carries almost all the mass; certified lower bounds never overshoot 1
    C = level_z3()
    lows = [mu_basic_open(C, 0, inv_power(k), prefix_len=12).lower for k in range(4)]
    assert Fraction(9999, 10000) < sum(lows[:3]) < sum(lows) <= 1


def test_geometric_product_empty():
    v = geometric_product(Fraction(1, 2), [], 5)
    assert v.lower == v.upper == Fraction(1, 2)


def same_value(a, b):
    return a.exact_prefix == b.exact_prefix and a.tail_lower == b.tail_lower


def test_class_one_bbh_is_mu():
    C = level_z3()
    for k in range(3):
        H = inv_power(k)
        for u in (0, 1):
            assert same_value(mu_basic_open(C, u, H), bbh_specialization(u, 3, H, mode="class-c"))


def test_pro_p_bbh_is_clm_in_rank_one():
    # rank <= 1: the whole pro-3 group is its abelianization, so both values agree
    for k in range(2):
        H = inv_power(k)
        for u in (0, 1):
            assert same_value(clm_specialization(u, H, [3]), bbh_specialization(u, 3, H))
    # rank 2 with u = 0: r = 3 > d = 2, so (Z/3)^2 itself has no pro-3 mass
    H = inv_power(2)
    assert bbh_specialization(0, 3, H).upper == 0
    assert bbh_specialization(1, 3, H).exact_prefix > 0
    # the level Z/9 already sees the pro-3 value at Z/3
    C = LevelSet([z9_inversion()])
    assert same_value(mu_basic_open(C, 0, z3_inversion()), bbh_specialization(0, 3, z3_inversion()))


def test_clm_known_values():
    # u = 0: prod (1 - 3^-i) for the trivial group; half of it for Z/3
    a = clm_specialization(0, TRIV, [3]).float_estimate
    b = clm_specialization(0, z3_inversion(), [3]).float_estimate
    assert abs(a - 0.5601260779) < 1e-9 and abs(b - a / 2) < 1e-12


def test_bbh_ranks_and_multiplicity():
    assert elementary_abelian_ranks(z3sq_inversion(), 3) == (2, 3)
    assert bbh_multiplicity(4, 2, 3, 3) == 2
    with pytest.raises(PreconditionError):
        elementary_abelian_ranks(z9_inversion(), 3)
