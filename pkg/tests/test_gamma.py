from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gammastat import groups as gr
from gammastat.errors import PreconditionError
from gammastat.gamma import (GammaGroup, LevelSet, count_equivariant_homs, count_surjections_from_free,
                             count_surjections_from_free_direct, gamma_automorphisms,
                             gamma_group_from_matrices, iter_equivariant_homs, level_completion)
from gammastat.ylaws import battery, check_y_laws, _fixed_exact

import oracles

BATTERY = battery()


def test_battery_size_and_gammas():
    assert len(BATTERY) >= 12
    assert {A.Gamma.order for _, A in BATTERY} == {2, 3, 6}
    assert all(A.G.order * A.Gamma.order <= 200 for _, A in BATTERY)


@pytest.mark.parametrize("name,A", BATTERY, ids=[n for n, _ in BATTERY])
def test_y_laws(name, A):
    rep = check_y_laws(A, name)
    assert rep.passed, rep.laws


def test_y_laws_need_coprime_order():
    C2 = gr.cyclic(2)
    Z4 = GammaGroup(gr.cyclic(4), C2, {C2.generators[0]: [0, 3, 2, 1]})
    with pytest.raises(PreconditionError):
        check_y_laws(Z4)
    # and the exactness law really fails there: Z/4 -> Z/2 loses a fixed point
    N = frozenset({0, 2})
    Q, proj = Z4.quotient(N)
    assert not _fixed_exact(Z4, N, Q, proj)


def test_admissible_examples(z3inv, v4):
    assert z3inv.admissible and v4.admissible
    C2 = gr.cyclic(2)
    triv = GammaGroup(gr.cyclic(3), C2, {C2.generators[0]: [0, 1, 2]})
    assert not triv.admissible
    # (Z/2)^2 with Z/3 has a unique nontrivial action, and it is admissible
    assert len(v4.fixed_points) == 1 and len(v4.y_image) == 4


def test_y_fiber_size(z3inv):
    assert len(z3inv.y_image) == 3 and len(z3inv.fixed_points) == 1


GG = [("Z3 inv / Z2", 0), ("V4 / Z3", 8), ("Z7 / Z3", 10), ("Q8 / Z3", 13), ("Z5 sign / S3", 14)]


@pytest.mark.parametrize("name,i", GG)
def test_equivariant_homs_match_bruteforce(name, i):
    A = BATTERY[i][1]
    assert BATTERY[i][0] == name
    for B in (A,):
        got = sorted(tuple(int(x) for x in f) for f in iter_equivariant_homs(A, B))
        assert got == oracles.equivariant_homs(A, B)


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=1, max_value=3), st.sampled_from([0, 8, 10, 13]))
def test_free_surjection_count(n, i):
    A = BATTERY[i][1]
    assert count_surjections_from_free(A, n) == count_surjections_from_free_direct(A, n)


def test_free_hom_count_is_y_power(z3inv):
    # C:FHoms on the relatively free side: |Hom(F_n, G)| = |Y(G)|^n
    from gammastat.sampler import build_free_level_model
    C = LevelSet([z3inv])
    for n in (1, 2):
        M = build_free_level_model(C.Gamma, C, n)
        assert M.check_hom_counts() == [(3 ** n, 3 ** n)]


def test_gamma_automorphisms(z3inv, v4):
    assert len(gamma_automorphisms(z3inv)) == 2
    # Aut_{Z/3}(F_4) = F_4^x
    assert len(gamma_automorphisms(v4)) == 3


def test_level_membership(z3inv):
    C = LevelSet([z3inv])
    C2 = gr.cyclic(2)
    sq = gamma_group_from_matrices(3, C2, {C2.generators[0]: [[2, 0], [0, 2]]})
    z9 = GammaGroup(gr.cyclic(9), C2, {C2.generators[0]: [(-x) % 9 for x in range(9)]})
    assert C.contains(sq)
    assert not C.contains(z9)
    Q, _ = level_completion(z9, C)
    assert Q.order == 3
