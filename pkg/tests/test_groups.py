import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gammastat import groups as gr
from gammastat.errors import BudgetExceeded, InvalidGroupSpec
from gammastat.config import Budgets

import oracles

NAMES = ["1", "Z2", "Z3", "Z4", "V4", "S3", "Z6", "D8", "Q8"]


def test_orders_of_constructors(small_groups):
    want = {"1": 1, "Z2": 2, "Z3": 3, "Z4": 4, "V4": 4, "S3": 6, "Z6": 6, "D8": 8, "Q8": 8, "A4": 12}
    assert {k: G.order for k, G in small_groups.items()} == want
    assert gr.symmetric(4).order == 24


def test_bad_tables_rejected():
    with pytest.raises(InvalidGroupSpec):
        gr.FiniteGroup([[0, 1], [0, 1]])
    # latin square that is not associative (order 5 loop)
    T = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(InvalidGroupSpec):
        gr.FiniteGroup(T)


def test_order_cap():
    with pytest.raises(BudgetExceeded):
        gr.FiniteGroup(gr.cyclic(10).table, budgets=Budgets(max_group_order=5))


def test_not_a_hom():
    with pytest.raises(InvalidGroupSpec):
        gr.GroupHom(gr.cyclic(3), gr.cyclic(3), [0, 1, 1])


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(NAMES), st.sampled_from(NAMES))
def test_hom_counts_match_bruteforce(small_groups, a, b):
    G, H = small_groups[a], small_groups[b]
    got = sorted(tuple(f.images) for f in gr.enumerate_homs(G, H))
    assert got == oracles.table_homs(G, H)


def test_known_hom_counts(small_groups):
    S3, Z2, Z3 = small_groups["S3"], small_groups["Z2"], small_groups["Z3"]
    assert len(gr.enumerate_homs(S3, S3)) == 10
    assert len(gr.enumerate_homs(S3, S3, surjective_only=True)) == 6
    assert len(gr.enumerate_homs(S3, Z2)) == 2
    assert len(gr.enumerate_homs(S3, Z3)) == 1


def test_quotient_and_abelianization(small_groups):
    S3 = small_groups["S3"]
    A3 = frozenset(S3.derived_subgroup)
    Q, proj = gr.quotient(S3, A3)
    assert Q.order == 2 and proj.kernel == A3
    assert gr.abelianization(small_groups["D8"]).form.cyclic_factors == (2, 2)
    assert gr.abelianization(small_groups["A4"]).form.cyclic_factors == (3,)
    assert gr.abelianization(small_groups["Q8"]).form.cyclic_factors == (2, 2)


def test_subgroup_counts(small_groups):
    # classical numbers of subgroups
    want = {"S3": 6, "D8": 10, "Q8": 6, "A4": 10, "V4": 5}
    for k, n in want.items():
        assert len(gr.all_subgroups(small_groups[k])) == n, k


def test_mobius_of_top_counts_generating_pairs(small_groups):
    # sum_K mu(K,G) |K|^2 = number of generating pairs; brute force it
    for k in ("S3", "V4", "Q8", "A4"):
        G = small_groups[k]
        subs = gr.all_subgroups(G)
        mu = gr.mobius_top(subs, frozenset(range(G.order)))
        lhs = sum(v * len(K) ** 2 for K, v in mu.items())
        rhs = sum(1 for a in range(G.order) for b in range(G.order) if len(G.closure([a, b])) == G.order)
        assert lhs == rhs, k


def test_isomorphism_test(small_groups):
    D8, Q8 = small_groups["D8"], small_groups["Q8"]
    assert not gr.isomorphism_test(D8, Q8)
    assert gr.isomorphism_test(gr.dihedral(3), small_groups["S3"])


def test_semidirect_embeddings():
    N, Q = gr.cyclic(3), gr.cyclic(2)
    B = gr.semidirect(N, Q, {Q.generators[0]: [0, 2, 1]})
    assert B.order == 6 and not B.is_abelian
    for a in range(3):
        for q in range(2):
            assert B.mul(B.embed_N[a], B.embed_Q[q]) == a + 3 * q


def test_parse_cycles():
    assert gr.parse_cycles("(1,2)(3,4,5)") == (1, 0, 3, 4, 2)
    assert gr.parse_cycles("(1,3)", degree=4) == (2, 1, 0, 3)
