import pytest
from hypothesis import given, settings, strategies as st

from gammastat import groups as gr
from gammastat.acceptance import z3_inversion
from gammastat.errors import PreconditionError
from gammastat.hurwitz import (braid_orbits, braid_relations_hold, compare_semidirect, conway_parker_check,
                               count_fixed_components, enumerate_fixed_vectors, frobenius_fixed_check,
                               lattice_asymptotics, nielsen_tuples, q_lattice, sigma, sigma_inv)
from gammastat.schur import build_reduced_cover

import oracles

S3 = gr.symmetric(3)
TR = [x for x in range(6) if S3.orders[x] == 2]
A4 = gr.alternating(4)
C3A4 = [x for x in range(12) if A4.orders[x] == 3]


@pytest.mark.parametrize("G,c,n", [(S3, TR, 4), (S3, TR, 6), (A4, C3A4, 3), (A4, C3A4, 4),
                                   (gr.cyclic(2), [1], 4), (gr.cyclic(3), [1, 2], 5)],
                         ids=["S3-4", "S3-6", "A4-3", "A4-4", "Z2-4", "Z3-5"])
def test_orbit_counts(G, c, n):
    census = braid_orbits(G, c, n)
    assert len(census.orbits) == oracles.braid_orbit_count(G, c, n)
    assert sum(o.size for o in census.orbits) == census.total


def test_braid_relations():
    for n in range(2, 6):
        assert braid_relations_hold(S3, TR, n)
        assert braid_relations_hold(A4, C3A4, n)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from(TR), min_size=3, max_size=6), st.data())
def test_sigma_moves(t, data):
    t = tuple(t)
    i = data.draw(st.integers(min_value=0, max_value=len(t) - 2))
    s = sigma(S3, t, i)
    assert sigma_inv(S3, s, i) == t
    prod = lambda u: __import__("functools").reduce(S3.mul, u, S3.identity)
    assert prod(s) == prod(t)


def test_nielsen_tuples_generate():
    for t in nielsen_tuples(S3, TR, 4):
        assert len(S3.closure(list(t))) == 6


def test_conway_parker_for_transpositions():
    v = conway_parker_check(S3, TR, 6)
    assert v.passed
    assert all(o.invariant_constant for o in braid_orbits(S3, TR, 6, cover=build_reduced_cover(S3, TR)).orbits)


def z3_fixed_oracle(q, n):
    # K trivial; fixed vectors (a, b), a + b = n, a + 2b = 0 mod 3, matched by powering with q
    out = 0
    for a in range(n + 1):
        b = n - a
        if (a + 2 * b) % 3:
            continue
        if q % 3 == 2 and a != b:
            continue
        out += 1
    return out


@pytest.mark.parametrize("q", [2, 5, 7, 13])
def test_fixed_components_cyclic(q):
    cov = build_reduced_cover(gr.cyclic(3), [1, 2])
    for n in range(1, 16):
        assert count_fixed_components(cov, q, n) == z3_fixed_oracle(q, n), n


def test_fixed_components_depend_on_q_mod_order_squared():
    cov = build_reduced_cover(S3, TR)
    a4 = build_reduced_cover(A4, C3A4)
    for n in range(2, 9):
        assert count_fixed_components(cov, 5, n) == count_fixed_components(cov, 5 + 36, n)
        assert count_fixed_components(a4, 5, n) == count_fixed_components(a4, 5 + 144, n)


def test_frobenius_check():
    cov = build_reduced_cover(A4, C3A4)
    for q in (5, 7, 11):
        for n in (3, 6):
            a, b = frobenius_fixed_check(cov, q, n)
            assert a == b


def test_q_must_be_prime_to_order():
    cov = build_reduced_cover(S3, TR)
    with pytest.raises(PreconditionError):
        q_lattice(cov, 9)


def test_semidirect_comparison():
    H = z3_inversion()
    cmp = compare_semidirect(H, 5, range(1, 13))
    assert cmp.equal and cmp.class_bijection and cmp.abelianization_iso
    with pytest.raises(PreconditionError):
        compare_semidirect(H, 7, range(1, 3))      # 7 - 1 shares 3 with |H|


def test_lattice_asymptotics_z3():
    L = q_lattice(build_reduced_cover(gr.cyclic(3), [1, 2]), 7)
    r = lattice_asymptotics(L, range(1, 46))
    assert L.dimension == 2 and r.degree == 1 and r.period == 3
    assert all(r.counts[n] == z3_fixed_oracle(7, n) for n in r.counts)
    assert len(enumerate_fixed_vectors(L, 6)) >= r.counts[6]
