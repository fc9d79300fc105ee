from fractions import Fraction

import pytest

from gammastat import groups as gr
from gammastat.acceptance import v4_order3, z3_inversion
from gammastat.correspondence import (decompose_surjections, enumerate_quadruples,
                                      section_renormalization_check)
from gammastat.gamma import GammaGroup

S3 = gr.symmetric(3)
TRIV = GammaGroup(gr.trivial_group(), gr.cyclic(2), [[0], [0]])


def brute_surjections(G, H):
    # plain surjections onto H x| Gamma; the composite to Gamma is then onto too
    return len(gr.enumerate_homs(G, H.semidirect, surjective_only=True))


CASES = [("S3", S3, z3_inversion(), 6), ("S3xZ3", gr.direct_product(S3, gr.cyclic(3)), z3_inversion(), 6),
         ("S3xS3", gr.direct_product(S3, S3), z3_inversion(), 12), ("A4", gr.alternating(4), v4_order3(), 24),
         ("S3 trivial H", S3, TRIV, 1)]


@pytest.mark.parametrize("name,G,H,want", CASES, ids=[c[0] for c in CASES])
def test_bijection_counts(name, G, H, want):
    rec = decompose_surjections(G, H)
    assert rec.consistent and rec.round_trip
    assert len(rec.surjections) == rec.independent_count == want
    assert len(enumerate_quadruples(G, H)) == want
    assert brute_surjections(G, H) == want


@pytest.mark.parametrize("name,G,H,want", CASES, ids=[c[0] for c in CASES])
def test_section_renormalization(name, G, H, want):
    rep = section_renormalization_check(G, H)
    assert rep.passed
    assert rep.renormalized_total == Fraction(want, len(H.y_image))


def test_sections_split_evenly():
    rep = section_renormalization_check(gr.direct_product(S3, gr.cyclic(3)), z3_inversion())
    # one (rho, N) pair: 3 sections, each carrying 2 isomorphisms
    assert list(rep.per_pair.values()) == [(3, [2, 2, 2])]


def test_quadruples_are_distinct():
    qs = enumerate_quadruples(gr.alternating(4), v4_order3())
    assert len(set(qs)) == len(qs)
