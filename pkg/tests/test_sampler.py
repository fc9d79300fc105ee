from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gammastat.acceptance import level_z3, v4_order3
from gammastat.config import Budgets
from gammastat.errors import BudgetExceeded, PreconditionError
from gammastat.gamma import LevelSet
from gammastat.sampler import build_free_level_model, compare_to_exact, exact_class_probabilities, sample_batch

import oracles

_MODELS = {}


def model(n, which="z3"):
    if (n, which) not in _MODELS:
        C = level_z3() if which == "z3" else LevelSet([v4_order3()])
        _MODELS[n, which] = build_free_level_model(C.Gamma, C, n)
    return _MODELS[n, which]


def test_model_orders():
    # the free group of level Z/3-with-inversion is (Z/3)^n; for V4 it is F_4^n
    assert [model(n).admissible_image.order for n in (1, 2, 3)] == [3, 9, 27]
    assert model(2, "v4").admissible_image.order == 16
    assert model(2).admissible_image.admissible


def test_quotient_classes():
    assert sorted(model(2).classes) == ["1.1", "3.1", "9.1"]


@pytest.mark.parametrize("n,u", [(1, 0), (1, 1), (2, 0), (2, 1)])
def test_exhaustive_matches_span_law(n, u):
    b = sample_batch(model(n), u, 0, seed=0, exhaustive=True)
    law = oracles.elementary_quotient_law(3, n, u)
    want = {f"{3 ** k}.1": v for k, v in law.items()}
    assert b.frequencies() == want
    assert exact_class_probabilities(model(n), u) == {k: want.get(k, Fraction(0)) for k in model(n).classes}
    assert compare_to_exact(b).passed


def test_exhaustive_budget():
    with pytest.raises(BudgetExceeded):
        sample_batch(model(2), 2, 0, seed=0, exhaustive=True, budgets=Budgets(tuple_space=100))


def test_bad_arguments():
    with pytest.raises(PreconditionError):
        sample_batch(model(1), -1, 10, seed=1)
    with pytest.raises(PreconditionError):
        sample_batch(model(1), 0, 10, seed=None)
    with pytest.raises(PreconditionError):
        sample_batch(model(1), 0, 0, seed=1)


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32), st.integers(min_value=1, max_value=4))
def test_seeded_and_thread_invariant(seed, threads):
    a = sample_batch(model(2), 1, 3000, seed=seed, threads=1)
    b = sample_batch(model(2), 1, 3000, seed=seed, threads=threads)
    assert a.tally == b.tally
    assert sum(a.tally.values()) == 3000


def test_different_seeds_differ():
    a = sample_batch(model(2), 0, 5000, seed=1)
    b = sample_batch(model(2), 0, 5000, seed=2)
    assert a.tally != b.tally


def test_sampled_frequencies_close():
    b = sample_batch(model(2), 1, 20000, seed=11, threads=2)
    rep = compare_to_exact(b, tolerance_sigma=4.0)
    assert rep.passed, [(r.label, r.z) for r in rep.rows]
    assert rep.mass == 1


def test_v4_hom_counts():
    assert model(1, "v4").check_hom_counts() == [(4, 4)]
